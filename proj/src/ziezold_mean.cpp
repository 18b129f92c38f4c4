#include "shapegeo/ziezold_mean.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace shapegeo {

namespace {
constexpr double kPi = std::numbers::pi;
}

GroupElement GroupElement::inverse() const {
  // Rotations invert by negating the angle; reflections are involutions.
  return {-t, eps == +1 ? -phi : phi, eps};
}

PreGeodesic apply_group(const GroupElement& g, const PreGeodesic& P) {
  const double c = std::cos(g.phi);
  const double s = std::sin(g.phi);
  const std::complex<double> rot = std::polar(1.0, g.t);
  const double e = static_cast<double>(g.eps);
  return {rot * (P.x * c + P.v * s), rot * (e * (P.v * c - P.x * s))};
}

double ambient_distance_d(const PreGeodesic& P, const PreGeodesic& Q) {
  return std::sqrt((P.x - Q.x).squaredNorm() + (P.v - Q.v).squaredNorm());
}

OptimalPosition optimal_position(const PreGeodesic& P, const PreGeodesic& Q) {
  double best_val = -std::numeric_limits<double>::infinity();
  GroupElement best;
  for (const int eps : {+1, -1}) {
    const double e = eps;
    const double A = rip(P.x, Q.x) + e * rip(P.v, Q.v);
    const double B = rip(P.x, Q.v) - e * rip(P.v, Q.x);
    const double C = iip(P.x, Q.x) + e * iip(P.v, Q.v);
    const double D = iip(P.x, Q.v) - e * iip(P.v, Q.x);

    // Stationary rotations of the phi-maximized objective
    // h(t)^2 = (A cos t + C sin t)^2 + (B cos t + D sin t)^2, plus safety
    // candidates; the winner is picked by explicit evaluation, never from
    // the stationarity conditions alone.
    std::vector<double> ts{0.0, kPi / 2, kPi, 3 * kPi / 2};
    const double cross = A * C + B * D;
    const double diff = A * A + B * B - C * C - D * D;
    if (std::abs(cross) > 1e-12) {
      const double alpha = -diff / (2.0 * cross);
      const double root = std::sqrt(alpha * alpha + 1.0);
      for (const double r : {alpha + root, alpha - root}) {
        const double t = std::atan(r);
        ts.push_back(t);
        ts.push_back(t + kPi);
      }
    } else if (std::abs(diff) <= 1e-12) {
      for (int i = 0; i < 64; ++i) ts.push_back(2 * kPi * i / 64.0);
    }
    for (const double t : ts) {
      const double ct = std::cos(t);
      const double st = std::sin(t);
      const double u = A * ct + C * st;
      const double w = B * ct + D * st;
      const double val = std::hypot(u, w);
      if (val > best_val) {
        best_val = val;
        best = {t, std::atan2(w, u), eps};
      }
    }
  }
  OptimalPosition out;
  out.g = best;
  out.aligned = apply_group(best, Q);
  out.dist = ambient_distance_d(P, out.aligned);
  return out;
}

double ziezold_distance(const PreGeodesic& P, const PreGeodesic& Q) {
  return optimal_position(P, Q).dist;
}

PreGeodesic project_to_pregeodesics(const Cvec& x, const Cvec& v) {
  // O2^H(2,k-1) is the complex Stiefel manifold V_2(C^{k-1}) and the ambient
  // metric is the Frobenius distance, so the nearest point is the polar
  // factor of M = [x v]; it satisfies the minimizer branch of the
  // fixed-point equations exactly (nonnegative <x,zeta>, <v,eta>).
  Eigen::MatrixXcd M(x.size(), 2);
  M.col(0) = x;
  M.col(1) = v;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv[1] <= 1e-12 * std::max(sv[0], 1.0)) throw DegenerateProjection();
  const Eigen::MatrixXcd U = svd.matrixU() * svd.matrixV().adjoint();
  return {U.col(0), U.col(1)};
}

namespace {

ZiezoldMeanResult mean_from_start(const std::vector<PreGeodesic>& inputs,
                                  std::size_t start) {
  const std::size_t J = inputs.size();
  ZiezoldMeanResult res;
  PreGeodesic P = inputs[start];
  for (int it = 0; it < 200; ++it) {
    std::vector<PreGeodesic> aligned;
    aligned.reserve(J);
    double obj = 0;
    for (const PreGeodesic& Q : inputs) {
      OptimalPosition o = optimal_position(P, Q);
      obj += o.dist * o.dist;
      aligned.push_back(std::move(o.aligned));
    }
    res.objective_trace.push_back(obj);
    Cvec mx = Cvec::Zero(P.x.size());
    Cvec mv = Cvec::Zero(P.v.size());
    for (const PreGeodesic& Q : aligned) {
      mx += Q.x;
      mv += Q.v;
    }
    PreGeodesic next = project_to_pregeodesics(mx / double(J), mv / double(J));
    const double step = ziezold_distance(P, next);
    P = std::move(next);
    ++res.iterations;
    if (step < 1e-10) {
      res.converged = true;
      break;
    }
  }
  res.mean = std::move(P);
  res.objective = 0;
  res.aligned_inputs.clear();
  res.aligned_inputs.reserve(J);
  for (const PreGeodesic& Q : inputs) {
    OptimalPosition o = optimal_position(res.mean, Q);
    res.objective += o.dist * o.dist;
    res.aligned_inputs.push_back(std::move(o.aligned));
  }
  res.objective_trace.push_back(res.objective);
  return res;
}

}  // namespace

ZiezoldMeanResult mean_geodesic(const std::vector<PreGeodesic>& inputs) {
  if (inputs.empty()) throw InsufficientSamples("mean_geodesic: empty input");
  // Multi-start over all inputs for small samples, first input otherwise.
  const std::size_t nstarts = inputs.size() <= 25 ? inputs.size() : 1;
  ZiezoldMeanResult best;
  bool have = false;
  for (std::size_t s = 0; s < nstarts; ++s) {
    ZiezoldMeanResult r = mean_from_start(inputs, s);
    if (!have || r.objective < best.objective) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

double frechet_objective(const std::vector<PreGeodesic>& inputs,
                         const PreGeodesic& candidate) {
  double s = 0;
  for (const PreGeodesic& Q : inputs) {
    const double d = ziezold_distance(Q, candidate);
    s += d * d;
  }
  return s;
}

}  // namespace shapegeo
