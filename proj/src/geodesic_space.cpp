#include "shapegeo/geodesic_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "shapegeo/rng.hpp"
#include "shapegeo/ziezold_mean.hpp"

namespace shapegeo {

namespace {
constexpr double kPi = std::numbers::pi;
}

double constraint_residual(const PreGeodesic& g) {
  return std::max({std::abs(g.x.squaredNorm() - 1.0), std::abs(g.v.squaredNorm() - 1.0),
                   std::abs(rip(g.x, g.v)), std::abs(iip(g.x, g.v))});
}

PreGeodesic make_pregeodesic(Cvec x, Cvec v) {
  const double nx = x.norm();
  if (nx <= 0.0) throw ZeroNorm("make_pregeodesic: zero base point");
  x /= nx;
  // Complex projection removes both the <v,x> and <v,ix> components at once.
  v -= hdot(v, x) * x;
  const double nv = v.norm();
  if (nv < 1e-12) throw DegenerateDirection();
  v /= nv;
  return {std::move(x), std::move(v)};
}

PreShape point_on_geodesic(const PreGeodesic& g, double t) {
  return PreShape{g.x * std::cos(t) + g.v * std::sin(t)};
}

double rho(const PreShape& p, const PreGeodesic& g) {
  const double a = rip(g.x, p.z);
  const double b = iip(g.x, p.z);
  const double c = rip(g.v, p.z);
  const double d = iip(g.v, p.z);
  const double A2 = a * a + c * c;
  const double B2 = b * b + d * d;
  const double D = 2.0 * (a * b + c * d);
  const double arg =
      0.5 * (A2 + B2) + std::sqrt(0.25 * (A2 - B2) * (A2 - B2) + 0.25 * D * D);
  return std::acos(std::sqrt(std::clamp(arg, 0.0, 1.0)));
}

FootPoint foot_point(const PreShape& p, const PreGeodesic& g) {
  // Squared alignment objective F(s) = Re(e^{is}U)^2 + Re(e^{is}V)^2 has
  // amplitude |U^2+V^2| around its mean; a flat objective means every
  // rotation gives a different nearest arc point.
  const std::complex<double> U = hdot(p.z, g.x);
  const std::complex<double> V = hdot(p.z, g.v);
  const std::complex<double> W = U * U + V * V;
  if (std::abs(W) < 1e-10) throw NonUniqueFoot();
  double s = -0.5 * std::arg(W);
  const std::complex<double> e = std::polar(1.0, s);
  const double f1 = (e * U).real();
  const double f2 = (e * V).real();
  double t = std::fmod(std::atan2(f2, f1), kPi);
  if (t < 0) t += kPi;
  // Keep the representative with nonnegative alignment at t.
  if (f1 * std::cos(t) + f2 * std::sin(t) < 0) s += kPi;
  return {t, s};
}

PreGeodesic geodesic_through(const PreShape& p1, const PreShape& p2) {
  const double d = shape_distance(p1, p2);
  if (d < 1e-7) throw IdenticalShapes();
  if (d >= kPi / 2 - 1e-10) throw AntipodalShapes();
  const AlignResult a = align_rotation(p1, p2);
  return make_pregeodesic(p1.z, a.aligned.z);
}

namespace {

Eigen::VectorXd embed_pair(const PreGeodesic& g) {
  Eigen::VectorXd r(4 * g.x.size());
  r.head(2 * g.x.size()) = embed(g.x);
  r.tail(2 * g.x.size()) = embed(g.v);
  return r;
}

PreGeodesic unembed_pair(const Eigen::VectorXd& r) {
  const Eigen::Index h = r.size() / 2;
  return make_pregeodesic(unembed(r.head(h)), unembed(r.tail(h)));
}

double objective(const std::vector<PreShape>& shapes, const PreGeodesic& g) {
  double s = 0;
  for (const PreShape& p : shapes) {
    const double r = rho(p, g);
    s += r * r;
  }
  return s;
}

struct LocalFit {
  PreGeodesic g;
  double obj = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Projected gradient descent with central differences through the
// Gram-Schmidt retraction and Armijo backtracking.
LocalFit minimize(const std::vector<PreShape>& shapes, PreGeodesic g,
                  const GpcOptions& opts) {
  constexpr double kH = 1e-6;
  constexpr double kArmijoC = 1e-4;
  LocalFit fit;
  double f = objective(shapes, g);
  double step = 1.0;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    if (f <= 1e-24) {
      fit.converged = true;
      break;
    }
    Eigen::VectorXd theta = embed_pair(g);
    Eigen::VectorXd grad(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      Eigen::VectorXd tp = theta;
      tp[i] += kH;
      const double fp = objective(shapes, unembed_pair(tp));
      tp[i] = theta[i] - kH;
      const double fm = objective(shapes, unembed_pair(tp));
      grad[i] = (fp - fm) / (2 * kH);
    }
    const double g2 = grad.squaredNorm();
    if (g2 == 0) {
      fit.converged = true;
      break;
    }
    double alpha = std::min(1.0, 2 * step);
    PreGeodesic cand = g;
    double fc = f;
    bool improved = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      try {
        cand = unembed_pair(Eigen::VectorXd(theta - alpha * grad));
        fc = objective(shapes, cand);
        if (fc <= f - kArmijoC * alpha * g2) {
          improved = true;
          break;
        }
      } catch (const DegenerateDirection&) {
        // step walked into the degenerate cone; shrink and retry
      }
      alpha *= 0.5;
    }
    if (!improved) {
      fit.converged = true;
      break;
    }
    step = alpha;
    g = cand;
    const double decrease = f - fc;
    f = fc;
    if (decrease < opts.rel_tol * std::max(f, 1e-300)) {
      fit.converged = true;
      ++it;
      break;
    }
  }
  fit.g = std::move(g);
  fit.obj = f;
  fit.iterations = it;
  return fit;
}

}  // namespace

GpcFit fit_gpc(const std::vector<PreShape>& shapes, const GpcOptions& opts) {
  if (shapes.size() < 2) throw InsufficientSamples("fit_gpc: need at least 2 shapes");

  // Smart initializer: Procrustes mean + first tangent principal direction.
  const PreShape mean = procrustes_mean(shapes);
  const Eigen::Index q = 2 * mean.z.size();
  Eigen::MatrixXd M2 = Eigen::MatrixXd::Zero(q, q);
  for (const PreShape& p : shapes) {
    const Eigen::VectorXd r = tangent_coords(mean, p);
    M2 += r * r.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M2);
  if (es.eigenvalues()[q - 1] < 1e-24) throw DegenerateDirection("fit_gpc: shapes coincide");
  const Cvec v0 = unembed(es.eigenvectors().col(q - 1));
  const PreGeodesic init = make_pregeodesic(mean.z, v0);

  std::vector<LocalFit> fits;
  for (int s = 0; s < std::max(1, opts.restarts); ++s) {
    PreGeodesic start = init;
    if (s > 0) {
      Rng rng(substream(opts.seed, 0x6bc0u, static_cast<std::uint64_t>(s)));
      start = make_pregeodesic(init.x + rng.cgaussian(mean.z.size(), 0.3),
                               init.v + rng.cgaussian(mean.z.size(), 0.3));
    }
    fits.push_back(minimize(shapes, start, opts));
  }
  std::size_t best = 0;
  for (std::size_t s = 1; s < fits.size(); ++s)
    if (fits[s].obj < fits[best].obj) best = s;

  GpcFit out;
  out.geodesic = fits[best].g;
  out.iterations = fits[best].iterations;
  out.converged = fits[best].converged;
  out.residuals.resize(shapes.size());
  out.foot_params.resize(shapes.size());
  out.wellposed = true;
  for (std::size_t j = 0; j < shapes.size(); ++j) {
    out.residuals[j] = rho(shapes[j], out.geodesic);
    if (out.residuals[j] >= kPi / 4) out.wellposed = false;
    try {
      out.foot_params[j] = foot_point(shapes[j], out.geodesic).t;
    } catch (const NonUniqueFoot&) {
      out.foot_params[j] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  out.objective = out.residuals.squaredNorm();
  for (std::size_t a = 0; a < fits.size(); ++a)
    for (std::size_t b = a + 1; b < fits.size(); ++b)
      out.multistart_dispersion =
          std::max(out.multistart_dispersion, ziezold_distance(fits[a].g, fits[b].g));
  return out;
}

}  // namespace shapegeo
