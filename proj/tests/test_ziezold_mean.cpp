#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"

using namespace shapegeo;
using th::kPi;

TEST_CASE("apply_group identity, inverse and isometry") {
  Rng rng(41);
  const PreGeodesic P = th::random_pregeodesic(rng);

  const PreGeodesic id = apply_group(GroupElement{}, P);
  CHECK((id.x - P.x).norm() < 1e-15);
  CHECK((id.v - P.v).norm() < 1e-15);

  for (int rep = 0; rep < 100; ++rep) {
    const GroupElement g = th::random_group(rng);
    const PreGeodesic Q = apply_group(g, P);
    CHECK(constraint_residual(Q) < 1e-14);  // action preserves the manifold
    const PreGeodesic back = apply_group(g.inverse(), Q);
    CHECK((back.x - P.x).norm() < 1e-14);
    CHECK((back.v - P.v).norm() < 1e-14);
  }

  const PreGeodesic R = th::random_pregeodesic(rng);
  for (int rep = 0; rep < 100; ++rep) {
    const GroupElement g = th::random_group(rng);
    CHECK(std::abs(ambient_distance_d(P, R) -
                   ambient_distance_d(apply_group(g, P), apply_group(g, R))) < 1e-12);
  }
}

TEST_CASE("ambient_distance_d metric facts") {
  Rng rng(42);
  const PreGeodesic P = th::random_pregeodesic(rng);
  CHECK(ambient_distance_d(P, P) == 0.0);

  const PreGeodesic neg{-P.x, -P.v};
  CHECK(ambient_distance_d(P, neg) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-14));

  for (int rep = 0; rep < 100; ++rep) {
    const PreGeodesic A = th::random_pregeodesic(rng);
    const PreGeodesic B = th::random_pregeodesic(rng);
    const PreGeodesic C = th::random_pregeodesic(rng);
    CHECK(ambient_distance_d(A, C) <=
          ambient_distance_d(A, B) + ambient_distance_d(B, C) + 1e-12);
    // d^2 = 4 - 2(<x,y> + <v,w>) on pre-geodesics
    const double d = ambient_distance_d(A, B);
    CHECK(std::abs(d * d - (4.0 - 2.0 * (rip(A.x, B.x) + rip(A.v, B.v)))) < 1e-12);
  }
}

TEST_CASE("optimal_position trivial and orbit cases") {
  Rng rng(43);
  const PreGeodesic P = th::random_pregeodesic(rng);

  const OptimalPosition same = optimal_position(P, P);
  CHECK(same.dist < 1e-12);

  for (int rep = 0; rep < 50; ++rep) {
    const GroupElement g0 = th::random_group(rng);
    const OptimalPosition o = optimal_position(P, apply_group(g0, P));
    CHECK(o.dist < 1e-10);
  }
}

TEST_CASE("optimal_position objective identity at the returned element") {
  Rng rng(44);
  for (int rep = 0; rep < 50; ++rep) {
    const PreGeodesic P = th::random_pregeodesic(rng);
    const PreGeodesic Q = th::random_pregeodesic(rng);
    const OptimalPosition o = optimal_position(P, Q);
    const double eps = o.g.eps;
    const double A = rip(P.x, Q.x) + eps * rip(P.v, Q.v);
    const double B = rip(P.x, Q.v) - eps * rip(P.v, Q.x);
    const double C = iip(P.x, Q.x) + eps * iip(P.v, Q.v);
    const double D = iip(P.x, Q.v) - eps * iip(P.v, Q.x);
    const double obj = A * std::cos(o.g.phi) * std::cos(o.g.t) +
                       B * std::sin(o.g.phi) * std::cos(o.g.t) +
                       C * std::cos(o.g.phi) * std::sin(o.g.t) +
                       D * std::sin(o.g.phi) * std::sin(o.g.t);
    CHECK(std::abs((4.0 - o.dist * o.dist) / 2.0 - obj) < 1e-10);
    // the aligned output really is apply_group(g, Q)
    const PreGeodesic again = apply_group(o.g, Q);
    CHECK((again.x - o.aligned.x).norm() < 1e-12);
    CHECK((again.v - o.aligned.v).norm() < 1e-12);
    CHECK(std::abs(ambient_distance_d(P, o.aligned) - o.dist) < 1e-12);
  }
}

TEST_CASE("optimal_position beats an exhaustive grid") {
  Rng rng(45);
  for (int rep = 0; rep < 8; ++rep) {
    const PreGeodesic P = th::random_pregeodesic(rng);
    const PreGeodesic Q = th::random_pregeodesic(rng);
    const double mine = ziezold_distance(P, Q);
    const double grid = th::ziezold_grid(P, Q, 360, 360);
    CHECK(mine <= grid + 1e-10);
    CHECK(grid - mine < 1e-3);  // grid resolution sanity
  }
}

TEST_CASE("ziezold_distance is a metric on orbits") {
  Rng rng(46);
  for (int rep = 0; rep < 200; ++rep) {
    const PreGeodesic P = th::random_pregeodesic(rng);
    const PreGeodesic Q = th::random_pregeodesic(rng);
    CHECK(std::abs(ziezold_distance(P, Q) - ziezold_distance(Q, P)) < 1e-10);
  }
  for (int rep = 0; rep < 200; ++rep) {
    const PreGeodesic A = th::random_pregeodesic(rng);
    const PreGeodesic B = th::random_pregeodesic(rng);
    const PreGeodesic C = th::random_pregeodesic(rng);
    CHECK(ziezold_distance(A, C) <=
          ziezold_distance(A, B) + ziezold_distance(B, C) + 1e-10);
  }
  const PreGeodesic P = th::random_pregeodesic(rng);
  CHECK(ziezold_distance(P, apply_group(th::random_group(rng), P)) < 1e-10);
}

TEST_CASE("simultaneous action is an isometry of d") {
  Rng rng(47);
  for (int rep = 0; rep < 200; ++rep) {
    const PreGeodesic P = th::random_pregeodesic(rng);
    const PreGeodesic Q = th::random_pregeodesic(rng);
    const GroupElement g = th::random_group(rng);
    CHECK(std::abs(ambient_distance_d(P, Q) -
                   ambient_distance_d(apply_group(g, P), apply_group(g, Q))) < 1e-12);
  }
}

namespace {

// KKT residual of min ||x-z||^2 + ||v-e||^2 subject to Phi = 0: the error
// vector (x-z, v-e) must lie in the span of the four constraint gradients
// {(z,0),(0,e),(e,z),(ie,-iz)} at the projection (z,e).
double kkt_residual(const Cvec& x, const Cvec& v, const PreGeodesic& p) {
  const Eigen::Index m = x.size();
  const std::complex<double> I{0.0, 1.0};
  Eigen::MatrixXd N(4 * m, 4);
  Eigen::VectorXd err(4 * m);
  const auto put = [m](Eigen::Ref<Eigen::VectorXd> dst, const Cvec& a, const Cvec& b) {
    dst.head(2 * m) = embed(a);
    dst.tail(2 * m) = embed(b);
  };
  put(N.col(0), p.x, Cvec::Zero(m));
  put(N.col(1), Cvec::Zero(m), p.v);
  put(N.col(2), p.v, p.x);
  put(N.col(3), I * p.v, -I * p.x);
  put(err, x - p.x, v - p.v);
  const Eigen::VectorXd coef = N.colPivHouseholderQr().solve(err);
  return (err - N * coef).norm();
}

}  // namespace

TEST_CASE("project_to_pregeodesics fixed points and scaling") {
  Rng rng(48);
  const PreGeodesic g = th::random_pregeodesic(rng);

  const PreGeodesic same = project_to_pregeodesics(g.x, g.v);
  CHECK((same.x - g.x).norm() < 1e-14);
  CHECK((same.v - g.v).norm() < 1e-14);

  const PreGeodesic scaled = project_to_pregeodesics(2.0 * g.x, 3.0 * g.v);
  CHECK((scaled.x - g.x).norm() < 1e-12);
  CHECK((scaled.v - g.v).norm() < 1e-12);

  CHECK_THROWS_AS(
      project_to_pregeodesics(g.x, std::complex<double>(0.0, 2.0) * g.x),
      DegenerateProjection);
}

TEST_CASE("project_to_pregeodesics satisfies the fixed-point equations") {
  Rng rng(49);
  for (int rep = 0; rep < 50; ++rep) {
    const PreGeodesic g = th::random_pregeodesic(rng);
    const Cvec x = g.x + rng.cgaussian(3, 0.3);
    const Cvec v = g.v + rng.cgaussian(3, 0.3);
    const PreGeodesic p = project_to_pregeodesics(x, v);
    CHECK(constraint_residual(p) < 1e-10);
    CHECK(kkt_residual(x, v, p) < 1e-8);
    // minimizer branch signs
    CHECK(rip(x, p.x) >= 0.0);
    CHECK(rip(v, p.v) >= 0.0);
    // fixed-point form: zeta = (x - <x,eta>eta - <x,i eta>i eta)/<x,zeta>
    const std::complex<double> I{0.0, 1.0};
    const Cvec zrhs =
        (x - rip(x, p.v) * p.v - iip(x, p.v) * (I * p.v)) / rip(x, p.x);
    const Cvec erhs =
        (v - rip(v, p.x) * p.x - iip(v, p.x) * (I * p.x)) / rip(v, p.v);
    CHECK((p.x - zrhs).norm() < 1e-8);
    CHECK((p.v - erhs).norm() < 1e-8);
  }
}

TEST_CASE("projection beats random feasible candidates") {
  Rng rng(50);
  for (int rep = 0; rep < 20; ++rep) {
    const PreGeodesic g = th::random_pregeodesic(rng);
    const Cvec x = g.x + rng.cgaussian(3, 0.25);
    const Cvec v = g.v + rng.cgaussian(3, 0.25);
    const PreGeodesic p = project_to_pregeodesics(x, v);
    const PreGeodesic input{x, v};
    const double mine = ambient_distance_d(input, p);
    for (int c = 0; c < 100; ++c) {
      const double s = c % 2 ? 0.01 : 0.3;
      PreGeodesic cand;
      try {
        cand = make_pregeodesic(p.x + rng.cgaussian(3, s), p.v + rng.cgaussian(3, s));
      } catch (const Error&) {
        continue;
      }
      CHECK(ambient_distance_d(input, cand) >= mine - 1e-12);
    }
  }
}

TEST_CASE("mean_geodesic recovers a single orbit and is permutation invariant") {
  Rng rng(51);
  const PreGeodesic g = th::random_pregeodesic(rng);
  std::vector<PreGeodesic> copies;
  for (int j = 0; j < 6; ++j) copies.push_back(apply_group(th::random_group(rng), g));
  const ZiezoldMeanResult res = mean_geodesic(copies);
  CHECK(res.converged);
  CHECK(ziezold_distance(res.mean, g) < 1e-8);
  CHECK(res.objective < 1e-12);

  std::vector<PreGeodesic> inputs;
  for (int j = 0; j < 7; ++j) inputs.push_back(th::perturbed_pregeodesic(g, 0.25, rng));
  const ZiezoldMeanResult m1 = mean_geodesic(inputs);
  std::vector<PreGeodesic> perm = inputs;
  std::rotate(perm.begin(), perm.begin() + 3, perm.end());
  const ZiezoldMeanResult m2 = mean_geodesic(perm);
  CHECK(ziezold_distance(m1.mean, m2.mean) < 1e-6);
}

TEST_CASE("mean_geodesic objective properties") {
  Rng rng(52);
  const PreGeodesic g = th::random_pregeodesic(rng);
  std::vector<PreGeodesic> inputs;
  for (int j = 0; j < 2; ++j) inputs.push_back(th::perturbed_pregeodesic(g, 0.4, rng));
  const ZiezoldMeanResult res = mean_geodesic(inputs);

  // objective at the mean is below both inputs and random candidates
  CHECK(res.objective <= frechet_objective(inputs, inputs[0]) + 1e-10);
  CHECK(res.objective <= frechet_objective(inputs, inputs[1]) + 1e-10);
  for (int c = 0; c < 100; ++c)
    CHECK(res.objective <=
          frechet_objective(inputs, th::perturbed_pregeodesic(res.mean, 0.1, rng)) + 1e-10);

  // the trace is monotone non-increasing and ends at the reported objective
  REQUIRE(!res.objective_trace.empty());
  for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
    CHECK(res.objective_trace[i] <= res.objective_trace[i - 1] + 1e-12);
  CHECK(res.objective_trace.back() == doctest::Approx(res.objective).epsilon(1e-12));

  // invariant: objective recomputed from aligned_inputs matches
  REQUIRE(res.aligned_inputs.size() == inputs.size());
  double direct = 0;
  for (const auto& a : res.aligned_inputs) {
    const double d = ambient_distance_d(res.mean, a);
    direct += d * d;
  }
  CHECK(std::abs(direct - res.objective) <= 1e-12 * std::max(1.0, res.objective));
}

TEST_CASE("mean_geodesic is equivariant under a common group element") {
  Rng rng(53);
  const PreGeodesic g = th::random_pregeodesic(rng);
  std::vector<PreGeodesic> inputs;
  for (int j = 0; j < 5; ++j) inputs.push_back(th::perturbed_pregeodesic(g, 0.2, rng));
  const GroupElement h = th::random_group(rng);
  std::vector<PreGeodesic> moved;
  for (const auto& p : inputs) moved.push_back(apply_group(h, p));
  const ZiezoldMeanResult m1 = mean_geodesic(inputs);
  const ZiezoldMeanResult m2 = mean_geodesic(moved);
  CHECK(ziezold_distance(m1.mean, m2.mean) < 1e-6);
}

TEST_CASE("frechet_objective basics") {
  Rng rng(54);
  const PreGeodesic g = th::random_pregeodesic(rng);
  CHECK(frechet_objective({g}, apply_group(th::random_group(rng), g)) < 1e-18);

  std::vector<PreGeodesic> inputs;
  for (int j = 0; j < 3; ++j) inputs.push_back(th::random_pregeodesic(rng));
  const PreGeodesic cand = th::random_pregeodesic(rng);
  double hand = 0;
  for (const auto& p : inputs) {
    const double d = ziezold_distance(p, cand);
    hand += d * d;
  }
  CHECK(frechet_objective(inputs, cand) == doctest::Approx(hand).epsilon(1e-12));
  CHECK(std::abs(frechet_objective(inputs, apply_group(th::random_group(rng), cand)) -
                 hand) < 1e-8);
}
