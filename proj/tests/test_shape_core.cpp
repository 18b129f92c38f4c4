#include <doctest.h>

#include "helpers.hpp"

using namespace shapegeo;
using th::kPi;

namespace {

Configuration square() {
  Configuration cfg;
  cfg.landmarks.resize(4);
  cfg.landmarks << std::complex<double>(1, 1), std::complex<double>(-1, 1),
      std::complex<double>(-1, -1), std::complex<double>(1, -1);
  return cfg;
}

}  // namespace

TEST_CASE("helmert_center rejects degenerate configurations") {
  Configuration cfg;
  cfg.landmarks = Cvec::Constant(4, std::complex<double>(1, 2));
  CHECK_THROWS_AS(helmert_center(cfg), AllLandmarksCoincide);
  Configuration two;
  two.landmarks = Cvec::Ones(2);
  CHECK_THROWS_AS(helmert_center(two), Error);
}

TEST_CASE("helmert_center is translation invariant") {
  Rng rng(11);
  Configuration cfg;
  cfg.landmarks = rng.cgaussian(5);
  Configuration shifted = cfg;
  shifted.landmarks.array() += std::complex<double>(3.25, -1.5);
  CHECK((helmert_center(cfg) - helmert_center(shifted)).norm() < 1e-12);
}

TEST_CASE("helmert_center matches the frozen unit-square oracle") {
  // Frozen one-time direct H-matrix product (tools/make_oracles.py).
  const Cvec w = helmert_center(square());
  CHECK(std::abs(w[0] - std::complex<double>(1.4142135623730949, 0.0)) < 1e-14);
  CHECK(std::abs(w[1] - std::complex<double>(0.81649658092772603, 1.6329931618554523)) < 1e-14);
  CHECK(std::abs(w[2] - std::complex<double>(-1.1547005383792517, 1.1547005383792517)) < 1e-14);
  CHECK(w.norm() == doctest::Approx(2.8284271247461903).epsilon(1e-14));
}

TEST_CASE("sub_helmert rows are orthonormal") {
  for (int k = 3; k <= 8; ++k) {
    const Eigen::MatrixXd H = sub_helmert(k);
    CHECK((H * H.transpose() - Eigen::MatrixXd::Identity(k - 1, k - 1)).norm() < 1e-14);
    CHECK(H.rowwise().sum().norm() < 1e-14);  // rows kill translations
  }
}

TEST_CASE("to_preshape normalizes and is scale invariant") {
  Rng rng(12);
  const Cvec w = rng.cgaussian(3);
  const PreShape a = to_preshape(w);
  CHECK(a.z.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((to_preshape(a.z).z - a.z).norm() < 1e-15);               // idempotent
  CHECK((to_preshape(5.0 * w).z - a.z).norm() < 1e-14);           // scale free
  Cvec explicit_w(3);
  explicit_w << std::complex<double>(3, 0), std::complex<double>(0, 4),
      std::complex<double>(0, 0);
  const PreShape b = to_preshape(explicit_w);
  CHECK(std::abs(b.z[0] - std::complex<double>(0.6, 0.0)) < 1e-15);
  CHECK(std::abs(b.z[1] - std::complex<double>(0.0, 0.8)) < 1e-15);
  CHECK(std::abs(b.z[2]) < 1e-15);
  CHECK_THROWS_AS(to_preshape(Cvec::Zero(3)), ZeroNorm);
}

TEST_CASE("shape_distance basics and grid oracle") {
  Rng rng(13);
  const PreShape z = th::random_preshape(rng);
  const PreShape rot{std::polar(1.0, 0.7) * z.z};
  CHECK(shape_distance(z, rot) < 1e-12);

  PreShape e1{Cvec::Zero(3)}, e2{Cvec::Zero(3)};
  e1.z[0] = 1.0;
  e2.z[1] = 1.0;
  CHECK(shape_distance(e1, e2) == doctest::Approx(kPi / 2).epsilon(1e-14));

  for (int rep = 0; rep < 20; ++rep) {
    const PreShape a = th::random_preshape(rng);
    const PreShape b = th::random_preshape(rng);
    // minimize arccos<e^{it}a, b> over a 10^4-point grid
    double best = -1.0;
    const std::complex<double> h = hdot(a.z, b.z);
    for (int i = 0; i < 10000; ++i)
      best = std::max(best, (std::polar(1.0, 2 * kPi * i / 10000.0) * h).real());
    CHECK(std::abs(shape_distance(a, b) - std::acos(std::min(1.0, best))) < 1e-6);
  }
}

TEST_CASE("shape_distance is rotation invariant in both arguments") {
  Rng rng(14);
  for (int rep = 0; rep < 100; ++rep) {
    const PreShape a = th::random_preshape(rng);
    const PreShape b = th::random_preshape(rng);
    const double s = rng.uniform(0.0, 2 * kPi), t = rng.uniform(0.0, 2 * kPi);
    const PreShape ar{std::polar(1.0, s) * a.z};
    const PreShape br{std::polar(1.0, t) * b.z};
    CHECK(std::abs(shape_distance(a, b) - shape_distance(ar, br)) < 1e-12);
  }
}

TEST_CASE("align_rotation recovers rotations and flags degeneracy") {
  Rng rng(15);
  const PreShape target = th::random_preshape(rng);

  const AlignResult same = align_rotation(target, target);
  CHECK(!same.undefined);
  CHECK(std::abs(same.t) < 1e-12);
  CHECK((same.aligned.z - target.z).norm() < 1e-12);

  const PreShape rotated{std::polar(1.0, -0.3) * target.z};
  const AlignResult r = align_rotation(target, rotated);
  CHECK(!r.undefined);
  CHECK(std::fmod(std::abs(r.t - 0.3), 2 * kPi) < 1e-12);
  CHECK((r.aligned.z - target.z).norm() < 1e-12);

  // aligned has nonnegative-real, zero-imaginary inner product with target
  const PreShape z = th::random_preshape(rng);
  const AlignResult a = align_rotation(target, z);
  const std::complex<double> h = hdot(a.aligned.z, target.z);
  CHECK(h.real() >= 0.0);
  CHECK(std::abs(h.imag()) < 1e-12);

  // complex-orthogonal input: flag raised
  PreShape e1{Cvec::Zero(3)}, e2{Cvec::Zero(3)};
  e1.z[0] = 1.0;
  e2.z[1] = 1.0;
  const AlignResult u = align_rotation(e1, e2);
  CHECK(u.undefined);
  CHECK(u.t == 0.0);
}

TEST_CASE("procrustes_mean recovers a common shape and is equivariant") {
  Rng rng(16);
  const PreShape z = th::random_preshape(rng);
  std::vector<PreShape> copies;
  for (int j = 0; j < 7; ++j)
    copies.push_back(PreShape{std::polar(1.0, rng.uniform(0.0, 2 * kPi)) * z.z});
  CHECK(shape_distance(procrustes_mean(copies), z) < 1e-10);

  std::vector<PreShape> shapes;
  for (int j = 0; j < 9; ++j) shapes.push_back(th::random_preshape(rng));
  const PreShape m1 = procrustes_mean(shapes);
  std::vector<PreShape> rotated;
  for (const auto& s : shapes) rotated.push_back(PreShape{std::polar(1.0, 1.1) * s.z});
  CHECK(shape_distance(m1, procrustes_mean(rotated)) < 1e-10);
}

TEST_CASE("procrustes_mean of two shapes lies on their geodesic") {
  Rng rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const PreShape a = th::random_preshape(rng);
    PreShape b = th::random_preshape(rng);
    if (shape_distance(a, b) >= kPi / 2 - 1e-6) continue;
    const PreGeodesic g = geodesic_through(a, b);
    // rho's arccos(sqrt(.)) form floors out at sqrt(machine eps).
    CHECK(rho(procrustes_mean({a, b}), g) < 1e-7);
  }
}

TEST_CASE("procrustes_mean objective beats random perturbations") {
  Rng rng(18);
  std::vector<PreShape> shapes;
  for (int j = 0; j < 8; ++j) shapes.push_back(th::random_preshape(rng));
  const PreShape m = procrustes_mean(shapes);
  const auto objective = [&](const PreShape& c) {
    double s = 0;
    for (const auto& z : shapes) {
      const double d = shape_distance(c, z);
      s += std::sin(d) * std::sin(d);
    }
    return s;
  };
  const double fm = objective(m);
  for (int rep = 0; rep < 200; ++rep) {
    const PreShape c = to_preshape(m.z + rng.cgaussian(3, rep % 2 ? 0.05 : 1.0));
    CHECK(objective(c) >= fm - 1e-12);
  }
}

TEST_CASE("procrustes_mean flags a degenerate spectrum") {
  PreShape e1{Cvec::Zero(3)}, e2{Cvec::Zero(3)};
  e1.z[0] = 1.0;
  e2.z[1] = 1.0;
  CHECK_THROWS_AS(procrustes_mean({e1, e2}), DegenerateMean);
  CHECK_THROWS_AS(procrustes_mean({}), Error);
}

TEST_CASE("tangent_coords residual identities") {
  Rng rng(19);
  const PreShape mean = th::random_preshape(rng);
  CHECK(tangent_coords(mean, mean).norm() < 1e-12);

  for (int rep = 0; rep < 50; ++rep) {
    const PreShape z = th::random_preshape(rng);
    const Eigen::VectorXd r = tangent_coords(mean, z);
    const Cvec rc = unembed(r);
    CHECK(std::abs(rip(rc, mean.z)) < 1e-12);
    CHECK(std::abs(iip(rc, mean.z)) < 1e-12);
    CHECK(std::abs(r.norm() - std::sin(shape_distance(mean, z))) < 1e-10);
  }
}

TEST_CASE("tangent_coords reconstruction is injective near the mean") {
  Rng rng(20);
  const PreShape mean = th::random_preshape(rng);
  for (int rep = 0; rep < 30; ++rep) {
    PreShape z = to_preshape(mean.z + rng.cgaussian(3, 0.2));
    if (shape_distance(mean, z) >= kPi / 4) continue;
    const AlignResult a = align_rotation(mean, z);
    const Eigen::VectorXd r = tangent_coords(mean, z);
    const Cvec rc = unembed(r);
    // ||r|| = sin d, so the aligned shape is mean*cos d + r with
    // cos d = sqrt(1 - ||r||^2).
    const Cvec rec = std::sqrt(1.0 - r.squaredNorm()) * mean.z + rc;
    CHECK((rec - a.aligned.z).norm() < 1e-10);
  }
}
