#pragma once

#include <numbers>
#include <vector>

#include "shapegeo/dataset.hpp"
#include "shapegeo/rng.hpp"

namespace th {

using namespace shapegeo;

inline constexpr double kPi = std::numbers::pi;

inline PreShape random_preshape(Rng& rng, int k = 4) {
  return to_preshape(rng.cgaussian(k - 1));
}

inline PreGeodesic random_pregeodesic(Rng& rng, int k = 4) {
  return make_pregeodesic(rng.cgaussian(k - 1), rng.cgaussian(k - 1));
}

inline GroupElement random_group(Rng& rng) {
  return GroupElement{rng.uniform(0.0, 2 * kPi), rng.uniform(0.0, 2 * kPi),
                      rng.uniform() < 0.5 ? -1 : +1};
}

// Pre-geodesic scattered around `base`: ambient Gaussian perturbation of
// scale `s`, projected back, then moved by a random group element.
inline PreGeodesic perturbed_pregeodesic(const PreGeodesic& base, double s, Rng& rng) {
  const PreGeodesic p = project_to_pregeodesics(base.x + rng.cgaussian(base.x.size(), s),
                                                base.v + rng.cgaussian(base.v.size(), s));
  return apply_group(random_group(rng), p);
}

// Grid oracle for rho: minimize arccos sqrt(<e^{it}p,x>^2 + <e^{it}p,v>^2)
// over an `n`-point t-grid.
inline double rho_grid(const PreShape& p, const PreGeodesic& g, int n) {
  const std::complex<double> U = hdot(p.z, g.x);
  const std::complex<double> V = hdot(p.z, g.v);
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = 2 * kPi * i / n;
    const std::complex<double> e = std::polar(1.0, t);
    const double a = (e * U).real();
    const double b = (e * V).real();
    best = std::max(best, a * a + b * b);
  }
  return std::acos(std::sqrt(std::min(1.0, best)));
}

// Grid oracle for the Ziezold distance: exhaustive search over an
// nt x nphi x {+1,-1} grid of group elements, using the factorized
// objective (4 - d^2)/2 = (A cos t + C sin t) cos phi + (B cos t + D sin t) sin phi.
inline double ziezold_grid(const PreGeodesic& P, const PreGeodesic& Q, int nt, int nphi) {
  std::vector<double> ct(nt), st(nt), cp(nphi), sp(nphi);
  for (int i = 0; i < nt; ++i) {
    ct[i] = std::cos(2 * kPi * i / nt);
    st[i] = std::sin(2 * kPi * i / nt);
  }
  for (int i = 0; i < nphi; ++i) {
    cp[i] = std::cos(2 * kPi * i / nphi);
    sp[i] = std::sin(2 * kPi * i / nphi);
  }
  double best = -2.0;
  for (const int eps : {+1, -1}) {
    const double A = rip(P.x, Q.x) + eps * rip(P.v, Q.v);
    const double B = rip(P.x, Q.v) - eps * rip(P.v, Q.x);
    const double C = iip(P.x, Q.x) + eps * iip(P.v, Q.v);
    const double D = iip(P.x, Q.v) - eps * iip(P.v, Q.x);
    for (int i = 0; i < nt; ++i) {
      const double p1 = A * ct[i] + C * st[i];
      const double p2 = B * ct[i] + D * st[i];
      for (int j = 0; j < nphi; ++j) best = std::max(best, p1 * cp[j] + p2 * sp[j]);
    }
  }
  return std::sqrt(std::max(0.0, 4.0 - 2.0 * best));
}

// Two-observation growth series (young-mode descriptor) sampled on `g` with
// spread-out arc parameters.
inline GrowthSeries young_series_on(const PreGeodesic& g, const std::string& id,
                                    const std::string& group, double sigma, Rng& rng) {
  GrowthSeries s;
  s.leaf_id = id;
  s.group = group;
  const double t1 = rng.uniform(0.0, 0.4);
  const double t2 = t1 + 0.3 + rng.uniform(0.0, 0.3);
  const auto shapes = sample_shapes_on_geodesic(g, {t1, t2}, sigma, rng);
  s.observations.push_back({0.0, shapes[0]});
  s.observations.push_back({1.0, shapes[1]});
  return s;
}

// Growth series with nobs observations along `g` (usable in both modes when
// nobs >= 6).
inline GrowthSeries series_on(const PreGeodesic& g, const std::string& id,
                              const std::string& group, int nobs, double sigma,
                              Rng& rng) {
  GrowthSeries s;
  s.leaf_id = id;
  s.group = group;
  std::vector<double> ts;
  for (int i = 0; i < nobs; ++i) ts.push_back(0.05 + 0.8 * i / (nobs - 1));
  const auto shapes = sample_shapes_on_geodesic(g, ts, sigma, rng);
  for (int i = 0; i < nobs; ++i)
    s.observations.push_back({static_cast<double>(i), shapes[static_cast<std::size_t>(i)]});
  return s;
}

// A pre-geodesic at Ziezold distance `target` from g, found by bisecting the
// scale of a random perturbation direction.
inline PreGeodesic pregeodesic_at_distance(const PreGeodesic& g, double target, Rng& rng) {
  for (;;) {
    const Cvec dx = rng.cgaussian(g.x.size());
    const Cvec dv = rng.cgaussian(g.v.size());
    const auto at = [&](double s) {
      return project_to_pregeodesics(g.x + s * dx, g.v + s * dv);
    };
    double lo = 0.0, hi = 1.0;
    while (hi < 1e6 && ziezold_distance(at(hi), g) < target) hi *= 2;
    if (hi >= 1e6) continue;  // direction saturates below target; redraw
    for (int it = 0; it < 60; ++it) {
      const double mid = (lo + hi) / 2;
      (ziezold_distance(at(mid), g) < target ? lo : hi) = mid;
    }
    return at((lo + hi) / 2);
  }
}

}  // namespace th
