#pragma once

#include <cstdint>
#include <vector>

#include "shapegeo/shape_core.hpp"

namespace shapegeo {

// Horizontal great-circle representative (x, v) of a shape-space geodesic:
// <x,x> = <v,v> = 1, <x,v> = <x,iv> = 0 (the constraint map Phi).
struct PreGeodesic {
  Cvec x;
  Cvec v;
  int k() const { return static_cast<int>(x.size()) + 1; }
  // Dimension of the space of geodesics of the shape space.
  int quotient_dim() const { return 4 * k() - 10; }
};

// Largest absolute constraint residual |Phi|.
double constraint_residual(const PreGeodesic& g);

struct FootPoint {
  double t = 0;  // arc parameter of the nearest point, in [0, pi)
  double s = 0;  // rotation applied to the shape
};

struct GpcFit {
  PreGeodesic geodesic;
  double objective = 0;          // sum of squared rho residuals
  Eigen::VectorXd residuals;     // per-shape rho
  Eigen::VectorXd foot_params;   // per-shape arc parameter (NaN if non-unique)
  bool wellposed = false;        // all residuals < pi/4
  bool converged = false;
  int iterations = 0;
  double multistart_dispersion = 0;  // max pairwise Ziezold distance of starts
};

struct GpcOptions {
  int restarts = 3;          // total starts; start 0 is the smart initializer
  std::uint64_t seed = 0;    // seeds the random restarts
  int max_iterations = 500;
  double rel_tol = 1e-12;    // relative objective decrease stop
};

// Gram-Schmidt projection onto the constraint set.
PreGeodesic make_pregeodesic(Cvec x, Cvec v);

// gamma(t) = x cos t + v sin t.
PreShape point_on_geodesic(const PreGeodesic& g, double t);

// Closed-form shape-to-geodesic distance in [0, pi/2].
double rho(const PreShape& p, const PreGeodesic& g);

// Nearest point parameter and optimal rotation; throws NonUniqueFoot on the
// singularity locus where the rotation objective is flat.
FootPoint foot_point(const PreShape& p, const PreGeodesic& g);

// Unique geodesic joining two non-identical, non-antipodal shapes.
PreGeodesic geodesic_through(const PreShape& p1, const PreShape& p2);

// First geodesic principal component: local minimizer of sum rho^2.
GpcFit fit_gpc(const std::vector<PreShape>& shapes, const GpcOptions& opts = {});

}  // namespace shapegeo
