#pragma once

#include <string>
#include <vector>

#include "shapegeo/common.hpp"

namespace shapegeo {

// Raw k-landmark planar object, landmarks as complex numbers.
struct Configuration {
  Cvec landmarks;
  int k() const { return static_cast<int>(landmarks.size()); }
};

// Centered, unit-norm complex (k-1)-vector on the pre-shape sphere.
struct PreShape {
  Cvec z;
  int k() const { return static_cast<int>(z.size()) + 1; }
};

struct Observation {
  double t = 0;
  PreShape shape;
};

// One leaf's time-ordered shape observations.
struct GrowthSeries {
  std::string leaf_id;
  std::string group;
  std::vector<Observation> observations;  // strictly increasing t
};

struct AlignResult {
  PreShape aligned;
  double t = 0;
  bool undefined = false;  // complex inner product was ~0; t arbitrary
};

// The (k-1) x k sub-Helmert matrix: row j has j entries 1/sqrt(j(j+1))
// followed by -j/sqrt(j(j+1)).  Rows are orthonormal.
Eigen::MatrixXd sub_helmert(int k);

// Multiply with the sub-Helmert matrix; translation-invariant centered
// coordinates.
Cvec helmert_center(const Configuration& cfg);

PreShape to_preshape(const Cvec& w);

// Geodesic distance arccos |<z,w>_C| in [0, pi/2] on the quotient by S^1.
double shape_distance(const PreShape& z, const PreShape& w);

// e^{it} z maximizing <e^{it} z, target>.
AlignResult align_rotation(const PreShape& target, const PreShape& z);

// Dominant eigenvector of the Hermitian sum of outer products.
PreShape procrustes_mean(const std::vector<PreShape>& shapes);

// Procrustes residual at `mean`, stacked real/imaginary parts (length
// 2(k-1)); complex-orthogonal to the mean, norm sin(shape_distance).
Eigen::VectorXd tangent_coords(const PreShape& mean, const PreShape& z);

}  // namespace shapegeo
