#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "shapegeo/inference.hpp"
#include "shapegeo/rng.hpp"

namespace shapegeo {

struct SimConfig {
  std::uint64_t seed = 0;
  bool seed_set = false;
  int replicates = 100;
  std::vector<std::pair<int, int>> sample_sizes{{10, 10}, {30, 30}, {10, 30}, {10, 50}};
  double noise_sigma = 0.02;
  int k = 4;
  std::array<double, 3> box_dims{1.0, 2.0, 4.0};
  double covariance_ratio = 9.0;
  std::vector<int> n_grid{25, 50, 100, 200, 400, 800};
};

// Points gamma(t) perturbed by an isotropic Gaussian sphere-tangent vector
// of scale sigma, re-normalized.
std::vector<PreShape> sample_shapes_on_geodesic(const PreGeodesic& g,
                                                const std::vector<double>& ts,
                                                double sigma, Rng& rng);

// Uniform deviates in the centered axis box dims*scale, rotated by a Haar
// rotation drawn from rotation_seed (fixed per display).
Eigen::MatrixXd sample_uniform_box(int n, const std::array<double, 3>& dims,
                                   std::uint64_t rotation_seed, double scale,
                                   Rng& rng);

// Kolmogorov-Smirnov sup-distance of a sample to Uniform[0,1].
double ks_to_uniform(std::vector<double> values);

struct RobustnessCell {
  int n1 = 0;
  int n2 = 0;
  double factor = 1;                  // covariance ratio of group 2 to group 1
  std::vector<double> sorted_pvalues; // empirical CDF support
  double ks = 0;
};

struct RobustnessTable {
  std::vector<RobustnessCell> cells;
};

// Two-group Hotelling T^2 null p-values under uniform-box deviates, for each
// size pair and covariance factor {1, covariance_ratio}.
RobustnessTable robustness_experiment(const SimConfig& cfg);

enum class ConsistencyTarget { mean_geodesic, gpc };

struct ConsistencyRow {
  int n = 0;
  double median_error = 0;  // median Ziezold distance to the truth
};

struct ConsistencyTable {
  ConsistencyTarget target = ConsistencyTarget::mean_geodesic;
  std::vector<ConsistencyRow> rows;
  double slope = 0;  // log-log regression slope of median error vs n
};

ConsistencyTable consistency_experiment(const SimConfig& cfg, ConsistencyTarget target);

}  // namespace shapegeo
