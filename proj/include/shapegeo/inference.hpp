#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "shapegeo/ziezold_mean.hpp"

namespace shapegeo {

struct TestResult {
  double statistic = 0;    // Hotelling T^2
  double f_statistic = 0;  // T^2 * (n1+n2-p-1) / ((n1+n2-2) p)
  int dim_used = 0;        // p
  std::pair<int, int> df{0, 0};
  double p_value = 1;
  int n1 = 0;
  int n2 = 0;
  double variance_explained = 1;
};

// Rows of real coordinates in an orthonormal chart at a basepoint.
struct ChartCoordinates {
  std::variant<std::monostate, PreShape, PreGeodesic> basepoint;
  Eigen::MatrixXd matrix;  // n x q
  Eigen::MatrixXd basis;   // q x ambient, orthonormal rows
  double variance_explained = 1;
};

enum class Mode { young, old };

inline const char* to_string(Mode m) { return m == Mode::young ? "young" : "old"; }

struct TestOptions {
  double pca_threshold = 0.95;
  GpcOptions gpc;
};

// Per-series bookkeeping surfaced through the CLI.
struct SeriesDiagnostic {
  std::string leaf_id;
  std::string group;
  Mode mode = Mode::young;
  bool used = false;
  std::string drop_reason;         // empty when used
  double descriptor_objective = 0; // GPC residual objective (old mode)
  bool wellposed = true;
};

struct TestDiagnostics {
  std::vector<SeriesDiagnostic> series;
  ChartCoordinates reduced;             // coordinates fed to the T^2 test
  std::vector<std::string> row_leaf;    // labels aligned with reduced.matrix
  std::vector<std::string> row_group;
  std::vector<Mode> row_mode;
};

// Chart of the space of geodesics at `mean`: optimal-position each input,
// embed the pair difference and project out the 6 constraint-normal/orbit
// directions, leaving 4k-10 orthonormal coordinates.
ChartCoordinates geodesic_tangent_coords(const PreGeodesic& mean,
                                         const std::vector<PreGeodesic>& inputs);

// Keep the smallest set of principal components reaching `threshold` of the
// total variance, capped at n-3 components.
ChartCoordinates pca_reduce(const ChartCoordinates& coords, double threshold);

TestResult hotelling_t2(const Eigen::MatrixXd& group_a, const Eigen::MatrixXd& group_b);

// young: geodesic through observations 1,2.  old: first GPC of observations
// 3..end, defined only when more than 3 remain.
PreGeodesic leaf_descriptor_geodesic(const GrowthSeries& series, Mode mode,
                                     const GpcOptions& gpc = {});

TestResult test_common_geodesics(const std::vector<GrowthSeries>& group_a,
                                 const std::vector<GrowthSeries>& group_b,
                                 Mode mode_a, Mode mode_b,
                                 const TestOptions& opts = {},
                                 TestDiagnostics* diag = nullptr);

TestResult test_common_means(const std::vector<GrowthSeries>& group_a,
                             const std::vector<GrowthSeries>& group_b,
                             Mode mode_a, Mode mode_b,
                             const TestOptions& opts = {},
                             TestDiagnostics* diag = nullptr);

TestResult test_common_directions(const std::vector<GrowthSeries>& group_a,
                                  const std::vector<GrowthSeries>& group_b,
                                  Mode mode_a, Mode mode_b,
                                  const TestOptions& opts = {},
                                  TestDiagnostics* diag = nullptr);

// Sample covariance of chart coordinates about the zero basepoint.
Eigen::MatrixXd estimate_clt_covariance(const ChartCoordinates& coords);

}  // namespace shapegeo
