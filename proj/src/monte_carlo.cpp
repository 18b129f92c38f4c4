#include "shapegeo/monte_carlo.hpp"

#include <algorithm>
#include <cmath>

namespace shapegeo {

std::vector<PreShape> sample_shapes_on_geodesic(const PreGeodesic& g,
                                                const std::vector<double>& ts,
                                                double sigma, Rng& rng) {
  std::vector<PreShape> out;
  out.reserve(ts.size());
  for (const double t : ts) {
    const PreShape p = point_on_geodesic(g, t);
    if (sigma == 0) {
      out.push_back(p);
      continue;
    }
    Cvec xi = rng.cgaussian(p.z.size(), sigma);
    xi -= rip(xi, p.z) * p.z;  // sphere-tangent projection
    out.push_back(to_preshape(p.z + xi));
  }
  return out;
}

namespace {

Eigen::Matrix3d haar_rotation(std::uint64_t seed) {
  Rng rng(seed);
  Eigen::Vector4d q;
  for (int i = 0; i < 4; ++i) q[i] = rng.normal();
  q.normalize();
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Eigen::Matrix3d R;
  R << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return R;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Eigen::MatrixXd sample_uniform_box(int n, const std::array<double, 3>& dims,
                                   std::uint64_t rotation_seed, double scale,
                                   Rng& rng) {
  const Eigen::Matrix3d R = haar_rotation(rotation_seed);
  Eigen::MatrixXd X(n, 3);
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d u;
    for (int j = 0; j < 3; ++j) u[j] = scale * dims[j] * (rng.uniform() - 0.5);
    X.row(i) = (R * u).transpose();
  }
  return X;
}

double ks_to_uniform(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    d = std::max(d, std::abs(values[i] - static_cast<double>(i) / n));
    d = std::max(d, std::abs(values[i] - static_cast<double>(i + 1) / n));
  }
  return d;
}

RobustnessTable robustness_experiment(const SimConfig& cfg) {
  RobustnessTable table;
  std::vector<double> factors{1.0};
  if (cfg.covariance_ratio != 1.0) factors.push_back(cfg.covariance_ratio);
  std::uint64_t cell_index = 0;
  for (const auto& [n1, n2] : cfg.sample_sizes) {
    for (const double factor : factors) {
      ++cell_index;
      // One random rotation per cell, shared by both groups, so the two
      // covariances are constant multiples of one another.
      const std::uint64_t rot = substream(cfg.seed, cell_index, 0);
      RobustnessCell cell;
      cell.n1 = n1;
      cell.n2 = n2;
      cell.factor = factor;
      cell.sorted_pvalues.reserve(cfg.replicates);
      for (int rep = 0; rep < cfg.replicates; ++rep) {
        Rng rng(substream(cfg.seed, cell_index, static_cast<std::uint64_t>(rep) + 1));
        const Eigen::MatrixXd A = sample_uniform_box(n1, cfg.box_dims, rot, 1.0, rng);
        const Eigen::MatrixXd B =
            sample_uniform_box(n2, cfg.box_dims, rot, std::sqrt(factor), rng);
        cell.sorted_pvalues.push_back(hotelling_t2(A, B).p_value);
      }
      std::sort(cell.sorted_pvalues.begin(), cell.sorted_pvalues.end());
      cell.ks = ks_to_uniform(cell.sorted_pvalues);
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

ConsistencyTable consistency_experiment(const SimConfig& cfg, ConsistencyTarget target) {
  ConsistencyTable table;
  table.target = target;

  Rng base_rng(substream(cfg.seed, 0xba5eULL));
  const Eigen::Index m = cfg.k - 1;
  const PreGeodesic truth = make_pregeodesic(base_rng.cgaussian(m), base_rng.cgaussian(m));

  for (const int n : cfg.n_grid) {
    std::vector<double> errors;
    errors.reserve(cfg.replicates);
    for (int rep = 0; rep < cfg.replicates; ++rep) {
      Rng rng(substream(cfg.seed, static_cast<std::uint64_t>(n),
                        static_cast<std::uint64_t>(rep) + 1));
      double err = 0;
      if (target == ConsistencyTarget::mean_geodesic) {
        std::vector<PreGeodesic> inputs;
        inputs.reserve(n);
        for (int j = 0; j < n; ++j) {
          PreGeodesic noisy = project_to_pregeodesics(
              truth.x + rng.cgaussian(m, cfg.noise_sigma),
              truth.v + rng.cgaussian(m, cfg.noise_sigma));
          const GroupElement g{rng.uniform(0, 2 * 3.141592653589793),
                               rng.uniform(0, 2 * 3.141592653589793),
                               rng.uniform() < 0.5 ? +1 : -1};
          inputs.push_back(apply_group(g, noisy));
        }
        err = ziezold_distance(mean_geodesic(inputs).mean, truth);
      } else {
        std::vector<double> ts(n);
        for (double& t : ts) t = rng.uniform(-0.8, 0.8);
        const std::vector<PreShape> shapes =
            sample_shapes_on_geodesic(truth, ts, cfg.noise_sigma, rng);
        GpcOptions opts;
        opts.restarts = 1;
        opts.seed = substream(cfg.seed, 0x66cULL, static_cast<std::uint64_t>(rep));
        err = ziezold_distance(fit_gpc(shapes, opts).geodesic, truth);
      }
      errors.push_back(err);
    }
    table.rows.push_back({n, median(errors)});
  }

  // Log-log regression slope of median error against n.
  const Eigen::Index r = static_cast<Eigen::Index>(table.rows.size());
  Eigen::VectorXd lx(r), ly(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    lx[i] = std::log(static_cast<double>(table.rows[i].n));
    ly[i] = std::log(std::max(table.rows[i].median_error, 1e-300));
  }
  const double mx = lx.mean();
  const double my = ly.mean();
  table.slope = (lx.array() - mx).matrix().dot((ly.array() - my).matrix()) /
                (lx.array() - mx).matrix().squaredNorm();
  return table;
}

}  // namespace shapegeo
