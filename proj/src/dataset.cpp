#include "shapegeo/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace shapegeo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_number(const std::string& field, int line_no, int col_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos != field.size() || !std::isfinite(v)) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ", column " +
                     std::to_string(col_no) + ": cannot parse number from '" + field + "'");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Dataset ingest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty file: '" + path + "'");
  const auto header = split_fields(line);
  const int ncol = static_cast<int>(header.size());
  if (ncol < 9 || (ncol - 3) % 2 != 0)
    throw SchemaError("header must be leaf_id,group,t,x1,y1,...,xk,yk with k >= 3");
  if (header[0] != "leaf_id" || header[1] != "group" || header[2] != "t")
    throw SchemaError("header must start with leaf_id,group,t");
  const int k = (ncol - 3) / 2;
  for (int j = 0; j < k; ++j)
    if (header[3 + 2 * j] != "x" + std::to_string(j + 1) ||
        header[4 + 2 * j] != "y" + std::to_string(j + 1))
      throw SchemaError("landmark columns must be named x1,y1,...,xk,yk");

  Dataset ds;
  ds.k = k;
  ds.source = path;

  struct Row {
    double t;
    PreShape shape;
    int line_no;
  };
  std::vector<std::string> order;
  std::map<std::string, std::string> group_of;
  std::map<std::string, std::vector<Row>> by_leaf;

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++ds.report.rows_read;
    const auto f = split_fields(line);
    if (static_cast<int>(f.size()) != ncol)
      throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(ncol) + " fields, got " + std::to_string(f.size()));
    const std::string& leaf = f[0];
    const std::string& group = f[1];
    if (leaf.empty())
      throw ParseError("line " + std::to_string(line_no) + ", column 1: empty leaf_id");
    const double t = parse_number(f[2], line_no, 3);
    Configuration cfg;
    cfg.landmarks.resize(k);
    for (int j = 0; j < k; ++j) {
      const double re = parse_number(f[3 + 2 * j], line_no, 4 + 2 * j);
      const double im = parse_number(f[4 + 2 * j], line_no, 5 + 2 * j);
      cfg.landmarks[j] = std::complex<double>(re, im);
    }
    const auto it = group_of.find(leaf);
    if (it == group_of.end()) {
      group_of.emplace(leaf, group);
      order.push_back(leaf);
    } else if (it->second != group) {
      throw SchemaError("line " + std::to_string(line_no) + ": leaf '" + leaf +
                        "' appears in groups '" + it->second + "' and '" + group + "'");
    }
    try {
      PreShape z = to_preshape(helmert_center(cfg));
      by_leaf[leaf].push_back(Row{t, std::move(z), line_no});
    } catch (const Error& e) {
      ++ds.report.rows_dropped;
      ds.report.warnings.push_back("line " + std::to_string(line_no) +
                                   ": degenerate row dropped (" + std::string(e.what()) + ")");
    }
  }

  for (const auto& leaf : order) {
    auto& rows = by_leaf[leaf];
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.t < b.t; });
    GrowthSeries s;
    s.leaf_id = leaf;
    s.group = group_of[leaf];
    for (auto& r : rows) {
      if (!s.observations.empty() && !(r.t > s.observations.back().t)) {
        ++ds.report.rows_dropped;
        ds.report.warnings.push_back("line " + std::to_string(r.line_no) +
                                     ": duplicate time " + fmt(r.t) + " for leaf '" + leaf +
                                     "' dropped");
        continue;
      }
      s.observations.push_back(Observation{r.t, std::move(r.shape)});
    }
    if (s.observations.size() < 2) {
      ++ds.report.series_dropped;
      ds.report.warnings.push_back("leaf '" + leaf +
                                   "' dropped: fewer than 2 usable observations");
      continue;
    }
    ds.series.push_back(std::move(s));
  }
  return ds;
}

std::string export_csv(const Dataset& ds) {
  std::ostringstream out;
  out << "leaf_id,group,t";
  for (int j = 1; j <= ds.k; ++j) out << ",x" << j << ",y" << j;
  out << "\n";
  // Rows of the sub-Helmert matrix are orthonormal, so H^T z is a centered
  // k-landmark configuration whose Helmert coordinates are exactly z again.
  const Eigen::MatrixXcd Ht = sub_helmert(ds.k).transpose().cast<std::complex<double>>();
  for (const auto& s : ds.series)
    for (const auto& ob : s.observations) {
      const Cvec lm = Ht * ob.shape.z;
      out << s.leaf_id << ',' << s.group << ',' << fmt(ob.t);
      for (int j = 0; j < ds.k; ++j)
        out << ',' << fmt(lm[j].real()) << ',' << fmt(lm[j].imag());
      out << "\n";
    }
  return out.str();
}

std::vector<GrowthSeries> select_group(const Dataset& ds, const std::string& group) {
  std::vector<GrowthSeries> out;
  for (const auto& s : ds.series)
    if (s.group == group) out.push_back(s);
  if (out.empty()) throw ConfigError("no series in group '" + group + "'");
  return out;
}

nlohmann::json run_test(const Dataset& ds, const std::string& test,
                        const std::string& group_a, const std::string& group_b,
                        Mode mode_a, Mode mode_b, const TestOptions& opts) {
  const auto ga = select_group(ds, group_a);
  const auto gb = select_group(ds, group_b);
  TestDiagnostics diag;
  TestResult res;
  if (test == "geodesics") {
    res = test_common_geodesics(ga, gb, mode_a, mode_b, opts, &diag);
  } else if (test == "means") {
    res = test_common_means(ga, gb, mode_a, mode_b, opts, &diag);
  } else if (test == "directions") {
    res = test_common_directions(ga, gb, mode_a, mode_b, opts, &diag);
  } else {
    throw ConfigError("unknown test '" + test + "' (expected geodesics, means or directions)");
  }

  nlohmann::json j;
  j["test"] = test;
  j["group_a"] = {{"name", group_a}, {"mode", to_string(mode_a)}, {"n_used", res.n1}};
  j["group_b"] = {{"name", group_b}, {"mode", to_string(mode_b)}, {"n_used", res.n2}};
  j["result"] = {{"statistic", res.statistic},
                 {"f_statistic", res.f_statistic},
                 {"dim_used", res.dim_used},
                 {"df", {res.df.first, res.df.second}},
                 {"p_value", res.p_value},
                 {"n1", res.n1},
                 {"n2", res.n2},
                 {"variance_explained", res.variance_explained}};
  nlohmann::json series = nlohmann::json::array();
  for (const auto& d : diag.series)
    series.push_back({{"leaf_id", d.leaf_id},
                      {"group", d.group},
                      {"mode", to_string(d.mode)},
                      {"used", d.used},
                      {"drop_reason", d.drop_reason},
                      {"descriptor_objective", d.descriptor_objective},
                      {"wellposed", d.wellposed}});
  j["series"] = series;
  j["config"] = {{"pca_threshold", opts.pca_threshold},
                 {"restarts", opts.gpc.restarts},
                 {"seed", opts.gpc.seed}};
  return j;
}

namespace {

std::vector<std::string> split_list(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == ';') c = ' ';
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

long long parse_ll(const std::string& v) {
  std::size_t pos = 0;
  const long long x = std::stoll(v, &pos);
  if (pos != v.size()) throw std::invalid_argument(v);
  return x;
}

std::uint64_t parse_u64(const std::string& v) {
  std::size_t pos = 0;
  const std::uint64_t x = std::stoull(v, &pos);
  if (pos != v.size() || v.find('-') != std::string::npos) throw std::invalid_argument(v);
  return x;
}

double parse_real(const std::string& v) {
  std::size_t pos = 0;
  const double x = std::stod(v, &pos);
  if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
  return x;
}

}  // namespace

SimConfig parse_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  SimConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value, got '" +
                        s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    try {
      if (key == "seed") {
        cfg.seed = parse_u64(value);
        cfg.seed_set = true;
      } else if (key == "replicates") {
        cfg.replicates = static_cast<int>(parse_ll(value));
        if (cfg.replicates < 2) throw std::invalid_argument(value);
      } else if (key == "noise_sigma") {
        cfg.noise_sigma = parse_real(value);
        if (cfg.noise_sigma < 0) throw std::invalid_argument(value);
      } else if (key == "k") {
        cfg.k = static_cast<int>(parse_ll(value));
        if (cfg.k < 4) throw std::invalid_argument(value);
      } else if (key == "covariance_ratio") {
        cfg.covariance_ratio = parse_real(value);
        if (cfg.covariance_ratio <= 0) throw std::invalid_argument(value);
      } else if (key == "box_dims") {
        const auto toks = split_list(value);
        if (toks.size() != 3) throw std::invalid_argument(value);
        for (int i = 0; i < 3; ++i) {
          cfg.box_dims[static_cast<std::size_t>(i)] = parse_real(toks[static_cast<std::size_t>(i)]);
          if (cfg.box_dims[static_cast<std::size_t>(i)] <= 0) throw std::invalid_argument(value);
        }
      } else if (key == "sample_sizes") {
        cfg.sample_sizes.clear();
        for (const auto& tok : split_list(value)) {
          const auto x = tok.find('x');
          if (x == std::string::npos) throw std::invalid_argument(tok);
          const int n1 = static_cast<int>(parse_ll(tok.substr(0, x)));
          const int n2 = static_cast<int>(parse_ll(tok.substr(x + 1)));
          if (n1 < 3 || n2 < 3) throw std::invalid_argument(tok);
          cfg.sample_sizes.emplace_back(n1, n2);
        }
        if (cfg.sample_sizes.empty()) throw std::invalid_argument(value);
      } else if (key == "n_grid") {
        cfg.n_grid.clear();
        for (const auto& tok : split_list(value)) {
          const int n = static_cast<int>(parse_ll(tok));
          if (n < 2) throw std::invalid_argument(tok);
          cfg.n_grid.push_back(n);
        }
        if (cfg.n_grid.size() < 2) throw std::invalid_argument(value);
      } else {
        throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(line_no) + ": invalid value '" + value +
                        "' for key '" + key + "'");
    }
  }
  if (!cfg.seed_set) throw ConfigError("missing mandatory key 'seed'");
  return cfg;
}

nlohmann::json run_simulation(const SimConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  const RobustnessTable rob = robustness_experiment(cfg);
  const ConsistencyTable cmean = consistency_experiment(cfg, ConsistencyTarget::mean_geodesic);
  const ConsistencyTable cgpc = consistency_experiment(cfg, ConsistencyTarget::gpc);

  {
    std::ofstream out(fs::path(out_dir) / "robustness.csv");
    out << "n1,n2,factor,rank,p_value\n";
    for (const auto& c : rob.cells)
      for (std::size_t i = 0; i < c.sorted_pvalues.size(); ++i)
        out << c.n1 << ',' << c.n2 << ',' << fmt(c.factor) << ',' << (i + 1) << ','
            << fmt(c.sorted_pvalues[i]) << "\n";
  }
  const auto write_consistency = [&](const ConsistencyTable& t, const char* name) {
    std::ofstream out(fs::path(out_dir) / name);
    out << "n,median_error\n";
    for (const auto& r : t.rows) out << r.n << ',' << fmt(r.median_error) << "\n";
  };
  write_consistency(cmean, "consistency_mean_geodesic.csv");
  write_consistency(cgpc, "consistency_gpc.csv");

  nlohmann::json summary;
  summary["config"] = {{"seed", cfg.seed},
                       {"replicates", cfg.replicates},
                       {"noise_sigma", cfg.noise_sigma},
                       {"k", cfg.k},
                       {"box_dims", cfg.box_dims},
                       {"covariance_ratio", cfg.covariance_ratio},
                       {"n_grid", cfg.n_grid}};
  nlohmann::json sizes = nlohmann::json::array();
  for (const auto& [a, b] : cfg.sample_sizes) sizes.push_back({a, b});
  summary["config"]["sample_sizes"] = sizes;

  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : rob.cells)
    cells.push_back({{"n1", c.n1},
                     {"n2", c.n2},
                     {"factor", c.factor},
                     {"ks", c.ks},
                     {"replicates", static_cast<int>(c.sorted_pvalues.size())}});
  summary["robustness"] = {{"cells", cells}};

  const auto ctab = [](const ConsistencyTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) rows.push_back({{"n", r.n}, {"median_error", r.median_error}});
    return nlohmann::json{{"slope", t.slope}, {"rows", rows}};
  };
  summary["consistency"] = {{"mean_geodesic", ctab(cmean)}, {"gpc", ctab(cgpc)}};

  std::ofstream(fs::path(out_dir) / "summary.json") << summary.dump(2) << "\n";
  return summary;
}

namespace {

struct PlotRow {
  std::string leaf_id;
  std::string group;
  Mode mode;
};

// pca_reduce when the rows carry variance; otherwise fall back to the
// centered raw coordinates so degenerate (zero-noise) data still plots.
Eigen::MatrixXd reduce_rows(const ChartCoordinates& coords, double threshold) {
  try {
    return pca_reduce(coords, threshold).matrix;
  } catch (const ZeroVariance&) {
    return coords.matrix.rowwise() - coords.matrix.colwise().mean();
  }
}

std::string emit_rows(const std::vector<PlotRow>& labels, const Eigen::MatrixXd& m) {
  std::ostringstream out;
  out << "leaf_id,group,mode,c1,c2\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Eigen::Index r = static_cast<Eigen::Index>(i);
    const double c1 = m.cols() > 0 ? m(r, 0) : 0.0;
    const double c2 = m.cols() > 1 ? m(r, 1) : 0.0;
    out << labels[i].leaf_id << ',' << labels[i].group << ',' << to_string(labels[i].mode)
        << ',' << fmt(c1) << ',' << fmt(c2) << "\n";
  }
  return out.str();
}

// The first two (young) or everything from the third on (old); mirrors the
// inference pipelines.
std::vector<const PreShape*> relevant(const GrowthSeries& s, Mode mode) {
  std::vector<const PreShape*> out;
  if (mode == Mode::young) {
    for (std::size_t i = 0; i < std::min<std::size_t>(2, s.observations.size()); ++i)
      out.push_back(&s.observations[i].shape);
  } else {
    for (std::size_t i = 2; i < s.observations.size(); ++i)
      out.push_back(&s.observations[i].shape);
  }
  return out;
}

constexpr Mode kModes[2] = {Mode::young, Mode::old};

}  // namespace

std::string emit_tangent_plot_data(const Dataset& ds, const std::string& which,
                                   const TestOptions& opts) {
  if (which == "geodesics") {
    std::vector<PreGeodesic> descs;
    std::vector<PlotRow> labels;
    for (const Mode mode : kModes)
      for (const auto& s : ds.series) {
        try {
          GpcOptions g = opts.gpc;
          g.seed = substream(opts.gpc.seed, std::hash<std::string>{}(s.leaf_id));
          descs.push_back(leaf_descriptor_geodesic(s, mode, g));
          labels.push_back({s.leaf_id, s.group, mode});
        } catch (const Error&) {
          continue;
        }
      }
    if (descs.size() < 2)
      throw InsufficientSamples("plot-data: fewer than 2 geodesic descriptors");
    const ZiezoldMeanResult mean = mean_geodesic(descs);
    const ChartCoordinates chart = geodesic_tangent_coords(mean.mean, descs);
    return emit_rows(labels, reduce_rows(chart, opts.pca_threshold));
  }

  if (which != "means" && which != "directions")
    throw ConfigError("unknown plot family '" + which +
                      "' (expected geodesics, means or directions)");
  const std::size_t min_relevant = which == "means" ? 1 : 2;

  std::vector<std::vector<const PreShape*>> kept;
  std::vector<PlotRow> labels;
  std::vector<PreShape> pooled;
  for (const Mode mode : kModes)
    for (const auto& s : ds.series) {
      auto rel = relevant(s, mode);
      if (rel.size() < min_relevant) continue;
      for (const PreShape* p : rel) pooled.push_back(*p);
      kept.push_back(std::move(rel));
      labels.push_back({s.leaf_id, s.group, mode});
    }
  if (kept.size() < 2) throw InsufficientSamples("plot-data: fewer than 2 usable series");
  const PreShape mean = procrustes_mean(pooled);

  std::vector<Eigen::MatrixXd> residuals;
  for (const auto& rel : kept) {
    Eigen::MatrixXd R(static_cast<Eigen::Index>(rel.size()), 2 * mean.z.size());
    for (std::size_t i = 0; i < rel.size(); ++i)
      R.row(static_cast<Eigen::Index>(i)) = tangent_coords(mean, *rel[i]).transpose();
    residuals.push_back(std::move(R));
  }

  ChartCoordinates coords;
  coords.basepoint = mean;
  coords.basis = Eigen::MatrixXd::Identity(2 * mean.z.size(), 2 * mean.z.size());

  if (which == "means") {
    coords.matrix.resize(static_cast<Eigen::Index>(residuals.size()), 2 * mean.z.size());
    for (std::size_t i = 0; i < residuals.size(); ++i)
      coords.matrix.row(static_cast<Eigen::Index>(i)) = residuals[i].colwise().mean();
    return emit_rows(labels, reduce_rows(coords, opts.pca_threshold));
  }

  // directions: per-series dominant residual direction, growth-oriented,
  // projected onto the tangent hyperplane at the normalized mean direction.
  std::vector<Eigen::VectorXd> dirs;
  std::vector<PlotRow> dir_labels;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    const Eigen::MatrixXd& R = residuals[i];
    const Eigen::RowVectorXd mu = R.colwise().mean();
    const Eigen::MatrixXd Rc = R.rowwise() - mu;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Rc.transpose() * Rc);
    const Eigen::Index q = R.cols();
    if (es.eigenvalues()[q - 1] < 1e-24) continue;
    Eigen::VectorXd u = es.eigenvectors().col(q - 1);
    const Eigen::VectorXd growth = R.row(R.rows() - 1) - R.row(0);
    if (growth.dot(u) < 0) u = -u;
    dirs.push_back(u);
    dir_labels.push_back(labels[i]);
  }
  if (dirs.size() < 2) throw InsufficientSamples("plot-data: fewer than 2 usable directions");
  Eigen::VectorXd mvec = Eigen::VectorXd::Zero(dirs[0].size());
  for (const auto& u : dirs) mvec += u;
  mvec /= static_cast<double>(dirs.size());
  if (mvec.norm() < 1e-10) throw MeanAmbiguous();
  const Eigen::VectorXd m = mvec.normalized();

  coords.matrix.resize(static_cast<Eigen::Index>(dirs.size()), dirs[0].size());
  for (std::size_t i = 0; i < dirs.size(); ++i)
    coords.matrix.row(static_cast<Eigen::Index>(i)) = (dirs[i] - m.dot(dirs[i]) * m).transpose();
  return emit_rows(dir_labels, reduce_rows(coords, opts.pca_threshold));
}

}  // namespace shapegeo
