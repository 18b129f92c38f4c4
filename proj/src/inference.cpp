#include "shapegeo/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <boost/math/distributions/fisher_f.hpp>

#include "shapegeo/rng.hpp"

namespace shapegeo {

namespace {

Eigen::VectorXd embed_pair(const PreGeodesic& g) {
  Eigen::VectorXd r(4 * g.x.size());
  r.head(2 * g.x.size()) = embed(g.x);
  r.tail(2 * g.x.size()) = embed(g.v);
  return r;
}

Eigen::VectorXd embed_pair(const Cvec& a, const Cvec& b) {
  Eigen::VectorXd r(4 * a.size());
  r.head(2 * a.size()) = embed(a);
  r.tail(2 * a.size()) = embed(b);
  return r;
}

const std::complex<double> kI{0.0, 1.0};

}  // namespace

ChartCoordinates geodesic_tangent_coords(const PreGeodesic& mean,
                                         const std::vector<PreGeodesic>& inputs) {
  if (inputs.empty()) throw InsufficientSamples("geodesic_tangent_coords: no inputs");
  const Eigen::Index amb = 4 * mean.x.size();
  const Cvec& x = mean.x;
  const Cvec& v = mean.v;
  const Cvec zero = Cvec::Zero(x.size());

  // Normals of the four constraints followed by the two orbit generators;
  // mutually orthogonal at any pre-geodesic.
  Eigen::MatrixXd N(amb, 6);
  N.col(0) = embed_pair(x, zero);           // grad <x,x>
  N.col(1) = embed_pair(zero, v);           // grad <v,v>
  N.col(2) = embed_pair(v, x);              // grad <x,v>
  N.col(3) = embed_pair(kI * v, -kI * x);   // grad <x,iv>
  N.col(4) = embed_pair(kI * x, kI * v);    // d/dt of e^{it}(x,v)
  N.col(5) = embed_pair(v, -x);             // d/dphi of the O(2) action

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(N);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(6).triangularView<Eigen::Upper>();
  for (int i = 0; i < 6; ++i)
    if (std::abs(R(i, i)) < 1e-8)
      throw DegenerateDirection("geodesic_tangent_coords: rank-deficient chart normals");
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(amb, amb);

  ChartCoordinates out;
  out.basepoint = mean;
  out.basis = Q.rightCols(amb - 6).transpose();  // (4k-10) x ambient
  out.matrix.resize(static_cast<Eigen::Index>(inputs.size()), amb - 6);
  const Eigen::VectorXd m0 = embed_pair(mean);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const OptimalPosition o = optimal_position(mean, inputs[i]);
    out.matrix.row(static_cast<Eigen::Index>(i)) =
        (out.basis * (embed_pair(o.aligned) - m0)).transpose();
  }
  return out;
}

ChartCoordinates pca_reduce(const ChartCoordinates& coords, double threshold) {
  const Eigen::Index n = coords.matrix.rows();
  const Eigen::Index q = coords.matrix.cols();
  if (n < 2) throw InsufficientSamples("pca_reduce: need at least 2 rows");
  const Eigen::RowVectorXd mu = coords.matrix.colwise().mean();
  const Eigen::MatrixXd Xc = coords.matrix.rowwise() - mu;
  const Eigen::MatrixXd C = Xc.transpose() * Xc / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  Eigen::VectorXd ev = es.eigenvalues().reverse();  // descending
  ev = ev.cwiseMax(0.0);
  const double total = ev.sum();
  if (total < 1e-20) throw ZeroVariance();

  const Eigen::Index cap = std::max<Eigen::Index>(1, n - 3);
  Eigen::Index keep = 1;
  double cum = ev[0];
  while (keep < q && cum < threshold * total - 1e-12 * total && ev[keep] > 1e-14 * ev[0]) {
    cum += ev[keep];
    ++keep;
  }
  keep = std::min(keep, cap);
  cum = ev.head(keep).sum();

  Eigen::MatrixXd W(q, keep);
  for (Eigen::Index j = 0; j < keep; ++j) W.col(j) = es.eigenvectors().col(q - 1 - j);

  ChartCoordinates out;
  out.basepoint = coords.basepoint;
  out.matrix = Xc * W;
  out.basis = W.transpose() * coords.basis;
  out.variance_explained = cum / total;
  return out;
}

TestResult hotelling_t2(const Eigen::MatrixXd& group_a, const Eigen::MatrixXd& group_b) {
  const Eigen::Index p = group_a.cols();
  const Eigen::Index n1 = group_a.rows();
  const Eigen::Index n2 = group_b.rows();
  if (group_b.cols() != p) throw Error("hotelling_t2: dimension mismatch");
  if (n1 < 1 || n2 < 1 || n1 + n2 < p + 2)
    throw InsufficientSamples("hotelling_t2: n1+n2 must exceed p+1");

  const Eigen::VectorXd d =
      group_a.colwise().mean().transpose() - group_b.colwise().mean().transpose();
  const Eigen::MatrixXd Ac = group_a.rowwise() - group_a.colwise().mean();
  const Eigen::MatrixXd Bc = group_b.rowwise() - group_b.colwise().mean();
  const Eigen::MatrixXd Sp =
      (Ac.transpose() * Ac + Bc.transpose() * Bc) / static_cast<double>(n1 + n2 - 2);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sp);
  const double lmin = es.eigenvalues()[0];
  const double lmax = es.eigenvalues()[p - 1];
  if (lmin <= 0 || lmax / lmin >= 1e12) throw SingularCovariance();

  TestResult r;
  r.n1 = static_cast<int>(n1);
  r.n2 = static_cast<int>(n2);
  r.dim_used = static_cast<int>(p);
  const double nf = static_cast<double>(n1) * n2 / static_cast<double>(n1 + n2);
  r.statistic = nf * d.dot(Sp.ldlt().solve(d));
  const int df2 = static_cast<int>(n1 + n2 - p - 1);
  r.df = {static_cast<int>(p), df2};
  r.f_statistic = r.statistic * df2 / (static_cast<double>(n1 + n2 - 2) * p);
  boost::math::fisher_f_distribution<double> F(static_cast<double>(p), df2);
  r.p_value = boost::math::cdf(boost::math::complement(F, std::max(0.0, r.f_statistic)));
  return r;
}

PreGeodesic leaf_descriptor_geodesic(const GrowthSeries& series, Mode mode,
                                     const GpcOptions& gpc) {
  const std::size_t n = series.observations.size();
  if (mode == Mode::young) {
    if (n < 2) throw InsufficientObservations("young descriptor needs 2 observations");
    return geodesic_through(series.observations[0].shape, series.observations[1].shape);
  }
  if (n < 2 || n - 2 <= 3)
    throw InsufficientObservations("old descriptor needs more than 3 later observations");
  std::vector<PreShape> rest;
  for (std::size_t i = 2; i < n; ++i) rest.push_back(series.observations[i].shape);
  return fit_gpc(rest, gpc).geodesic;
}

namespace {

// Observations a series contributes in a given mode: the first two (young)
// or everything from the third on (old).
std::vector<const PreShape*> relevant_observations(const GrowthSeries& s, Mode mode) {
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

struct GatheredRows {
  Eigen::MatrixXd a;  // group A rows
  Eigen::MatrixXd b;  // group B rows
};

GatheredRows split_rows(const Eigen::MatrixXd& all, Eigen::Index na) {
  return {all.topRows(na), all.bottomRows(all.rows() - na)};
}

void record(TestDiagnostics* diag, const GrowthSeries& s, Mode mode, bool used,
            const std::string& reason, double obj = 0, bool wellposed = true) {
  if (!diag) return;
  diag->series.push_back({s.leaf_id, s.group, mode, used, reason, obj, wellposed});
}

void record_rows(TestDiagnostics* diag, const ChartCoordinates& reduced,
                 const std::vector<const GrowthSeries*>& rows,
                 const std::vector<Mode>& modes) {
  if (!diag) return;
  diag->reduced = reduced;
  diag->row_leaf.clear();
  diag->row_group.clear();
  diag->row_mode = modes;
  for (const GrowthSeries* s : rows) {
    diag->row_leaf.push_back(s->leaf_id);
    diag->row_group.push_back(s->group);
  }
}

// Rows carry no variance at all: identical rows across both groups mean
// T^2 = 0 (e.g. every series sharing one residual line); constant but
// group-dependent rows are a genuinely singular covariance.
TestResult zero_variance_result(const Eigen::MatrixXd& rows, Eigen::Index na) {
  const Eigen::RowVectorXd ma = rows.topRows(na).colwise().mean();
  const Eigen::RowVectorXd mb = rows.bottomRows(rows.rows() - na).colwise().mean();
  if ((ma - mb).norm() > 1e-10) throw SingularCovariance();
  TestResult r;
  r.dim_used = 0;
  r.df = {0, static_cast<int>(rows.rows() - 2)};
  r.p_value = 1;
  r.n1 = static_cast<int>(na);
  r.n2 = static_cast<int>(rows.rows() - na);
  return r;
}

}  // namespace

TestResult test_common_geodesics(const std::vector<GrowthSeries>& group_a,
                                 const std::vector<GrowthSeries>& group_b,
                                 Mode mode_a, Mode mode_b, const TestOptions& opts,
                                 TestDiagnostics* diag) {
  std::vector<PreGeodesic> descriptors;
  std::vector<const GrowthSeries*> rows;
  std::vector<Mode> modes;
  Eigen::Index na = 0;
  for (int gi = 0; gi < 2; ++gi) {
    const auto& grp = gi == 0 ? group_a : group_b;
    const Mode mode = gi == 0 ? mode_a : mode_b;
    for (const GrowthSeries& s : grp) {
      try {
        GpcOptions g = opts.gpc;
        g.seed = substream(opts.gpc.seed, std::hash<std::string>{}(s.leaf_id));
        descriptors.push_back(leaf_descriptor_geodesic(s, mode, g));
        rows.push_back(&s);
        modes.push_back(mode);
        double obj = 0;
        bool wp = true;
        if (mode == Mode::old) {
          for (std::size_t i = 2; i < s.observations.size(); ++i) {
            const double r = rho(s.observations[i].shape, descriptors.back());
            obj += r * r;
            wp = wp && r < std::numbers::pi / 4;
          }
        }
        record(diag, s, mode, true, "", obj, wp);
        if (gi == 0) ++na;
      } catch (const Error& e) {
        record(diag, s, mode, false, e.what());
      }
    }
  }
  if (na < 2 || static_cast<Eigen::Index>(descriptors.size()) - na < 2)
    throw InsufficientSamples("test_common_geodesics: fewer than 2 descriptors in a group");

  const ZiezoldMeanResult mean = mean_geodesic(descriptors);
  const ChartCoordinates chart = geodesic_tangent_coords(mean.mean, descriptors);
  ChartCoordinates red;
  try {
    red = pca_reduce(chart, opts.pca_threshold);
  } catch (const ZeroVariance&) {
    record_rows(diag, chart, rows, modes);
    return zero_variance_result(chart.matrix, na);
  }
  record_rows(diag, red, rows, modes);
  const GatheredRows g = split_rows(red.matrix, na);
  TestResult r = hotelling_t2(g.a, g.b);
  r.variance_explained = red.variance_explained;
  return r;
}

namespace {

// Pooled Procrustes mean of every relevant observation, then per-series
// Procrustes residual rows at that mean.
struct ResidualPipeline {
  PreShape pooled_mean;
  std::vector<const GrowthSeries*> rows;
  std::vector<Mode> modes;
  std::vector<Eigen::MatrixXd> residuals;  // per used series
  Eigen::Index na = 0;
};

ResidualPipeline residual_pipeline(const std::vector<GrowthSeries>& group_a,
                                   const std::vector<GrowthSeries>& group_b,
                                   Mode mode_a, Mode mode_b, std::size_t min_relevant,
                                   TestDiagnostics* diag) {
  ResidualPipeline out;
  std::vector<PreShape> pooled;
  std::vector<std::vector<const PreShape*>> kept;
  for (int gi = 0; gi < 2; ++gi) {
    const auto& grp = gi == 0 ? group_a : group_b;
    const Mode mode = gi == 0 ? mode_a : mode_b;
    for (const GrowthSeries& s : grp) {
      auto rel = relevant_observations(s, mode);
      if (rel.size() < min_relevant) {
        record(diag, s, mode, false, "InsufficientObservations");
        continue;
      }
      for (const PreShape* p : rel) pooled.push_back(*p);
      kept.push_back(std::move(rel));
      out.rows.push_back(&s);
      out.modes.push_back(mode);
      record(diag, s, mode, true, "");
      if (gi == 0) ++out.na;
    }
  }
  if (out.na < 2 || static_cast<Eigen::Index>(out.rows.size()) - out.na < 2)
    throw InsufficientSamples("fewer than 2 usable series in a group");
  out.pooled_mean = procrustes_mean(pooled);
  for (const auto& rel : kept) {
    Eigen::MatrixXd R(static_cast<Eigen::Index>(rel.size()),
                      2 * out.pooled_mean.z.size());
    for (std::size_t i = 0; i < rel.size(); ++i)
      R.row(static_cast<Eigen::Index>(i)) =
          tangent_coords(out.pooled_mean, *rel[i]).transpose();
    out.residuals.push_back(std::move(R));
  }
  return out;
}

TestResult finish_rows(const Eigen::MatrixXd& rows, Eigen::Index na,
                       const ResidualPipeline& pipe, const PreShape& basepoint,
                       const TestOptions& opts, TestDiagnostics* diag) {
  ChartCoordinates coords;
  coords.basepoint = basepoint;
  coords.matrix = rows;
  coords.basis = Eigen::MatrixXd::Identity(rows.cols(), rows.cols());
  ChartCoordinates red;
  try {
    red = pca_reduce(coords, opts.pca_threshold);
  } catch (const ZeroVariance&) {
    record_rows(diag, coords, pipe.rows, pipe.modes);
    return zero_variance_result(rows, na);
  }
  record_rows(diag, red, pipe.rows, pipe.modes);
  const GatheredRows g = split_rows(red.matrix, na);
  TestResult r = hotelling_t2(g.a, g.b);
  r.variance_explained = red.variance_explained;
  return r;
}

}  // namespace

TestResult test_common_means(const std::vector<GrowthSeries>& group_a,
                             const std::vector<GrowthSeries>& group_b,
                             Mode mode_a, Mode mode_b, const TestOptions& opts,
                             TestDiagnostics* diag) {
  ResidualPipeline pipe =
      residual_pipeline(group_a, group_b, mode_a, mode_b, 1, diag);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(pipe.residuals.size()),
                       2 * pipe.pooled_mean.z.size());
  for (std::size_t i = 0; i < pipe.residuals.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) = pipe.residuals[i].colwise().mean();
  return finish_rows(rows, pipe.na, pipe, pipe.pooled_mean, opts, diag);
}

TestResult test_common_directions(const std::vector<GrowthSeries>& group_a,
                                  const std::vector<GrowthSeries>& group_b,
                                  Mode mode_a, Mode mode_b, const TestOptions& opts,
                                  TestDiagnostics* diag) {
  // Drops of degenerate series happen after the pipeline gathered them, so
  // rebuild the bookkeeping vectors as we go.
  ResidualPipeline pipe =
      residual_pipeline(group_a, group_b, mode_a, mode_b, 2, diag);
  std::vector<Eigen::VectorXd> dirs;
  std::vector<const GrowthSeries*> rows;
  std::vector<Mode> modes;
  Eigen::Index na = 0;
  for (std::size_t i = 0; i < pipe.residuals.size(); ++i) {
    const Eigen::MatrixXd& R = pipe.residuals[i];
    const Eigen::RowVectorXd mu = R.colwise().mean();
    const Eigen::MatrixXd Rc = R.rowwise() - mu;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Rc.transpose() * Rc);
    const Eigen::Index q = R.cols();
    if (es.eigenvalues()[q - 1] < 1e-24) {
      if (diag)
        for (auto& sd : diag->series)
          if (sd.used && sd.leaf_id == pipe.rows[i]->leaf_id &&
              sd.group == pipe.rows[i]->group) {
            sd.used = false;
            sd.drop_reason = "DegenerateDirection";
          }
      continue;
    }
    Eigen::VectorXd u = es.eigenvectors().col(q - 1);
    // Point into the direction of growth: last minus first residual.
    const Eigen::VectorXd growth = R.row(R.rows() - 1) - R.row(0);
    if (growth.dot(u) < 0) u = -u;
    dirs.push_back(u);
    rows.push_back(pipe.rows[i]);
    modes.push_back(pipe.modes[i]);
    if (i < static_cast<std::size_t>(pipe.na)) ++na;
  }
  if (na < 2 || static_cast<Eigen::Index>(dirs.size()) - na < 2)
    throw InsufficientSamples("test_common_directions: fewer than 2 usable series");

  Eigen::VectorXd mvec = Eigen::VectorXd::Zero(dirs[0].size());
  for (const auto& u : dirs) mvec += u;
  mvec /= static_cast<double>(dirs.size());
  if (mvec.norm() < 1e-10) throw MeanAmbiguous();
  // Of the two antipodal unit means, normalization picks the one with the
  // larger average inner product with the data.
  const Eigen::VectorXd m = mvec.normalized();

  Eigen::MatrixXd rowsm(static_cast<Eigen::Index>(dirs.size()), dirs[0].size());
  for (std::size_t i = 0; i < dirs.size(); ++i)
    rowsm.row(static_cast<Eigen::Index>(i)) =
        (dirs[i] - m.dot(dirs[i]) * m).transpose();

  ResidualPipeline shim;
  shim.rows = rows;
  shim.modes = modes;
  return finish_rows(rowsm, na, shim, pipe.pooled_mean, opts, diag);
}

Eigen::MatrixXd estimate_clt_covariance(const ChartCoordinates& coords) {
  const Eigen::Index n = coords.matrix.rows();
  const Eigen::Index q = coords.matrix.cols();
  if (n < q + 1) throw InsufficientSamples("estimate_clt_covariance: n < q+1");
  // Second moment about the zero basepoint, not the sample mean.
  return coords.matrix.transpose() * coords.matrix / static_cast<double>(n - 1);
}

}  // namespace shapegeo
