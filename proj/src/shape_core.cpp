#include "shapegeo/shape_core.hpp"

#include <cmath>

namespace shapegeo {

Eigen::MatrixXd sub_helmert(int k) {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(k - 1, k);
  for (int j = 1; j < k; ++j) {
    const double s = 1.0 / std::sqrt(static_cast<double>(j) * (j + 1));
    H.row(j - 1).head(j).setConstant(s);
    H(j - 1, j) = -j * s;
  }
  return H;
}

Cvec helmert_center(const Configuration& cfg) {
  const int k = cfg.k();
  if (k < 3) throw Error("helmert_center: need at least 3 landmarks");
  const Cvec w = sub_helmert(k) * cfg.landmarks;
  const double scale = cfg.landmarks.norm();
  if (w.norm() < 1e-14 * scale || scale == 0.0) throw AllLandmarksCoincide();
  return w;
}

PreShape to_preshape(const Cvec& w) {
  const double n = w.norm();
  if (n <= 0.0) throw ZeroNorm();
  return PreShape{w / n};
}

double shape_distance(const PreShape& z, const PreShape& w) {
  return std::acos(std::min(1.0, std::abs(hdot(z.z, w.z))));
}

AlignResult align_rotation(const PreShape& target, const PreShape& z) {
  const std::complex<double> h = hdot(z.z, target.z);
  if (std::abs(h) < 1e-13) return {z, 0.0, true};
  const double t = -std::arg(h);
  return {PreShape{std::polar(1.0, t) * z.z}, t, false};
}

PreShape procrustes_mean(const std::vector<PreShape>& shapes) {
  if (shapes.empty()) throw InsufficientSamples("procrustes_mean: empty input");
  const Eigen::Index m = shapes.front().z.size();
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(m, m);
  for (const PreShape& p : shapes) S += p.z * p.z.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S);
  const Eigen::VectorXd ev = es.eigenvalues();  // ascending
  const double top = ev[m - 1];
  if (top - ev[m - 2] < 1e-10 * std::max(top, 1e-300)) throw DegenerateMean();
  Cvec z = es.eigenvectors().col(m - 1);
  return PreShape{z / z.norm()};
}

Eigen::VectorXd tangent_coords(const PreShape& mean, const PreShape& z) {
  // A degenerate alignment (complex inner product ~0) keeps t = 0; the
  // residual formula stays well defined, it is just not unique.
  const AlignResult a = align_rotation(mean, z);
  const Cvec r = a.aligned.z - hdot(a.aligned.z, mean.z) * mean.z;
  return embed(r);
}

}  // namespace shapegeo
