#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace shapegeo {

using Cvec = Eigen::VectorXcd;

// Hermitian inner product sum_j a_j * conj(b_j).  Eigen's dot() conjugates
// its *object*, hence the argument swap.
inline std::complex<double> hdot(const Cvec& a, const Cvec& b) { return b.dot(a); }

// Global real inner product convention <a,b> = Re sum_j a_j conj(b_j).
inline double rip(const Cvec& a, const Cvec& b) { return hdot(a, b).real(); }

// <a, i*b> = Im sum_j a_j conj(b_j); multiplication by i is the complex
// structure, so the pair (rip, iip) recovers the full Hermitian product.
inline double iip(const Cvec& a, const Cvec& b) { return hdot(a, b).imag(); }

// Flatten a complex vector into stacked real parts [Re; Im] so that the real
// Euclidean dot product of embeddings equals rip().
inline Eigen::VectorXd embed(const Cvec& a) {
  Eigen::VectorXd r(2 * a.size());
  r.head(a.size()) = a.real();
  r.tail(a.size()) = a.imag();
  return r;
}

inline Cvec unembed(const Eigen::VectorXd& r) {
  const Eigen::Index n = r.size() / 2;
  Cvec a(n);
  a.real() = r.head(n);
  a.imag() = r.tail(n);
  return a;
}

// -- error taxonomy -------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define SHAPEGEO_ERROR(NAME)                                   \
  struct NAME : Error {                                        \
    explicit NAME(const std::string& msg = #NAME) : Error(msg) {} \
  }

SHAPEGEO_ERROR(AllLandmarksCoincide);
SHAPEGEO_ERROR(ZeroNorm);
SHAPEGEO_ERROR(DegenerateMean);
SHAPEGEO_ERROR(DegenerateDirection);
SHAPEGEO_ERROR(NonUniqueFoot);
SHAPEGEO_ERROR(IdenticalShapes);
SHAPEGEO_ERROR(AntipodalShapes);
SHAPEGEO_ERROR(NoConvergence);
SHAPEGEO_ERROR(DegenerateProjection);
SHAPEGEO_ERROR(SingularCovariance);
SHAPEGEO_ERROR(InsufficientSamples);
SHAPEGEO_ERROR(InsufficientObservations);
SHAPEGEO_ERROR(ZeroVariance);
SHAPEGEO_ERROR(MeanAmbiguous);
SHAPEGEO_ERROR(ParseError);
SHAPEGEO_ERROR(SchemaError);
SHAPEGEO_ERROR(ConfigError);

#undef SHAPEGEO_ERROR

}  // namespace shapegeo
