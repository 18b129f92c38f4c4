#pragma once

#include <vector>

#include "shapegeo/geodesic_space.hpp"

namespace shapegeo {

// Combined S^1 x O(2) action element: left rotation h_t = e^{it}, right
// O(2) element with angle phi and reflection sign eps.
struct GroupElement {
  double t = 0;
  double phi = 0;
  int eps = +1;
  GroupElement inverse() const;
};

struct OptimalPosition {
  PreGeodesic aligned;  // apply_group(g, Q), nearest orbit representative
  GroupElement g;
  double dist = 0;      // = Ziezold distance delta([P],[Q])
};

struct ZiezoldMeanResult {
  PreGeodesic mean;
  double objective = 0;  // Frechet objective sum delta^2
  int iterations = 0;
  std::vector<PreGeodesic> aligned_inputs;  // in optimal position to mean
  bool converged = false;
  std::vector<double> objective_trace;  // objective at each iterate, final last
};

// h_t(Q g_{phi,eps}): right O(2) action first, then the rotation.
PreGeodesic apply_group(const GroupElement& g, const PreGeodesic& P);

// Euclidean metric on ambient pairs, sqrt(|x-y|^2 + |v-w|^2).
double ambient_distance_d(const PreGeodesic& P, const PreGeodesic& Q);

// Group translate of Q minimizing ambient distance to P.
OptimalPosition optimal_position(const PreGeodesic& P, const PreGeodesic& Q);

double ziezold_distance(const PreGeodesic& P, const PreGeodesic& Q);

// Orthogonal projection of an ambient pair onto the pre-geodesic manifold
// (minimizer branch of the fixed-point equations).
PreGeodesic project_to_pregeodesics(const Cvec& x, const Cvec& v);

// Iterative Ziezold mean: align, average, project until the quotient
// distance between successive iterates drops below 1e-10.
ZiezoldMeanResult mean_geodesic(const std::vector<PreGeodesic>& inputs);

double frechet_objective(const std::vector<PreGeodesic>& inputs,
                         const PreGeodesic& candidate);

}  // namespace shapegeo
