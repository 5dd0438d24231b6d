#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "bem2d/assembly.hpp"
#include "bem2d/mesh.hpp"

namespace bem2d {

struct EstimatorResult {
  std::vector<double> per_element;  // eta_T^2
  double total = 0.0;               // sum of per_element in element order

  double eta() const;
};

// eta_T^2 = h_T || (f - V psi)' ||^2_{L2(T)}. The logarithmic end point
// behaviour of (V psi)' is integrated exactly with log-weighted Gauss rules;
// the remainder with Gauss of order q.estimator_order.
EstimatorResult estimate(const Mesh& mesh, std::span<const double> coeffs, const ProblemData& data,
                         const QuadratureOptions& q = {});
EstimatorResult estimate(const Mesh& mesh, std::span<const double> coeffs, const RhsSpec& rhs,
                         const QuadratureOptions& q = {});
// Serial version of the same computation.
EstimatorResult estimate_reference(const Mesh& mesh, std::span<const double> coeffs, const ProblemData& data,
                                   const QuadratureOptions& q = {});

// (sum over subset of eta_T^2)^(1/2)
double estimator_restricted(const EstimatorResult& result, std::span<const int> subset);

void write_estimator_csv(std::ostream& out, const EstimatorResult& result);

}  // namespace bem2d
