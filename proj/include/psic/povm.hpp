// Copyright 2026 The psicomplete Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psic/linalg.hpp"

namespace psic {

/// Coefficients c_i of a vector in the fixed basis {e_0, ..., e_{d-1}}.
/// `normalized` marks vectors that are meant to be physical states; probe
/// and perturbation vectors are left unnormalized.
struct StateVector {
  ComplexVector coeffs;
  bool normalized = false;

  static constexpr double kNormTol = 1e-12;

  /// Scales v to unit length. Throws ZeroVector for v == 0.
  static StateVector normalized_from(const ComplexVector& v);
  static StateVector unnormalized(ComplexVector v) { return {std::move(v), false}; }
  static StateVector basis(Eigen::Index dim, Eigen::Index k);

  Eigen::Index dim() const { return coeffs.size(); }
  double norm() const { return coeffs.norm(); }
};

enum class Provenance { ConstructedFSC, Ingested, PreNormalized };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

/// Measurement elements E_i. The completeness and positivity invariants are
/// checked by validate_povm rather than at construction so that ingested
/// measurements can be inspected even when they are broken.
struct Povm {
  Eigen::Index dim = 0;
  std::vector<HermitianOperator> elements;
  Provenance provenance = Provenance::Ingested;

  std::size_t size() const { return elements.size(); }
};

/// Un-normalized operators P_i and their sum G.
struct OperatorSet {
  Eigen::Index dim = 0;
  std::vector<HermitianOperator> operators;
  HermitianOperator gram_sum;

  static OperatorSet from_operators(std::vector<HermitianOperator> ops);
  std::size_t size() const { return operators.size(); }
};

// Positions of the three operator families in the fixed 2d ordering:
// basis projectors |e_i><e_i| (i = 0..d-1), phase operators
// (|e_0> + i|e_k>)(<e_0| - i<e_k|) (k = 1..d-1), then the all-ones operator.
constexpr Eigen::Index fsc_basis_index(Eigen::Index i) { return i; }
constexpr Eigen::Index fsc_phase_index(Eigen::Index d, Eigen::Index k) { return d - 1 + k; }
constexpr Eigen::Index fsc_sum_index(Eigen::Index d) { return 2 * d - 1; }

OperatorSet build_fsc_operators(Eigen::Index d);

/// E_i = G^{-1/2} P_i G^{-1/2} for the given operators.
Povm normalize_operator_set(const OperatorSet& ops, Provenance provenance);

Povm build_fsc_povm(Eigen::Index d);

/// Outcome probabilities <psi|E_i|psi>, clamped to [0, 1].
RealVector probabilities(const Povm& povm, const StateVector& psi);

/// <psi|P_k|psi> for every operator; psi need not be normalized.
RealVector expectations(std::span<const HermitianOperator> ops, const StateVector& psi);
RealVector expectations(const OperatorSet& ops, const StateVector& psi);

struct Violation {
  enum class Kind { Completeness, Positivity, Dimension };
  Kind kind;
  int element = -1;  // -1 when the violation is not tied to one element
  double magnitude = 0;

  std::string describe() const;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

inline constexpr double kPovmTol = 1e-10;

ValidationReport validate_povm(const Povm& povm);

/// Second-largest eigenvalue <= rel_tol * largest.
bool is_rank_one(const HermitianOperator& op, double rel_tol = 1e-10);

}  // namespace psic
