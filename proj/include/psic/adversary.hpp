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

#include <optional>
#include <span>
#include <vector>

#include "psic/povm.hpp"

namespace psic {

/// Two normalized states psi_plus = (phi + chi)/N and psi_minus = (phi - chi)/N
/// with identical outcome probabilities under some POVM.
struct CounterexamplePair {
  StateVector phi;
  StateVector chi;
  StateVector psi_plus;
  StateVector psi_minus;
  double common_norm = 0;
  double max_prob_gap = 0;
  double overlap = 0;  // |<psi_plus|psi_minus>|
  int k_phi = 0;
};

struct AnnihilationProfile {
  StateVector phi;
  int k_phi = 0;
  RealVector per_element_norms;
};

inline constexpr double kAnnihilationTol = 1e-10;

/// |E_i phi| for each element and how many of them exceed
/// tol * |phi| * (1 + max |E_i|).
AnnihilationProfile annihilation_profile(std::span<const HermitianOperator> elements, const StateVector& phi,
                                         double tol = kAnnihilationTol);
AnnihilationProfile annihilation_profile(const Povm& povm, const StateVector& phi, double tol = kAnnihilationTol);

/// Orthonormal basis of the complement of phi: Gram-Schmidt over the
/// canonical basis, skipping the basis vector with the largest overlap with
/// phi. Columns of the returned d x (d-1) matrix.
ComplexMatrix orthogonal_complement(const StateVector& phi);

/// The real homogeneous system whose solutions parametrize perturbations chi
/// with Re<phi|E_i|chi> = 0: one row per element, columns
/// (Re<phi|E_i|e_j>, -Im<phi|E_i|e_j>) over the complement basis e_j, with
/// phi taken at unit norm.
RealMatrix perturbation_system(const Povm& povm, const StateVector& phi, const ComplexMatrix& complement);

/// A perturbation chi, orthogonal to phi and with |chi| = |phi|, satisfying
/// Re<phi|E_i|chi> = 0 for every element. Throws KPhiTooLarge when too many
/// elements see phi for such a chi to be guaranteed, or when none exists.
StateVector build_chi(const Povm& povm, const StateVector& phi);

/// Builds and verifies the counterexample pair for a probe vector.
CounterexamplePair attack_with_probe(const Povm& povm, const StateVector& phi);

/// Probe from the common null vector of d-1 rank-one elements (default: the
/// first d-1), then attack_with_probe. Succeeds whenever fewer than 3d-2
/// elements are present.
CounterexamplePair theorem2_attack(const Povm& povm, std::optional<std::vector<int>> element_subset = std::nullopt);

}  // namespace psic
