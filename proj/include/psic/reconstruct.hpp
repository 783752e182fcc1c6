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
#include <string_view>
#include <vector>

#include "psic/povm.hpp"

namespace psic {

enum class ReconstructionStatus {
  Unique,
  Ambiguous,
  GaugeDegenerate,
  // No sign pattern reproduces the data within tolerance (noisy or
  // unrealizable input); `recovered` is then the best-fitting pattern.
  Inconsistent,
};

std::string_view to_string(ReconstructionStatus s);
ReconstructionStatus reconstruction_status_from_string(std::string_view s);

/// Signs of Re c_1 .. Re c_{d-1}, each +1 or -1.
using SignPattern = std::vector<int>;

struct ReconstructionOptions {
  /// Relative tolerance; the absolute tolerance is tol * max(1, max |value|).
  double tol = 1e-9;
  /// Plug-in mode for noisy data: clamp unrealizable magnitudes to zero and
  /// return the best-fitting sign pattern instead of raising
  /// InconsistentData.
  bool plug_in = false;
};

struct ReconstructionReport {
  /// Gauge-fixed: c_0 real and >= 0.
  StateVector recovered;
  /// Every pattern matching the data, lexicographic order (-1 before +1).
  /// Indices whose |Re c_i| is indistinguishable from zero are pinned to +1.
  std::vector<SignPattern> sign_solutions;
  ReconstructionStatus status = ReconstructionStatus::Unique;
  double residual = 0;
  /// For reconstruction from probabilities: the un-normalized vector
  /// G^{-1/2} psi recovered in the operator frame.
  std::optional<StateVector> frame_state;
};

struct SignSearch {
  std::vector<SignPattern> survivors;
  SignPattern best;
  double best_mismatch = 0;
  double bound = 0;
  std::vector<bool> zero_magnitude;
};

/// Finds the signs of Re c_i given c_0 > 0, |Re c_i| (i = 1..d-1), the sum
/// of imaginary parts and the all-ones expectation
/// (c_0 + sum s_i |Re c_i|)^2 + (sum Im c_i)^2. `tol` is absolute and is the
/// uncertainty assumed for every squared input.
SignSearch search_sign_patterns(double c0, std::span<const double> abs_re, double imag_sum,
                                double sum_value, double tol);

/// Recovers c_0..c_{d-1} from the 2d expectation values of the operator set
/// in its fixed order.
ReconstructionReport reconstruct_from_expectations(const OperatorSet& ops, const RealVector& values,
                                                   const ReconstructionOptions& opts = {});

/// Recovers a normalized state from outcome probabilities of the normalized
/// POVM built from `ops`: reconstructs phi = G^{-1/2} psi in the operator
/// frame, then maps back with G^{1/2}.
ReconstructionReport reconstruct_from_probabilities(const Povm& povm, const OperatorSet& ops,
                                                    const RealVector& probs,
                                                    const ReconstructionOptions& opts = {});

/// Multiplies by the global phase that makes c_0 real and non-negative.
/// Returns nullopt when |c_0| <= tol * |psi|.
std::optional<StateVector> gauge_fix(const StateVector& psi, double tol = 0);

enum class FailureCondition { SumOverU, SumOverE };
std::string_view to_string(FailureCondition c);

struct AmbiguityCertificate {
  std::vector<int> subset_u;  // indices in 1..d-1 whose Re c_i flip
  FailureCondition which = FailureCondition::SumOverU;
  StateVector alternative;
  double violation = 0;
};

/// Every sign flip of a gauge-fixed state that leaves all 2d operator
/// expectations unchanged, found by checking both subset-sum conditions for
/// each nonempty U. Each alternative is verified against the original's
/// expectations before it is returned. An empty result means the state is
/// uniquely determined at this tolerance.
std::vector<AmbiguityCertificate> certify_failure_set(const StateVector& psi, double tol = 1e-10);

}  // namespace psic
