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

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "psic/adversary.hpp"
#include "psic/povm.hpp"
#include "psic/reconstruct.hpp"

namespace psic {

/// 64-bit Mersenne Twister. Every independent unit of work (one sample of a
/// sweep, one trial of a probe) draws from its own child stream, seeded from
/// (seed, index) through std::seed_seq, so results do not depend on the order
/// in which units are evaluated.
using Rng = std::mt19937_64;

Rng child_stream(std::uint64_t seed, std::uint64_t index);

/// Haar-distributed pure state: i.i.d. standard complex Gaussians, normalized.
StateVector haar_random_state(Eigen::Index d, Rng& rng);

/// Multinomial draw by sequential conditional binomials.
std::vector<std::int64_t> sample_counts(const RealVector& probs, std::int64_t shots, Rng& rng);

/// |<a|b>|^2, clamped to [0, 1].
double fidelity(const StateVector& a, const StateVector& b);

/// min over theta of |a - e^{i theta} b| = sqrt(2 - 2|<a|b>|).
double phase_distance(const StateVector& a, const StateVector& b);

struct ExperimentConfig {
  Eigen::Index d = 2;
  std::int64_t samples = 1;
  std::optional<std::int64_t> shots;  // absent: exact probabilities
  std::uint64_t seed = 0;
  double tol = 1e-9;
};

void validate(const ExperimentConfig& cfg);

struct SampleRecord {
  std::int64_t index = 0;
  double fidelity = 0;
  double phase_distance = 0;
  /// Reconstruction status name, or "Error" when reconstruction threw.
  std::string status;
  double residual = 0;
};

struct SweepSummary {
  double mean_infidelity = 0;
  double max_infidelity = 0;
  std::int64_t failure_count = 0;  // Ambiguous or Error
  std::int64_t gauge_degenerate_count = 0;
  std::int64_t inconsistent_count = 0;

  friend bool operator==(const SweepSummary&, const SweepSummary&) = default;
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<SampleRecord> per_sample;
  SweepSummary summary;
};

/// Summary statistics recomputed from the records, visited in index order.
/// Inconsistent statuses count as failures only for exact-probability data.
SweepSummary summarize(const std::vector<SampleRecord>& records, bool exact_probabilities);

/// Draws cfg.samples Haar states and reconstructs each from its outcome
/// statistics under the 2d-element POVM. Exact probabilities use strict
/// reconstruction; finite-shot frequencies use plug-in reconstruction.
/// `forced_states`, when non-empty, replaces the random draws.
SweepResult round_trip_sweep(const ExperimentConfig& cfg, const std::vector<StateVector>& forced_states = {});

/// Maps outcome frequencies to a state estimate.
using Reconstructor = std::function<StateVector(const RealVector& frequencies)>;

/// Plug-in reconstruction for the 2d-element construction.
Reconstructor fsc_reconstructor(const Povm& povm, const OperatorSet& ops);

struct InstabilityTrial {
  double fidelity_plus = 0;
  double fidelity_minus = 0;
  bool misidentified = false;  // closer to psi_minus than to psi_plus
};

struct InstabilityReport {
  std::optional<std::int64_t> shots;
  std::vector<InstabilityTrial> trials;
  double misidentification_fraction = 0;
  double mean_fidelity_plus = 0;
  double mean_fidelity_minus = 0;
  /// Status of the exact-data reconstruction, when the FSC reconstructor is
  /// used.
  std::optional<ReconstructionStatus> exact_status;
};

/// Simulates data from pair.psi_plus and records how close each estimate is
/// to psi_plus and to psi_minus. With no shot count every trial uses the
/// exact probabilities.
InstabilityReport instability_probe(const Povm& povm, const CounterexamplePair& pair, const Reconstructor& reconstruct,
                                    std::optional<std::int64_t> shots, std::int64_t trials, std::uint64_t seed);

/// Same, with the FSC reconstructor; also records the exact-data status.
InstabilityReport instability_probe(const Povm& povm, const OperatorSet& ops, const CounterexamplePair& pair,
                                    std::optional<std::int64_t> shots, std::int64_t trials, std::uint64_t seed);

}  // namespace psic
