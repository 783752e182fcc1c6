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

#include "psic/harness.hpp"

#include <algorithm>
#include <cmath>

namespace psic {

Rng child_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

StateVector haar_random_state(Eigen::Index d, Rng& rng) {
  if (d < 2) throw Error(ErrorCode::DimensionTooSmall, "Haar sampling needs d >= 2");
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexVector v(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v(i) = {re, im};
  }
  return StateVector::normalized_from(v);
}

std::vector<std::int64_t> sample_counts(const RealVector& probs, std::int64_t shots, Rng& rng) {
  if (shots < 1) throw Error(ErrorCode::InvalidArgument, "shots must be positive");
  if (probs.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty probability vector");
  if (probs.minCoeff() < -1e-8 || std::abs(probs.sum() - 1.0) > 1e-8) {
    throw Error(ErrorCode::InvalidArgument, "not a probability vector");
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(probs.size()), 0);
  std::int64_t remaining = shots;
  double mass = probs.cwiseMax(0.0).sum();
  for (Eigen::Index i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
    const double p = std::max(0.0, probs(i));
    const double q = mass > 0 ? std::clamp(p / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> draw(remaining, q);
    const std::int64_t k = draw(rng);
    counts[static_cast<std::size_t>(i)] = k;
    remaining -= k;
    mass -= p;
  }
  counts.back() += remaining;
  return counts;
}

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "fidelity of states of different dimension");
  return std::clamp(std::norm(a.coeffs.dot(b.coeffs)), 0.0, 1.0);
}

double phase_distance(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "distance of states of different dimension");
  const double overlap = std::min(1.0, std::abs(a.coeffs.dot(b.coeffs)));
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * overlap));
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.d < 2) throw Error(ErrorCode::DimensionTooSmall, "experiment needs d >= 2");
  if (cfg.samples < 1) throw Error(ErrorCode::InvalidArgument, "experiment needs at least one sample");
  if (cfg.shots && *cfg.shots < 1) throw Error(ErrorCode::InvalidArgument, "shots must be positive");
  if (!(cfg.tol > 0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
}

namespace {

RealVector frequencies(const std::vector<std::int64_t>& counts, std::int64_t shots) {
  RealVector f(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    f(static_cast<Eigen::Index>(i)) = static_cast<double>(counts[i]) / static_cast<double>(shots);
  }
  return f;
}

bool is_failure(const SampleRecord& r, bool exact) {
  if (r.status == "Ambiguous" || r.status == "Error") return true;
  return exact && r.status == "Inconsistent";
}

}  // namespace

SweepSummary summarize(const std::vector<SampleRecord>& records, bool exact) {
  SweepSummary s;
  if (records.empty()) return s;
  std::vector<const SampleRecord*> ordered;
  for (const auto& r : records) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->index < b->index; });
  double total = 0;
  for (const auto* r : ordered) {
    const double infidelity = 1.0 - r->fidelity;
    total += infidelity;
    s.max_infidelity = std::max(s.max_infidelity, infidelity);
    if (is_failure(*r, exact)) ++s.failure_count;
    if (r->status == "GaugeDegenerate") ++s.gauge_degenerate_count;
    if (r->status == "Inconsistent") ++s.inconsistent_count;
  }
  s.mean_infidelity = total / static_cast<double>(ordered.size());
  return s;
}

SweepResult round_trip_sweep(const ExperimentConfig& cfg, const std::vector<StateVector>& forced_states) {
  validate(cfg);
  const OperatorSet ops = build_fsc_operators(cfg.d);
  const Povm povm = normalize_operator_set(ops, Provenance::ConstructedFSC);
  const ReconstructionOptions opts{cfg.tol, cfg.shots.has_value()};

  SweepResult result;
  result.config = cfg;
  result.per_sample.reserve(static_cast<std::size_t>(cfg.samples));
  for (std::int64_t i = 0; i < cfg.samples; ++i) {
    Rng rng = child_stream(cfg.seed, static_cast<std::uint64_t>(i));
    const StateVector psi = forced_states.empty()
                                ? haar_random_state(cfg.d, rng)
                                : forced_states[static_cast<std::size_t>(i) % forced_states.size()];
    SampleRecord rec;
    rec.index = i;
    try {
      RealVector data = probabilities(povm, psi);
      if (cfg.shots) data = frequencies(sample_counts(data, *cfg.shots, rng), *cfg.shots);
      const ReconstructionReport report = reconstruct_from_probabilities(povm, ops, data, opts);
      rec.status = std::string(to_string(report.status));
      rec.residual = report.residual;
      if (report.recovered.norm() > 0) {
        rec.fidelity = fidelity(report.recovered, psi);
        rec.phase_distance = phase_distance(report.recovered, psi);
      } else {
        rec.phase_distance = std::sqrt(2.0);
      }
    } catch (const Error&) {
      rec.status = "Error";
      rec.residual = -1;  // no reconstruction to measure
      rec.phase_distance = std::sqrt(2.0);
    }
    result.per_sample.push_back(std::move(rec));
  }
  result.summary = summarize(result.per_sample, !cfg.shots.has_value());
  return result;
}

Reconstructor fsc_reconstructor(const Povm& povm, const OperatorSet& ops) {
  return [povm, ops](const RealVector& freq) {
    return reconstruct_from_probabilities(povm, ops, freq, {1e-9, true}).recovered;
  };
}

InstabilityReport instability_probe(const Povm& povm, const CounterexamplePair& pair, const Reconstructor& reconstruct,
                                    std::optional<std::int64_t> shots, std::int64_t trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be positive");
  if (shots && *shots < 1) throw Error(ErrorCode::InvalidArgument, "shots must be positive");
  const RealVector exact = probabilities(povm, pair.psi_plus);

  InstabilityReport report;
  report.shots = shots;
  std::int64_t misidentified = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng = child_stream(seed, static_cast<std::uint64_t>(t));
    const RealVector data = shots ? frequencies(sample_counts(exact, *shots, rng), *shots) : exact;
    const StateVector estimate = reconstruct(data);
    InstabilityTrial trial;
    if (estimate.norm() > 0) {
      const StateVector unit = StateVector::normalized_from(estimate.coeffs);
      trial.fidelity_plus = fidelity(unit, pair.psi_plus);
      trial.fidelity_minus = fidelity(unit, pair.psi_minus);
    }
    trial.misidentified = trial.fidelity_minus > trial.fidelity_plus;
    misidentified += trial.misidentified ? 1 : 0;
    report.mean_fidelity_plus += trial.fidelity_plus;
    report.mean_fidelity_minus += trial.fidelity_minus;
    report.trials.push_back(trial);
  }
  const auto n = static_cast<double>(trials);
  report.misidentification_fraction = static_cast<double>(misidentified) / n;
  report.mean_fidelity_plus /= n;
  report.mean_fidelity_minus /= n;
  return report;
}

InstabilityReport instability_probe(const Povm& povm, const OperatorSet& ops, const CounterexamplePair& pair,
                                    std::optional<std::int64_t> shots, std::int64_t trials, std::uint64_t seed) {
  InstabilityReport report = instability_probe(povm, pair, fsc_reconstructor(povm, ops), shots, trials, seed);
  report.exact_status = reconstruct_from_probabilities(povm, ops, probabilities(povm, pair.psi_plus)).status;
  return report;
}

}  // namespace psic
