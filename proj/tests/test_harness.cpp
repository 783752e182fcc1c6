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

#include <doctest.h>

#include <cmath>

#include "psic/harness.hpp"
#include "test_support.hpp"

using namespace psic;

TEST_CASE("haar_random_state") {
  SUBCASE("normalized") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng = child_stream(seed, 0);
      const StateVector s = haar_random_state(2, rng);
      CHECK(std::abs(s.norm() - 1) <= 1e-12);
      CHECK(s.normalized);
    }
  }
  SUBCASE("deterministic per seed") {
    Rng a = child_stream(42, 0), b = child_stream(42, 0), c = child_stream(42, 1);
    const StateVector x = haar_random_state(5, a);
    CHECK(x.coeffs == haar_random_state(5, b).coeffs);
    CHECK(x.coeffs != haar_random_state(5, c).coeffs);
  }
  SUBCASE("marginal |c0|^2 has mean 1/2 in d=2") {
    Rng rng = child_stream(2024, 0);
    double total = 0;
    for (int i = 0; i < 10000; ++i) total += std::norm(haar_random_state(2, rng).coeffs(0));
    CHECK(std::abs(total / 10000 - 0.5) <= 0.02);
  }
}

TEST_CASE("sample_counts") {
  SUBCASE("certain outcome") {
    Rng rng = child_stream(1, 0);
    RealVector p(2);
    p << 1, 0;
    CHECK(sample_counts(p, 100, rng) == std::vector<std::int64_t>{100, 0});
  }
  SUBCASE("fair coin, 1e6 shots, within 4 sigma") {
    Rng rng = child_stream(5, 0);
    const auto counts = sample_counts(RealVector::Constant(2, 0.5), 1000000, rng);
    CHECK(counts[0] + counts[1] == 1000000);
    CHECK(std::abs(counts[0] - 500000) <= 2000);
  }
  SUBCASE("frequencies converge at the 1/sqrt(shots) rate") {
    const Povm povm = build_fsc_povm(3);
    for (std::int64_t shots : {100, 10000, 1000000}) {
      int within = 0;
      const int trials = 200;
      for (int t = 0; t < trials; ++t) {
        Rng rng = child_stream(static_cast<std::uint64_t>(shots), static_cast<std::uint64_t>(t));
        const RealVector p = probabilities(povm, haar_random_state(3, rng));
        const auto counts = sample_counts(p, shots, rng);
        double worst = 0;
        std::int64_t total = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
          worst = std::max(worst, std::abs(static_cast<double>(counts[i]) / shots - p(static_cast<Eigen::Index>(i))));
          total += counts[i];
        }
        CHECK(total == shots);
        within += worst <= 5.0 / std::sqrt(static_cast<double>(shots)) ? 1 : 0;
      }
      CHECK(within >= 0.95 * trials);
    }
  }
  SUBCASE("deterministic given the stream") {
    Rng a = child_stream(9, 3), b = child_stream(9, 3);
    const RealVector p = RealVector::Constant(4, 0.25);
    CHECK(sample_counts(p, 12345, a) == sample_counts(p, 12345, b));
  }
  SUBCASE("rejects non-probability input") {
    Rng rng = child_stream(0, 0);
    CHECK_THROWS_AS(sample_counts(RealVector::Constant(2, 0.7), 10, rng), Error);
  }
}

TEST_CASE("fidelity") {
  Rng rng = child_stream(17, 0);
  const StateVector psi = haar_random_state(4, rng);
  CHECK(fidelity(psi, psi) == doctest::Approx(1));
  CHECK(fidelity(StateVector::basis(2, 0), StateVector::basis(2, 1)) == 0.0);
  const StateVector plus = StateVector::normalized_from(ComplexVector::Ones(2));
  ComplexVector m(2);
  m << 1, -1;
  CHECK(fidelity(plus, StateVector::normalized_from(m)) < 1e-30);
  const StateVector rotated{psi.coeffs * std::polar(1.0, 0.7), true};
  CHECK(fidelity(psi, rotated) == doctest::Approx(1));
  CHECK(phase_distance(psi, rotated) < 1e-7);
  CHECK_THROWS_AS(fidelity(psi, plus), Error);
}

TEST_CASE("round_trip_sweep") {
  SUBCASE("exact probabilities, d=3, 1000 samples, seed 1") {
    const SweepResult r = round_trip_sweep({3, 1000, std::nullopt, 1, 1e-9});
    CHECK(r.per_sample.size() == 1000);
    CHECK(r.summary.max_infidelity <= 1e-8);
    CHECK(r.summary.failure_count == 0);
    CHECK(r.summary == summarize(r.per_sample, true));
  }
  SUBCASE("forced e0 in d=2") {
    const SweepResult r = round_trip_sweep({2, 1, std::nullopt, 0, 1e-9}, {StateVector::basis(2, 0)});
    CHECK(std::abs(r.per_sample[0].fidelity - 1) <= 1e-10);
    CHECK(r.per_sample[0].status == "Unique");
  }
  SUBCASE("deterministic") {
    const ExperimentConfig cfg{4, 50, 5000, 77, 1e-9};
    const SweepResult a = round_trip_sweep(cfg);
    const SweepResult b = round_trip_sweep(cfg);
    CHECK(a.summary == b.summary);
    for (std::size_t i = 0; i < a.per_sample.size(); ++i) CHECK(a.per_sample[i].fidelity == b.per_sample[i].fidelity);
  }
  SUBCASE("more shots, better estimates") {
    double previous = 2;
    for (std::int64_t shots : {10000, 100000, 1000000}) {
      const SweepResult r = round_trip_sweep({3, 200, shots, 7, 1e-9});
      CHECK(r.summary.mean_infidelity < previous);
      CHECK(std::isfinite(r.summary.mean_infidelity));
      previous = r.summary.mean_infidelity;
    }
  }
  SUBCASE("rejects bad configurations") {
    CHECK_THROWS_AS(round_trip_sweep({1, 10, std::nullopt, 0, 1e-9}), Error);
    CHECK_THROWS_AS(round_trip_sweep({3, 0, std::nullopt, 0, 1e-9}), Error);
  }
}

TEST_CASE("instability_probe") {
  const OperatorSet ops = build_fsc_operators(3);
  const Povm povm = normalize_operator_set(ops, Provenance::ConstructedFSC);
  const CounterexamplePair pair = theorem2_attack(povm);

  SUBCASE("exact data cannot separate the pair") {
    const auto report = instability_probe(povm, ops, pair, std::nullopt, 3, 1);
    REQUIRE(report.exact_status.has_value());
    const bool ambiguous = *report.exact_status == ReconstructionStatus::Ambiguous;
    const bool tied = std::abs(report.trials[0].fidelity_plus - report.trials[0].fidelity_minus) <= 1e-9;
    CHECK((ambiguous || tied));
  }
  SUBCASE("finite shots report a misidentification fraction") {
    const auto report = instability_probe(povm, ops, pair, 1000000, 20, 11);
    CHECK(report.trials.size() == 20);
    CHECK(report.misidentification_fraction >= 0);
    CHECK(report.misidentification_fraction <= 1);
    MESSAGE("misidentification fraction at 1e6 shots: " << report.misidentification_fraction);
  }
  SUBCASE("projective d=2: fidelities to an orthonormal pair sum to one") {
    const Povm proj = psic::testing::projective_povm(2);
    const CounterexamplePair p2 = attack_with_probe(proj, StateVector::basis(2, 0));
    const Reconstructor root = [](const RealVector& f) {
      return StateVector::normalized_from(f.cwiseSqrt().cast<std::complex<double>>());
    };
    const auto report = instability_probe(proj, p2, root, 1000, 25, 4);
    for (const auto& t : report.trials) CHECK(t.fidelity_plus + t.fidelity_minus == doctest::Approx(1).epsilon(1e-12));
  }
}
