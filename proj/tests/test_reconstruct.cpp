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
#include "psic/reconstruct.hpp"
#include "test_support.hpp"

using namespace psic;

namespace {
using C = std::complex<double>;

StateVector gauge_fixed_haar(Eigen::Index d, Rng& rng) { return *gauge_fix(haar_random_state(d, rng)); }

double normalized_fidelity(const StateVector& a, const StateVector& b) {
  return fidelity(StateVector::normalized_from(a.coeffs), StateVector::normalized_from(b.coeffs));
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}
}  // namespace

TEST_CASE("sign search on the worked example: c0 = 5, |Re c1| = 8, |Re c2| = 4, |sum| = 7") {
  const double abs_re[] = {8, 4};
  const SignSearch s = search_sign_patterns(5, abs_re, 0, 49, 1e-9);
  REQUIRE(s.survivors.size() == 1);
  CHECK(s.survivors[0] == SignPattern{-1, -1});
}

TEST_CASE("reconstruct_from_expectations on the worked example") {
  // |c_i|^2, then c0^2 + |c_i|^2 (Im c_i = 0), then (5 - 8 - 4)^2.
  RealVector values(6);
  values << 25, 64, 16, 89, 41, 49;
  const auto report = reconstruct_from_expectations(build_fsc_operators(3), values);
  CHECK(report.status == ReconstructionStatus::Unique);
  CHECK(report.recovered.coeffs(0) == C(5, 0));
  CHECK(report.recovered.coeffs(1).real() == -8.0);
  CHECK(report.recovered.coeffs(2).real() == -4.0);
  CHECK(report.recovered.coeffs(1).imag() == 0.0);
  CHECK(report.residual == 0.0);
}

TEST_CASE("reconstruct_from_expectations") {
  const OperatorSet ops3 = build_fsc_operators(3);
  SUBCASE("e0 in d=3") {
    const auto report = reconstruct_from_expectations(ops3, expectations(ops3, StateVector::basis(3, 0)));
    CHECK(report.status == ReconstructionStatus::Unique);
    CHECK((report.recovered.coeffs - ComplexVector::Unit(3, 0)).norm() < 1e-15);
  }
  SUBCASE("Haar state d=4 seed 11") {
    Rng rng = child_stream(11, 0);
    const StateVector psi = haar_random_state(4, rng);
    const OperatorSet ops = build_fsc_operators(4);
    const auto report = reconstruct_from_expectations(ops, expectations(ops, psi));
    CHECK(report.status == ReconstructionStatus::Unique);
    CHECK(normalized_fidelity(report.recovered, psi) >= 1 - 1e-8);
    CHECK(report.recovered.coeffs(0).imag() == 0.0);
    CHECK(report.recovered.coeffs(0).real() > 0);
  }
  SUBCASE("states on the ambiguity set report every consistent pattern") {
    ComplexVector c(3);
    c << 1, C(0.5, 0.2), C(-0.5, -0.1);
    const auto report = reconstruct_from_expectations(ops3, expectations(ops3, StateVector::unnormalized(c)));
    CHECK(report.status == ReconstructionStatus::Ambiguous);
    REQUIRE(report.sign_solutions.size() == 2);
    CHECK(report.sign_solutions[0] == SignPattern{-1, 1});
    CHECK(report.sign_solutions[1] == SignPattern{1, -1});
    // Lexicographically first pattern is the recovered one.
    CHECK(report.recovered.coeffs(1).real() == doctest::Approx(-0.5));
    CHECK(report.recovered.coeffs(2).real() == doctest::Approx(0.5));
  }
  SUBCASE("complementary-sum ambiguity") {
    ComplexVector c(3);
    c << 0.5, C(-0.5, 0.1), C(0.3, 0.2);
    const auto report = reconstruct_from_expectations(ops3, expectations(ops3, StateVector::unnormalized(c)));
    CHECK(report.status == ReconstructionStatus::Ambiguous);
    CHECK(report.sign_solutions.size() == 2);
  }
  SUBCASE("c0 = 0 is gauge degenerate") {
    ComplexVector c(3);
    c << 0, C(0.6, 0.1), C(0.2, -0.3);
    const auto report = reconstruct_from_expectations(ops3, expectations(ops3, StateVector::unnormalized(c)));
    CHECK(report.status == ReconstructionStatus::GaugeDegenerate);
    CHECK(report.sign_solutions.empty());
  }
  SUBCASE("negative magnitude is inconsistent data") {
    RealVector values(6);
    values << 1, -0.5, 0, 1, 1, 1;
    CHECK(code_of([&] { reconstruct_from_expectations(ops3, values); }) == ErrorCode::InconsistentData);
  }
  SUBCASE("imaginary part larger than the modulus is inconsistent data") {
    // |c1|^2 = 0.01 but the phase value implies Im c1 = 0.5.
    RealVector values(6);
    values << 1, 0.01, 0, 2.01, 1, 1;
    CHECK(code_of([&] { reconstruct_from_expectations(ops3, values); }) == ErrorCode::InconsistentData);
    ReconstructionOptions plug_in{1e-9, true};
    CHECK(reconstruct_from_expectations(ops3, values, plug_in).status == ReconstructionStatus::Inconsistent);
  }
  SUBCASE("wrong value count") {
    CHECK(code_of([&] { reconstruct_from_expectations(ops3, RealVector::Ones(5)); }) ==
          ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("zero real parts never make a state ambiguous") {
  const OperatorSet ops = build_fsc_operators(4);
  ComplexVector c(4);
  c << 0.5, C(0, 0.3), C(0.4, 0.2), C(0, -0.1);
  const auto report = reconstruct_from_expectations(ops, expectations(ops, StateVector::unnormalized(c)));
  CHECK(report.status == ReconstructionStatus::Unique);
  REQUIRE(report.sign_solutions.size() == 1);
  CHECK(report.sign_solutions[0][0] == 1);
  CHECK(report.sign_solutions[0][2] == 1);
  CHECK((report.recovered.coeffs - c).norm() < 1e-12);
}

TEST_CASE("a tiny negative real part below the pinning threshold still reconstructs") {
  const OperatorSet ops = build_fsc_operators(4);
  ComplexVector c(4);
  c << 0.17, C(-0.22, 0.11), C(-1.7e-5, 0.17), C(0.3, 0.12);
  const auto report = reconstruct_from_expectations(ops, expectations(ops, StateVector::unnormalized(c)));
  CHECK(report.status == ReconstructionStatus::Unique);
  CHECK(report.recovered.coeffs(2).real() == doctest::Approx(1.7e-5).epsilon(1e-6));
  CHECK(normalized_fidelity(report.recovered, StateVector::unnormalized(c)) >= 1 - 1e-8);
}

TEST_CASE("every surviving pattern reproduces the all-ones expectation") {
  for (int d = 2; d <= 7; ++d) {
    const OperatorSet ops = build_fsc_operators(d);
    for (int rep = 0; rep < 30; ++rep) {
      Rng rng = child_stream(500 + static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(rep));
      StateVector psi = gauge_fixed_haar(d, rng);
      // Every third state is pushed onto the ambiguity set.
      if (rep % 3 == 0 && d >= 3) {
        psi.coeffs(2) = {-psi.coeffs(1).real(), psi.coeffs(2).imag()};
      }
      const RealVector values = expectations(ops, psi);
      const auto report = reconstruct_from_expectations(ops, values);
      for (const auto& pattern : report.sign_solutions) {
        std::complex<double> total = report.recovered.coeffs(0);
        for (int i = 1; i < d; ++i) {
          const auto& ci = report.recovered.coeffs(i);
          total += C(pattern[static_cast<std::size_t>(i - 1)] * std::abs(ci.real()), ci.imag());
        }
        CHECK(std::abs(std::norm(total) - values(fsc_sum_index(d))) <= 1e-7);
      }
    }
  }
}

TEST_CASE("reconstruction scales with the state") {
  const OperatorSet ops = build_fsc_operators(5);
  for (int rep = 0; rep < 20; ++rep) {
    Rng rng = child_stream(808, static_cast<std::uint64_t>(rep));
    const StateVector psi = gauge_fixed_haar(5, rng);
    const double s = 0.25 + rep;
    const auto a = reconstruct_from_expectations(ops, expectations(ops, psi));
    const auto b = reconstruct_from_expectations(ops, expectations(ops, StateVector::unnormalized(psi.coeffs * s)));
    CHECK(a.status == b.status);
    CHECK((b.recovered.coeffs - s * a.recovered.coeffs).cwiseAbs().maxCoeff() <= 1e-9 * s);
  }
}

TEST_CASE("reconstruct_from_probabilities") {
  SUBCASE("e0, d=3") {
    const OperatorSet ops = build_fsc_operators(3);
    const Povm povm = normalize_operator_set(ops, Provenance::ConstructedFSC);
    const StateVector e0 = StateVector::basis(3, 0);
    const auto report = reconstruct_from_probabilities(povm, ops, probabilities(povm, e0));
    CHECK(report.status == ReconstructionStatus::Unique);
    CHECK(fidelity(report.recovered, e0) >= 1 - 1e-8);
    CHECK(report.recovered.normalized);
    CHECK(report.residual <= 1e-8);
  }
  SUBCASE("Haar state d=5 seed 3") {
    const OperatorSet ops = build_fsc_operators(5);
    const Povm povm = normalize_operator_set(ops, Provenance::ConstructedFSC);
    Rng rng = child_stream(3, 0);
    const StateVector psi = haar_random_state(5, rng);
    const auto report = reconstruct_from_probabilities(povm, ops, probabilities(povm, psi));
    CHECK(report.status == ReconstructionStatus::Unique);
    CHECK(fidelity(report.recovered, psi) >= 1 - 1e-8);
    CHECK(report.recovered.coeffs(0).imag() == 0.0);
    REQUIRE(report.frame_state.has_value());
  }
  SUBCASE("state whose operator-frame image has c0 = 0") {
    const OperatorSet ops = build_fsc_operators(3);
    const Povm povm = normalize_operator_set(ops, Provenance::ConstructedFSC);
    ComplexVector phi(3);
    phi << 0, C(0.3, 0.4), C(-0.5, 0.1);
    const StateVector psi = StateVector::normalized_from(psd_sqrt(ops.gram_sum).matrix() * phi);
    const auto report = reconstruct_from_probabilities(povm, ops, probabilities(povm, psi));
    CHECK(report.status == ReconstructionStatus::GaugeDegenerate);
  }
  SUBCASE("not a probability vector") {
    const OperatorSet ops = build_fsc_operators(2);
    const Povm povm = normalize_operator_set(ops, Provenance::ConstructedFSC);
    CHECK(code_of([&] { reconstruct_from_probabilities(povm, ops, RealVector::Constant(4, 0.5)); }) ==
          ErrorCode::InconsistentData);
  }
}

TEST_CASE("round trip through exact probabilities, d = 2..8, 1000 states each") {
  for (int d = 2; d <= 8; ++d) {
    const OperatorSet ops = build_fsc_operators(d);
    const Povm povm = normalize_operator_set(ops, Provenance::ConstructedFSC);
    const ComplexMatrix inv_root = psd_inv_sqrt(ops.gram_sum).matrix();
    int checked = 0;
    double worst = 1;
    for (int rep = 0; rep < 1000; ++rep) {
      Rng rng = child_stream(1000 + static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(rep));
      const StateVector psi = haar_random_state(d, rng);
      const auto frame = gauge_fix(StateVector::unnormalized(inv_root * psi.coeffs));
      if (!frame || !certify_failure_set(*frame, 1e-10).empty()) continue;
      const auto report = reconstruct_from_probabilities(povm, ops, probabilities(povm, psi));
      worst = std::min(worst, fidelity(report.recovered, psi));
      ++checked;
    }
    CHECK(checked == 1000);
    CHECK_MESSAGE(worst >= 1 - 1e-8, "d=" << d << " worst fidelity " << worst);
  }
}

TEST_CASE("gauge_fix") {
  ComplexVector c(2);
  c << C(0, 2), C(1, 1);
  const auto fixed = gauge_fix(StateVector::unnormalized(c));
  REQUIRE(fixed.has_value());
  CHECK(fixed->coeffs(0) == C(2, 0));
  CHECK(std::abs(fixed->coeffs(1) - C(1, -1)) < 1e-15);
  CHECK_FALSE(gauge_fix(StateVector::basis(2, 1)).has_value());
}

TEST_CASE("certify_failure_set") {
  SUBCASE("d=3, Re parts (c0, a, -a)") {
    ComplexVector c(3);
    c << 0.6, C(0.3, 0.25), C(-0.3, -0.4);
    const auto certs = certify_failure_set(StateVector::unnormalized(c));
    REQUIRE(certs.size() == 1);
    CHECK(certs[0].subset_u == std::vector<int>{1, 2});
    CHECK(certs[0].which == FailureCondition::SumOverU);
    CHECK(certs[0].violation <= 1e-10);
    const OperatorSet ops = build_fsc_operators(3);
    CHECK((expectations(ops, certs[0].alternative) - expectations(ops, StateVector::unnormalized(c)))
              .cwiseAbs()
              .maxCoeff() <= 1e-9);
    CHECK(std::abs(certs[0].alternative.coeffs(1).real() + 0.3) < 1e-15);
  }
  SUBCASE("complementary sum") {
    ComplexVector c(4);
    c << 0.4, C(-0.4, 0.1), C(0.2, 0.3), C(0.35, -0.2);
    const auto certs = certify_failure_set(StateVector::unnormalized(c));
    bool found = false;
    for (const auto& cert : certs) {
      if (cert.which == FailureCondition::SumOverE && cert.subset_u == std::vector<int>{2, 3}) found = true;
    }
    CHECK(found);
  }
  SUBCASE("e0 in d=2 has no distinct flip") { CHECK(certify_failure_set(StateVector::basis(2, 0)).empty()); }
  SUBCASE("Haar state d=4 seed 19") {
    Rng rng = child_stream(19, 0);
    CHECK(certify_failure_set(gauge_fixed_haar(4, rng), 1e-10).empty());
  }
  SUBCASE("requires a gauge-fixed state") {
    ComplexVector c(2);
    c << C(0, 1), 1;
    CHECK(code_of([&] { certify_failure_set(StateVector::unnormalized(c)); }) == ErrorCode::NotGaugeFixed);
  }
}

TEST_CASE("certificates are self-verifying on constructed ambiguity-set states") {
  for (int d = 3; d <= 7; ++d) {
    const OperatorSet ops = build_fsc_operators(d);
    for (int rep = 0; rep < 20; ++rep) {
      Rng rng = child_stream(4242 + static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(rep));
      StateVector psi = gauge_fixed_haar(d, rng);
      psi.coeffs(d - 1) = {-(psi.coeffs(1).real()), psi.coeffs(d - 1).imag()};
      for (int i = 2; i < d - 1; ++i) psi.coeffs(i) = {0.0, psi.coeffs(i).imag()};
      const auto certs = certify_failure_set(psi, 1e-10);
      CHECK_FALSE(certs.empty());
      const RealVector base = expectations(ops, psi);
      for (const auto& cert : certs) {
        CHECK((expectations(ops, cert.alternative) - base).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK((cert.alternative.coeffs - psi.coeffs).cwiseAbs().maxCoeff() > 1e-10);
      }
    }
  }
}
