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

#include "psic/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

namespace psic {

namespace {

constexpr int kMaxFreeSigns = 30;

double relative_scale(const RealVector& values) {
  return values.size() == 0 ? 1.0 : std::max(1.0, values.cwiseAbs().maxCoeff());
}

// Error in sqrt(x) when x is known to +-tol.
double sqrt_error(double root, double tol) { return tol / (root + std::sqrt(tol)); }

void require_fsc_layout(const OperatorSet& ops) {
  const Eigen::Index d = ops.dim;
  if (static_cast<Eigen::Index>(ops.size()) != 2 * d) {
    std::ostringstream os;
    os << "expected " << 2 * d << " operators in the fixed order, got " << ops.size();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  const OperatorSet reference = build_fsc_operators(d);
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const double gap = max_abs(ComplexMatrix(ops.operators[k].matrix() - reference.operators[k].matrix()));
    if (gap > 1e-12) {
      throw Error(ErrorCode::InvalidArgument,
                  "operator " + std::to_string(k) + " does not match the reconstruction operator set");
    }
  }
}

}  // namespace

std::string_view to_string(ReconstructionStatus s) {
  switch (s) {
    case ReconstructionStatus::Unique: return "Unique";
    case ReconstructionStatus::Ambiguous: return "Ambiguous";
    case ReconstructionStatus::GaugeDegenerate: return "GaugeDegenerate";
    case ReconstructionStatus::Inconsistent: return "Inconsistent";
  }
  return "Inconsistent";
}

ReconstructionStatus reconstruction_status_from_string(std::string_view s) {
  if (s == "Unique") return ReconstructionStatus::Unique;
  if (s == "Ambiguous") return ReconstructionStatus::Ambiguous;
  if (s == "GaugeDegenerate") return ReconstructionStatus::GaugeDegenerate;
  if (s == "Inconsistent") return ReconstructionStatus::Inconsistent;
  throw Error(ErrorCode::ParseError, "unknown reconstruction status '" + std::string(s) + "'");
}

std::string_view to_string(FailureCondition c) {
  return c == FailureCondition::SumOverU ? "SumOverU" : "SumOverE";
}

SignSearch search_sign_patterns(double c0, std::span<const double> abs_re, double imag_sum, double sum_value,
                                double tol) {
  const std::size_t m = abs_re.size();
  const double root_tol = std::sqrt(tol);

  SignSearch out;
  out.zero_magnitude.resize(m);
  std::vector<std::size_t> free;
  double bound = sqrt_error(c0, tol);
  for (std::size_t i = 0; i < m; ++i) {
    out.zero_magnitude[i] = abs_re[i] <= root_tol;
    if (out.zero_magnitude[i]) {
      // Pinned to +1; the true sign may be -1.
      bound += 2 * abs_re[i] + sqrt_error(abs_re[i], tol);
    } else {
      bound += sqrt_error(abs_re[i], tol);
      free.push_back(i);
    }
  }
  if (free.size() > kMaxFreeSigns) {
    throw Error(ErrorCode::InvalidArgument, "sign search over " + std::to_string(free.size()) + " signs is too large");
  }
  const double target = std::sqrt(std::max(0.0, sum_value - imag_sum * imag_sum));
  bound += sqrt_error(target, tol);
  out.bound = bound;

  double pinned = c0;
  for (std::size_t i = 0; i < m; ++i) {
    if (out.zero_magnitude[i]) pinned += abs_re[i];
  }

  const std::size_t nfree = free.size();
  const std::uint64_t count = std::uint64_t{1} << nfree;
  out.best_mismatch = std::numeric_limits<double>::infinity();
  SignPattern pattern(m, 1);
  // Bit (nfree - 1 - j) of mask is the sign of free index j, 0 meaning -1,
  // so ascending masks visit patterns in lexicographic order.
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double real_sum = pinned;
    for (std::size_t j = 0; j < nfree; ++j) {
      const int s = ((mask >> (nfree - 1 - j)) & 1U) ? 1 : -1;
      pattern[free[j]] = s;
      real_sum += s * abs_re[free[j]];
    }
    const double mismatch = std::abs(std::abs(real_sum) - target);
    if (mismatch <= bound) out.survivors.push_back(pattern);
    if (mismatch < out.best_mismatch) {
      out.best_mismatch = mismatch;
      out.best = pattern;
    }
  }
  return out;
}

ReconstructionReport reconstruct_from_expectations(const OperatorSet& ops, const RealVector& values,
                                                   const ReconstructionOptions& opts) {
  require_fsc_layout(ops);
  const Eigen::Index d = ops.dim;
  if (values.size() != 2 * d) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(2 * d) + " values, got " + std::to_string(values.size()));
  }
  if (!all_finite(values)) throw Error(ErrorCode::NonFinite, "non-finite expectation value");
  const double eps = opts.tol * relative_scale(values);
  bool clamped = false;

  for (Eigen::Index i = 0; i < d; ++i) {
    if (values(i) < -eps) {
      if (!opts.plug_in) {
        std::ostringstream os;
        os << "|c_" << i << "|^2 = " << values(i) << " is negative";
        throw Error(ErrorCode::InconsistentData, os.str());
      }
      clamped = true;
    }
  }

  ReconstructionReport report;
  ComplexVector c = ComplexVector::Zero(d);

  if (values(0) <= eps) {
    // c_0 = 0: the phase convention that pins down the other coefficients is
    // unavailable. Report magnitudes only.
    for (Eigen::Index i = 1; i < d; ++i) c(i) = std::sqrt(std::max(0.0, values(i)));
    report.recovered = StateVector::unnormalized(c);
    report.status = ReconstructionStatus::GaugeDegenerate;
    report.residual = (expectations(ops, report.recovered) - values).cwiseAbs().maxCoeff();
    return report;
  }

  const double c0 = std::sqrt(values(0));
  std::vector<double> abs_re(static_cast<std::size_t>(d - 1));
  std::vector<double> imag(static_cast<std::size_t>(d - 1));
  for (Eigen::Index i = 1; i < d; ++i) {
    const double mag2 = std::max(0.0, values(i));
    const double im = (values(fsc_phase_index(d, i)) - values(0) - mag2) / (2 * c0);
    const double re2 = mag2 - im * im;
    if (re2 < -eps) {
      if (!opts.plug_in) {
        std::ostringstream os;
        os << "(Re c_" << i << ")^2 = " << re2 << " is negative";
        throw Error(ErrorCode::InconsistentData, os.str());
      }
      clamped = true;
    }
    abs_re[static_cast<std::size_t>(i - 1)] = std::sqrt(std::max(0.0, re2));
    imag[static_cast<std::size_t>(i - 1)] = im;
  }
  double imag_sum = 0;
  for (double im : imag) imag_sum += im;

  SignSearch search = search_sign_patterns(c0, abs_re, imag_sum, values(fsc_sum_index(d)), eps);

  const SignPattern& chosen =
      (!opts.plug_in && !search.survivors.empty()) ? search.survivors.front() : search.best;
  c(0) = c0;
  for (Eigen::Index i = 1; i < d; ++i) {
    const auto k = static_cast<std::size_t>(i - 1);
    c(i) = {chosen[k] * abs_re[k], imag[k]};
  }

  report.recovered = StateVector::unnormalized(c);
  report.sign_solutions = std::move(search.survivors);
  if (clamped || report.sign_solutions.empty()) {
    report.status = ReconstructionStatus::Inconsistent;
  } else if (report.sign_solutions.size() == 1) {
    report.status = ReconstructionStatus::Unique;
  } else {
    report.status = ReconstructionStatus::Ambiguous;
  }
  report.residual = (expectations(ops, report.recovered) - values).cwiseAbs().maxCoeff();
  return report;
}

ReconstructionReport reconstruct_from_probabilities(const Povm& povm, const OperatorSet& ops,
                                                    const RealVector& probs, const ReconstructionOptions& opts) {
  if (povm.dim != ops.dim || povm.size() != ops.size()) {
    throw Error(ErrorCode::DimensionMismatch, "POVM and operator set do not correspond");
  }
  if (probs.size() != static_cast<Eigen::Index>(povm.size())) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(povm.size()) + " probabilities, got " + std::to_string(probs.size()));
  }
  if (!opts.plug_in) {
    const double total = probs.sum();
    if (std::abs(total - 1.0) > 1e-8 || probs.minCoeff() < -1e-8) {
      std::ostringstream os;
      os << "not a probability vector (sum " << total << ", min " << probs.minCoeff() << ")";
      throw Error(ErrorCode::InconsistentData, os.str());
    }
  }

  ReconstructionReport report = reconstruct_from_expectations(ops, probs, opts);
  const HermitianOperator root = psd_sqrt(ops.gram_sum);
  report.frame_state = report.recovered;

  const ComplexVector mapped = root.matrix() * report.recovered.coeffs;
  if (mapped.norm() > 0) {
    StateVector psi = StateVector::normalized_from(mapped);
    if (auto fixed = gauge_fix(psi)) psi = std::move(*fixed);
    report.recovered = std::move(psi);
    report.residual = (probabilities(povm, report.recovered) - probs).cwiseAbs().maxCoeff();
  } else {
    report.recovered = StateVector::unnormalized(mapped);
    report.residual = probs.cwiseAbs().maxCoeff();
  }
  return report;
}

std::optional<StateVector> gauge_fix(const StateVector& psi, double tol) {
  if (psi.dim() == 0) return std::nullopt;
  const double mag = std::abs(psi.coeffs(0));
  if (mag == 0 || mag <= tol * psi.norm()) return std::nullopt;
  StateVector out = psi;
  out.coeffs *= std::conj(psi.coeffs(0)) / mag;
  out.coeffs(0) = mag;
  return out;
}

std::vector<AmbiguityCertificate> certify_failure_set(const StateVector& psi, double tol) {
  const Eigen::Index d = psi.dim();
  if (d < 2) throw Error(ErrorCode::DimensionTooSmall, "certification needs d >= 2");
  if (d - 1 > kMaxFreeSigns) throw Error(ErrorCode::InvalidArgument, "dimension too large for subset enumeration");
  const auto c0 = psi.coeffs(0);
  if (c0.imag() != 0 && std::abs(c0.imag()) > 1e-12 * psi.norm()) {
    throw Error(ErrorCode::NotGaugeFixed, "c_0 must be real");
  }
  if (c0.real() < 0) throw Error(ErrorCode::NotGaugeFixed, "c_0 must be non-negative");

  const OperatorSet ops = build_fsc_operators(d);
  const RealVector base = expectations(ops, psi);
  const double agree = 1e-9 * relative_scale(base);
  const double total = psi.coeffs.real().sum();

  std::vector<AmbiguityCertificate> out;
  const std::uint64_t count = std::uint64_t{1} << (d - 1);
  for (std::uint64_t mask = 1; mask < count; ++mask) {
    std::vector<int> subset;
    double sum_u = 0;
    bool distinct = false;
    for (Eigen::Index i = 1; i < d; ++i) {
      if ((mask >> (i - 1)) & 1U) {
        subset.push_back(static_cast<int>(i));
        const double re = psi.coeffs(i).real();
        sum_u += re;
        distinct = distinct || std::abs(re) > tol;
      }
    }
    if (!distinct) continue;
    const double sum_e = total - sum_u;

    AmbiguityCertificate cert;
    if (std::abs(sum_u) <= tol) {
      cert.which = FailureCondition::SumOverU;
      cert.violation = std::abs(sum_u);
    } else if (std::abs(sum_e) <= tol) {
      cert.which = FailureCondition::SumOverE;
      cert.violation = std::abs(sum_e);
    } else {
      continue;
    }

    ComplexVector alt = psi.coeffs;
    for (int i : subset) alt(i) = {-alt(i).real(), alt(i).imag()};
    cert.alternative = {alt, psi.normalized};
    const double gap = (expectations(ops, cert.alternative) - base).cwiseAbs().maxCoeff();
    if (gap > agree) continue;
    cert.subset_u = std::move(subset);
    out.push_back(std::move(cert));
  }
  return out;
}

}  // namespace psic
