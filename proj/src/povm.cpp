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

#include "psic/povm.hpp"

#include <algorithm>
#include <sstream>

namespace psic {

StateVector StateVector::normalized_from(const ComplexVector& v) {
  const double n = v.norm();
  if (!(n > 0) || !std::isfinite(n)) throw Error(ErrorCode::ZeroVector, "cannot normalize a zero or non-finite vector");
  return {v / n, true};
}

StateVector StateVector::basis(Eigen::Index dim, Eigen::Index k) {
  if (k < 0 || k >= dim) throw Error(ErrorCode::InvalidArgument, "basis index out of range");
  return {ComplexVector::Unit(dim, k), true};
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::ConstructedFSC: return "ConstructedFSC";
    case Provenance::Ingested: return "Ingested";
    case Provenance::PreNormalized: return "PreNormalized";
  }
  return "Ingested";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "ConstructedFSC") return Provenance::ConstructedFSC;
  if (s == "Ingested") return Provenance::Ingested;
  if (s == "PreNormalized") return Provenance::PreNormalized;
  throw Error(ErrorCode::ParseError, "unknown provenance '" + std::string(s) + "'");
}

OperatorSet OperatorSet::from_operators(std::vector<HermitianOperator> ops) {
  if (ops.empty()) throw Error(ErrorCode::InvalidArgument, "operator set is empty");
  const Eigen::Index d = ops.front().dim();
  ComplexMatrix g = ComplexMatrix::Zero(d, d);
  for (const auto& op : ops) {
    if (op.dim() != d) throw Error(ErrorCode::DimensionMismatch, "operators of different dimension in one set");
    g += op.matrix();
  }
  return {d, std::move(ops), HermitianOperator::from_hermitian_part(g)};
}

OperatorSet build_fsc_operators(Eigen::Index d) {
  if (d < 2) {
    throw Error(ErrorCode::DimensionTooSmall, "construction needs d >= 2, got " + std::to_string(d));
  }
  using C = std::complex<double>;
  std::vector<HermitianOperator> ops;
  ops.reserve(static_cast<std::size_t>(2 * d));
  for (Eigen::Index i = 0; i < d; ++i) ops.push_back(HermitianOperator::outer(ComplexVector::Unit(d, i)));
  for (Eigen::Index k = 1; k < d; ++k) {
    ComplexVector v = ComplexVector::Unit(d, 0);
    v(k) = C(0, 1);
    ops.push_back(HermitianOperator::outer(v));
  }
  ops.push_back(HermitianOperator::outer(ComplexVector::Ones(d)));
  return OperatorSet::from_operators(std::move(ops));
}

Povm normalize_operator_set(const OperatorSet& ops, Provenance provenance) {
  const HermitianOperator r = psd_inv_sqrt(ops.gram_sum);
  Povm povm{ops.dim, {}, provenance};
  povm.elements.reserve(ops.size());
  for (const auto& p : ops.operators) {
    povm.elements.push_back(HermitianOperator::from_hermitian_part(r.matrix() * p.matrix() * r.matrix()));
  }
  return povm;
}

Povm build_fsc_povm(Eigen::Index d) {
  const OperatorSet ops = build_fsc_operators(d);
  try {
    return normalize_operator_set(ops, Provenance::ConstructedFSC);
  } catch (const Error& e) {
    // G is positive definite for every d; reaching this is a library bug.
    throw Error(e.code(), "internal: operator sum singular for d = " + std::to_string(d) + " (" + e.what() + ")");
  }
}

namespace {
void require_dim(Eigen::Index expected, const StateVector& psi) {
  if (psi.dim() != expected) {
    std::ostringstream os;
    os << "state has dimension " << psi.dim() << ", operators have " << expected;
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}
}  // namespace

RealVector probabilities(const Povm& povm, const StateVector& psi) {
  require_dim(povm.dim, psi);
  RealVector p(static_cast<Eigen::Index>(povm.size()));
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const auto& e = povm.elements[i];
    if (e.dim() != povm.dim) throw Error(ErrorCode::DimensionMismatch, "element dimension differs from POVM dimension");
    p(static_cast<Eigen::Index>(i)) = std::clamp(e.expectation(psi.coeffs), 0.0, 1.0);
  }
  return p;
}

RealVector expectations(std::span<const HermitianOperator> ops, const StateVector& psi) {
  RealVector v(static_cast<Eigen::Index>(ops.size()));
  for (std::size_t k = 0; k < ops.size(); ++k) {
    require_dim(ops[k].dim(), psi);
    v(static_cast<Eigen::Index>(k)) = ops[k].expectation(psi.coeffs);
  }
  return v;
}

RealVector expectations(const OperatorSet& ops, const StateVector& psi) {
  require_dim(ops.dim, psi);
  return expectations(std::span<const HermitianOperator>(ops.operators), psi);
}

std::string Violation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Completeness: os << "completeness: max |sum E_i - I| = " << magnitude; break;
    case Kind::Positivity: os << "positivity: element " << element << " has eigenvalue " << -magnitude; break;
    case Kind::Dimension: os << "dimension: element " << element << " has dimension " << magnitude; break;
  }
  return os.str();
}

ValidationReport validate_povm(const Povm& povm) {
  ValidationReport report;
  const Eigen::Index d = povm.dim;
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  bool dims_ok = d > 0;
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const auto& e = povm.elements[i];
    if (e.dim() != d) {
      report.violations.push_back({Violation::Kind::Dimension, static_cast<int>(i), static_cast<double>(e.dim())});
      dims_ok = false;
      continue;
    }
    sum += e.matrix();
    const double lowest = hermitian_eig(e, "element " + std::to_string(i)).values(0);
    if (lowest < -kPovmTol) {
      report.violations.push_back({Violation::Kind::Positivity, static_cast<int>(i), -lowest});
    }
  }
  if (dims_ok) {
    const double gap = max_abs(ComplexMatrix(sum - ComplexMatrix::Identity(d, d)));
    if (gap > kPovmTol) report.violations.push_back({Violation::Kind::Completeness, -1, gap});
  }
  return report;
}

bool is_rank_one(const HermitianOperator& op, double rel_tol) {
  if (op.dim() < 2) return true;
  const auto values = hermitian_eig(op).values;
  const Eigen::Index n = values.size();
  const double largest = std::max(values(n - 1), 0.0);
  return values(n - 2) <= rel_tol * largest;
}

}  // namespace psic
