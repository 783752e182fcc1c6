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

#include "psic/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace psic {

namespace {

double annihilation_threshold(const HermitianOperator& e, double phi_norm, double tol) {
  return tol * phi_norm * (1.0 + max_abs(e.matrix()));
}

void require_probe(const StateVector& phi, Eigen::Index dim) {
  if (phi.dim() != dim) {
    throw Error(ErrorCode::DimensionMismatch,
                "probe has dimension " + std::to_string(phi.dim()) + ", POVM has " + std::to_string(dim));
  }
  if (!(phi.norm() > 1e-10)) throw Error(ErrorCode::ZeroVector, "probe vector is zero");
}

}  // namespace

AnnihilationProfile annihilation_profile(std::span<const HermitianOperator> elements, const StateVector& phi,
                                         double tol) {
  const double phi_norm = phi.norm();
  if (!(phi_norm > 0)) throw Error(ErrorCode::ZeroVector, "probe vector is zero");
  AnnihilationProfile profile{phi, 0, RealVector(static_cast<Eigen::Index>(elements.size()))};
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    if (e.dim() != phi.dim()) throw Error(ErrorCode::DimensionMismatch, "probe and element dimensions differ");
    const double n = (e.matrix() * phi.coeffs).norm();
    profile.per_element_norms(static_cast<Eigen::Index>(i)) = n;
    if (n > annihilation_threshold(e, phi_norm, tol)) ++profile.k_phi;
  }
  return profile;
}

AnnihilationProfile annihilation_profile(const Povm& povm, const StateVector& phi, double tol) {
  return annihilation_profile(std::span<const HermitianOperator>(povm.elements), phi, tol);
}

ComplexMatrix orthogonal_complement(const StateVector& phi) {
  const Eigen::Index d = phi.dim();
  if (!(phi.norm() > 0)) throw Error(ErrorCode::ZeroVector, "probe vector is zero");
  Eigen::Index skip = 0;
  phi.coeffs.cwiseAbs().maxCoeff(&skip);

  std::vector<ComplexVector> basis{phi.coeffs.normalized()};
  ComplexMatrix out(d, d - 1);
  Eigen::Index col = 0;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (k == skip) continue;
    ComplexVector v = ComplexVector::Unit(d, k);
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) v -= b.dot(v) * b;
    }
    v.normalize();
    basis.push_back(v);
    out.col(col++) = v;
  }
  return out;
}

RealMatrix perturbation_system(const Povm& povm, const StateVector& phi, const ComplexMatrix& complement) {
  require_probe(phi, povm.dim);
  const Eigen::Index m = complement.cols();
  const ComplexVector unit = phi.coeffs.normalized();
  RealMatrix rows(static_cast<Eigen::Index>(povm.size()), 2 * m);
  for (std::size_t i = 0; i < povm.size(); ++i) {
    // <phi|E_i|e_j> for all j at once.
    const Eigen::Matrix<std::complex<double>, 1, Eigen::Dynamic> amps =
        unit.adjoint() * povm.elements[i].matrix() * complement;
    const auto r = static_cast<Eigen::Index>(i);
    rows.row(r).head(m) = amps.real();
    rows.row(r).tail(m) = -amps.imag();
  }
  return rows;
}

StateVector build_chi(const Povm& povm, const StateVector& phi) {
  require_probe(phi, povm.dim);
  const Eigen::Index d = povm.dim;
  const AnnihilationProfile profile = annihilation_profile(povm, phi);
  if (profile.k_phi > 2 * d - 2) {
    std::ostringstream os;
    os << profile.k_phi << " elements do not annihilate the probe (at most " << 2 * d - 2 << " allowed)";
    throw Error(ErrorCode::KPhiTooLarge, os.str());
  }

  const ComplexMatrix complement = orthogonal_complement(phi);
  const RealMatrix all_rows = perturbation_system(povm, phi, complement);
  RealMatrix rows(profile.k_phi, all_rows.cols());
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    if (profile.per_element_norms(idx) > annihilation_threshold(povm.elements[i], phi.norm(), kAnnihilationTol)) {
      rows.row(r++) = all_rows.row(idx);
    }
  }

  RealVector x;
  try {
    x = real_homogeneous_solve(rows);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RankTooHigh) throw;
    throw Error(ErrorCode::KPhiTooLarge, std::string("no perturbation exists at this probe: ") + e.what());
  }

  const Eigen::Index m = complement.cols();
  ComplexVector params(m);
  for (Eigen::Index j = 0; j < m; ++j) params(j) = {x(j), x(m + j)};
  const ComplexVector chi = complement * params * phi.norm();

  const double scale = phi.norm() * chi.norm();
  const double overlap = std::abs(phi.coeffs.dot(chi));
  if (overlap > 1e-10 * std::max(1.0, scale)) {
    throw Error(ErrorCode::InvalidCounterexample, "perturbation is not orthogonal to the probe");
  }
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const double re = phi.coeffs.dot(povm.elements[i].matrix() * chi).real();
    if (std::abs(re) > 1e-9 * scale) {
      std::ostringstream os;
      os << "Re<phi|E_" << i << "|chi> = " << re;
      throw Error(ErrorCode::InvalidCounterexample, os.str());
    }
  }
  return StateVector::unnormalized(chi);
}

CounterexamplePair attack_with_probe(const Povm& povm, const StateVector& phi) {
  const StateVector chi = build_chi(povm, phi);

  CounterexamplePair pair;
  pair.phi = StateVector::unnormalized(phi.coeffs);
  pair.chi = chi;
  const ComplexVector plus = phi.coeffs + chi.coeffs;
  const ComplexVector minus = phi.coeffs - chi.coeffs;
  pair.common_norm = plus.norm();
  if (std::abs(minus.norm() - pair.common_norm) > 1e-10 * std::max(1.0, pair.common_norm)) {
    throw Error(ErrorCode::InvalidCounterexample, "|phi + chi| and |phi - chi| differ");
  }
  pair.psi_plus = {plus / pair.common_norm, true};
  pair.psi_minus = {minus / pair.common_norm, true};

  const RealVector p_plus = expectations(povm.elements, pair.psi_plus);
  const RealVector p_minus = expectations(povm.elements, pair.psi_minus);
  pair.max_prob_gap = (p_plus - p_minus).cwiseAbs().maxCoeff();
  pair.overlap = std::abs(pair.psi_plus.coeffs.dot(pair.psi_minus.coeffs));
  pair.k_phi = annihilation_profile(povm, phi).k_phi;

  if (pair.max_prob_gap > 1e-9) {
    std::ostringstream os;
    os << "probability gap " << pair.max_prob_gap << " exceeds 1e-9";
    throw Error(ErrorCode::InvalidCounterexample, os.str());
  }
  if (!(1.0 - pair.overlap > 1e-6)) {
    throw Error(ErrorCode::InvalidCounterexample, "pair states coincide up to phase");
  }
  return pair;
}

CounterexamplePair theorem2_attack(const Povm& povm, std::optional<std::vector<int>> element_subset) {
  const Eigen::Index d = povm.dim;
  if (d < 2) throw Error(ErrorCode::DimensionTooSmall, "attack needs d >= 2");
  if (static_cast<Eigen::Index>(povm.size()) < d - 1) {
    throw Error(ErrorCode::InvalidArgument, "POVM has fewer than d - 1 elements");
  }
  std::vector<int> subset;
  if (element_subset) {
    subset = std::move(*element_subset);
  } else {
    for (int i = 0; i < d - 1; ++i) subset.push_back(i);
  }
  if (static_cast<Eigen::Index>(subset.size()) != d - 1) {
    throw Error(ErrorCode::InvalidArgument, "element subset must have exactly d - 1 = " + std::to_string(d - 1) +
                                                " entries");
  }
  if (std::set<int>(subset.begin(), subset.end()).size() != subset.size()) {
    throw Error(ErrorCode::InvalidArgument, "element subset has repeated indices");
  }

  ComplexMatrix f = ComplexMatrix::Zero(d, d);
  for (int i : subset) {
    if (i < 0 || static_cast<std::size_t>(i) >= povm.size()) {
      throw Error(ErrorCode::InvalidArgument, "element index " + std::to_string(i) + " out of range");
    }
    const auto& e = povm.elements[static_cast<std::size_t>(i)];
    if (e.dim() != d) throw Error(ErrorCode::DimensionMismatch, "element dimension differs from POVM dimension");
    if (!is_rank_one(e)) throw Error(ErrorCode::NotRankOne, "element " + std::to_string(i) + " is not rank one");
    f += e.matrix();
  }
  const HermitianOperator sum = HermitianOperator::from_hermitian_part(f);
  const auto kernel = null_space(sum, 1e-10 * (1.0 + max_abs(sum.matrix())));
  if (kernel.empty()) throw Error(ErrorCode::NoNullVector, "sum of the chosen elements is nonsingular");

  const StateVector phi = StateVector::unnormalized(kernel.front());
  for (int i : subset) {
    const auto& e = povm.elements[static_cast<std::size_t>(i)];
    if ((e.matrix() * phi.coeffs).norm() > annihilation_threshold(e, phi.norm(), kAnnihilationTol)) {
      throw Error(ErrorCode::NoNullVector, "null vector of the sum is not annihilated by element " +
                                               std::to_string(i));
    }
  }
  return attack_with_probe(povm, phi);
}

}  // namespace psic
