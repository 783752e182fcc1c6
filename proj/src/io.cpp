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

#include "psic/io.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace psic::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

// Runs a decoder, turning JSON access errors into ParseError.
template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    fail(std::string(what) + ": " + e.what());
  }
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) fail(std::string("expected an object with field '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& j) {
  if (!j.is_number()) fail("expected a number, got " + j.dump());
  return j.get<double>();
}

Eigen::Index positive_dim(const Json& j) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 1) fail("dim must be a positive integer");
  return static_cast<Eigen::Index>(j.get<std::int64_t>());
}

Json pattern_list(const std::vector<SignPattern>& patterns) {
  Json out = Json::array();
  for (const auto& p : patterns) out.push_back(p);
  return out;
}

}  // namespace

Json complex_to_json(std::complex<double> z) { return Json::array({z.real(), z.imag()}); }

std::complex<double> complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) fail("complex numbers are written as [re, im], got " + j.dump());
  return {number(j[0]), number(j[1])};
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j, Eigen::Index dim) {
  if (!j.is_array()) fail("matrix must be an array");
  ComplexMatrix m(dim, dim);
  const auto n = static_cast<std::size_t>(dim);
  // Either an array of rows, or a flat row-major array of dim*dim entries.
  if (j.size() == n * n && !j.empty() && j[0].is_array() && j[0].size() == 2 && j[0][0].is_number()) {
    for (std::size_t k = 0; k < n * n; ++k) {
      m(static_cast<Eigen::Index>(k / n), static_cast<Eigen::Index>(k % n)) = complex_from_json(j[k]);
    }
    return m;
  }
  if (j.size() != n) fail("matrix must have " + std::to_string(dim) + " rows");
  for (std::size_t r = 0; r < n; ++r) {
    if (!j[r].is_array() || j[r].size() != n) fail("matrix row " + std::to_string(r) + " has the wrong length");
    for (std::size_t c = 0; c < n; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c]);
    }
  }
  return m;
}

Json to_json(const StateVector& s) {
  Json coeffs = Json::array();
  for (Eigen::Index i = 0; i < s.dim(); ++i) coeffs.push_back(complex_to_json(s.coeffs(i)));
  return {{"dim", s.dim()}, {"coeffs", coeffs}, {"normalized", s.normalized}};
}

StateVector state_from_json(const Json& j) {
  return guarded("state", [&] {
    const Eigen::Index d = positive_dim(field(j, "dim"));
    const Json& coeffs = field(j, "coeffs");
    if (!coeffs.is_array() || static_cast<Eigen::Index>(coeffs.size()) != d) {
      fail("state coeffs must have dim = " + std::to_string(d) + " entries");
    }
    StateVector s;
    s.coeffs.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) s.coeffs(i) = complex_from_json(coeffs[static_cast<std::size_t>(i)]);
    if (!all_finite(s.coeffs)) fail("state has non-finite coefficients");
    s.normalized = j.contains("normalized") ? field(j, "normalized").get<bool>() : false;
    if (s.normalized && std::abs(s.coeffs.squaredNorm() - 1.0) > 1e-10) {
      fail("state is marked normalized but has squared norm " + std::to_string(s.coeffs.squaredNorm()));
    }
    return s;
  });
}

Json to_json(const Povm& p) {
  Json elements = Json::array();
  for (const auto& e : p.elements) elements.push_back(matrix_to_json(e.matrix()));
  return {{"dim", p.dim}, {"provenance", std::string(to_string(p.provenance))}, {"elements", elements}};
}

Povm povm_from_json(const Json& j) {
  return guarded("POVM", [&] {
    Povm p;
    p.dim = positive_dim(field(j, "dim"));
    p.provenance = j.contains("provenance") ? provenance_from_string(field(j, "provenance").get<std::string>())
                                            : Provenance::Ingested;
    const Json& elements = field(j, "elements");
    if (!elements.is_array() || elements.empty()) fail("elements must be a non-empty array");
    for (const auto& e : elements) {
      try {
        p.elements.emplace_back(matrix_from_json(e, p.dim));
      } catch (const Error& err) {
        if (err.code() == ErrorCode::ParseError) throw;
        fail("element " + std::to_string(p.elements.size()) + ": " + err.what());
      }
    }
    return p;
  });
}

Json to_json(const OperatorSet& ops) {
  return to_json(Povm{ops.dim, ops.operators, Provenance::PreNormalized});
}

OperatorSet operator_set_from_json(const Json& j) {
  const Povm p = povm_from_json(j);
  if (p.provenance != Provenance::PreNormalized) fail("operator-set file must have provenance PreNormalized");
  return OperatorSet::from_operators(p.elements);
}

Json real_vector_to_json(const RealVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

RealVector real_vector_from_json(const Json& j) {
  if (!j.is_array()) fail("expected an array of numbers");
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i]);
  if (!all_finite(v)) fail("non-finite value");
  return v;
}

Json probabilities_to_json(const RealVector& p) { return {{"probabilities", real_vector_to_json(p)}}; }

RealVector probabilities_from_json(const Json& j) {
  return guarded("probabilities", [&] { return real_vector_from_json(field(j, "probabilities")); });
}

RealVector expectations_from_json(const Json& j) {
  return guarded("expectations", [&] { return real_vector_from_json(field(j, "expectations")); });
}

Json to_json(const Counts& c) { return {{"counts", c.counts}, {"shots", c.shots}}; }

Counts counts_from_json(const Json& j) {
  return guarded("counts", [&] {
    Counts c;
    const Json& counts = field(j, "counts");
    if (!counts.is_array() || counts.empty()) fail("counts must be a non-empty array");
    std::int64_t total = 0;
    for (const auto& k : counts) {
      if (!k.is_number_integer() || k.get<std::int64_t>() < 0) fail("counts must be non-negative integers");
      c.counts.push_back(k.get<std::int64_t>());
      total += c.counts.back();
    }
    const Json& shots = field(j, "shots");
    if (!shots.is_number_integer() || shots.get<std::int64_t>() < 1) fail("shots must be a positive integer");
    c.shots = shots.get<std::int64_t>();
    if (total != c.shots) fail("counts sum to " + std::to_string(total) + " but shots = " + std::to_string(c.shots));
    return c;
  });
}

RealVector frequencies(const Counts& c) {
  RealVector f(static_cast<Eigen::Index>(c.counts.size()));
  for (std::size_t i = 0; i < c.counts.size(); ++i) {
    f(static_cast<Eigen::Index>(i)) = static_cast<double>(c.counts[i]) / static_cast<double>(c.shots);
  }
  return f;
}

Json to_json(const AmbiguityCertificate& c) {
  return {{"subset_u", c.subset_u},
          {"which_condition", std::string(to_string(c.which))},
          {"alternative", to_json(c.alternative)},
          {"violation", c.violation}};
}

AmbiguityCertificate certificate_from_json(const Json& j) {
  return guarded("certificate", [&] {
    AmbiguityCertificate c;
    c.subset_u = field(j, "subset_u").get<std::vector<int>>();
    const auto which = field(j, "which_condition").get<std::string>();
    if (which == "SumOverU") {
      c.which = FailureCondition::SumOverU;
    } else if (which == "SumOverE") {
      c.which = FailureCondition::SumOverE;
    } else {
      fail("unknown which_condition '" + which + "'");
    }
    c.alternative = state_from_json(field(j, "alternative"));
    c.violation = number(field(j, "violation"));
    return c;
  });
}

std::vector<AmbiguityCertificate> certificates_from_json(const Json& j) {
  std::vector<AmbiguityCertificate> out;
  if (!j.is_array()) fail("certificates must be an array");
  for (const auto& c : j) out.push_back(certificate_from_json(c));
  return out;
}

Json to_json(const ReconstructionReport& r, const std::vector<AmbiguityCertificate>& certificates) {
  Json certs = Json::array();
  for (const auto& c : certificates) certs.push_back(to_json(c));
  Json out = {{"recovered", to_json(r.recovered)},
              {"status", std::string(to_string(r.status))},
              {"residual", r.residual},
              {"sign_solutions", pattern_list(r.sign_solutions)},
              {"certificates", certs}};
  if (r.frame_state) out["frame_state"] = to_json(*r.frame_state);
  return out;
}

ReconstructionReport report_from_json(const Json& j) {
  return guarded("reconstruction report", [&] {
    ReconstructionReport r;
    r.recovered = state_from_json(field(j, "recovered"));
    r.status = reconstruction_status_from_string(field(j, "status").get<std::string>());
    r.residual = number(field(j, "residual"));
    r.sign_solutions = field(j, "sign_solutions").get<std::vector<SignPattern>>();
    if (j.contains("frame_state")) r.frame_state = state_from_json(j["frame_state"]);
    return r;
  });
}

Json to_json(const CounterexamplePair& p) {
  return {{"phi", to_json(p.phi)},
          {"chi", to_json(p.chi)},
          {"psi_plus", to_json(p.psi_plus)},
          {"psi_minus", to_json(p.psi_minus)},
          {"common_norm", p.common_norm},
          {"max_prob_gap", p.max_prob_gap},
          {"overlap", p.overlap},
          {"k_phi", p.k_phi}};
}

CounterexamplePair pair_from_json(const Json& j) {
  return guarded("counterexample pair", [&] {
    CounterexamplePair p;
    p.phi = state_from_json(field(j, "phi"));
    p.chi = state_from_json(field(j, "chi"));
    p.psi_plus = state_from_json(field(j, "psi_plus"));
    p.psi_minus = state_from_json(field(j, "psi_minus"));
    p.common_norm = j.contains("common_norm") ? number(j["common_norm"]) : 0.0;
    p.max_prob_gap = number(field(j, "max_prob_gap"));
    p.overlap = j.contains("overlap") ? number(j["overlap"]) : 0.0;
    p.k_phi = field(j, "k_phi").get<int>();
    return p;
  });
}

Json to_json(const SweepResult& r) {
  Json samples = Json::array();
  for (const auto& s : r.per_sample) {
    samples.push_back({{"index", s.index},
                       {"fidelity", s.fidelity},
                       {"phase_distance", s.phase_distance},
                       {"status", s.status},
                       {"residual", s.residual}});
  }
  Json config = {{"d", r.config.d}, {"samples", r.config.samples}, {"seed", r.config.seed}, {"tol", r.config.tol}};
  config["shots"] = r.config.shots ? Json(*r.config.shots) : Json(nullptr);
  return {{"config", config},
          {"summary",
           {{"mean_infidelity", r.summary.mean_infidelity},
            {"max_infidelity", r.summary.max_infidelity},
            {"failure_count", r.summary.failure_count},
            {"gauge_degenerate_count", r.summary.gauge_degenerate_count},
            {"inconsistent_count", r.summary.inconsistent_count}}},
          {"per_sample", samples}};
}

SweepResult sweep_from_json(const Json& j) {
  return guarded("sweep result", [&] {
    SweepResult r;
    const Json& config = field(j, "config");
    r.config.d = positive_dim(field(config, "d"));
    r.config.samples = field(config, "samples").get<std::int64_t>();
    r.config.seed = field(config, "seed").get<std::uint64_t>();
    r.config.tol = number(field(config, "tol"));
    if (config.contains("shots") && !config["shots"].is_null()) r.config.shots = config["shots"].get<std::int64_t>();
    const Json& summary = field(j, "summary");
    r.summary.mean_infidelity = number(field(summary, "mean_infidelity"));
    r.summary.max_infidelity = number(field(summary, "max_infidelity"));
    r.summary.failure_count = field(summary, "failure_count").get<std::int64_t>();
    r.summary.gauge_degenerate_count = field(summary, "gauge_degenerate_count").get<std::int64_t>();
    r.summary.inconsistent_count = summary.value("inconsistent_count", std::int64_t{0});
    for (const auto& s : field(j, "per_sample")) {
      r.per_sample.push_back({field(s, "index").get<std::int64_t>(), number(field(s, "fidelity")),
                              number(field(s, "phase_distance")), field(s, "status").get<std::string>(),
                              number(field(s, "residual"))});
    }
    return r;
  });
}

std::string to_csv(const SweepResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << "index,fidelity,phase_distance,status,residual\n";
  for (const auto& s : r.per_sample) {
    os << s.index << ',' << s.fidelity << ',' << s.phase_distance << ',' << s.status << ',' << s.residual << '\n';
  }
  return os.str();
}

Json to_json(const InstabilityReport& r) {
  Json trials = Json::array();
  for (const auto& t : r.trials) {
    trials.push_back(
        {{"fidelity_plus", t.fidelity_plus}, {"fidelity_minus", t.fidelity_minus}, {"misidentified", t.misidentified}});
  }
  Json out = {{"misidentification_fraction", r.misidentification_fraction},
              {"mean_fidelity_plus", r.mean_fidelity_plus},
              {"mean_fidelity_minus", r.mean_fidelity_minus},
              {"trials", trials}};
  out["shots"] = r.shots ? Json(*r.shots) : Json(nullptr);
  out["exact_status"] = r.exact_status ? Json(std::string(to_string(*r.exact_status))) : Json(nullptr);
  return out;
}

Json read_json(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text, std::ostream& stdout_stream) {
  if (path == "-") {
    stdout_stream << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::InvalidArgument, "failed writing '" + path + "'");
}

}  // namespace psic::io
