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

#include "psic/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "psic/adversary.hpp"
#include "psic/harness.hpp"
#include "psic/io.hpp"
#include "psic/povm.hpp"
#include "psic/reconstruct.hpp"

namespace psic::cli {

namespace {

struct Globals {
  std::optional<double> tol;
  std::uint64_t seed = 0;
  std::string out = "-";
};

std::string shortest(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return ec == std::errc() ? std::string(buf, end) : std::to_string(x);
}

std::string dump(const io::Json& j) { return j.dump(2) + "\n"; }

// File name next to `path` holding the pre-normalized operators.
std::string companion_path(const std::string& path) {
  std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + ".operators.json")).string();
}

// POVM elements must equal G^{-1/2} P_i G^{-1/2} for the operator set.
void require_matching(const Povm& povm, const OperatorSet& ops) {
  if (povm.dim != ops.dim || povm.size() != ops.size()) {
    throw Error(ErrorCode::InvalidArgument, "POVM and operator set have different shapes");
  }
  const Povm expected = normalize_operator_set(ops, povm.provenance);
  for (std::size_t i = 0; i < povm.size(); ++i) {
    const double gap = max_abs(ComplexMatrix(povm.elements[i].matrix() - expected.elements[i].matrix()));
    if (gap > 1e-9) {
      throw Error(ErrorCode::InvalidArgument,
                  "element " + std::to_string(i) + " is not the normalized operator (off by " + shortest(gap) + ")");
    }
  }
}

int report_status(const ReconstructionReport& r) {
  return r.status == ReconstructionStatus::Unique ? kSuccess : kNegative;
}

std::vector<AmbiguityCertificate> certify_frame_state(const StateVector& frame, double tol) {
  const auto fixed = gauge_fix(frame, 1e-12);
  if (!fixed) return {};
  return certify_failure_set(*fixed, tol);
}

int cmd_build(const Globals& g, Eigen::Index d, bool companion, std::ostream& out, std::ostream& err) {
  const OperatorSet ops = build_fsc_operators(d);
  const Povm povm = normalize_operator_set(ops, Provenance::ConstructedFSC);
  const ValidationReport report = validate_povm(povm);
  if (!report.ok()) {
    for (const auto& v : report.violations) err << "internal: " << v.describe() << "\n";
    return kNegative;
  }
  io::write_text(g.out, dump(io::to_json(povm)), out);
  if (g.out != "-" && companion) io::write_text(companion_path(g.out), dump(io::to_json(ops)), out);
  return kSuccess;
}

int cmd_probs(const Globals& g, const std::string& povm_path, const std::string& state_path, std::ostream& out,
              std::ostream& err) {
  const Povm povm = io::povm_from_json(io::read_json(povm_path));
  const StateVector psi = io::state_from_json(io::read_json(state_path));
  if (psi.dim() != povm.dim) {
    throw Error(ErrorCode::DimensionMismatch, "state dimension " + std::to_string(psi.dim()) +
                                                  " differs from POVM dimension " + std::to_string(povm.dim));
  }
  const ValidationReport report = validate_povm(povm);
  if (!report.ok()) {
    for (const auto& v : report.violations) err << "invalid POVM: " << v.describe() << "\n";
    return kNegative;
  }
  const StateVector unit = StateVector::normalized_from(psi.coeffs);
  const RealVector p = probabilities(povm, unit);
  if (g.out != "-") {
    io::write_text(g.out, dump(io::probabilities_to_json(p)), out);
  } else {
    for (Eigen::Index i = 0; i < p.size(); ++i) out << (i ? " " : "") << shortest(p(i));
    out << "\n";
  }
  return kSuccess;
}

struct ReconstructInputs {
  std::string probs;
  std::string counts;
  std::string expectations;
  std::string operators;
};

int cmd_reconstruct(const Globals& g, const std::string& povm_path, const ReconstructInputs& in, std::ostream& out,
                    std::ostream& err) {
  const int sources = !in.probs.empty() + !in.counts.empty() + !in.expectations.empty();
  if (sources != 1) throw Error(ErrorCode::InvalidArgument, "give exactly one of --probs, --counts, --expectations");

  const Povm povm = io::povm_from_json(io::read_json(povm_path));
  std::optional<OperatorSet> ops;
  if (!in.operators.empty()) {
    ops = io::operator_set_from_json(io::read_json(in.operators));
  } else if (povm.provenance == Provenance::ConstructedFSC) {
    ops = build_fsc_operators(povm.dim);
  } else if (povm.provenance == Provenance::PreNormalized) {
    ops = OperatorSet::from_operators(povm.elements);
  } else {
    err << "reconstruction needs a ConstructedFSC POVM or an --operators companion file\n";
    return kInputError;
  }

  const double tol = g.tol.value_or(1e-9);
  ReconstructionReport report;
  std::vector<AmbiguityCertificate> certificates;
  if (!in.expectations.empty()) {
    report = reconstruct_from_expectations(*ops, io::expectations_from_json(io::read_json(in.expectations)), {tol});
    if (report.status != ReconstructionStatus::GaugeDegenerate) {
      certificates = certify_frame_state(report.recovered, 1e-10);
    }
  } else {
    if (povm.provenance == Provenance::PreNormalized) {
      err << "probabilities need the normalized POVM, not the operator set\n";
      return kInputError;
    }
    require_matching(povm, *ops);
    RealVector data;
    bool plug_in = false;
    if (!in.probs.empty()) {
      data = io::probabilities_from_json(io::read_json(in.probs));
    } else {
      data = io::frequencies(io::counts_from_json(io::read_json(in.counts)));
      plug_in = true;
    }
    report = reconstruct_from_probabilities(povm, *ops, data, {tol, plug_in});
    if (report.frame_state && report.status != ReconstructionStatus::GaugeDegenerate) {
      certificates = certify_frame_state(*report.frame_state, 1e-10);
    }
  }
  io::write_text(g.out, dump(io::to_json(report, certificates)), out);
  if (report.status != ReconstructionStatus::Unique) err << "reconstruction status: " << to_string(report.status) << "\n";
  return report_status(report);
}

int cmd_certify(const Globals& g, const std::string& state_path, const std::string& povm_path, std::ostream& out,
                std::ostream& err) {
  StateVector psi = io::state_from_json(io::read_json(state_path));
  if (!povm_path.empty()) {
    const Povm povm = io::povm_from_json(io::read_json(povm_path));
    if (povm.provenance != Provenance::ConstructedFSC) {
      err << "--povm must be a ConstructedFSC POVM\n";
      return kInputError;
    }
    if (povm.dim != psi.dim()) throw Error(ErrorCode::DimensionMismatch, "state and POVM dimensions differ");
    const HermitianOperator inv_root = psd_inv_sqrt(build_fsc_operators(povm.dim).gram_sum);
    psi = StateVector::unnormalized(inv_root.matrix() * psi.coeffs);
  }
  io::Json result;
  const auto fixed = gauge_fix(psi, 1e-12);
  if (!fixed) {
    result = {{"status", "GaugeDegenerate"}, {"certificates", io::Json::array()}};
    io::write_text(g.out, dump(result), out);
    err << "c_0 vanishes: no phase convention available\n";
    return kNegative;
  }
  const auto certificates = certify_failure_set(*fixed, g.tol.value_or(1e-10));
  io::Json certs = io::Json::array();
  for (const auto& c : certificates) certs.push_back(io::to_json(c));
  result = {{"status", certificates.empty() ? "Unique" : "FailureSet"},
            {"state", io::to_json(*fixed)},
            {"certificates", certs}};
  io::write_text(g.out, dump(result), out);
  return certificates.empty() ? kSuccess : kNegative;
}

std::vector<int> parse_subset(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorCode::InvalidArgument, "bad subset entry '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

// All k-subsets of {0..n-1} in lexicographic order, at most `limit`.
std::vector<std::vector<int>> subsets(int n, int k, std::size_t limit) {
  std::vector<std::vector<int>> out;
  if (k > n) return out;
  std::vector<int> cur(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i;
  while (out.size() < limit) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

bool attack_failed(const Error& e) {
  switch (e.code()) {
    case ErrorCode::KPhiTooLarge:
    case ErrorCode::NoNullVector:
    case ErrorCode::NotRankOne:
    case ErrorCode::InvalidCounterexample:
      return true;
    default:
      return false;
  }
}

int cmd_attack(const Globals& g, const std::string& povm_path, const std::string& phi_path,
               const std::string& subset_text, int probes, std::ostream& out, std::ostream& err) {
  const Povm povm = io::povm_from_json(io::read_json(povm_path));
  for (const auto& e : povm.elements) {
    if (e.dim() != povm.dim) throw Error(ErrorCode::DimensionMismatch, "element dimension differs from POVM dimension");
  }
  const auto d = static_cast<int>(povm.dim);

  std::optional<CounterexamplePair> pair;
  int attempts = 0;
  auto attempt = [&](auto&& f) {
    ++attempts;
    try {
      pair = f();
    } catch (const Error& e) {
      if (!attack_failed(e)) throw;
    }
  };

  if (!phi_path.empty()) {
    const StateVector phi = io::state_from_json(io::read_json(phi_path));
    attempt([&] { return attack_with_probe(povm, phi); });
  } else if (!subset_text.empty()) {
    const auto subset = parse_subset(subset_text);
    attempt([&] { return theorem2_attack(povm, subset); });
  } else {
    for (const auto& subset : subsets(static_cast<int>(povm.size()), d - 1, 256)) {
      attempt([&] { return theorem2_attack(povm, subset); });
      if (pair) break;
    }
    for (int k = 0; k < probes && !pair; ++k) {
      Rng rng = child_stream(g.seed, static_cast<std::uint64_t>(k));
      const StateVector phi = haar_random_state(povm.dim, rng);
      attempt([&] { return attack_with_probe(povm, phi); });
    }
  }

  if (!pair) {
    err << "no counterexample found in " << attempts
        << " attempts; this does not establish that the POVM determines every pure state\n";
    return kNegative;
  }
  io::write_text(g.out, dump(io::to_json(*pair)), out);
  return kSuccess;
}

std::pair<Eigen::Index, Eigen::Index> parse_range(const std::string& text) {
  auto parse_one = [&](std::string_view s) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw Error(ErrorCode::InvalidArgument, "bad dimension range '" + text + "'");
    }
    return static_cast<Eigen::Index>(v);
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const auto d = parse_one(text);
    return {d, d};
  }
  return {parse_one(std::string_view(text).substr(0, dots)), parse_one(std::string_view(text).substr(dots + 2))};
}

int cmd_sweep(const Globals& g, const std::string& range, std::int64_t samples, std::optional<std::int64_t> shots,
              std::ostream& out, std::ostream& err) {
  const auto [lo, hi] = parse_range(range);
  if (lo < 2 || hi < lo) throw Error(ErrorCode::InvalidArgument, "dimension range must satisfy 2 <= lo <= hi");
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "--samples must be positive");
  if (shots && *shots < 1) throw Error(ErrorCode::InvalidArgument, "--shots must be positive");

  const std::filesystem::path dir = g.out == "-" ? std::filesystem::path(".") : std::filesystem::path(g.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::InvalidArgument, "cannot create output directory '" + dir.string() + "'");

  bool all_clean = true;
  for (Eigen::Index d = lo; d <= hi; ++d) {
    ExperimentConfig cfg{d, samples, shots, g.seed, g.tol.value_or(1e-9)};
    const SweepResult result = round_trip_sweep(cfg);
    const std::string stem = (dir / ("sweep_d" + std::to_string(d))).string();
    io::write_text(stem + ".json", dump(io::to_json(result)), out);
    io::write_text(stem + ".csv", io::to_csv(result), out);
    out << "d=" << d << " mean_infidelity=" << shortest(result.summary.mean_infidelity)
        << " max_infidelity=" << shortest(result.summary.max_infidelity)
        << " failures=" << result.summary.failure_count
        << " gauge_degenerate=" << result.summary.gauge_degenerate_count << " -> " << stem << ".json\n";
    if (!shots && result.summary.failure_count != 0) {
      all_clean = false;
      err << "d=" << d << ": " << result.summary.failure_count << " samples failed to reconstruct\n";
    }
  }
  return all_clean ? kSuccess : kNegative;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pure-state tomography with 2d-element rank-one POVMs"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  double tol = 0;
  auto* tol_opt = app.add_option("--tol", tol, "Numerical tolerance (command-specific default)");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("-o,--out", g.out, "Output file or directory ('-' for standard output)");

  auto* build = app.add_subcommand("build", "Write the 2d-element POVM and its operator set");
  Eigen::Index d = 0;
  bool no_companion = false;
  build->add_option("-d,--dim", d, "Hilbert-space dimension")->required();
  build->add_flag("--no-companion", no_companion, "Do not write the .operators.json companion file");

  auto* probs = app.add_subcommand("probs", "Outcome probabilities of a state");
  std::string povm_path, state_path;
  probs->add_option("povm", povm_path)->required();
  probs->add_option("state", state_path)->required();

  auto* recon = app.add_subcommand("reconstruct", "Recover a state from outcome statistics");
  ReconstructInputs inputs;
  recon->add_option("povm", povm_path)->required();
  recon->add_option("--probs", inputs.probs, "Probability file");
  recon->add_option("--counts", inputs.counts, "Counts file");
  recon->add_option("--expectations", inputs.expectations, "Operator-frame expectation values");
  recon->add_option("--operators", inputs.operators, "Companion operator-set file");

  auto* certify = app.add_subcommand("certify", "Check whether a state lies in the ambiguity set");
  std::string certify_povm;
  certify->add_option("state", state_path)->required();
  certify->add_option("--povm", certify_povm, "Map the state into the operator frame of this POVM first");

  auto* attack = app.add_subcommand("attack", "Search for two states with identical statistics");
  std::string phi_path, subset_text;
  int probes = 100;
  attack->add_option("povm", povm_path)->required();
  attack->add_option("--phi", phi_path, "Probe vector file");
  attack->add_option("--subset", subset_text, "Comma-separated indices of d-1 rank-one elements");
  attack->add_option("--probes", probes, "Random probes to try after the element subsets")->check(CLI::NonNegativeNumber);

  auto* sweep = app.add_subcommand("sweep", "Round-trip reconstruction experiments");
  std::string range;
  std::int64_t samples = 100;
  std::int64_t shots = 0;
  sweep->add_option("--d", range, "Dimension or range lo..hi")->required();
  sweep->add_option("--samples", samples, "States per dimension");
  auto* shots_opt = sweep->add_option("--shots", shots, "Finite-shot sampling (default: exact probabilities)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }
  if (tol_opt->count() > 0) {
    if (!(tol > 0)) {
      err << "--tol must be positive\n";
      return kInputError;
    }
    g.tol = tol;
  }

  try {
    if (*build) return cmd_build(g, d, !no_companion, out, err);
    if (*probs) return cmd_probs(g, povm_path, state_path, out, err);
    if (*recon) return cmd_reconstruct(g, povm_path, inputs, out, err);
    if (*certify) return cmd_certify(g, state_path, certify_povm, out, err);
    if (*attack) return cmd_attack(g, povm_path, phi_path, subset_text, probes, out, err);
    if (*sweep) {
      std::optional<std::int64_t> s;
      if (shots_opt->count() > 0) s = shots;
      return cmd_sweep(g, range, samples, s, out, err);
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace psic::cli
