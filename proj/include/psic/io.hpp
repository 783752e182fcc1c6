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

// JSON file formats shared by the library and the command-line tool.
//
//   complex number   [re, im]
//   state            {"dim", "coeffs": [[re, im], ...], "normalized"}
//   POVM             {"dim", "provenance", "elements": [matrix, ...]} where a
//                    matrix is an array of rows of complex numbers. An
//                    operator set uses the same layout with provenance
//                    "PreNormalized".
//   probabilities    {"probabilities": [...]}
//   counts           {"counts": [...], "shots": n}
//   expectations     {"expectations": [...]}
//
// Doubles are written in shortest round-trip form, so re-reading a file
// reproduces every value bit for bit.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "psic/adversary.hpp"
#include "psic/harness.hpp"
#include "psic/povm.hpp"
#include "psic/reconstruct.hpp"

namespace psic::io {

using Json = nlohmann::json;

Json complex_to_json(std::complex<double> z);
std::complex<double> complex_from_json(const Json& j);

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, Eigen::Index dim);

Json to_json(const StateVector& s);
StateVector state_from_json(const Json& j);

Json to_json(const Povm& p);
Povm povm_from_json(const Json& j);

/// Operator-set files reuse the POVM layout with provenance PreNormalized.
Json to_json(const OperatorSet& ops);
OperatorSet operator_set_from_json(const Json& j);

Json real_vector_to_json(const RealVector& v);
RealVector real_vector_from_json(const Json& j);

Json probabilities_to_json(const RealVector& p);
RealVector probabilities_from_json(const Json& j);
RealVector expectations_from_json(const Json& j);

struct Counts {
  std::vector<std::int64_t> counts;
  std::int64_t shots = 0;
};
Json to_json(const Counts& c);
Counts counts_from_json(const Json& j);
RealVector frequencies(const Counts& c);

Json to_json(const AmbiguityCertificate& c);
AmbiguityCertificate certificate_from_json(const Json& j);

Json to_json(const ReconstructionReport& r, const std::vector<AmbiguityCertificate>& certificates = {});
ReconstructionReport report_from_json(const Json& j);
std::vector<AmbiguityCertificate> certificates_from_json(const Json& j);

Json to_json(const CounterexamplePair& p);
CounterexamplePair pair_from_json(const Json& j);

Json to_json(const SweepResult& r);
SweepResult sweep_from_json(const Json& j);
/// One row per sample: index,fidelity,phase_distance,status,residual
std::string to_csv(const SweepResult& r);

Json to_json(const InstabilityReport& r);

/// Parses a JSON file; "-" reads standard input. Throws ParseError.
Json read_json(const std::string& path);
/// Writes text to a file; "-" writes to `stdout_stream`. Throws
/// InvalidArgument when the file cannot be written.
void write_text(const std::string& path, const std::string& text, std::ostream& stdout_stream);

}  // namespace psic::io
