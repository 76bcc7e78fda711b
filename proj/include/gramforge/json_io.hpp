#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "gramforge/completion.hpp"
#include "gramforge/oracle.hpp"
#include "gramforge/partial.hpp"
#include "gramforge/sdp.hpp"

namespace gramforge {

/// Insertion-ordered so emitted documents read in declaration order; doubles
/// serialize as the shortest decimal that round-trips, which makes output
/// byte-deterministic for identical inputs.
using json = nlohmann::ordered_json;

// --- serialization ---------------------------------------------------------

json to_json(const Graph& g);              // {"n":, "edges": [[i,j], ...]}
json to_json(const SymmetricMatrix& x);    // {"n":, "rows": [[...], ...]}
json to_json(const GramConfiguration& p);  // {"k":, "points": [[...], ...]}
json to_json(const PartialMatrix& a);      // {"graph":, "entries": [{"i","j","v"}]}
json to_json(const EdgeValues& w);         // like PartialMatrix, no diagonals
json to_json(const MinorModel& m);
json to_json(const CompletionResult& r);
json to_json(const Certificate& c);
json to_json(const SdpProblem& p);
json to_json(const SdpSolution& s);

/// Report documents combining several pieces (graph context, seed echo).
json stretch_report_json(const Graph& g, const StretchResult& r);
json fit_report_json(const FitResult& r, std::uint64_t seed);
json witness_report_json(const OctahedronWitness& w);
json rank_reduce_report_json(const RankReduceResult& r);

// --- parsing (strict; throws Error{ParseError} on malformed input) ---------

Graph graph_from_json(const json& j);
SymmetricMatrix matrix_from_json(const json& j);
GramConfiguration configuration_from_json(const json& j);
PartialMatrix partial_from_json(const json& j);
EdgeValues edge_values_from_json(const json& j);
MinorModel minor_model_from_json(const json& j);
SdpProblem problem_from_json(const json& j);
Certificate certificate_from_json(const json& j);

/// Accepts either a bare matrix document or any report carrying an "X"
/// member (solver output, completion, reduction).
SymmetricMatrix solution_matrix_from_json(const json& j);

// --- files ------------------------------------------------------------------

std::string json_text(const json& j);  // dump(2) + trailing newline
json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

/// Graph argument resolution: "named:<name>" uses the built-in catalogue,
/// anything else is read as a Graph JSON file.
Graph load_graph_spec(const std::string& spec);

}  // namespace gramforge
