// JSON (and CSV) serialization for bases, MUB families, channels, Clifford
// maps, sampling plans, and run manifests.  All numbers are written with
// round-trip precision and object keys are emitted in sorted order, so a
// fixed input always produces byte-identical files.
#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "quditmc/channel.hpp"
#include "quditmc/estimator.hpp"
#include "quditmc/mub.hpp"
#include "quditmc/operator_basis.hpp"
#include "quditmc/relevance.hpp"

namespace quditmc {

using Json = nlohmann::json;

// Matrices travel as {"rows", "cols", "data"} with data a row-major array of
// [re, im] pairs.
Json matrix_to_json(const Mat& m);
Mat matrix_from_json(const Json& j, const std::string& where);

// ---- .basis.json ------------------------------------------------------------
Json basis_to_json(const OperatorBasis& basis,
                   const HierarchyClass* hierarchy = nullptr);
OperatorBasis basis_from_json(const Json& j);
void write_basis(const std::string& path, const OperatorBasis& basis,
                 const HierarchyClass* hierarchy = nullptr);
OperatorBasis read_basis(const std::string& path);

// ---- .mub.json --------------------------------------------------------------
Json mubs_to_json(const MubSet& mubs);
MubSet mubs_from_json(const Json& j);
void write_mubs(const std::string& path, const MubSet& mubs);
MubSet read_mubs(const std::string& path);

// ---- .channel.json ----------------------------------------------------------
// Full form: {"kraus": [matrix...], "label": ...}.  Shorthand forms:
// {"type": "depolarizing"|"dephasing", "q": 0.1} (dims supplied by caller).
Json channel_to_json(const Channel& channel);
Channel channel_from_json(const Json& j, const QupitDims& dims);
void write_channel(const std::string& path, const Channel& channel);
Channel read_channel(const std::string& path, const QupitDims& dims);

// ---- analysis artifacts -----------------------------------------------------
Json clifford_map_to_json(const CliffordMap& map);
Json plan_to_json(const SamplingPlan& plan);
SamplingPlan plan_from_json(const Json& j);
Json guarantee_to_json(const GuaranteeReport& rep);

// Run manifest: plan, estimates, oracle, shot totals, and (verbose only) the
// per-event draw records.  Contains no timestamps or machine identifiers.
Json estimate_manifest(const EstimateResult& result, bool verbose_events);

// One CSV summary row per run (with a matching header line helper).
std::string estimate_csv_header();
std::string estimate_csv_row(const EstimateResult& result);

// ---- files ------------------------------------------------------------------
void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace quditmc
