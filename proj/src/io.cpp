#include "quditmc/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace quditmc {

namespace {

[[noreturn]] void schema_error(const std::string& where,
                               const std::string& why) {
  throw std::runtime_error("schema violation at " +
                           (where.empty() ? std::string("/") : where) + ": " +
                           why);
}

const Json& require(const Json& j, const std::string& key,
                    const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(where + "/" + key, "missing field");
  return *it;
}

double require_number(const Json& j, const std::string& key,
                      const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_number()) schema_error(where + "/" + key, "expected a number");
  return v.get<double>();
}

long long require_integer(const Json& j, const std::string& key,
                          const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_number_integer())
    schema_error(where + "/" + key, "expected an integer");
  return v.get<long long>();
}

std::string require_string(const Json& j, const std::string& key,
                           const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_string()) schema_error(where + "/" + key, "expected a string");
  return v.get<std::string>();
}

bool require_bool(const Json& j, const std::string& key,
                  const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_boolean()) schema_error(where + "/" + key, "expected a boolean");
  return v.get<bool>();
}

Json complex_to_json(const Cx& z) { return Json::array({z.real(), z.imag()}); }

Cx complex_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    schema_error(where, "expected a [re, im] pair");
  return Cx(j[0].get<double>(), j[1].get<double>());
}

std::string herm_kind_name(HermMeta::Kind k) {
  switch (k) {
    case HermMeta::kIdentity: return "identity";
    case HermMeta::kH: return "H";
    case HermMeta::kHBar: return "Hbar";
  }
  return "?";
}

HermMeta::Kind herm_kind_from_name(const std::string& s,
                                   const std::string& where) {
  if (s == "identity") return HermMeta::kIdentity;
  if (s == "H") return HermMeta::kH;
  if (s == "Hbar") return HermMeta::kHBar;
  schema_error(where, "unknown Hermitization kind '" + s + "'");
}

}  // namespace

Json matrix_to_json(const Mat& m) {
  Json data = Json::array();
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) data.push_back(complex_to_json(m(r, c)));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Mat matrix_from_json(const Json& j, const std::string& where) {
  const long long rows = require_integer(j, "rows", where);
  const long long cols = require_integer(j, "cols", where);
  const Json& data = require(j, "data", where);
  if (rows < 1 || cols < 1) schema_error(where, "non-positive matrix shape");
  if (!data.is_array() ||
      data.size() != static_cast<std::size_t>(rows * cols))
    schema_error(where + "/data", "expected " + std::to_string(rows * cols) +
                                      " [re, im] pairs");
  Mat m(rows, cols);
  std::size_t idx = 0;
  for (long long r = 0; r < rows; ++r)
    for (long long c = 0; c < cols; ++c, ++idx)
      m(r, c) = complex_from_json(data[idx],
                                  where + "/data/" + std::to_string(idx));
  return m;
}

// ---- basis ------------------------------------------------------------------

Json basis_to_json(const OperatorBasis& basis, const HierarchyClass* hierarchy) {
  Json j;
  j["format"] = "quditmc.basis/1";
  j["p"] = basis.dims.p;
  j["n"] = basis.dims.n;
  j["kind"] = basis.kind;
  j["flags"] = Json{{"unitary", basis.flags.unitary},
                    {"hermitian", basis.flags.hermitian},
                    {"tensor_local", basis.flags.tensor_local}};
  Json ops = Json::array();
  for (const Mat& op : basis.ops) ops.push_back(matrix_to_json(op));
  j["ops"] = std::move(ops);
  if (!basis.labels.empty()) {
    Json labels = Json::array();
    for (const PauliLabel& l : basis.labels)
      labels.push_back(Json{{"x", l.x}, {"z", l.z}});
    j["labels"] = std::move(labels);
  }
  if (!basis.herm.empty()) {
    Json herm = Json::array();
    for (const HermMeta& h : basis.herm)
      herm.push_back(Json{{"kind", herm_kind_name(h.kind)},
                          {"source", h.source},
                          {"partner", h.partner}});
    j["herm"] = std::move(herm);
  }
  if (basis.partition) {
    Json part;
    part["ok"] = basis.partition->ok;
    part["sets"] = basis.partition->sets;
    part["sets_built"] = basis.partition->sets_built;
    part["blocking_index"] = basis.partition->blocking_index;
    part["message"] = basis.partition->message;
    j["partition"] = std::move(part);
  }
  if (hierarchy) {
    j["class"] = std::string(1, hierarchy->label);
    Json ev = Json::array();
    for (const auto& [name, pass] : hierarchy->evidence)
      ev.push_back(Json{{"check", name}, {"pass", pass}});
    j["class_evidence"] = std::move(ev);
  }
  return j;
}

OperatorBasis basis_from_json(const Json& j) {
  const std::string fmt = require_string(j, "format", "");
  if (fmt != "quditmc.basis/1")
    schema_error("/format", "unsupported format '" + fmt + "'");
  OperatorBasis basis;
  basis.dims = QupitDims::make(static_cast<int>(require_integer(j, "p", "")),
                               static_cast<int>(require_integer(j, "n", "")));
  basis.kind = require_string(j, "kind", "");
  const Json& flags = require(j, "flags", "");
  basis.flags.unitary = require_bool(flags, "unitary", "/flags");
  basis.flags.hermitian = require_bool(flags, "hermitian", "/flags");
  basis.flags.tensor_local = require_bool(flags, "tensor_local", "/flags");
  const Json& ops = require(j, "ops", "");
  if (!ops.is_array() || ops.empty()) schema_error("/ops", "expected matrices");
  for (std::size_t i = 0; i < ops.size(); ++i) {
    Mat m = matrix_from_json(ops[i], "/ops/" + std::to_string(i));
    if (m.rows() != basis.dims.d || m.cols() != basis.dims.d)
      schema_error("/ops/" + std::to_string(i), "matrix is not d x d");
    basis.ops.push_back(std::move(m));
  }
  if (j.contains("labels")) {
    const Json& labels = j.at("labels");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const std::string where = "/labels/" + std::to_string(i);
      PauliLabel l;
      const Json& xs = require(labels[i], "x", where);
      const Json& zs = require(labels[i], "z", where);
      l.x = xs.get<std::vector<int>>();
      l.z = zs.get<std::vector<int>>();
      basis.labels.push_back(std::move(l));
    }
  }
  if (j.contains("herm")) {
    const Json& herm = j.at("herm");
    for (std::size_t i = 0; i < herm.size(); ++i) {
      const std::string where = "/herm/" + std::to_string(i);
      HermMeta h;
      h.kind = herm_kind_from_name(require_string(herm[i], "kind", where),
                                   where + "/kind");
      h.source = static_cast<int>(require_integer(herm[i], "source", where));
      h.partner = static_cast<int>(require_integer(herm[i], "partner", where));
      basis.herm.push_back(h);
    }
  }
  if (j.contains("partition")) {
    const Json& part = j.at("partition");
    PartitionResult pr;
    pr.ok = require_bool(part, "ok", "/partition");
    pr.sets = require(part, "sets", "/partition")
                  .get<std::vector<std::vector<int>>>();
    pr.sets_built =
        static_cast<int>(require_integer(part, "sets_built", "/partition"));
    pr.blocking_index = static_cast<int>(
        require_integer(part, "blocking_index", "/partition"));
    pr.message = require_string(part, "message", "/partition");
    for (const auto& set : pr.sets) pr.set_sizes.push_back(set.size());
    basis.partition = std::move(pr);
  }
  return basis;
}

void write_basis(const std::string& path, const OperatorBasis& basis,
                 const HierarchyClass* hierarchy) {
  write_json_file(path, basis_to_json(basis, hierarchy));
}

OperatorBasis read_basis(const std::string& path) {
  return basis_from_json(read_json_file(path));
}

// ---- MUB families -----------------------------------------------------------

Json mubs_to_json(const MubSet& mubs) {
  Json j;
  j["format"] = "quditmc.mub/1";
  j["p"] = mubs.dims.p;
  j["n"] = mubs.dims.n;
  j["origin"] = mubs.origin;
  j["cyclic"] = mubs.cyclic;
  Json bases = Json::array();
  for (const Mat& b : mubs.bases) bases.push_back(matrix_to_json(b));
  j["bases"] = std::move(bases);
  return j;
}

MubSet mubs_from_json(const Json& j) {
  const std::string fmt = require_string(j, "format", "");
  if (fmt != "quditmc.mub/1")
    schema_error("/format", "unsupported format '" + fmt + "'");
  MubSet mubs;
  mubs.dims = QupitDims::make(static_cast<int>(require_integer(j, "p", "")),
                              static_cast<int>(require_integer(j, "n", "")));
  mubs.origin = require_string(j, "origin", "");
  mubs.cyclic = require_bool(j, "cyclic", "");
  const Json& bases = require(j, "bases", "");
  if (!bases.is_array() ||
      bases.size() != static_cast<std::size_t>(mubs.dims.d + 1))
    schema_error("/bases", "expected d + 1 basis matrices");
  for (std::size_t i = 0; i < bases.size(); ++i)
    mubs.bases.push_back(
        matrix_from_json(bases[i], "/bases/" + std::to_string(i)));
  return mubs;
}

void write_mubs(const std::string& path, const MubSet& mubs) {
  write_json_file(path, mubs_to_json(mubs));
}

MubSet read_mubs(const std::string& path) {
  return mubs_from_json(read_json_file(path));
}

// ---- channels ---------------------------------------------------------------

Json channel_to_json(const Channel& channel) {
  Json j;
  j["format"] = "quditmc.channel/1";
  j["label"] = channel.label;
  Json kraus = Json::array();
  for (const Mat& K : channel.kraus) kraus.push_back(matrix_to_json(K));
  j["kraus"] = std::move(kraus);
  return j;
}

Channel channel_from_json(const Json& j, const QupitDims& dims) {
  if (!j.is_object()) schema_error("", "expected an object");
  if (j.contains("kraus")) {
    Channel c;
    c.label = j.value("label", std::string("channel"));
    const Json& kraus = j.at("kraus");
    if (!kraus.is_array() || kraus.empty())
      schema_error("/kraus", "expected a non-empty matrix array");
    for (std::size_t i = 0; i < kraus.size(); ++i) {
      Mat K = matrix_from_json(kraus[i], "/kraus/" + std::to_string(i));
      if (K.rows() != dims.d || K.cols() != dims.d)
        schema_error("/kraus/" + std::to_string(i),
                     "Kraus matrix is not d x d for the requested dimensions");
      c.kraus.push_back(std::move(K));
    }
    try {
      c.validate();
    } catch (const std::exception& e) {
      schema_error("/kraus", e.what());
    }
    return c;
  }
  const std::string type = require_string(j, "type", "");
  const double q = require_number(j, "q", "");
  if (q < 0.0 || q > 1.0) schema_error("/q", "strength must lie in [0, 1]");
  if (type == "depolarizing") return depolarizing(q, dims);
  if (type == "dephasing") return dephasing(q, dims);
  schema_error("/type", "unknown channel type '" + type +
                            "' (expected depolarizing|dephasing, or provide "
                            "explicit kraus matrices)");
}

void write_channel(const std::string& path, const Channel& channel) {
  write_json_file(path, channel_to_json(channel));
}

Channel read_channel(const std::string& path, const QupitDims& dims) {
  return channel_from_json(read_json_file(path), dims);
}

// ---- analysis artifacts -----------------------------------------------------

Json clifford_map_to_json(const CliffordMap& map) {
  return Json{{"is_clifford", map.is_clifford},
              {"phase_order", map.phase_order},
              {"image", map.image},
              {"phase_exp", map.phase_exp},
              {"worst_residual", map.worst_residual}};
}

Json plan_to_json(const SamplingPlan& plan) {
  return Json{{"epsilon", plan.epsilon},
              {"delta", plan.delta},
              {"L", plan.L},
              {"seed", plan.seed},
              {"protocol", protocol_name(plan.protocol)},
              {"shot_mode", shot_mode_name(plan.shot_mode)}};
}

SamplingPlan plan_from_json(const Json& j) {
  SamplingPlan plan;
  plan.epsilon = require_number(j, "epsilon", "/plan");
  plan.delta = require_number(j, "delta", "/plan");
  plan.L = require_integer(j, "L", "/plan");
  plan.seed = require(j, "seed", "/plan").get<std::uint64_t>();
  plan.protocol = protocol_from_name(require_string(j, "protocol", "/plan"));
  plan.shot_mode =
      shot_mode_from_name(require_string(j, "shot_mode", "/plan"));
  plan.validate();
  return plan;
}

Json guarantee_to_json(const GuaranteeReport& rep) {
  return Json{{"runs", rep.runs},
              {"failures", rep.failures},
              {"failure_fraction", rep.failure_fraction},
              {"threshold", rep.threshold},
              {"epsilon", rep.epsilon},
              {"oracle", rep.oracle_value},
              {"mean_estimate", rep.mean_estimate},
              {"sample_sd", rep.sample_sd},
              {"mean_total_shots", rep.mean_total_shots},
              {"ok", rep.ok}};
}

Json estimate_manifest(const EstimateResult& result, bool verbose_events) {
  Json j;
  j["format"] = "quditmc.manifest/1";
  j["plan"] = plan_to_json(result.plan);
  j["y_tilde"] = complex_to_json(result.y_tilde);
  j["estimate"] = result.estimate;
  j["imag_residue"] = result.y_tilde.imag();
  j["fe_estimate"] = result.fe_estimate;
  j["fav_estimate"] = result.fav_estimate;
  j["total_shots"] = result.total_shots;
  j["event_count"] = result.events.size();
  if (result.oracle_value) j["oracle"] = *result.oracle_value;
  if (verbose_events) {
    Json events = Json::array();
    for (const EventDraw& ev : result.events)
      events.push_back(Json{{"input", ev.input},
                            {"meas", ev.meas},
                            {"beta", complex_to_json(ev.beta)},
                            {"m", ev.m_l},
                            {"x", complex_to_json(ev.x_tilde)}});
    j["events"] = std::move(events);
  }
  return j;
}

std::string estimate_csv_header() {
  return "protocol,shot_mode,epsilon,delta,L,seed,estimate,fe_estimate,"
         "fav_estimate,oracle,total_shots,imag_residue";
}

std::string estimate_csv_row(const EstimateResult& result) {
  std::ostringstream os;
  os.precision(17);
  os << protocol_name(result.plan.protocol) << ','
     << shot_mode_name(result.plan.shot_mode) << ',' << result.plan.epsilon
     << ',' << result.plan.delta << ',' << result.plan.L << ','
     << result.plan.seed << ',' << result.estimate << ',' << result.fe_estimate
     << ',' << result.fav_estimate << ',';
  if (result.oracle_value) os << *result.oracle_value;
  os << ',' << result.total_shots << ',' << result.y_tilde.imag();
  return os.str();
}

// ---- files ------------------------------------------------------------------

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw std::runtime_error("failed writing " + path);
}

Json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  Json j;
  try {
    is >> j;
  } catch (const Json::parse_error& e) {
    throw std::runtime_error("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << text;
  if (!os) throw std::runtime_error("failed writing " + path);
}

}  // namespace quditmc
