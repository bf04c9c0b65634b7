#pragma once

// Run configuration and persistence: flat key=value config files, CSV and
// JSON writers, and the portrait JSON reader.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "boundstate/aux_functionals.hpp"
#include "boundstate/classifier.hpp"
#include "boundstate/errors.hpp"
#include "boundstate/integrator.hpp"
#include "boundstate/phase_portrait.hpp"
#include "boundstate/sweep.hpp"
#include "boundstate/verify.hpp"

namespace boundstate {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "boundstate-lab/1";
inline constexpr const char* kOutDirEnv = "BOUNDSTATE_OUT_DIR";

struct RunConfig {
  std::string command;
  FieldParams field;
  std::optional<double> alpha;
  std::optional<std::pair<double, double>> alpha_range;
  int count = 200;
  int k_lo = 0;
  int k_hi = 2;
  double tol = 1e-8;
  IntegratorControls controls;
  std::string out_dir = ".";
  std::string format = "json";
  std::string preset = "core";
  std::vector<std::string> checks;

  void validate() const {
    field.validate();
    if (alpha && !(*alpha > 0.0)) {
      throw ParameterError("alpha must be positive");
    }
    if (alpha_range && !(alpha_range->first > 0.0 && alpha_range->second >= alpha_range->first)) {
      throw ParameterError("alpha range must satisfy 0 < lo <= hi");
    }
    if (count < 1) {
      throw ParameterError("count must be at least 1");
    }
    if (k_lo < 0 || k_hi < k_lo) {
      throw ParameterError("k range must satisfy 0 <= lo <= hi");
    }
    for (double t : {tol, controls.abs_tol, controls.rel_tol}) {
      if (!(t >= 1e-15 && t <= 1e-3)) {
        throw ParameterError("tolerances must lie in [1e-15, 1e-3]");
      }
    }
    if (!(controls.r_max > 0.0)) {
      throw ParameterError("rmax must be positive");
    }
    if (format != "json" && format != "csv") {
      throw ParameterError("format must be json or csv");
    }
  }
};

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// "a:b" or "a..b".
inline std::pair<double, double> parse_real_range(const std::string& s) {
  std::size_t pos = s.find("..");
  std::size_t len = 2;
  if (pos == std::string::npos) {
    pos = s.find(':');
    len = 1;
  }
  if (pos == std::string::npos) {
    throw ParameterError("range '" + s + "' must look like lo:hi or lo..hi");
  }
  try {
    std::size_t used = 0;
    const std::string a = s.substr(0, pos);
    const std::string b = s.substr(pos + len);
    const double lo = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    const double hi = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw ParameterError("range '" + s + "' is not numeric");
  }
}

// "k" or "lo..hi".
inline std::pair<int, int> parse_k_range(const std::string& s) {
  try {
    const auto pos = s.find("..");
    std::size_t used = 0;
    if (pos == std::string::npos) {
      const int k = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {k, k};
    }
    const std::string a = s.substr(0, pos);
    const std::string b = s.substr(pos + 2);
    const int lo = std::stoi(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    const int hi = std::stoi(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw ParameterError("k range '" + s + "' must look like k or lo..hi");
  }
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

// Flat config: one `key = value` per line, '#' starts a comment.
inline std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read config file " + path);
  }
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    auto trim = [](std::string x) {
      const auto s = x.find_first_not_of(" \t\r");
      const auto e = x.find_last_not_of(" \t\r");
      return s == std::string::npos ? std::string() : x.substr(s, e - s + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto real = [&](const std::string& v) {
    try {
      std::size_t used = 0;
      const double x = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::logic_error&) {
      throw ParameterError("setting " + key + " expects a number, got '" + v + "'");
    }
  };
  if (key == "n") {
    const double x = real(value);
    if (x != static_cast<int>(x)) throw ParameterError("n must be an integer");
    cfg.field.n = static_cast<int>(x);
  } else if (key == "p") {
    cfg.field.p = real(value);
  } else if (key == "alpha") {
    cfg.alpha = real(value);
  } else if (key == "alpha-range") {
    cfg.alpha_range = parse_real_range(value);
  } else if (key == "count") {
    cfg.count = static_cast<int>(real(value));
  } else if (key == "k") {
    std::tie(cfg.k_lo, cfg.k_hi) = parse_k_range(value);
  } else if (key == "tol") {
    cfg.tol = real(value);
  } else if (key == "rmax") {
    cfg.controls.r_max = real(value);
  } else if (key == "abs-tol") {
    cfg.controls.abs_tol = real(value);
  } else if (key == "rel-tol") {
    cfg.controls.rel_tol = real(value);
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "format") {
    cfg.format = value;
  } else if (key == "preset") {
    cfg.preset = value;
  } else if (key == "checks") {
    cfg.checks = split_list(value);
  } else {
    throw ParameterError("unknown config key: " + key);
  }
}

inline Json config_json(const RunConfig& cfg) {
  Json j;
  j["command"] = cfg.command;
  j["n"] = cfg.field.n;
  j["p"] = cfg.field.p;
  j["alpha"] = cfg.alpha ? Json(*cfg.alpha) : Json(nullptr);
  j["alpha_range"] = cfg.alpha_range ? Json::array({cfg.alpha_range->first, cfg.alpha_range->second}) : Json(nullptr);
  j["count"] = cfg.count;
  j["k"] = Json::array({cfg.k_lo, cfg.k_hi});
  j["tol"] = cfg.tol;
  j["abs_tol"] = cfg.controls.abs_tol;
  j["rel_tol"] = cfg.controls.rel_tol;
  j["r_max"] = cfg.controls.r_max;
  j["v_guard"] = cfg.controls.v_guard;
  j["max_steps"] = cfg.controls.max_steps;
  j["r0"] = cfg.controls.r0 ? Json(*cfg.controls.r0) : Json(nullptr);
  j["format"] = cfg.format;
  j["preset"] = cfg.preset;
  j["checks"] = cfg.checks;
  return j;
}

// CSV outputs open with `# config: {...}` so they stay self-describing.
inline std::string config_comment(const RunConfig& cfg) { return "# config: " + config_json(cfg).dump() + "\n"; }

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << text;
  out.flush();
  if (!out) {
    throw IoError("write to " + path.string() + " failed");
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string trajectory_csv(const Trajectory& t, const RunConfig& cfg) {
  std::string s = config_comment(cfg);
  s += "r,u,up,v,vp\n";
  for (const auto& x : t.samples()) {
    s += format_real(x.r) + "," + format_real(x.u) + "," + format_real(x.up) + "," + format_real(x.v) + "," +
         format_real(x.vp) + "\n";
  }
  return s;
}

inline Json opt_json(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

inline Json to_json(const Event& e) { return Json{{"r", e.r}, {"u", e.u}, {"uncertain", e.uncertain}}; }

inline Json opt_json(const std::optional<Event>& e) { return e ? to_json(*e) : Json(nullptr); }

inline Json to_json(const PhasePortrait& pp) {
  auto events = [](const std::vector<Event>& v) {
    Json a = Json::array();
    for (const auto& e : v) a.push_back(to_json(e));
    return a;
  };
  Json phases = Json::array();
  for (const auto& ph : pp.phases) {
    phases.push_back(Json{{"index", ph.index},
                          {"c_prev", ph.c_prev},
                          {"b", opt_json(ph.b)},
                          {"r", opt_json(ph.r)},
                          {"z", opt_json(ph.z)},
                          {"r_bar", opt_json(ph.r_bar)},
                          {"b_bar", opt_json(ph.b_bar)},
                          {"c", opt_json(ph.c)},
                          {"open", ph.open},
                          {"truncated", ph.truncated}});
  }
  return Json{{"phase_kind", to_string(pp.phase_kind)},
              {"energy_nonpositive_radius", opt_json(pp.energy_nonpositive_radius)},
              {"zeros_u", events(pp.zeros_u)},
              {"crits_u", events(pp.crits_u)},
              {"zeros_v", events(pp.zeros_v)},
              {"inflections_u", events(pp.inflections_u)},
              {"phases", phases}};
}

inline Event event_from_json(const Json& j) {
  return Event{j.at("r").get<double>(), j.at("u").get<double>(), j.at("uncertain").get<bool>()};
}

inline std::optional<Event> opt_event_from_json(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return event_from_json(j);
}

inline PhasePortrait portrait_from_json(const Json& j) {
  try {
    PhasePortrait pp;
    const std::string kind = j.at("phase_kind").get<std::string>();
    if (kind == "SemiTail") {
      pp.phase_kind = PhaseKind::SemiTail;
    } else if (kind == "TailOscillatory") {
      pp.phase_kind = PhaseKind::TailOscillatory;
    } else {
      throw IoError("unknown phase_kind " + kind);
    }
    if (!j.at("energy_nonpositive_radius").is_null()) {
      pp.energy_nonpositive_radius = j.at("energy_nonpositive_radius").get<double>();
    }
    auto events = [&](const char* key, std::vector<Event>& out) {
      for (const auto& e : j.at(key)) out.push_back(event_from_json(e));
    };
    events("zeros_u", pp.zeros_u);
    events("crits_u", pp.crits_u);
    events("zeros_v", pp.zeros_v);
    events("inflections_u", pp.inflections_u);
    for (const auto& p : j.at("phases")) {
      PhaseLabels ph;
      ph.index = p.at("index").get<int>();
      ph.c_prev = p.at("c_prev").get<double>();
      ph.b = opt_event_from_json(p.at("b"));
      ph.r = opt_event_from_json(p.at("r"));
      ph.z = opt_event_from_json(p.at("z"));
      ph.r_bar = opt_event_from_json(p.at("r_bar"));
      ph.b_bar = opt_event_from_json(p.at("b_bar"));
      ph.c = opt_event_from_json(p.at("c"));
      ph.open = p.at("open").get<bool>();
      ph.truncated = p.at("truncated").get<bool>();
      pp.phases.push_back(ph);
    }
    return pp;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed portrait JSON: ") + e.what());
  }
}

inline Json portrait_document(const PhasePortrait& pp, const Trajectory& t, const RunConfig& cfg) {
  Json j;
  j["schema"] = kSchema;
  j["config"] = config_json(cfg);
  j["alpha"] = t.alpha();
  j["termination"] = Json{{"cause", to_string(t.termination().tag)},
                          {"r_stop", t.termination().r_stop},
                          {"detail", t.termination().detail}};
  j["node_count"] = pp.node_count();
  j["portrait"] = to_json(pp);
  return j;
}

inline PhasePortrait read_portrait_document(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  if (!j.contains("schema") || j["schema"] != kSchema) {
    throw IoError(path.string() + ": missing or unknown schema");
  }
  return portrait_from_json(j.at("portrait"));
}

inline Json to_json(const SolutionClass& c) {
  const Witness& w = c.witness;
  return Json{{"tag", to_string(c.tag)},
              {"node_count", c.node_count},
              {"oscillation_center", c.oscillation_center},
              {"witness",
               {{"energy_nonpositive_r", opt_json(w.energy_nonpositive_r)},
                {"r_stop", w.r_stop},
                {"u_stop", w.u_stop},
                {"decay_r", opt_json(w.decay_r)},
                {"decay_u", opt_json(w.decay_u)},
                {"slope_gap", opt_json(w.slope_gap)},
                {"corrected_gap", opt_json(w.corrected_gap)},
                {"cause", w.cause}}}};
}

inline Json ladder_document(const AlphaLadder& lad, const RunConfig& cfg) {
  Json entries = Json::array();
  for (const auto& e : lad.entries) {
    entries.push_back(Json{{"k", e.k},
                           {"alpha_lo", e.alpha_lo},
                           {"alpha_hi", e.alpha_hi},
                           {"nodes_lo", e.nodes_lo},
                           {"nodes_hi", e.nodes_hi},
                           {"evaluations", e.evaluations},
                           {"status", e.status}});
  }
  return Json{{"schema", kSchema}, {"n", lad.field.n}, {"p", lad.field.p}, {"tol", lad.tol},
              {"entries", entries},  {"config", config_json(cfg)}};
}

inline std::string ladder_csv(const AlphaLadder& lad, const RunConfig& cfg) {
  std::string s = config_comment(cfg) + "k,alpha_lo,alpha_hi,nodes_lo,nodes_hi,evaluations,status\n";
  for (const auto& e : lad.entries) {
    s += std::to_string(e.k) + "," + format_real(e.alpha_lo) + "," + format_real(e.alpha_hi) + "," +
         std::to_string(e.nodes_lo) + "," + std::to_string(e.nodes_hi) + "," + std::to_string(e.evaluations) + ",\"" +
         e.status + "\"\n";
  }
  return s;
}

inline std::string sweep_csv(const SweepResult& res, const RunConfig& cfg) {
  std::size_t max_zeros = 0;
  for (const auto& row : res.rows) max_zeros = std::max(max_zeros, row.zeros.size());
  std::string s = config_comment(cfg) + "alpha,node_count,class_tag";
  for (std::size_t i = 1; i <= max_zeros; ++i) s += ",z_" + std::to_string(i);
  s += ",E_negative_radius\n";
  for (const auto& row : res.rows) {
    s += format_real(row.alpha) + "," + std::to_string(row.cls.node_count) + "," + to_string(row.cls.tag);
    for (std::size_t i = 0; i < max_zeros; ++i) s += "," + (i < row.zeros.size() ? format_real(row.zeros[i]) : "");
    s += "," + (row.cls.witness.energy_nonpositive_r ? format_real(*row.cls.witness.energy_nonpositive_r) : "") + "\n";
  }
  return s;
}

inline Json sweep_document(const SweepResult& res, const RunConfig& cfg) {
  Json rows = Json::array();
  for (const auto& row : res.rows) {
    Json r = to_json(row.cls);
    r["alpha"] = row.alpha;
    r["zeros"] = row.zeros;
    rows.push_back(r);
  }
  return Json{{"schema", kSchema},
              {"rows", rows},
              {"indeterminate", res.indeterminate},
              {"monotone", res.monotone()},
              {"config", config_json(cfg)}};
}

inline Json report_document(const VerificationReport& rep, const RunConfig& cfg) {
  Json recs = Json::array();
  for (const auto& r : rep.records) {
    recs.push_back(Json{{"check", r.check},
                        {"case", r.case_id},
                        {"status", to_string(r.status)},
                        {"worst_margin", r.worst_margin},
                        {"probes", r.probe_count},
                        {"notes", r.notes}});
  }
  return Json{{"schema", kSchema},
              {"records", recs},
              {"failures", rep.failures()},
              {"config", config_json(cfg)}};
}

inline std::string report_csv(const VerificationReport& rep, const RunConfig& cfg) {
  std::string s = config_comment(cfg) + "case,check,status,worst_margin,probes,notes\n";
  for (const auto& r : rep.records) {
    std::string notes = r.notes;
    for (auto& ch : notes) {
      if (ch == '"') ch = '\'';
    }
    s += "\"" + r.case_id + "\"," + r.check + "," + to_string(r.status) + "," + format_real(r.worst_margin) + "," +
         std::to_string(r.probe_count) + ",\"" + notes + "\"\n";
  }
  return s;
}

inline std::string report_table(const VerificationReport& rep) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %-28s %-18s %12s %7s\n", "case", "check", "status", "margin", "probes");
  os << line;
  for (const auto& r : rep.records) {
    std::snprintf(line, sizeof line, "%-28s %-28s %-18s %12.4g %7d", r.case_id.c_str(), r.check.c_str(),
                  to_string(r.status), r.worst_margin, r.probe_count);
    os << line;
    if (!r.notes.empty()) os << "  " << r.notes;
    os << "\n";
  }
  os << rep.records.size() << " records, " << rep.failures() << " failed\n";
  return os.str();
}

// One row per sample: state plus every functional; undefined entries are
// left empty.
inline std::string aux_trace_csv(const Trajectory& t, const RunConfig& cfg) {
  const FieldParams fp = t.field();
  std::string s = config_comment(cfg) +
                  "r,u,up,v,vp,E,E_hat,P,P1,P2,omega,rho,Q,Q1,Q2,Qn,M,T1,T2,B0,phi_n,varpi\n";
  auto opt = [](const std::optional<double>& x) { return x ? format_real(*x) : std::string(); };
  for (const auto& x : t.samples()) {
    const AuxSample a = eval_aux(x, fp);
    s += format_real(x.r) + "," + format_real(x.u) + "," + format_real(x.up) + "," + format_real(x.v) + "," +
         format_real(x.vp) + "," + format_real(a.E) + "," + format_real(a.E_hat) + "," + format_real(a.P) + "," +
         format_real(a.P1) + "," + format_real(a.P2) + "," + opt(a.omega) + "," + format_real(a.rho) + "," +
         format_real(a.Q) + "," + format_real(a.Q1) + "," + format_real(a.Q2) + "," + format_real(a.Qn) + "," +
         format_real(a.M) + "," + opt(a.T1) + "," + opt(a.T2) + "," + opt(a.B0) + "," + opt(a.phi_n) + "," +
         opt(a.varpi) + "\n";
  }
  return s;
}

// Output directory: --out, else $BOUNDSTATE_OUT_DIR, else ".".
inline std::string default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return env != nullptr && *env != '\0' ? std::string(env) : std::string(".");
}

}  // namespace boundstate
