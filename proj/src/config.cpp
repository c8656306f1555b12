#include "polariton/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

#include "polariton/error.hpp"

namespace polariton {

using nlohmann::json;

std::string to_string(Analysis a) {
  switch (a) {
    case Analysis::RStat: return "rstat";
    case Analysis::Gfd: return "gfd";
    case Analysis::Dos: return "dos";
    case Analysis::Eth: return "eth";
    case Analysis::GroundState: return "groundstate";
  }
  return "?";
}

Analysis parse_analysis(const std::string& text) {
  for (Analysis a : {Analysis::RStat, Analysis::Gfd, Analysis::Dos, Analysis::Eth, Analysis::GroundState}) {
    if (to_string(a) == text) return a;
  }
  throw ConfigError("unknown analysis '" + text + "' (expected rstat, gfd, dos, eth or groundstate)");
}

std::string to_string(CachePolicy p) {
  switch (p) {
    case CachePolicy::ReadWrite: return "readwrite";
    case CachePolicy::ReadOnly: return "readonly";
    case CachePolicy::Off: return "off";
  }
  return "?";
}

namespace {

CachePolicy parse_cache_policy(const std::string& text) {
  for (CachePolicy p : {CachePolicy::ReadWrite, CachePolicy::ReadOnly, CachePolicy::Off}) {
    if (to_string(p) == text) return p;
  }
  throw ConfigError("unknown cache policy '" + text + "' (expected readwrite, readonly or off)");
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(fmt::format("unknown key '{}{}'", where, key));
  }
}

template <typename T>
T get_as(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("key '{}{}' has the wrong type", where, key));
  }
}

double parse_order(const json& v) {
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) {
    return std::numeric_limits<double>::infinity();
  }
  if (v.is_number()) return v.get<double>();
  throw ConfigError("gfd_orders entries must be numbers or \"inf\"");
}

json order_to_json(double q) {
  if (std::isinf(q)) return "inf";
  return q;
}

}  // namespace

int RunConfig::excitations(int sites) const {
  const double n = filling * sites;
  const double rounded = std::round(n);
  if (std::abs(n - rounded) > 1e-9) {
    throw ConfigError(fmt::format("filling {} gives a non-integer excitation number at L={}", filling, sites));
  }
  return static_cast<int>(rounded);
}

bool RunConfig::needs_spectra() const {
  return analyses.count(Analysis::RStat) || analyses.count(Analysis::Gfd) || analyses.count(Analysis::Dos) ||
         analyses.count(Analysis::Eth);
}

bool RunConfig::needs_vectors() const { return analyses.count(Analysis::Gfd) || analyses.count(Analysis::Eth); }

void RunConfig::validate() const {
  if (schema_version != kConfigSchemaVersion) {
    throw ConfigError(fmt::format("unsupported schema_version {} (expected {})", schema_version, kConfigSchemaVersion));
  }
  if (analyses.empty()) throw ConfigError("'analyses' must not be empty");
  if (sizes.empty()) throw ConfigError("'sizes' must not be empty");
  for (int L : sizes) {
    if (L < 1) throw ConfigError("'sizes' entries must be positive");
    excitations(L);
  }
  if (!(filling > 0.0)) throw ConfigError("'filling' must be positive");
  if (needs_spectra()) {
    if (deltas.empty() || ts.empty() || boundaries.empty()) {
      throw ConfigError("'delta', 't' and 'boundaries' must not be empty");
    }
  }
  if (analyses.count(Analysis::GroundState) && deltas.empty()) throw ConfigError("'delta' must not be empty");
  for (double t : ts) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("'t' entries must be finite and >= 0");
  }
  for (double d : deltas) {
    if (!std::isfinite(d)) throw ConfigError("'delta' entries must be finite");
  }
  if (bins == 0) throw ConfigError("'bins' must be positive");
  if (window.kind == WindowSpec::Kind::Energy && !(window.lo >= 0.0 && window.lo < window.hi && window.hi <= 1.0)) {
    throw ConfigError("'window' epsilon range must satisfy 0 <= lo < hi <= 1");
  }
  for (double q : gfd_orders) {
    if (!(q > 0.0)) throw ConfigError("'gfd_orders' entries must be positive");
  }
  if (!(eth_delta > 0.0)) throw ConfigError("'eth.delta' must be positive");
  if (eth_subset == 0) throw ConfigError("'eth.subset' must be positive");
  const auto& g = ground_state;
  if (!(g.t_min > 0.0 && g.t_max > g.t_min) || g.points_per_decade < 1 || g.refine_points < 0) {
    throw ConfigError("invalid 'ground_state' grid");
  }
  if (workers < 0) throw ConfigError("'workers' must be >= 0");
  if (parity != Parity::None && momentum && std::find(boundaries.begin(), boundaries.end(), Boundary::Periodic) != boundaries.end()) {
    for (int L : sizes) {
      if ((2 * *momentum) % L != 0) {
        throw ConfigError(fmt::format("parity needs 2Q divisible by L (Q={}, L={})", *momentum, L));
      }
    }
  }
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc,
                 {"schema_version", "delta", "t", "sizes", "filling", "boundaries", "sector", "analyses", "bins",
                  "window", "gfd_orders", "eth", "ground_state", "output_dir", "cache", "workers"},
                 "");
  if (!doc.contains("schema_version")) throw ConfigError("missing required key 'schema_version'");
  RunConfig c;
  c.schema_version = get_as<int>(doc, "schema_version", "");
  if (doc.contains("delta")) c.deltas = get_as<std::vector<double>>(doc, "delta", "");
  if (doc.contains("t")) c.ts = get_as<std::vector<double>>(doc, "t", "");
  if (doc.contains("sizes")) c.sizes = get_as<std::vector<int>>(doc, "sizes", "");
  if (doc.contains("filling")) c.filling = get_as<double>(doc, "filling", "");
  if (doc.contains("boundaries")) {
    c.boundaries.clear();
    for (const auto& b : get_as<std::vector<std::string>>(doc, "boundaries", "")) {
      try {
        c.boundaries.push_back(parse_boundary(b));
      } catch (const Error& e) {
        throw ConfigError(std::string("'boundaries': ") + e.what());
      }
    }
  }
  if (doc.contains("sector")) {
    const auto& s = doc.at("sector");
    if (!s.is_object()) throw ConfigError("'sector' must be an object");
    reject_unknown(s, {"momentum", "parity"}, "sector.");
    if (s.contains("momentum")) {
      c.momentum = s.at("momentum").is_null() ? std::nullopt : std::optional<int>(get_as<int>(s, "momentum", "sector."));
    }
    if (s.contains("parity")) {
      try {
        c.parity = parse_parity(get_as<std::string>(s, "parity", "sector."));
      } catch (const Error& e) {
        throw ConfigError(std::string("'sector.parity': ") + e.what());
      }
    }
  }
  if (doc.contains("analyses")) {
    c.analyses.clear();
    for (const auto& a : get_as<std::vector<std::string>>(doc, "analyses", "")) c.analyses.insert(parse_analysis(a));
  }
  if (doc.contains("bins")) {
    const int bins = get_as<int>(doc, "bins", "");
    if (bins <= 0) throw ConfigError("'bins' must be positive");
    c.bins = static_cast<std::size_t>(bins);
  }
  if (doc.contains("window")) {
    const auto& w = doc.at("window");
    if (w.is_string() && w.get<std::string>() == "middle_third") {
      c.window = {};
    } else if (w.is_object()) {
      reject_unknown(w, {"epsilon"}, "window.");
      const auto range = get_as<std::vector<double>>(w, "epsilon", "window.");
      if (range.size() != 2) throw ConfigError("'window.epsilon' must be [lo, hi]");
      c.window = {WindowSpec::Kind::Energy, range[0], range[1]};
    } else {
      throw ConfigError("'window' must be \"middle_third\" or {\"epsilon\": [lo, hi]}");
    }
  }
  if (doc.contains("gfd_orders")) {
    if (!doc.at("gfd_orders").is_array()) throw ConfigError("'gfd_orders' must be an array");
    c.gfd_orders.clear();
    for (const auto& q : doc.at("gfd_orders")) c.gfd_orders.push_back(parse_order(q));
  }
  if (doc.contains("eth")) {
    const auto& e = doc.at("eth");
    if (!e.is_object()) throw ConfigError("'eth' must be an object");
    reject_unknown(e, {"delta", "subset"}, "eth.");
    if (e.contains("delta")) c.eth_delta = get_as<double>(e, "delta", "eth.");
    if (e.contains("subset")) {
      const int subset = get_as<int>(e, "subset", "eth.");
      if (subset <= 0) throw ConfigError("'eth.subset' must be positive");
      c.eth_subset = static_cast<std::size_t>(subset);
    }
  }
  if (doc.contains("ground_state")) {
    const auto& g = doc.at("ground_state");
    if (!g.is_object()) throw ConfigError("'ground_state' must be an object");
    reject_unknown(g, {"t_min", "t_max", "points_per_decade", "refine_points"}, "ground_state.");
    if (g.contains("t_min")) c.ground_state.t_min = get_as<double>(g, "t_min", "ground_state.");
    if (g.contains("t_max")) c.ground_state.t_max = get_as<double>(g, "t_max", "ground_state.");
    if (g.contains("points_per_decade")) {
      c.ground_state.points_per_decade = get_as<int>(g, "points_per_decade", "ground_state.");
    }
    if (g.contains("refine_points")) c.ground_state.refine_points = get_as<int>(g, "refine_points", "ground_state.");
  }
  if (doc.contains("output_dir")) c.output_dir = get_as<std::string>(doc, "output_dir", "");
  if (doc.contains("cache")) {
    const auto& k = doc.at("cache");
    if (!k.is_object()) throw ConfigError("'cache' must be an object");
    reject_unknown(k, {"policy", "dir"}, "cache.");
    if (k.contains("policy")) c.cache = parse_cache_policy(get_as<std::string>(k, "policy", "cache."));
    if (k.contains("dir")) c.cache_dir = get_as<std::string>(k, "dir", "cache.");
  }
  if (doc.contains("workers")) c.workers = get_as<int>(doc, "workers", "");
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  auto config = parse_config(doc);
  // Relative output and cache paths are taken relative to the config file.
  const auto base = path.parent_path();
  if (config.output_dir.is_relative()) config.output_dir = base / config.output_dir;
  if (config.cache_dir && config.cache_dir->is_relative()) config.cache_dir = base / *config.cache_dir;
  return config;
}

json to_json(const RunConfig& c) {
  json doc;
  doc["schema_version"] = c.schema_version;
  doc["delta"] = c.deltas;
  doc["t"] = c.ts;
  doc["sizes"] = c.sizes;
  doc["filling"] = c.filling;
  doc["boundaries"] = json::array();
  for (auto b : c.boundaries) doc["boundaries"].push_back(std::string(to_string(b)));
  doc["sector"] = {{"momentum", c.momentum ? json(*c.momentum) : json(nullptr)}, {"parity", to_string(c.parity)}};
  doc["analyses"] = json::array();
  for (auto a : c.analyses) doc["analyses"].push_back(to_string(a));
  doc["bins"] = c.bins;
  if (c.window.kind == WindowSpec::Kind::MiddleThird) {
    doc["window"] = "middle_third";
  } else {
    doc["window"] = {{"epsilon", {c.window.lo, c.window.hi}}};
  }
  doc["gfd_orders"] = json::array();
  for (double q : c.gfd_orders) doc["gfd_orders"].push_back(order_to_json(q));
  doc["eth"] = {{"delta", c.eth_delta}, {"subset", c.eth_subset}};
  doc["ground_state"] = {{"t_min", c.ground_state.t_min},
                         {"t_max", c.ground_state.t_max},
                         {"points_per_decade", c.ground_state.points_per_decade},
                         {"refine_points", c.ground_state.refine_points}};
  doc["output_dir"] = c.output_dir.string();
  doc["cache"] = {{"policy", to_string(c.cache)}};
  if (c.cache_dir) doc["cache"]["dir"] = c.cache_dir->string();
  doc["workers"] = c.workers;
  return doc;
}

std::filesystem::path resolve_cache_dir(const RunConfig& config) {
  if (const char* env = std::getenv(kCacheEnvVar); env && *env) return env;
  if (config.cache_dir) return *config.cache_dir;
  return config.output_dir / "cache";
}

}  // namespace polariton
