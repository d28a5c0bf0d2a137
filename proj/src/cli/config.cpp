#include "hom/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace hom::cli {
namespace {

using nlohmann::json;

const KeySpec* find_key(std::string_view name) {
  for (const auto& k : config_keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

/// Checks keys and expands the `gamma` alias; an explicit gamma_ca/gamma_cb in
/// the same source wins over the alias.
json expand(const json& source, const char* origin) {
  if (source.is_null()) return json::object();
  if (!source.is_object()) throw ConfigError("", std::string(origin) + " must be a JSON object of key/value pairs");
  json out = json::object();
  for (const auto& [key, value] : source.items()) {
    if (!find_key(key)) throw ConfigError(key, "unknown key");
    if (key != "gamma") out[key] = value;
  }
  if (source.contains("gamma")) {
    if (!out.contains("gamma_ca")) out["gamma_ca"] = source["gamma"];
    if (!out.contains("gamma_cb")) out["gamma_cb"] = source["gamma"];
  }
  return out;
}

double get_double(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc[key];
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

std::uint64_t get_u64(const json& doc, const char* key, std::uint64_t fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc[key];
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw ConfigError(key, "must be >= 0");
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ConfigError(key, "expected a non-negative integer");
}

std::int64_t get_int(const json& doc, const char* key, std::int64_t fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc[key];
  if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& doc, const char* key, std::string fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc[key];
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

bool get_bool(const json& doc, const char* key, bool fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc[key];
  if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
  return v.get<bool>();
}

double parse_number(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(std::string(key), "'" + std::string(text) + "' is not a number");
  return v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::kEntangleSweep: return "entangle-sweep";
    case Command::kRedistribute: return "redistribute";
    case Command::kOracleCheck: return "oracle-check";
    case Command::kSpectrum: return "spectrum";
  }
  return "?";
}

Command parse_command(std::string_view name) {
  for (auto c : {Command::kEntangleSweep, Command::kRedistribute, Command::kOracleCheck, Command::kSpectrum}) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError("command", "unknown command '" + std::string(name) +
                                   "' (expected entangle-sweep, redistribute, oracle-check or spectrum)");
}

const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys = {
      {"g", KeyType::kDouble, "cavity coupling (default 1)"},
      {"omega", KeyType::kDouble, "drive coupling (default 1)"},
      {"delta", KeyType::kDouble, "detuning (default 20)"},
      {"kappa", KeyType::kDouble, "half cavity decay rate (default 10)"},
      {"gamma", KeyType::kDouble, "sets gamma_ca = gamma_cb"},
      {"gamma_ca", KeyType::kDouble, "spontaneous decay |c> -> |a> (default 0)"},
      {"gamma_cb", KeyType::kDouble, "spontaneous decay |c> -> |b> (default 0)"},
      {"eta", KeyType::kDouble, "detection efficiency in [0,1] (default 1)"},
      {"lambda", KeyType::kDouble, "beam-splitter ratio R/T (default 1)"},
      {"phi", KeyType::kDouble, "manipulation phase (default 0)"},
      {"dt", KeyType::kDouble, "fixed step (default 0.01)"},
      {"T", KeyType::kDouble, "first-photon window (default 100)"},
      {"T2", KeyType::kDouble, "second-photon window (default 100*T)"},
      {"n_max", KeyType::kSize, "cavity Fock truncation, 1 or 2 (default 1)"},
      {"hamiltonian", KeyType::kString, "auto | full | adiabatic (default auto)"},
      {"sampler", KeyType::kString, "fast | fixed (default fast)"},
      {"n_traj", KeyType::kSize, "trajectories per point"},
      {"seed", KeyType::kUInt64, "master seed (default 1)"},
      {"threads", KeyType::kInt, "worker threads, 0 = OpenMP default"},
      {"param", KeyType::kString, "swept parameter: eta | lambda | gamma"},
      {"grid", KeyType::kGrid, "comma-separated grid values"},
      {"out", KeyType::kString, "output path (default stdout)"},
      {"format", KeyType::kString, "csv | json (default csv)"},
      {"ww_gamma", KeyType::kDouble, "spectrum: decay rate (default 1)"},
      {"ww_omega", KeyType::kDouble, "spectrum: emitter frequency (default 0)"},
      {"ww_t", KeyType::kDouble, "spectrum: time (default 1000)"},
      {"nu_min", KeyType::kDouble, "spectrum: lowest frequency (default omega - 10 gamma)"},
      {"nu_max", KeyType::kDouble, "spectrum: highest frequency (default omega + 10 gamma)"},
      {"nu_points", KeyType::kSize, "spectrum: grid size (default 201)"},
      {"debug_corrupt_channels", KeyType::kBool, "oracle-check test hook: perturb the D1 channel"},
  };
  return keys;
}

std::size_t default_n_traj(Command command) {
  switch (command) {
    case Command::kEntangleSweep: return 100000;
    case Command::kRedistribute: return 10000;
    case Command::kOracleCheck: return 5000;
    case Command::kSpectrum: return 1;
  }
  return 1;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config", "malformed JSON in '" + path + "': " + e.what());
  }
}

json flag_value(std::string_view key, const std::string& text) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw ConfigError(std::string(key), "unknown key");
  const std::string k(key);
  switch (spec->type) {
    case KeyType::kDouble:
      return parse_number(key, text);
    case KeyType::kSize:
    case KeyType::kUInt64: {
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(k, "'" + text + "' is not a non-negative integer");
      }
      return v;
    }
    case KeyType::kInt: {
      std::int64_t v = 0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || ptr != text.data() + text.size()) throw ConfigError(k, "'" + text + "' is not an integer");
      return v;
    }
    case KeyType::kBool:
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw ConfigError(k, "expected true or false");
    case KeyType::kGrid: {
      json arr = json::array();
      std::string_view rest = text;
      while (true) {
        const auto comma = rest.find(',');
        const std::string item = trim(rest.substr(0, comma));
        if (item.empty()) throw ConfigError(k, "empty grid entry");
        arr.push_back(parse_number(key, item));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      return arr;
    }
    case KeyType::kString:
      return text;
  }
  return text;
}

RunConfig parse_config(Command command, const json& file, const json& flags) {
  json doc = expand(file, "config file");
  doc.update(expand(flags, "flags"));

  RunConfig cfg;
  cfg.command = command;
  auto& p = cfg.params;
  p.g = get_double(doc, "g", p.g);
  p.omega = get_double(doc, "omega", p.omega);
  p.delta = get_double(doc, "delta", p.delta);
  p.kappa = get_double(doc, "kappa", p.kappa);
  p.gamma_ca = get_double(doc, "gamma_ca", p.gamma_ca);
  p.gamma_cb = get_double(doc, "gamma_cb", p.gamma_cb);
  p.eta = get_double(doc, "eta", p.eta);
  p.lambda = get_double(doc, "lambda", p.lambda);
  p.phi = get_double(doc, "phi", p.phi);
  p.dt = get_double(doc, "dt", p.dt);
  p.t_wait = get_double(doc, "T", p.t_wait);
  p.t_wait2 = get_double(doc, "T2", 100.0 * p.t_wait);
  p.n_max = static_cast<std::size_t>(get_u64(doc, "n_max", p.n_max));

  const std::string ham = get_string(doc, "hamiltonian", "auto");
  if (ham == "auto") {
    p.hamiltonian = HamiltonianKind::kAuto;
  } else if (ham == "full") {
    p.hamiltonian = HamiltonianKind::kFull;
  } else if (ham == "adiabatic") {
    p.hamiltonian = HamiltonianKind::kAdiabatic;
  } else {
    throw ConfigError("hamiltonian", "expected auto, full or adiabatic; got '" + ham + "'");
  }

  try {
    p.validate();
  } catch (const ParameterError& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    throw ConfigError(colon == std::string::npos ? "" : msg.substr(0, colon),
                      colon == std::string::npos ? msg : msg.substr(colon + 2));
  }

  const std::string sampler = get_string(doc, "sampler", "fast");
  if (sampler == "fast") {
    cfg.sampler = Sampler::kWaitingTime;
  } else if (sampler == "fixed") {
    cfg.sampler = Sampler::kFixedStep;
  } else {
    throw ConfigError("sampler", "expected fast or fixed; got '" + sampler + "'");
  }

  cfg.n_traj = static_cast<std::size_t>(get_u64(doc, "n_traj", default_n_traj(command)));
  if (cfg.n_traj == 0) throw ConfigError("n_traj", "must be >= 1");
  cfg.seed = get_u64(doc, "seed", cfg.seed);
  const auto threads = get_int(doc, "threads", 0);
  if (threads < 0 || threads > 4096) throw ConfigError("threads", "must lie in [0, 4096]");
  cfg.threads = static_cast<int>(threads);
  if (doc.contains("out")) cfg.out = get_string(doc, "out", "");

  const std::string format = get_string(doc, "format", "csv");
  if (format == "csv") {
    cfg.format = Format::kCsv;
  } else if (format == "json") {
    cfg.format = Format::kJson;
  } else {
    throw ConfigError("format", "expected csv or json; got '" + format + "'");
  }

  if (command == Command::kRedistribute) {
    if (doc.contains("param") && get_string(doc, "param", "") != "phi") {
      throw ConfigError("param", "redistribute always scans phi");
    }
    cfg.param = SweptParam::kPhi;
  } else {
    const std::string name = get_string(doc, "param", "eta");
    if (name != "eta" && name != "lambda" && name != "gamma") {
      throw ConfigError("param", "expected eta, lambda or gamma; got '" + name + "'");
    }
    cfg.param = parse_swept_param(name);
  }

  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    if (!g.is_array() || g.empty()) throw ConfigError("grid", "expected a non-empty array of numbers");
    for (const auto& v : g) {
      if (!v.is_number()) throw ConfigError("grid", "expected a non-empty array of numbers");
      cfg.grid.push_back(v.get<double>());
    }
  } else {
    cfg.grid = default_grid(cfg.param);
  }
  for (double v : cfg.grid) {
    try {
      with_value(p, cfg.param, v);
    } catch (const ParameterError& e) {
      throw ConfigError("grid", e.what());
    }
  }

  auto& s = cfg.spectrum;
  s.gamma = get_double(doc, "ww_gamma", s.gamma);
  s.omega = get_double(doc, "ww_omega", s.omega);
  s.t = get_double(doc, "ww_t", s.t);
  s.nu_min = get_double(doc, "nu_min", s.omega - 10.0 * s.gamma);
  s.nu_max = get_double(doc, "nu_max", s.omega + 10.0 * s.gamma);
  s.nu_points = static_cast<std::size_t>(get_u64(doc, "nu_points", s.nu_points));
  if (!(s.gamma > 0)) throw ConfigError("ww_gamma", "must be > 0");
  if (!(s.t >= 0)) throw ConfigError("ww_t", "must be >= 0");
  if (!(s.nu_max > s.nu_min)) throw ConfigError("nu_max", "must exceed nu_min");
  if (s.nu_points < 2) throw ConfigError("nu_points", "must be >= 2");

  cfg.debug_corrupt_channels = get_bool(doc, "debug_corrupt_channels", false);
  return cfg;
}

}  // namespace hom::cli
