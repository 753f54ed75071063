#include "dfrc/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace dfrc {

namespace {

using Kind = ConfigError::Kind;

// Thrown by value parsers; rethrown as ConfigError with key and line attached.
struct BadValue {
  std::string detail;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s, bool allow_commas = true) {
  std::vector<std::string> out;
  std::string token;
  for (char ch : s) {
    if (ch == ' ' || ch == '\t' || (allow_commas && ch == ',')) {
      if (!token.empty()) out.push_back(std::move(token));
      token.clear();
    } else {
      token.push_back(ch);
    }
  }
  if (!token.empty()) out.push_back(std::move(token));
  return out;
}

double to_double(const std::string& s) {
  double value = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) throw BadValue{"expected a number, got '" + s + "'"};
  return value;
}

long long to_integer(const std::string& s) {
  long long value = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) throw BadValue{"expected an integer, got '" + s + "'"};
  return value;
}

int to_int_at_least(const std::string& s, int lo) {
  const long long v = to_integer(s);
  if (v < lo || v > 1'000'000) throw BadValue{"must be an integer >= " + std::to_string(lo)};
  return static_cast<int>(v);
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw BadValue{"expected true or false, got '" + s + "'"};
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double positive(double v, const char* what = "must be > 0") {
  if (!(v > 0.0) || !std::isfinite(v)) throw BadValue{what};
  return v;
}

double finite(double v) {
  if (!std::isfinite(v)) throw BadValue{"must be finite"};
  return v;
}

std::pair<int, int> to_grid(const std::string& token) {
  const auto x = token.find('x');
  if (x == std::string::npos) throw BadValue{"expected ROWSxCOLS, got '" + token + "'"};
  return {to_int_at_least(token.substr(0, x), 1), to_int_at_least(token.substr(x + 1), 1)};
}

Complex to_complex(const std::string& token) {
  if (token.size() < 5 || token.front() != '(' || token.back() != ')')
    throw BadValue{"expected (re,im), got '" + token + "'"};
  const auto comma = token.find(',');
  if (comma == std::string::npos) throw BadValue{"expected (re,im), got '" + token + "'"};
  return {to_double(token.substr(1, comma - 1)), to_double(token.substr(comma + 1, token.size() - comma - 2))};
}

template <typename T, typename F>
std::string join(const std::vector<T>& values, F&& format) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format(values[i]);
  }
  return out;
}

// One configuration key. Keys with `db` set also accept `<name>_db`, whose
// value is converted to linear before `set` sees it.
struct KeySpec {
  const char* name;
  bool db;
  std::function<void(ExperimentConfig&, const std::string&, std::optional<double>)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

// `set` receives the raw text plus, for dB-capable keys, the already-resolved
// linear value.
template <typename Apply>
KeySpec linear_key(const char* name, Apply apply, std::function<double(const ExperimentConfig&)> read) {
  return {name, true,
          [apply](ExperimentConfig& c, const std::string&, std::optional<double> v) { apply(c, *v); },
          [read](const ExperimentConfig& c) { return fmt_double(read(c)); }};
}

template <typename Apply>
KeySpec text_key(const char* name, Apply apply, std::function<std::string(const ExperimentConfig&)> read) {
  return {name, false,
          [apply](ExperimentConfig& c, const std::string& s, std::optional<double>) { apply(c, s); },
          std::move(read)};
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      text_key("num_radar_antennas",
               [](ExperimentConfig& c, const std::string& s) { c.run.geometry.num_radar_antennas = to_int_at_least(s, 1); },
               [](const ExperimentConfig& c) { return std::to_string(c.run.geometry.num_radar_antennas); }),
      text_key("irs_rows", [](ExperimentConfig& c, const std::string& s) { c.run.geometry.irs_rows = to_int_at_least(s, 1); },
               [](const ExperimentConfig& c) { return std::to_string(c.run.geometry.irs_rows); }),
      text_key("irs_cols", [](ExperimentConfig& c, const std::string& s) { c.run.geometry.irs_cols = to_int_at_least(s, 1); },
               [](const ExperimentConfig& c) { return std::to_string(c.run.geometry.irs_cols); }),
      text_key("radar_spacing",
               [](ExperimentConfig& c, const std::string& s) { c.run.geometry.radar_spacing = positive(to_double(s)); },
               [](const ExperimentConfig& c) { return fmt_double(c.run.geometry.radar_spacing); }),
      text_key("irs_spacing",
               [](ExperimentConfig& c, const std::string& s) { c.run.geometry.irs_spacing = positive(to_double(s)); },
               [](const ExperimentConfig& c) { return fmt_double(c.run.geometry.irs_spacing); }),
      text_key("target_azimuth",
               [](ExperimentConfig& c, const std::string& s) { c.run.geometry.target_azimuth = finite(to_double(s)); },
               [](const ExperimentConfig& c) { return fmt_double(c.run.geometry.target_azimuth); }),
      text_key("target_elevation",
               [](ExperimentConfig& c, const std::string& s) { c.run.geometry.target_elevation = finite(to_double(s)); },
               [](const ExperimentConfig& c) { return fmt_double(c.run.geometry.target_elevation); }),
      text_key("los_radar_angle",
               [](ExperimentConfig& c, const std::string& s) { c.run.channel.los_radar_angle = finite(to_double(s)); },
               [](const ExperimentConfig& c) { return fmt_double(c.run.channel.los_radar_angle); }),
      text_key("los_irs_azimuth",
               [](ExperimentConfig& c, const std::string& s) { c.run.channel.los_irs_azimuth = finite(to_double(s)); },
               [](const ExperimentConfig& c) { return fmt_double(c.run.channel.los_irs_azimuth); }),
      text_key("los_irs_elevation",
               [](ExperimentConfig& c, const std::string& s) { c.run.channel.los_irs_elevation = finite(to_double(s)); },
               [](const ExperimentConfig& c) { return fmt_double(c.run.channel.los_irs_elevation); }),
      text_key("num_users", [](ExperimentConfig& c, const std::string& s) { c.run.channel.num_users = to_int_at_least(s, 1); },
               [](const ExperimentConfig& c) { return std::to_string(c.run.channel.num_users); }),
      linear_key("rician_factor",
                 [](ExperimentConfig& c, double v) {
                   if (std::isnan(v) || v < 0.0) throw BadValue{"must be >= 0"};
                   c.run.channel.rician_factor = v;
                 },
                 [](const ExperimentConfig& c) { return c.run.channel.rician_factor; }),
      text_key("eta_real",
               [](ExperimentConfig& c, const std::string& s) { c.run.channel.eta.real(finite(to_double(s))); },
               [](const ExperimentConfig& c) { return fmt_double(c.run.channel.eta.real()); }),
      text_key("eta_imag",
               [](ExperimentConfig& c, const std::string& s) { c.run.channel.eta.imag(finite(to_double(s))); },
               [](const ExperimentConfig& c) { return fmt_double(c.run.channel.eta.imag()); }),
      linear_key("gain_g", [](ExperimentConfig& c, double v) { c.run.channel.gain_g = positive(v); },
                 [](const ExperimentConfig& c) { return c.run.channel.gain_g; }),
      linear_key("gain_f",
                 [](ExperimentConfig& c, double v) {
                   if (!(v >= 0.0) || !std::isfinite(v)) throw BadValue{"must be >= 0"};
                   c.run.channel.gain_f = v;
                 },
                 [](const ExperimentConfig& c) { return c.run.channel.gain_f; }),
      linear_key("gain_h",
                 [](ExperimentConfig& c, double v) {
                   if (!(v >= 0.0) || !std::isfinite(v)) throw BadValue{"must be >= 0"};
                   c.run.channel.gain_h = v;
                 },
                 [](const ExperimentConfig& c) { return c.run.channel.gain_h; }),
      text_key("alpha",
               [](ExperimentConfig& c, const std::string& s) {
                 const double a = to_double(s);
                 if (!(a >= 0.0 && a <= 1.0)) throw BadValue{"must lie in [0, 1], got " + s};
                 c.run.weights.alpha = a;
               },
               [](const ExperimentConfig& c) { return fmt_double(c.run.weights.alpha); }),
      linear_key("noise_radar", [](ExperimentConfig& c, double v) { c.run.weights.noise_radar = positive(v); },
                 [](const ExperimentConfig& c) { return c.run.weights.noise_radar; }),
      linear_key("noise_comm", [](ExperimentConfig& c, double v) { c.run.weights.noise_comm = positive(v); },
                 [](const ExperimentConfig& c) { return c.run.weights.noise_comm; }),
      linear_key("transmit_power", [](ExperimentConfig& c, double v) { c.run.transmit_power = positive(v); },
                 [](const ExperimentConfig& c) { return c.run.transmit_power; }),
      linear_key("beampattern_threshold",
                 [](ExperimentConfig& c, double v) {
                   if (!(v >= 0.0) || !std::isfinite(v)) throw BadValue{"must be >= 0"};
                   c.run.beampattern_threshold = v;
                 },
                 [](const ExperimentConfig& c) { return c.run.beampattern_threshold; }),
      text_key("desired_covariance",
               [](ExperimentConfig& c, const std::string& s) {
                 if (s == "omni") {
                   c.run.desired_covariance.reset();
                   return;
                 }
                 const auto tokens = split_list(s, false);
                 const auto m = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(tokens.size()))));
                 if (m < 1 || static_cast<std::size_t>(m * m) != tokens.size())
                   throw BadValue{"expected 'omni' or M*M entries (re,im) in row-major order"};
                 CMatrix rd(m, m);
                 for (Eigen::Index i = 0; i < m; ++i)
                   for (Eigen::Index j = 0; j < m; ++j) rd(i, j) = to_complex(tokens[static_cast<std::size_t>(i * m + j)]);
                 if ((rd - rd.adjoint()).norm() > 1e-12 * std::max(1.0, rd.norm()))
                   throw BadValue{"matrix must be Hermitian"};
                 c.run.desired_covariance = rd;
               },
               [](const ExperimentConfig& c) {
                 if (!c.run.desired_covariance) return std::string("omni");
                 const CMatrix& rd = *c.run.desired_covariance;
                 std::string out;
                 for (Eigen::Index i = 0; i < rd.rows(); ++i)
                   for (Eigen::Index j = 0; j < rd.cols(); ++j) {
                     if (!out.empty()) out += ' ';
                     out += "(" + fmt_double(rd(i, j).real()) + "," + fmt_double(rd(i, j).imag()) + ")";
                   }
                 return out;
               }),
      linear_key("epsilon", [](ExperimentConfig& c, double v) { c.run.epsilon = positive(v); },
                 [](const ExperimentConfig& c) { return c.run.epsilon; }),
      text_key("max_iterations", [](ExperimentConfig& c, const std::string& s) { c.run.max_iterations = to_int_at_least(s, 1); },
               [](const ExperimentConfig& c) { return std::to_string(c.run.max_iterations); }),
      text_key("step_size", [](ExperimentConfig& c, const std::string& s) { c.run.ascent.step = positive(to_double(s)); },
               [](const ExperimentConfig& c) { return fmt_double(c.run.ascent.step); }),
      text_key("inner_steps",
               [](ExperimentConfig& c, const std::string& s) { c.run.ascent.max_inner_steps = to_int_at_least(s, 1); },
               [](const ExperimentConfig& c) { return std::to_string(c.run.ascent.max_inner_steps); }),
      text_key("backtracking", [](ExperimentConfig& c, const std::string& s) { c.run.ascent.backtracking = to_bool(s); },
               [](const ExperimentConfig& c) { return std::string(c.run.ascent.backtracking ? "true" : "false"); }),
      text_key("min_displacement", [](ExperimentConfig& c, const std::string& s) { c.run.ascent.min_displacement = positive(to_double(s)); },
               [](const ExperimentConfig& c) { return fmt_double(c.run.ascent.min_displacement); }),
      text_key("theta_init",
               [](ExperimentConfig& c, const std::string& s) {
                 if (s == "all_ones") c.run.theta_init = ThetaInit::AllOnes;
                 else if (s == "random_phases") c.run.theta_init = ThetaInit::RandomPhases;
                 else throw BadValue{"expected all_ones or random_phases, got '" + s + "'"};
               },
               [](const ExperimentConfig& c) {
                 return std::string(c.run.theta_init == ThetaInit::AllOnes ? "all_ones" : "random_phases");
               }),
      text_key("seed",
               [](ExperimentConfig& c, const std::string& s) {
                 std::uint64_t value = 0;
                 const auto* end = s.data() + s.size();
                 const auto [ptr, ec] = std::from_chars(s.data(), end, value);
                 if (ec != std::errc() || ptr != end) throw BadValue{"expected an unsigned 64-bit integer"};
                 c.run.seed = value;
               },
               [](const ExperimentConfig& c) { return std::to_string(c.run.seed); }),
      text_key("realizations", [](ExperimentConfig& c, const std::string& s) { c.realizations = to_int_at_least(s, 1); },
               [](const ExperimentConfig& c) { return std::to_string(c.realizations); }),
      text_key("alpha_list",
               [](ExperimentConfig& c, const std::string& s) {
                 std::vector<double> values;
                 for (const auto& t : split_list(s)) {
                   const double a = to_double(t);
                   if (!(a >= 0.0 && a <= 1.0)) throw BadValue{"every entry must lie in [0, 1]"};
                   values.push_back(a);
                 }
                 c.alphas = std::move(values);
               },
               [](const ExperimentConfig& c) { return join(c.alphas, fmt_double); }),
      text_key("sweep_transmit_power",
               [](ExperimentConfig& c, const std::string& s) {
                 std::vector<double> values;
                 for (const auto& t : split_list(s)) values.push_back(positive(to_double(t)));
                 c.sweep_powers = std::move(values);
               },
               [](const ExperimentConfig& c) { return join(c.sweep_powers, fmt_double); }),
      text_key("sweep_radar_antennas",
               [](ExperimentConfig& c, const std::string& s) {
                 std::vector<int> values;
                 for (const auto& t : split_list(s)) values.push_back(to_int_at_least(t, 1));
                 c.sweep_radar_antennas = std::move(values);
               },
               [](const ExperimentConfig& c) { return join(c.sweep_radar_antennas, [](int v) { return std::to_string(v); }); }),
      text_key("sweep_irs",
               [](ExperimentConfig& c, const std::string& s) {
                 std::vector<std::pair<int, int>> values;
                 for (const auto& t : split_list(s)) values.push_back(to_grid(t));
                 c.sweep_irs = std::move(values);
               },
               [](const ExperimentConfig& c) {
                 return join(c.sweep_irs, [](const std::pair<int, int>& g) {
                   return std::to_string(g.first) + "x" + std::to_string(g.second);
                 });
               }),
  };
  return table;
}

struct Entry {
  std::string value;
  int line = 0;
};

void parse_line(const std::string& raw, int line, std::map<std::string, Entry>& entries, bool allow_replace) {
  std::string text = raw;
  if (const auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
  text = trim(text);
  if (text.empty()) return;
  const auto eq = text.find('=');
  if (eq == std::string::npos)
    throw ConfigError(Kind::Syntax, "", line, "expected 'key = value', got '" + text + "'");
  const std::string key = trim(text.substr(0, eq));
  const std::string value = trim(text.substr(eq + 1));
  if (key.empty()) throw ConfigError(Kind::Syntax, "", line, "missing key before '='");
  if (!allow_replace && entries.count(key))
    throw ConfigError(Kind::BadValue, key, line,
                      "duplicate key (first set on line " + std::to_string(entries[key].line) + ")");
  entries[key] = {value, line};
}

}  // namespace

ConfigError::ConfigError(Kind kind, std::string key, int line, const std::string& detail)
    : Error(std::string(kind_name(kind)) + (key.empty() ? "" : ": key '" + key + "'") +
            (line > 0 ? " (line " + std::to_string(line) + ")" : (key.empty() ? "" : " (override)")) + ": " +
            detail),
      kind_(kind),
      key_(std::move(key)),
      line_(line) {}

const char* ConfigError::kind_name(Kind kind) {
  switch (kind) {
    case Kind::MissingKey: return "MissingKey";
    case Kind::UnknownKey: return "UnknownKey";
    case Kind::BadValue: return "BadValue";
    case Kind::Syntax: return "Syntax";
    case Kind::Io: return "Io";
  }
  return "ConfigError";
}

bool ExperimentConfig::operator==(const ExperimentConfig& other) const {
  return config_entries(*this) == config_entries(other);
}

ExperimentConfig preset(const std::string& name) {
  if (name != "table1") throw ConfigError(Kind::BadValue, "preset", 0, "unknown preset '" + name + "' (known: table1)");
  ExperimentConfig c;
  RunConfig& r = c.run;
  r.geometry.num_radar_antennas = 8;
  r.geometry.irs_rows = 8;
  r.geometry.irs_cols = 8;
  r.geometry.radar_spacing = 0.5;
  r.geometry.irs_spacing = 0.5;
  r.geometry.target_azimuth = kPi / 6.0;
  r.geometry.target_elevation = kPi / 4.0;
  r.channel.num_users = 5;
  r.channel.rician_factor = db_to_linear(0.0);
  r.channel.eta = {1.0, 0.0};
  r.weights.alpha = 0.5;
  r.weights.noise_radar = db_to_linear(0.0);
  r.weights.noise_comm = db_to_linear(0.0);
  r.transmit_power = db_to_linear(30.0);
  r.beampattern_threshold = db_to_linear(10.0);
  r.epsilon = db_to_linear(-30.0);
  r.max_iterations = 500;
  r.ascent.step = 0.1;
  r.ascent.max_inner_steps = 1;
  r.ascent.backtracking = true;
  r.ascent.min_displacement = 1e-10;
  r.theta_init = ThetaInit::AllOnes;
  r.seed = 1;
  c.realizations = 20;
  c.alphas = {0.1, 0.5, 0.9};
  c.sweep_powers = {db_to_linear(0.0), db_to_linear(10.0), db_to_linear(20.0), db_to_linear(30.0)};
  c.sweep_radar_antennas = {4, 8};
  c.sweep_irs = {{4, 4}, {6, 6}, {8, 8}};
  return c;
}

ExperimentConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
  std::map<std::string, Entry> entries;
  {
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) parse_line(line, ++number, entries, false);
  }
  for (const auto& o : overrides) {
    if (o.find('=') == std::string::npos)
      throw ConfigError(Kind::Syntax, "", 0, "override must be key=value, got '" + o + "'");
    parse_line(o, 0, entries, true);
  }

  const auto& table = key_table();
  for (const auto& [key, entry] : entries) {
    if (key == "preset") continue;
    bool known = false;
    for (const auto& spec : table)
      known = known || key == spec.name || (spec.db && key == std::string(spec.name) + "_db");
    if (!known) throw ConfigError(Kind::UnknownKey, key, entry.line, "not a recognized configuration key");
  }

  ExperimentConfig cfg;
  const bool from_preset = entries.count("preset") > 0;
  if (from_preset) {
    try {
      cfg = preset(entries["preset"].value);
    } catch (const ConfigError& e) {
      throw ConfigError(Kind::BadValue, "preset", entries["preset"].line, "unknown preset '" + entries["preset"].value + "'");
    }
  }

  for (const auto& spec : table) {
    const std::string name = spec.name;
    const auto linear_it = entries.find(name);
    const auto db_it = spec.db ? entries.find(name + "_db") : entries.end();
    const bool has_linear = linear_it != entries.end();
    const bool has_db = db_it != entries.end();
    if (!has_linear && !has_db) {
      if (!from_preset)
        throw ConfigError(Kind::MissingKey, name, 0,
                          spec.db ? "required (as '" + name + "' or '" + name + "_db')" : "required");
      continue;
    }
    const Entry& used = has_db ? db_it->second : linear_it->second;
    const std::string used_key = has_db ? name + "_db" : name;
    try {
      std::optional<double> linear;
      if (spec.db) {
        if (has_db) {
          linear = db_to_linear(finite(to_double(db_it->second.value)));
          if (has_linear) {
            const double direct = to_double(linear_it->second.value);
            if (std::abs(direct - *linear) > 1e-9 * std::max(std::abs(direct), std::abs(*linear)))
              throw BadValue{"conflicts with '" + name + "' = " + linear_it->second.value};
          }
        } else {
          linear = to_double(linear_it->second.value);
        }
      }
      spec.set(cfg, used.value, linear);
    } catch (const BadValue& bad) {
      throw ConfigError(Kind::BadValue, used_key, used.line, bad.detail);
    }
  }

  if (cfg.run.desired_covariance) {
    const auto it = entries.find("desired_covariance");
    const int line = it == entries.end() ? 0 : it->second.line;
    const CMatrix& rd = *cfg.run.desired_covariance;
    if (rd.rows() != cfg.run.geometry.num_radar_antennas)
      throw ConfigError(Kind::BadValue, "desired_covariance", line, "size must equal num_radar_antennas");
    try {
      check_beampattern(cfg.run.beampattern(), cfg.run.transmit_power);
    } catch (const InfeasibleSpec& e) {
      throw ConfigError(Kind::BadValue, "desired_covariance", line, e.what());
    }
  }
  if (cfg.run.weights.alpha < 1.0 && cfg.run.channel.eta == Complex(0.0, 0.0)) {
    const auto it = entries.find("eta_real");
    throw ConfigError(Kind::BadValue, "eta_real", it == entries.end() ? 0 : it->second.line,
                      "eta must be nonzero unless alpha = 1");
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(Kind::Io, "", 0, "cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), overrides);
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& spec : key_table()) out.emplace_back(spec.name, spec.get(cfg));
  return out;
}

std::string print_config(const ExperimentConfig& cfg) {
  std::string out = "# dfrc configuration (all powers and ratios linear)\n";
  for (const auto& [key, value] : config_entries(cfg)) out += key + " = " + value + "\n";
  return out;
}

}  // namespace dfrc
