#include "nlslab/runstore.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nlslab {

const char* const kCodeVersion = "nlslab 0.1.0";

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& why,
                            const std::string& got) {
  throw ConfigError("invalid value for " + key + ": " + why + " (got \"" +
                    got + "\")");
}

double parse_real(const std::string& key, const std::string& v) {
  const char* s = v.c_str();
  char* end = nullptr;
  const double x = std::strtod(s, &end);
  if (end == s || *end != '\0') bad_value(key, "expected a real number", v);
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  const char* s = v.c_str();
  char* end = nullptr;
  const long x = std::strtol(s, &end, 10);
  if (end == s || *end != '\0') bad_value(key, "expected an integer", v);
  return static_cast<int>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  bad_value(key, "expected true or false", v);
}

std::vector<double> parse_real_list(const std::string& key,
                                    const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const size_t a = item.find_first_not_of(" \t");
    const size_t b = item.find_last_not_of(" \t");
    if (a == std::string::npos) bad_value(key, "empty list entry", v);
    out.push_back(parse_real(key, item.substr(a, b - a + 1)));
  }
  if (out.empty()) bad_value(key, "expected a comma-separated list", v);
  return out;
}

void expect_enum(const std::string& key, const std::string& v,
                 const std::set<std::string>& allowed) {
  if (allowed.count(v)) return;
  std::string opts;
  for (const auto& a : allowed) opts += (opts.empty() ? "" : " | ") + a;
  bad_value(key, "must be one of {" + opts + "}", v);
}

// Experiment parameter schema: key -> (type tag, default). Types:
// r real, p positive real, n nonneg real, i positive int, b bool,
// e enum (validated ad hoc below), l real list, s free string.
struct ParamSpec {
  char type;
  const char* def;
};
using ParamTable = std::map<std::string, ParamSpec>;

const std::map<std::string, ParamTable>& experiment_tables() {
  static const std::map<std::string, ParamTable> tables = {
      {"scatter",
       {{"scatter.n_probe", {'i', "64"}},
        {"scatter.second_potential", {'e', "none"}}}},
      {"dft-check", {{"dft.negative_time", {'b', "true"}}}},
      {"solve",
       {{"solve.order_check", {'b', "false"}},
        {"solve.order_t_end", {'p', "4.8"}},
        {"solve.snapshots", {'l', "1,2,5,10,20,50,100,200"}},
        {"solve.profile_norms", {'b', "false"}},
        {"solve.band", {'n', "0"}}}},
      {"decay-fit",
       {{"decay.norm", {'e', "sup"}},
        {"decay.beta", {'n', "0"}},
        {"decay.component", {'e', "0"}},
        {"decay.t_min", {'p', "20"}},
        {"decay.t_max", {'p', "200"}},
        {"decay.n_times", {'i', "25"}},
        {"decay.max_slope", {'s', "none"}},
        {"decay.symbol", {'e', "required"}},
        {"decay.refinements", {'i', "3"}}}},
      {"measure-check",
       {{"measure.t", {'p', "3"}}, {"measure.refine", {'b', "true"}}}},
      {"asymptotics",
       {{"asym.mode", {'e', "modified"}},
        {"asym.alpha", {'p', "0.05"}},
        {"asym.compare_t", {'n', "0"}},
        {"asym.sp_times", {'l', "100,200,400"}},
        {"asym.sp_K", {'p', "1"}}}},
      {"delta-limit",
       {{"delta.q", {'p', "2"}},
        {"delta.eps", {'l', "0.4,0.2,0.1,0.05"}},
        {"delta.k_lo", {'p', "0.5"}},
        {"delta.k_hi", {'p', "4"}},
        {"delta.n_samples", {'i', "64"}}}},
  };
  return tables;
}

void validate_param(const std::string& key, char type,
                    const std::string& val) {
  switch (type) {
    case 'r':
      parse_real(key, val);
      break;
    case 'p':
      if (!(parse_real(key, val) > 0.0)) bad_value(key, "must be > 0", val);
      break;
    case 'n':
      if (parse_real(key, val) < 0.0) bad_value(key, "must be >= 0", val);
      break;
    case 'i':
      if (parse_int(key, val) <= 0) bad_value(key, "must be > 0", val);
      break;
    case 'b':
      parse_bool(key, val);
      break;
    case 'l':
      parse_real_list(key, val);
      break;
    case 's':
      break;
    case 'e':
      if (key == "scatter.second_potential") {
        expect_enum(key, val, {"none", "gaussian", "barrier"});
      } else if (key == "decay.norm") {
        expect_enum(key, val,
                    {"sup", "weighted_sup", "weighted_dx_L2", "hk1_profile",
                     "smoothing", "pdo"});
      } else if (key == "decay.component") {
        expect_enum(key, val, {"0", "S", "R"});
      } else if (key == "decay.symbol") {
        expect_enum(key, val,
                    {"m_minus_1", "dx_m", "dk_m", "dkdx_m", "required"});
      } else if (key == "asym.mode") {
        expect_enum(key, val, {"modified", "stationary"});
      }
      break;
    default:
      break;
  }
}

const std::set<std::string>& core_keys() {
  static const std::set<std::string> keys = {
      "potential.kind",      "potential.height",
      "potential.half_width", "potential.amplitude",
      "potential.sigma",     "potential.cutoff",
      "potential.file",      "grid.x_half_width",
      "grid.n_x",            "grid.k_half_width",
      "grid.n_k",            "evolve.t_end",
      "evolve.dt",           "evolve.sign",
      "evolve.eta",          "evolve.data_shape",
      "evolve.a_coeff_file", "experiment",
  };
  return keys;
}

std::map<std::string, std::string> tokenize(const std::string& text) {
  std::map<std::string, std::string> raw;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    auto trim = [](std::string s) {
      const size_t i = s.find_first_not_of(" \t\r");
      if (i == std::string::npos) return std::string();
      const size_t j = s.find_last_not_of(" \t\r");
      return s.substr(i, j - i + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    }
    if (raw.count(key)) throw ConfigError("duplicate config key: " + key);
    raw[key] = val;
  }
  return raw;
}

}  // namespace

RunConfig parse_config(const std::string& text,
                       const std::string& experiment_override) {
  std::map<std::string, std::string> raw = tokenize(text);

  RunConfig c;
  if (!experiment_override.empty()) {
    c.experiment = experiment_override;
    raw.erase("experiment");
  } else if (raw.count("experiment")) {
    c.experiment = raw["experiment"];
  }
  expect_enum("experiment", c.experiment,
              {"scatter", "dft-check", "solve", "decay-fit", "measure-check",
               "asymptotics", "delta-limit"});
  const ParamTable& table = experiment_tables().at(c.experiment);

  // Unknown keys: everything outside the core set and the selected
  // experiment's table.
  std::vector<std::string> unknown;
  for (const auto& [key, val] : raw) {
    if (key == "experiment") continue;
    if (!core_keys().count(key) && !table.count(key)) unknown.push_back(key);
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError("unknown config keys: " + list);
  }

  auto take = [&](const char* key) -> const std::string* {
    auto it = raw.find(key);
    return it == raw.end() ? nullptr : &it->second;
  };

  // potential.*
  if (const auto* v = take("potential.kind")) {
    expect_enum("potential.kind", *v, {"zero", "barrier", "gaussian",
                                       "sample"});
    c.potential_kind = *v;
  }
  if (const auto* v = take("potential.height")) {
    c.potential_height = parse_real("potential.height", *v);
    if (c.potential_height < 0.0)
      bad_value("potential.height", "must be >= 0 (no bound states)", *v);
  }
  if (const auto* v = take("potential.half_width")) {
    c.potential_half_width = parse_real("potential.half_width", *v);
    if (!(c.potential_half_width > 0.0))
      bad_value("potential.half_width", "must be > 0", *v);
  }
  if (const auto* v = take("potential.amplitude")) {
    c.potential_amplitude = parse_real("potential.amplitude", *v);
    if (c.potential_amplitude < 0.0)
      bad_value("potential.amplitude", "must be >= 0 (no bound states)", *v);
  }
  if (const auto* v = take("potential.sigma")) {
    c.potential_sigma = parse_real("potential.sigma", *v);
    if (!(c.potential_sigma > 0.0))
      bad_value("potential.sigma", "must be > 0", *v);
  }
  if (const auto* v = take("potential.cutoff")) {
    c.potential_cutoff = parse_real("potential.cutoff", *v);
    if (c.potential_cutoff < 0.0)
      bad_value("potential.cutoff", "must be >= 0", *v);
  }
  if (const auto* v = take("potential.file")) c.potential_file = *v;
  if (c.potential_kind == "sample" && c.potential_file.empty()) {
    throw ConfigError(
        "invalid value for potential.file: required when potential.kind = "
        "sample (got \"\")");
  }

  // grid.*
  if (const auto* v = take("grid.x_half_width")) {
    c.grid_x_half_width = parse_real("grid.x_half_width", *v);
    if (!(c.grid_x_half_width > 0.0))
      bad_value("grid.x_half_width", "must be > 0", *v);
  }
  if (const auto* v = take("grid.n_x")) {
    c.grid_n_x = parse_int("grid.n_x", *v);
    if (c.grid_n_x < 8 || c.grid_n_x % 2 != 0)
      bad_value("grid.n_x", "must be an even integer >= 8", *v);
  }
  if (const auto* v = take("grid.k_half_width")) {
    c.grid_k_half_width = parse_real("grid.k_half_width", *v);
    if (c.grid_k_half_width < 0.0)
      bad_value("grid.k_half_width", "must be >= 0 (0 = matched lattice)",
                *v);
  }
  if (c.grid_k_half_width == 0.0) {
    if (const auto* v = take("grid.n_k")) {
      c.grid_n_k = parse_int("grid.n_k", *v);
      if (c.grid_n_k != c.grid_n_x)
        bad_value("grid.n_k", "matched lattice requires grid.n_k = grid.n_x",
                  *v);
    } else {
      c.grid_n_k = c.grid_n_x;
    }
  } else {
    const Grid banded =
        banded_grid(c.grid_x_half_width, c.grid_n_x, c.grid_k_half_width);
    if (const auto* v = take("grid.n_k")) {
      c.grid_n_k = parse_int("grid.n_k", *v);
      if (c.grid_n_k != banded.n_k)
        bad_value("grid.n_k",
                  "banded lattice derives grid.n_k = " +
                      std::to_string(banded.n_k),
                  *v);
    } else {
      c.grid_n_k = banded.n_k;
    }
  }

  // evolve.*
  if (const auto* v = take("evolve.t_end")) {
    c.evolve_t_end = parse_real("evolve.t_end", *v);
    if (!(c.evolve_t_end > 0.0)) bad_value("evolve.t_end", "must be > 0", *v);
  }
  if (const auto* v = take("evolve.dt")) {
    c.evolve_dt = parse_real("evolve.dt", *v);
    if (!(c.evolve_dt > 0.0)) bad_value("evolve.dt", "must be > 0", *v);
  }
  if (c.evolve_dt > c.evolve_t_end) {
    throw ConfigError(
        "invalid value for evolve.dt: must be <= evolve.t_end (got \"" +
        format_real(c.evolve_dt) + "\")");
  }
  if (const auto* v = take("evolve.sign")) {
    expect_enum("evolve.sign", *v, {"defocusing", "focusing"});
    c.evolve_sign = *v;
  }
  if (const auto* v = take("evolve.eta")) {
    c.evolve_eta = parse_real("evolve.eta", *v);
    if (!(c.evolve_eta > 0.0)) bad_value("evolve.eta", "must be > 0", *v);
  }
  if (const auto* v = take("evolve.data_shape")) {
    expect_enum("evolve.data_shape", *v, {"gaussian", "odd_gaussian"});
    c.evolve_data_shape = *v;
  }
  if (const auto* v = take("evolve.a_coeff_file")) c.evolve_a_coeff_file = *v;

  // Experiment parameters: defaults filled, overrides validated.
  for (const auto& [key, spec] : table) {
    c.params[key] = spec.def;
  }
  for (const auto& [key, spec] : table) {
    auto it = raw.find(key);
    if (it == raw.end()) continue;
    validate_param(key, spec.type, it->second);
    c.params[key] = it->second;
  }
  if (c.experiment == "decay-fit") {
    const std::string& ms = c.params.at("decay.max_slope");
    if (ms != "none") parse_real("decay.max_slope", ms);
    if (param_real(c, "decay.t_max") <= param_real(c, "decay.t_min")) {
      bad_value("decay.t_max", "must be > decay.t_min",
                c.params.at("decay.t_max"));
    }
    if (param_int(c, "decay.n_times") < 2)
      bad_value("decay.n_times", "must be >= 2",
                c.params.at("decay.n_times"));
    if (param_int(c, "decay.refinements") > 4)
      bad_value("decay.refinements", "must be <= 4 (memory)",
                c.params.at("decay.refinements"));
  }
  if (c.experiment == "delta-limit") {
    const auto eps = param_real_list(c, "delta.eps");
    for (size_t i = 0; i + 1 < eps.size(); ++i) {
      if (!(eps[i] > eps[i + 1]))
        bad_value("delta.eps", "must be strictly decreasing",
                  c.params.at("delta.eps"));
    }
    if (!(eps.back() > 0.0))
      bad_value("delta.eps", "entries must be > 0", c.params.at("delta.eps"));
    if (param_real(c, "delta.k_hi") <= param_real(c, "delta.k_lo"))
      bad_value("delta.k_hi", "must be > delta.k_lo",
                c.params.at("delta.k_hi"));
  }
  if (c.experiment == "asymptotics") {
    if (param_real(c, "asym.alpha") > 0.2)
      bad_value("asym.alpha", "must be <= 0.2", c.params.at("asym.alpha"));
  }
  return c;
}

RunConfig load_config(const std::string& path,
                      const std::string& experiment_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), experiment_override);
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "experiment = " << c.experiment << "\n";
  out << "potential.kind = " << c.potential_kind << "\n";
  out << "potential.height = " << format_real(c.potential_height) << "\n";
  out << "potential.half_width = " << format_real(c.potential_half_width)
      << "\n";
  out << "potential.amplitude = " << format_real(c.potential_amplitude)
      << "\n";
  out << "potential.sigma = " << format_real(c.potential_sigma) << "\n";
  out << "potential.cutoff = " << format_real(c.potential_cutoff) << "\n";
  if (!c.potential_file.empty())
    out << "potential.file = " << c.potential_file << "\n";
  out << "grid.x_half_width = " << format_real(c.grid_x_half_width) << "\n";
  out << "grid.n_x = " << c.grid_n_x << "\n";
  out << "grid.k_half_width = " << format_real(c.grid_k_half_width) << "\n";
  out << "grid.n_k = " << c.grid_n_k << "\n";
  out << "evolve.t_end = " << format_real(c.evolve_t_end) << "\n";
  out << "evolve.dt = " << format_real(c.evolve_dt) << "\n";
  out << "evolve.sign = " << c.evolve_sign << "\n";
  out << "evolve.eta = " << format_real(c.evolve_eta) << "\n";
  out << "evolve.data_shape = " << c.evolve_data_shape << "\n";
  if (!c.evolve_a_coeff_file.empty())
    out << "evolve.a_coeff_file = " << c.evolve_a_coeff_file << "\n";
  for (const auto& [key, val] : c.params) {
    out << key << " = " << val << "\n";
  }
  return out.str();
}

Grid config_grid(const RunConfig& c) {
  if (c.grid_k_half_width == 0.0) {
    return matched_grid(c.grid_x_half_width, c.grid_n_x);
  }
  return banded_grid(c.grid_x_half_width, c.grid_n_x, c.grid_k_half_width);
}

Potential config_potential(const RunConfig& c, const Grid& grid) {
  if (c.potential_kind == "zero") return make_zero(grid);
  if (c.potential_kind == "barrier") {
    return make_barrier(c.potential_height, c.potential_half_width, grid);
  }
  if (c.potential_kind == "gaussian") {
    return make_gaussian(c.potential_amplitude, c.potential_sigma, grid,
                         c.potential_cutoff);
  }
  return load_potential_csv(c.potential_file);
}

CVec config_data(const RunConfig& c, const Grid& grid) {
  if (c.evolve_data_shape == "odd_gaussian") {
    return odd_gaussian_data(grid, c.evolve_eta);
  }
  return gaussian_data(grid, c.evolve_eta);
}

Sign config_sign(const RunConfig& c) {
  return c.evolve_sign == "focusing" ? Sign::focusing : Sign::defocusing;
}

namespace {
const std::string& require_param(const RunConfig& c, const std::string& key) {
  auto it = c.params.find(key);
  if (it == c.params.end()) {
    throw ConfigError("missing experiment parameter: " + key);
  }
  return it->second;
}
}  // namespace

double param_real(const RunConfig& c, const std::string& key) {
  return parse_real(key, require_param(c, key));
}
int param_int(const RunConfig& c, const std::string& key) {
  return parse_int(key, require_param(c, key));
}
bool param_bool(const RunConfig& c, const std::string& key) {
  return parse_bool(key, require_param(c, key));
}
std::vector<double> param_real_list(const RunConfig& c,
                                    const std::string& key) {
  return parse_real_list(key, require_param(c, key));
}
const std::string& param_str(const RunConfig& c, const std::string& key) {
  return require_param(c, key);
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::json j;
  j["code_version"] = m.code_version;
  j["config"] = m.config_echo;
  j["wall_seconds"] = m.wall_seconds;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& e : m.outputs) {
    outs.push_back({{"name", e.name},
                    {"bytes", e.bytes},
                    {"fnv1a", e.fnv1a}});
  }
  j["outputs"] = outs;
  return j.dump(2) + "\n";
}

RunManifest write_report(const std::string& dir,
                         const std::vector<Artifact>& artifacts,
                         const RunConfig* config, double wall_seconds) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("write_report: cannot create " + dir);

  RunManifest m;
  m.code_version = kCodeVersion;
  if (config) m.config_echo = serialize_config(*config);
  m.wall_seconds = wall_seconds;

  for (const auto& a : artifacts) {
    if (a.name.empty() || a.name.front() == '/' ||
        a.name.find("..") != std::string::npos) {
      throw ConfigError("write_report: illegal artifact name " + a.name);
    }
    const fs::path p = fs::path(dir) / a.name;
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(a.content.data(),
              static_cast<std::streamsize>(a.content.size()));
    if (!out.good()) {
      throw ConfigError("write_report: cannot write " + p.string());
    }
    out.close();
    m.outputs.push_back({a.name, a.content.size(), fnv1a_hex(a.content)});
  }

  // Manifest last, atomically: temp file in the same directory + rename.
  const fs::path final_path = fs::path(dir) / "manifest.json";
  const fs::path tmp_path = fs::path(dir) / "manifest.json.tmp";
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    const std::string body = manifest_json(m);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out.good()) {
      throw ConfigError("write_report: cannot write " + tmp_path.string());
    }
  }
  fs::rename(tmp_path, final_path, ec);
  if (ec) {
    throw ConfigError("write_report: cannot finalize " + final_path.string());
  }
  return m;
}

}  // namespace nlslab
