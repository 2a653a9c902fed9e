#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nlslab/evolve.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/potentials.hpp"

namespace nlslab {

// Key = value run description; the full schema is documented in
// docs/config.md. Core sections: potential.*, grid.*, evolve.*, plus the
// `experiment` selector and the selected experiment's own keys
// (scatter.*, dft.*, solve.*, decay.*, measure.*, asym.*, delta.*), which
// are kept as validated strings in `params`. Everything is seed-free.
struct RunConfig {
  // potential.*
  std::string potential_kind = "barrier";  // zero | barrier | gaussian | sample
  double potential_height = 1.0;           // barrier height
  double potential_half_width = 1.0;       // barrier half-width
  double potential_amplitude = 1.0;        // gaussian amplitude
  double potential_sigma = 1.0;            // gaussian width
  double potential_cutoff = 0.0;           // gaussian truncation (0 = none)
  std::string potential_file;              // sample kind: CSV path

  // grid.*  (k_half_width = 0 selects the matched lattice; > 0 a banded one)
  double grid_x_half_width = 40.0;
  int grid_n_x = 2048;
  double grid_k_half_width = 0.0;
  int grid_n_k = 2048;

  // evolve.*
  double evolve_t_end = 200.0;
  double evolve_dt = 0.02;
  std::string evolve_sign = "defocusing";
  double evolve_eta = 0.08;
  std::string evolve_data_shape = "gaussian";  // gaussian | odd_gaussian
  std::string evolve_a_coeff_file;

  // experiment selector + its parameters (defaults filled at load)
  std::string experiment = "solve";
  std::map<std::string, std::string> params;

  bool operator==(const RunConfig&) const = default;
};

// Parse + validate a config. Unknown keys raise ConfigError listing all of
// them; invalid values raise ConfigError naming the field path (e.g.
// `grid.n_x`). Defaults (including the selected experiment's parameter
// defaults) are filled in, so serialize_config echoes the complete
// effective configuration. `experiment_override`, when nonempty, replaces
// the experiment selector before validation (the CLI passes its subcommand
// name).
RunConfig parse_config(const std::string& text,
                       const std::string& experiment_override = "");
RunConfig load_config(const std::string& path,
                      const std::string& experiment_override = "");

// Canonical text form; load(serialize(c)) == c (round-trip stable).
std::string serialize_config(const RunConfig& c);

// Realize config sections as library objects.
Grid config_grid(const RunConfig& c);
Potential config_potential(const RunConfig& c, const Grid& grid);
CVec config_data(const RunConfig& c, const Grid& grid);
Sign config_sign(const RunConfig& c);

// Typed access to experiment parameters (validated at parse time, so these
// only see well-formed values).
double param_real(const RunConfig& c, const std::string& key);
int param_int(const RunConfig& c, const std::string& key);
bool param_bool(const RunConfig& c, const std::string& key);
std::vector<double> param_real_list(const RunConfig& c,
                                    const std::string& key);
const std::string& param_str(const RunConfig& c, const std::string& key);

// 17-significant-digit decimal (round-trip safe for doubles); the one
// number format used in every artifact.
std::string format_real(double v);

// FNV-1a 64-bit checksum of a byte string, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

// In-memory artifact: a file name (relative to the run directory) plus its
// full byte content.
struct Artifact {
  std::string name;
  std::string content;
};

struct ManifestEntry {
  std::string name;
  std::size_t bytes = 0;
  std::string fnv1a;
};

struct RunManifest {
  std::string code_version;
  std::string config_echo;
  std::vector<ManifestEntry> outputs;
  double wall_seconds = 0.0;
};

// Write all artifacts into `dir` (created if missing), then the manifest —
// atomically and last (temp file + rename), so an interrupted run leaves no
// manifest. Artifact bytes are deterministic functions of the config; the
// manifest additionally carries wall-clock timing and is therefore excluded
// from the byte-identical-rerun contract.
RunManifest write_report(const std::string& dir,
                         const std::vector<Artifact>& artifacts,
                         const RunConfig* config = nullptr,
                         double wall_seconds = 0.0);

// Serialize a manifest as JSON (sorted keys; deterministic apart from the
// timing field).
std::string manifest_json(const RunManifest& m);

extern const char* const kCodeVersion;

}  // namespace nlslab
