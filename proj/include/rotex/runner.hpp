#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rotex/config.hpp"

namespace rotex {

inline constexpr int kSchemaVersion = 1;

struct ManifestFile {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string subcommand;
  std::string version;
  std::string config_text;
  std::uint64_t seed = 0;
  int threads = 0;
  double wall_clock_s = 0.0;  // informational, not part of any determinism claim
  std::vector<ManifestFile> files;

  std::string to_json() const;
};

std::string sha256_file(const std::string& path);

/// Re-hashes every file listed in <dir>/manifest.json. Returns the paths
/// that are missing or changed.
std::vector<std::string> verify_manifest(const std::string& dir);

const std::vector<std::string>& subcommands();

/// Runs simulate, spectrogram, scan, optimize, mpm or plan and writes the
/// outputs plus manifest.json into cfg.output_dir.
RunManifest run_subcommand(const std::string& name, const ScenarioConfig& cfg);

/// Intensity (W/cm^2) and duration (s) to kick strength; writes convert.json
/// and a manifest when out_dir is not empty.
RunManifest run_convert(double intensity_Wcm2, double fwhm_s, const MoleculeSpec& mol, const std::string& out_dir,
                        double* P_out = nullptr);

/// "100fs", "1.5ps", "2e-13s" or a bare number of seconds.
double parse_duration(const std::string& text);

}  // namespace rotex
