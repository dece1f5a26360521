// rotex: command-line driver for the rotational Raman / alignment toolkit.
#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <optional>

#include "rotex/config.hpp"
#include "rotex/error.hpp"
#include "rotex/runner.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config, "scenario file (INI sections with units in key names)")->required()->check(CLI::ExistingFile);
  sub->add_option("--threads", c.threads, "worker threads (default: all cores)")->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "seed for amplitude jitter");
  sub->add_option("--out-dir", c.out_dir, "output directory (overrides [output] dir)");
  sub->add_option("--override", c.overrides, "section.key=value, repeatable");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rotex: pulse-train rotational excitation, Raman spectra and molecular phase modulation"};
  app.set_version_flag("--version", std::string(ROTEX_VERSION));
  app.require_subcommand(1);

  Common common;
  std::vector<std::pair<std::string, CLI::App*>> runs;
  const std::vector<std::pair<std::string, std::string>> help = {
      {"simulate", "evolve the ensemble under a train and synthesize the Raman spectrum"},
      {"spectrogram", "Raman spectra over a scanned period or interleave delay"},
      {"scan", "objective curve over one interleave delay"},
      {"optimize", "coordinate search of the interleave delays"},
      {"mpm", "probe phase modulation: broadening by delay and cascade spectrum"},
      {"plan", "resonance trajectory table T_J"},
  };
  for (const auto& [name, text] : help) {
    CLI::App* sub = app.add_subcommand(name, text);
    add_common(sub, common);
    runs.emplace_back(name, sub);
  }

  std::string intensity_text, fwhm_text = "100fs", convert_config, convert_out;
  CLI::App* conv = app.add_subcommand("convert", "peak intensity and duration to kick strength P");
  conv->add_option("--intensity", intensity_text, "peak intensity in W/cm^2")->required();
  conv->add_option("--fwhm", fwhm_text, "pulse FWHM, e.g. 100fs or 0.1ps");
  conv->add_option("-c,--config", convert_config, "take the molecule from this scenario file")->check(CLI::ExistingFile);
  conv->add_option("--out-dir", convert_out, "also write convert.json and a manifest here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (conv->parsed()) {
      rotex::MoleculeSpec mol;
      if (!convert_config.empty()) mol = rotex::load_config(convert_config).molecule;
      double I = 0.0;
      try {
        I = std::stod(intensity_text);
      } catch (const std::exception&) {
        throw rotex::InvalidArgument(fmt::format("--intensity '{}' is not a number", intensity_text));
      }
      double P = 0.0;
      rotex::run_convert(I, rotex::parse_duration(fwhm_text), mol, convert_out, &P);
      fmt::print("P = {:.6g}\n", P);
      return 0;
    }
    for (const auto& [name, sub] : runs) {
      if (!sub->parsed()) continue;
      rotex::ScenarioConfig cfg = rotex::load_config(common.config, common.overrides);
      if (common.threads) cfg.threads = *common.threads;
      if (common.seed) cfg.seed = *common.seed;
      if (!common.out_dir.empty()) cfg.output_dir = common.out_dir;
      const rotex::RunManifest m = rotex::run_subcommand(name, cfg);
      fmt::print("{}: {} files in {} ({:.2f} s, {} threads)\n", name, m.files.size(), cfg.output_dir, m.wall_clock_s,
                 m.threads);
    }
  } catch (const rotex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
