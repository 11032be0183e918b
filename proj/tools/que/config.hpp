#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "que/fractal.hpp"

namespace que::cli {

struct RunConfig {
  std::string command;
  ModelKind model = ModelKind::Interval;
  int level = 3;
  int fine = -1;             // -1: default fine level for the model
  std::vector<int> levels;   // overrides `level` for multi-level commands when non-empty
  int k = 1;
  std::string reference;     // "analytic" or "finest"; empty picks per model
  std::vector<std::string> z_points{"-1", "-2", "i", "1+2i"};
  std::vector<double> times{0.5, 1.0, 2.0};
  double theta = 0.78539816339744830962;
  std::vector<int> chain{2, 4, 8};
  int grid = 256;
  int center = -1;           // -1: grid / 2
  std::vector<double> radii{4.0, 8.0, 16.0};  // in grid spacings
  double alpha = 0.5;
  int spot_checks = 100;
  unsigned long long seed = 1;
  std::filesystem::path out = "que-out";
  std::filesystem::path cache;  // resolved: flag, then QUE_CACHE_DIR, then <out>/cache

  /// Levels for multi-level commands (explicit list or the single `level`).
  std::vector<int> level_list() const;
  std::vector<std::complex<double>> parsed_z() const;
  /// FNV-1a over a canonical rendering of every setting that affects results (paths excluded).
  std::string hash() const;
};

/// Parses "-1", "i", "-2.5i", "1+2i", "3-0.5i".
std::complex<double> parse_complex(const std::string& text);

struct ParseOutcome {
  std::optional<RunConfig> config;
  int exit_code = 0;  // meaningful when config is empty
};

ParseOutcome parse_command_line(int argc, char** argv);

}  // namespace que::cli
