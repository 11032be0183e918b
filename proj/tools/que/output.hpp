#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace que::cli {

/// Shortest-form-independent rendering: always 17 significant digits, '.' decimal.
std::string fmt(double value);

/// CSV with a leading "# schema=..., config_hash=..., seed=..." comment line.
class CsvTable {
 public:
  CsvTable(std::string schema, std::vector<std::string> columns);

  void add_row(std::vector<std::string> cells);
  std::string render(const std::string& config_hash, unsigned long long seed) const;

 private:
  std::string schema_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = true;
};

std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series, const std::string& config_hash,
                       unsigned long long seed);

/// Writes through a temporary file and renames it into place.
void write_text(const std::filesystem::path& file, const std::string& content);
std::string read_text(const std::filesystem::path& file);

}  // namespace que::cli
