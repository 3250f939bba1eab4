#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace hypoflow {

/// Round-trip-safe text for a double with 17 significant digits.
std::string format_double(double v);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct OutputFile {
  std::string name;  ///< path relative to the run directory
  std::string kind;  ///< csv, json, gnuplot, text
  std::string sha256;
  std::uintmax_t bytes = 0;
};

/// A curve overlaid on a plot, in gnuplot syntax over the x column (e.g. "exp(-0.5*x)").
struct PlotOverlay {
  std::string expression;
  std::string title;
};

struct PlotSpec {
  std::string title;
  std::string csv;  ///< CSV file name inside the run directory
  int x_column = 1;  ///< 1-based
  std::vector<int> y_columns;
  std::vector<std::string> y_titles;
  bool log_x = false;
  bool log_y = true;
  std::vector<PlotOverlay> overlays;
};

/// Writes run artifacts into one directory and keeps an inventory with checksums.
class OutputSink {
 public:
  explicit OutputSink(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  const std::vector<OutputFile>& files() const { return files_; }

  /// Header row plus numeric rows, UTF-8, '\n' line endings.
  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);
  /// Rows of preformatted cells (mixed text and numbers).
  void write_table(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);
  void write_json(const std::string& name, const nlohmann::ordered_json& value);
  void write_plot(const std::string& name, const PlotSpec& spec);
  void write_text(const std::string& name, const std::string& content, const std::string& kind = "text");

 private:
  void record(const std::string& name, const std::string& kind, const std::string& bytes);

  std::filesystem::path dir_;
  std::vector<OutputFile> files_;
};

}  // namespace hypoflow
