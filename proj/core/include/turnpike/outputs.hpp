#pragma once

#include <string>
#include <vector>

namespace turnpike {

// An output file staged in memory; emit_outputs writes the batch and a
// manifest.json listing {name, sha256} per file, sorted by name.
struct Artifact {
  std::string name;
  std::string content;
};

std::string sha256_hex(const std::string& data);

// Writes every artifact plus manifest.json under dir (created if needed).
// Returns the manifest JSON text.  Throws IoError on filesystem failures.
std::string emit_outputs(const std::vector<Artifact>& artifacts,
                         const std::string& dir);

// Locale-independent shortest round-trip formatting used for all CSV output,
// so identical runs are byte-identical.
std::string format_double(double v);

// Minimal CSV builder.
class CsvBuilder {
 public:
  explicit CsvBuilder(const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  const std::string& str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

// Hand-rolled SVG polyline chart (no styling dependencies).
struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<PlotSeries>& series,
                          bool log_x = false, bool log_y = false);

}  // namespace turnpike
