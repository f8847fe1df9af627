#include "turnpike/outputs.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

#include "turnpike/errors.hpp"

namespace turnpike {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1)
    throw IoError("sha256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out(2 * len, '0');
  for (unsigned int i = 0; i < len; ++i) {
    out[2 * i] = hex[digest[i] >> 4];
    out[2 * i + 1] = hex[digest[i] & 0xf];
  }
  return out;
}

std::string emit_outputs(const std::vector<Artifact>& artifacts,
                         const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "'");

  std::vector<const Artifact*> sorted;
  sorted.reserve(artifacts.size());
  for (const auto& a : artifacts) {
    if (a.name.empty() || a.name.find('/') != std::string::npos)
      throw ValidationError("artifact names must be plain file names");
    sorted.push_back(&a);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Artifact* a, const Artifact* b) { return a->name < b->name; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i]->name == sorted[i - 1]->name)
      throw ValidationError("duplicate artifact name '" + sorted[i]->name + "'");

  nlohmann::json manifest;
  manifest["files"] = nlohmann::json::array();
  for (const Artifact* a : sorted) {
    const fs::path path = fs::path(dir) / a->name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << a->content))
      throw IoError("cannot write '" + path.string() + "'");
    out.close();
    manifest["files"].push_back(
        {{"name", a->name}, {"sha256", sha256_hex(a->content)}});
  }
  const std::string text = manifest.dump(2) + "\n";
  const fs::path mpath = fs::path(dir) / "manifest.json";
  std::ofstream mout(mpath, std::ios::binary | std::ios::trunc);
  if (!mout || !(mout << text))
    throw IoError("cannot write '" + mpath.string() + "'");
  return text;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvBuilder::CsvBuilder(const std::vector<std::string>& header)
    : columns_(header.size()) {
  if (header.empty()) throw ShapeMismatch("CSV needs at least one column");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

void CsvBuilder::row(const std::vector<double>& values) {
  if (values.size() != columns_)
    throw ShapeMismatch("CSV row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += format_double(values[i]);
  }
  text_ += '\n';
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<PlotSeries>& series, bool log_x,
                          bool log_y) {
  constexpr double W = 800, H = 500;
  constexpr double ml = 70, mr = 160, mt = 40, mb = 55;
  const double pw = W - ml - mr, ph = H - mt - mb;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b"};

  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if ((log_x && !(s.x[i] > 0.0)) || (log_y && !(s.y[i] > 0.0))) continue;
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!(x0 <= x1)) { x0 = 0; x1 = 1; }
  if (!(y0 <= y1)) { y0 = 0; y1 = 1; }
  if (x1 - x0 < 1e-12) { x0 -= 0.5; x1 += 0.5; }
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }

  auto px = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return mt + ph - (ty(v) - y0) / (y1 - y0) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
         "viewBox=\"0 0 800 500\">\n";
  svg += "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  svg += "<text x=\"" + format_double(W / 2) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">" + xml_escape(title) + "</text>\n";

  // Axes box and ticks.
  svg += "<rect x=\"" + format_double(ml) + "\" y=\"" + format_double(mt) +
         "\" width=\"" + format_double(pw) + "\" height=\"" + format_double(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  const int ticks = 5;
  for (int k = 0; k <= ticks; ++k) {
    const double fx = x0 + (x1 - x0) * k / ticks;
    const double fy = y0 + (y1 - y0) * k / ticks;
    const double gx = ml + pw * k / ticks;
    const double gy = mt + ph - ph * k / ticks;
    const double vx = log_x ? std::pow(10.0, fx) : fx;
    const double vy = log_y ? std::pow(10.0, fy) : fy;
    svg += "<line x1=\"" + format_double(gx) + "\" y1=\"" + format_double(mt + ph) +
           "\" x2=\"" + format_double(gx) + "\" y2=\"" + format_double(mt + ph + 5) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + format_double(gx) + "\" y=\"" + format_double(mt + ph + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           xml_escape(short_number(vx)) + "</text>\n";
    svg += "<line x1=\"" + format_double(ml - 5) + "\" y1=\"" + format_double(gy) +
           "\" x2=\"" + format_double(ml) + "\" y2=\"" + format_double(gy) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + format_double(ml - 9) + "\" y=\"" + format_double(gy + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           xml_escape(short_number(vy)) + "</text>\n";
  }
  svg += "<text x=\"" + format_double(ml + pw / 2) + "\" y=\"" +
         format_double(H - 12) + "\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"13\">" + xml_escape(x_label) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + format_double(mt + ph / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 " + format_double(mt + ph / 2) + ")\">" +
         xml_escape(y_label) + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = palette[s % (sizeof(palette) / sizeof(palette[0]))];
    std::string points;
    const std::size_t n = std::min(ser.x.size(), ser.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if ((log_x && !(ser.x[i] > 0.0)) || (log_y && !(ser.y[i] > 0.0))) continue;
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
      if (!points.empty()) points += ' ';
      points += format_double(px(ser.x[i])) + "," + format_double(py(ser.y[i]));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    const double ly = mt + 18.0 * (s + 1);
    svg += "<line x1=\"" + format_double(W - mr + 12) + "\" y1=\"" + format_double(ly) +
           "\" x2=\"" + format_double(W - mr + 34) + "\" y2=\"" + format_double(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + format_double(W - mr + 40) + "\" y=\"" + format_double(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + xml_escape(ser.label) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace turnpike
