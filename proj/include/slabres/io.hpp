#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "slabres/anomaly.hpp"
#include "slabres/scatter.hpp"

namespace slabres {

inline constexpr const char* kVersion = "0.1.0";

// 17 significant digits; NaN and infinities spelled nan, inf, -inf.
std::string format_double(double v);

std::uint64_t fnv1a(std::string_view text);

// "# slabres <subcommand> <version> <hash>" (no trailing newline).
std::string provenance_line(const std::string& subcommand, std::uint64_t args_hash);

// Writes to a temporary file beside `path`, then renames it into place.
void write_atomic(const std::string& path, const std::string& content);

std::string sweep_csv(const SweepTable& table, const std::string& header_line);
std::string figure_csv(const std::vector<FigureRow>& rows, const std::string& header_line);
std::string json_document(const nlohmann::json& doc, const std::string& header_line);

// Parses a JSON file, skipping leading lines that start with '#'.
nlohmann::json read_json_file(const std::string& path);
nlohmann::json parse_json_text(const std::string& text);

struct Polyline {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

// Plain SVG 1.1 line plot; `marker_x`, when finite, draws a vertical reference line.
std::string svg_plot(const std::vector<Polyline>& lines, const std::string& x_label,
                     const std::string& y_label, double marker_x);

}  // namespace slabres
