#include "slabres/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "slabres/error.hpp"

namespace slabres {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string provenance_line(const std::string& subcommand, std::uint64_t args_hash) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(args_hash));
  return "# slabres " + subcommand + " " + kVersion + " " + hash;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write output file '" + path + "'");
    out << content;
    out.flush();
    if (!out) throw ConfigError("failed while writing '" + path + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("cannot move output into place at '" + path + "'");
  }
}

namespace {

void csv_row(std::ostringstream& out, double k, double w, cplx r, cplx t, double trans,
             double defect) {
  out << format_double(k) << ',' << format_double(w) << ',' << format_double(r.real()) << ','
      << format_double(r.imag()) << ',' << format_double(t.real()) << ','
      << format_double(t.imag()) << ',' << format_double(trans) << ',' << format_double(defect)
      << '\n';
}

}  // namespace

std::string sweep_csv(const SweepTable& table, const std::string& header_line) {
  std::ostringstream out;
  out << header_line << '\n';
  out << "kappa,omega,re_R,im_R,re_T,im_T,transmittance,energy_defect\n";
  for (const auto& r : table) csv_row(out, r.kappa, r.omega, r.R, r.T, r.transmittance, r.energy_defect);
  return out.str();
}

std::string figure_csv(const std::vector<FigureRow>& rows, const std::string& header_line) {
  std::ostringstream out;
  out << header_line << '\n';
  out << "ktilde,wtilde,re_R,im_R,re_T,im_T,transmittance,energy_defect\n";
  for (const auto& r : rows) csv_row(out, r.ktilde, r.wtilde, r.R, r.T, r.transmittance, r.energy_defect);
  return out.str();
}

std::string json_document(const nlohmann::json& doc, const std::string& header_line) {
  return header_line + '\n' + doc.dump(2) + '\n';
}

nlohmann::json parse_json_text(const std::string& text) {
  std::istringstream in(text);
  std::string line, body;
  bool in_header = true;
  while (std::getline(in, line)) {
    if (in_header && !line.empty() && line[0] == '#') continue;
    in_header = false;
    body += line;
    body += '\n';
  }
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON document: ") + e.what());
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str());
}

std::string svg_plot(const std::vector<Polyline>& lines, const std::string& x_label,
                     const std::string& y_label, double marker_x) {
  constexpr double width = 640, height = 420, left = 60, right = 20, top = 20, bottom = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& l : lines) {
    for (const auto& [x, y] : l.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!(x1 > x0)) {
    x0 = 0.0;
    x1 = 1.0;
  }
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (width - left - right); };
  const auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * (height - top - bottom); };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
      << "\" height=\"" << height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n"
      << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right
      << "\" height=\"" << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << height / 2 << "\" transform=\"rotate(-90 16 " << height / 2
      << ")\" text-anchor=\"middle\" font-size=\"13\">" << y_label << "</text>\n";
  out << "<text x=\"" << left << "\" y=\"" << height - bottom + 16 << "\" font-size=\"10\">"
      << format_double(x0) << "</text>\n";
  out << "<text x=\"" << width - right << "\" y=\"" << height - bottom + 16
      << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(x1) << "</text>\n";
  out << "<text x=\"" << left - 4 << "\" y=\"" << height - bottom
      << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(y0) << "</text>\n";
  out << "<text x=\"" << left - 4 << "\" y=\"" << top + 10
      << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(y1) << "</text>\n";
  if (std::isfinite(marker_x) && marker_x >= x0 && marker_x <= x1) {
    out << "<line x1=\"" << px(marker_x) << "\" y1=\"" << top << "\" x2=\"" << px(marker_x)
        << "\" y2=\"" << height - bottom << "\" stroke=\"gray\" stroke-dasharray=\"4,3\"/>\n";
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const char* color = palette[i % (sizeof palette / sizeof *palette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (const auto& [x, y] : lines[i].points) {
      if (std::isfinite(x) && std::isfinite(y)) out << px(x) << ',' << py(y) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << width - right - 4 << "\" y=\"" << top + 14 + 14 * i
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">" << lines[i].label
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace slabres
