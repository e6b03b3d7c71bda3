#include "slabres/structure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "slabres/error.hpp"

namespace slabres {

namespace {

constexpr double kPi = std::numbers::pi;

void check_medium(const Medium& m, const std::string& where) {
  if (!(m.eps > 0.0) || !(m.mu > 0.0) || !std::isfinite(m.eps) || !std::isfinite(m.mu)) {
    throw ConfigError(where + ": nonpositive material (eps and mu must be positive)");
  }
}

void check_inclusion(const Inclusion& inc, double half_height, std::size_t index) {
  const std::string where = "inclusion " + std::to_string(index);
  check_medium(inc.material, where);
  if (const auto* d = std::get_if<Disk>(&inc.shape)) {
    if (!(d->radius > 0.0)) throw ConfigError(where + ": nonpositive extent");
    if (std::abs(d->cz) + d->radius > half_height) {
      throw ConfigError(where + ": disk lies outside the strip |z| <= L");
    }
  } else {
    const auto& r = std::get<Rectangle>(inc.shape);
    if (!(r.x1 > r.x0) || !(r.z1 > r.z0)) throw ConfigError(where + ": nonpositive extent");
    if (r.z0 < -half_height || r.z1 > half_height) {
      throw ConfigError(where + ": rectangle lies outside the strip |z| <= L");
    }
    if (r.x1 - r.x0 > kPeriod) throw ConfigError(where + ": rectangle wider than one period");
  }
}

std::array<double, 2> read_pair(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2) {
    throw ConfigError(std::string("field '") + key + "' must be a two-element array");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

double wrap_to_period(double x) {
  if (x >= -kPi && x < kPi) return x;
  double r = std::fmod(x + kPi, kPeriod);
  if (r < 0.0) r += kPeriod;
  double w = r - kPi;
  return w >= kPi ? w - kPeriod : w;
}

bool Inclusion::contains(double x, double z) const {
  const double xw = wrap_to_period(x);
  if (const auto* d = std::get_if<Disk>(&shape)) {
    const double dx = wrap_to_period(xw - d->cx);
    const double dz = z - d->cz;
    return dx * dx + dz * dz <= d->radius * d->radius;
  }
  const auto& r = std::get<Rectangle>(shape);
  if (z < r.z0 || z > r.z1) return false;
  for (double shift : {0.0, -kPeriod, kPeriod}) {
    const double xs = xw + shift;
    if (xs >= r.x0 && xs <= r.x1) return true;
  }
  return false;
}

SlabStructure::SlabStructure(double half_height, Medium ambient, std::vector<Inclusion> inclusions)
    : half_height_(half_height), ambient_(ambient), inclusions_(std::move(inclusions)) {
  if (!(half_height_ > 0.0) || !std::isfinite(half_height_)) {
    throw ConfigError("strip half-height L must be positive");
  }
  check_medium(ambient_, "ambient");
  for (std::size_t i = 0; i < inclusions_.size(); ++i) {
    check_inclusion(inclusions_[i], half_height_, i);
  }
}

Medium SlabStructure::material_at(double x, double z) const {
  if (std::abs(z) > half_height_) return ambient_;
  for (auto it = inclusions_.rbegin(); it != inclusions_.rend(); ++it) {
    if (it->contains(x, z)) return it->material;
  }
  return ambient_;
}

Medium SlabStructure::lower_bound() const {
  Medium lo = ambient_;
  for (const auto& inc : inclusions_) {
    lo.eps = std::min(lo.eps, inc.material.eps);
    lo.mu = std::min(lo.mu, inc.material.mu);
  }
  return lo;
}

Medium SlabStructure::upper_bound() const {
  Medium hi = ambient_;
  for (const auto& inc : inclusions_) {
    hi.eps = std::max(hi.eps, inc.material.eps);
    hi.mu = std::max(hi.mu, inc.material.mu);
  }
  return hi;
}

SlabStructure parse_structure(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw ConfigError("structure document must be a JSON object");
    if (doc.contains("period")) {
      const double period = doc.at("period").get<double>();
      if (std::abs(period - kPeriod) > 1e-12) {
        throw ConfigError("period must equal 2*pi (got " + std::to_string(period) + ")");
      }
    }
    const double L = doc.at("L").get<double>();
    Medium ambient{1.0, 1.0};
    if (doc.contains("ambient")) {
      const auto& a = doc.at("ambient");
      ambient.eps = a.value("eps", 1.0);
      ambient.mu = a.value("mu", 1.0);
    }
    std::vector<Inclusion> inclusions;
    if (doc.contains("inclusions")) {
      for (const auto& item : doc.at("inclusions")) {
        Inclusion inc;
        inc.material.eps = item.value("eps", 1.0);
        inc.material.mu = item.value("mu", 1.0);
        const auto shape = item.at("shape").get<std::string>();
        if (shape == "disk") {
          const auto c = read_pair(item, "center");
          inc.shape = Disk{c[0], c[1], item.at("radius").get<double>()};
        } else if (shape == "rectangle") {
          const auto lo = read_pair(item, "min");
          const auto hi = read_pair(item, "max");
          inc.shape = Rectangle{lo[0], lo[1], hi[0], hi[1]};
        } else {
          throw ConfigError("unknown inclusion shape '" + shape + "'");
        }
        inclusions.push_back(inc);
      }
    }
    return SlabStructure(L, ambient, std::move(inclusions));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed structure document: ") + e.what());
  }
}

SlabStructure load_config(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed structure document: ") + e.what());
  }
  return parse_structure(doc);
}

SlabStructure load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

nlohmann::json to_json(const SlabStructure& s) {
  nlohmann::json doc;
  doc["period"] = kPeriod;
  doc["L"] = s.half_height();
  doc["ambient"] = {{"eps", s.ambient().eps}, {"mu", s.ambient().mu}};
  auto inclusions = nlohmann::json::array();
  for (const auto& inc : s.inclusions()) {
    nlohmann::json item;
    if (const auto* d = std::get_if<Disk>(&inc.shape)) {
      item["shape"] = "disk";
      item["center"] = {d->cx, d->cz};
      item["radius"] = d->radius;
    } else {
      const auto& r = std::get<Rectangle>(inc.shape);
      item["shape"] = "rectangle";
      item["min"] = {r.x0, r.z0};
      item["max"] = {r.x1, r.z1};
    }
    item["eps"] = inc.material.eps;
    item["mu"] = inc.material.mu;
    inclusions.push_back(item);
  }
  doc["inclusions"] = inclusions;
  return doc;
}

SymmetryReport check_symmetries(const SlabStructure& s) {
  constexpr int n = 256;
  const double L = s.half_height();
  const double hx = kPeriod / n;
  const double hz = 2.0 * L / n;
  SymmetryReport report{true, true};
  for (int i = 0; i < n && (report.x_symmetric || report.z_symmetric); ++i) {
    const double x = -kPi + (i + 0.5) * hx;
    for (int k = 0; k < n; ++k) {
      const double z = -L + (k + 0.5) * hz;
      const Medium here = s.material_at(x, z);
      if (report.z_symmetric && !(here == s.material_at(x, -z))) report.z_symmetric = false;
      if (report.x_symmetric && !(here == s.material_at(-x, z))) report.x_symmetric = false;
    }
  }
  return report;
}

SlabStructure homogeneous_structure(double half_height, Medium ambient) {
  return SlabStructure(half_height, ambient);
}

SlabStructure rod_structure(double radius, double rod_eps, double half_height) {
  return SlabStructure(half_height, Medium{1.0, 1.0},
                       {Inclusion{Disk{0.0, 0.0, radius}, Medium{rod_eps, 1.0}}});
}

SlabStructure layer_structure(double layer_half_width, double layer_eps, double half_height) {
  return SlabStructure(
      half_height, Medium{1.0, 1.0},
      {Inclusion{Rectangle{-kPi, -layer_half_width, kPi, layer_half_width}, Medium{layer_eps, 1.0}}});
}

}  // namespace slabres
