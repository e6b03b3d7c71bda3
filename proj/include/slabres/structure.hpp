#pragma once

#include <numbers>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace slabres {

inline constexpr double kPeriod = 2.0 * std::numbers::pi;

// Relative permittivity and permeability of a lossless, isotropic material.
struct Medium {
  double eps = 1.0;
  double mu = 1.0;

  friend bool operator==(const Medium&, const Medium&) = default;
};

struct Disk {
  double cx = 0.0;
  double cz = 0.0;
  double radius = 0.0;
};

// Axis-aligned rectangle [x0,x1] x [z0,z1].
struct Rectangle {
  double x0 = 0.0;
  double z0 = 0.0;
  double x1 = 0.0;
  double z1 = 0.0;
};

struct Inclusion {
  std::variant<Disk, Rectangle> shape;
  Medium material;

  // True if the point (x, z) lies in the closed shape, with x taken modulo the period.
  bool contains(double x, double z) const;
};

// One period of a slab that is 2*pi periodic in x and equal to the ambient medium
// for |z| > half_height. Later inclusions override earlier ones where they overlap.
class SlabStructure {
 public:
  SlabStructure(double half_height, Medium ambient, std::vector<Inclusion> inclusions = {});

  double period() const noexcept { return kPeriod; }
  double half_height() const noexcept { return half_height_; }
  const Medium& ambient() const noexcept { return ambient_; }
  const std::vector<Inclusion>& inclusions() const noexcept { return inclusions_; }

  Medium material_at(double x, double z) const;

  // Extreme material values over the structure, ambient included.
  Medium lower_bound() const;
  Medium upper_bound() const;

 private:
  double half_height_;
  Medium ambient_;
  std::vector<Inclusion> inclusions_;
};

struct SymmetryReport {
  bool z_symmetric = false;
  bool x_symmetric = false;
};

// Reduces x into [-pi, pi).
double wrap_to_period(double x);

SlabStructure parse_structure(const nlohmann::json& doc);
SlabStructure load_config(std::string_view text);
SlabStructure load_config_file(const std::string& path);
nlohmann::json to_json(const SlabStructure& s);

// Compares material_at on a 256 x 256 cell-centred lattice over the truncated
// period against its mirror images z -> -z and x -> -x.
SymmetryReport check_symmetries(const SlabStructure& s);

// Ready-made structures used by tests, examples and the CLI documentation.
SlabStructure homogeneous_structure(double half_height, Medium ambient = {});
SlabStructure rod_structure(double radius, double rod_eps, double half_height = 2.0);
SlabStructure layer_structure(double layer_half_width, double layer_eps, double half_height);

}  // namespace slabres
