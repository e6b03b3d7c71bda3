#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slabres/error.hpp"
#include "slabres/structure.hpp"

using namespace slabres;

namespace {

const char* kRod = R"({
  "period": 6.283185307179586, "L": 2.0, "ambient": {"eps": 1.0, "mu": 1.0},
  "inclusions": [{"shape": "disk", "center": [0, 0], "radius": 1.5707963267948966,
                  "eps": 10.0, "mu": 1.0}]
})";

std::string with_disk(double cz, double r) {
  return R"({"L": 2.0, "inclusions": [{"shape": "disk", "center": [0, )" + std::to_string(cz) +
         R"(], "radius": )" + std::to_string(r) + R"(, "eps": 4}]})";
}

}  // namespace

TEST_CASE("rod config loads") {
  const SlabStructure s = load_config(kRod);
  CHECK(s.half_height() == 2.0);
  REQUIRE(s.inclusions().size() == 1);
  CHECK(s.material_at(0.0, 0.0).eps == 10.0);
  CHECK(s.material_at(0.0, 1.9).eps == 1.0);
  CHECK(s.material_at(2.0 * std::numbers::pi, 0.0).eps == 10.0);
  CHECK(s.material_at(0.0, 2.5).eps == 1.0);
}

TEST_CASE("empty inclusion list is the ambient medium") {
  const SlabStructure s = load_config(R"({"L": 1.5, "ambient": {"eps": 2.0, "mu": 1.0}})");
  for (double x : {-3.0, 0.0, 1.0}) {
    for (double z : {-1.5, 0.0, 1.2}) CHECK(s.material_at(x, z) == Medium{2.0, 1.0});
  }
}

TEST_CASE("config errors") {
  CHECK_THROWS_WITH_AS(load_config(with_disk(0.0, 0.0)),
                       doctest::Contains("nonpositive extent"), ConfigError);
  CHECK_THROWS_AS(load_config(with_disk(1.0, 1.5)), ConfigError);
  CHECK_THROWS_AS(load_config(R"({"L": 2.0, "period": 1.0})"), ConfigError);
  CHECK_THROWS_AS(load_config(R"({"L": -1})"), ConfigError);
  CHECK_THROWS_AS(load_config(R"({"L": 2, "ambient": {"eps": 0}})"), ConfigError);
  CHECK_THROWS_AS(load_config("{not json"), ConfigError);
  CHECK_THROWS_AS(load_config(R"({"L": 2, "inclusions": [{"shape": "hexagon"}]})"),
                  ConfigError);
}

TEST_CASE("symmetry detection") {
  SymmetryReport rod = check_symmetries(load_config(kRod));
  CHECK(rod.z_symmetric);
  CHECK(rod.x_symmetric);

  CHECK_FALSE(check_symmetries(load_config(with_disk(0.5, 0.4))).z_symmetric);

  const SlabStructure pair(2.0, Medium{},
                           {Inclusion{Disk{0.7, 0.8, 0.5}, Medium{3.0, 1.0}},
                            Inclusion{Disk{0.7, -0.8, 0.5}, Medium{3.0, 1.0}}});
  const SymmetryReport r = check_symmetries(pair);
  CHECK(r.z_symmetric);
  CHECK_FALSE(r.x_symmetric);
}

TEST_CASE("json round trip") {
  const SlabStructure s = load_config(kRod);
  const SlabStructure back = parse_structure(to_json(s));
  CHECK(back.half_height() == s.half_height());
  CHECK(back.material_at(0.3, 0.2) == s.material_at(0.3, 0.2));
  CHECK(back.material_at(1.6, 0.0) == s.material_at(1.6, 0.0));
}

TEST_CASE("rectangle wraps across the period") {
  const SlabStructure s(1.0, Medium{},
                       {Inclusion{Rectangle{2.5, -0.5, 3.5, 0.5}, Medium{5.0, 1.0}}});
  CHECK(s.material_at(3.0, 0.0).eps == 5.0);
  CHECK(s.material_at(-3.0, 0.0).eps == 5.0);  // -3 + 2pi = 3.28
  CHECK(s.material_at(0.0, 0.0).eps == 1.0);
}
