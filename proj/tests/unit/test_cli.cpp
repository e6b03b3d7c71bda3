#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "slabres/cli.hpp"
#include "slabres/error.hpp"

using namespace slabres;
namespace fs = std::filesystem;
using cplx = std::complex<double>;

namespace {

const std::string kConfigs = SLABRES_CONFIG_DIR;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("slabres_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("grid and complex parsing") {
  CHECK(parse_grid("0,0.01,0.02") == std::vector<double>{0.0, 0.01, 0.02});
  const auto g = parse_grid("-0.005:0.005:1001");
  REQUIRE(g.size() == 1001);
  CHECK(g.front() == -0.005);
  CHECK(g.back() == 0.005);
  CHECK(g[500] == doctest::Approx(0.0).epsilon(1e-18));
  CHECK(parse_grid("").empty());
  CHECK_THROWS_AS(parse_grid("1:2"), UsageError);
  CHECK_THROWS_AS(parse_grid("a,b"), UsageError);
  CHECK(parse_complex("2") == cplx(2.0, 0.0));
  CHECK(parse_complex("1.5-0.25i") == cplx(1.5, -0.25));
  CHECK(parse_complex("-2e-3+1e-2i") == cplx(-2e-3, 1e-2));
  CHECK(parse_complex("0.3i") == cplx(0.0, 0.3));
  CHECK(parse_complex("-i") == cplx(0.0, -1.0));
}

TEST_CASE("model subcommand writes a reproducible figure table") {
  TempDir tmp;
  const std::vector<std::string> args{"model", "--family", "generic", "--ell1", "0", "--r2", "2",
                                      "--t2", "1", "--r0", "0.6", "--t0", "0.8", "--ktilde",
                                      "0,0.01,0.02,0.03", "--wtilde", "-0.005:0.005:1001",
                                      "--out", tmp / "generic.csv", "--svg", tmp / "generic.svg"};
  const CommandOutcome a = run(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.artifacts.size() == 2);
  const std::string first = slurp(tmp / "generic.csv");
  CHECK(first.rfind("# slabres model 0.1.0 ", 0) == 0);
  std::istringstream lines(first);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 2 + 4 * 1001);
  CHECK(slurp(tmp / "generic.svg").find("<svg") != std::string::npos);
  REQUIRE(run(args).exit_code == 0);
  CHECK(slurp(tmp / "generic.csv") == first);
  // No temporary files are left behind.
  int files = 0;
  for (const auto& e : fs::directory_iterator(tmp.path)) files += e.is_regular_file();
  CHECK(files == 2);
}

TEST_CASE("model validation through the CLI") {
  TempDir tmp;
  CHECK(run({"model", "--r0", "0.6", "--t0", "0.9", "--out", tmp / "x.csv"}).exit_code == 2);
  CHECK_FALSE(fs::exists(tmp / "x.csv"));
  REQUIRE(run({"model", "--ktilde", "0.01", "--wtilde", "0", "--out", tmp / "m.csv",
               "--save-model", tmp / "m.json"})
              .exit_code == 0);
  const CommandOutcome v = run({"validate", "--model", tmp / "m.json", "--out", tmp / "v.json"});
  CHECK(v.exit_code == 0);
  CHECK(v.log.find("Lemma 3.3(iii)") != std::string::npos);

  // A hand-edited model with the wrong sign of Im(ell2) fails validation.
  std::ofstream(tmp / "bad.json")
      << R"({"family":"generic","ell1":0,"r2":2,"t2":1,"r0":0.6,"t0":0.8,"ell2":[1.36,-0.48]})";
  CHECK(run({"validate", "--model", tmp / "bad.json"}).exit_code == 2);
  CHECK(run({"model", "--model", tmp / "bad.json", "--ktilde", "0"}).exit_code == 2);

  CHECK(run({"model", "--family", "full_background", "--ell1", "2", "--r1-1", "0.2", "--r1-2",
             "4", "--r2-1", "7", "--r2-2", "7", "--t2", "0.1", "--r0", "0.6", "--t0", "1",
             "--ktilde", "0.01", "--wtilde", "-0.03:0.01:5", "--out", tmp / "fb.csv"})
            .exit_code == 0);
  CHECK(run({"model", "--family", "degenerate", "--ell1", "0.7,0.8", "--r2", "2,5", "--t2",
             "8,4", "--ktilde", "0.003", "--wtilde", "-0.003:0:7", "--out", tmp / "dg.csv"})
            .exit_code == 0);
}

TEST_CASE("exit codes") {
  TempDir tmp;
  CHECK(run({}).exit_code == 1);
  CHECK(run({"bogus"}).exit_code == 1);
  CHECK(run({"solve", "--kappa", "0"}).exit_code == 1);
  CHECK(run({"--help"}).exit_code == 0);
  CHECK(run({"solve", "--config", kConfigs + "/rod.json", "--kappa", "0.6", "--omega", "0.7"})
            .exit_code == 4);
  CHECK(run({"solve", "--config", tmp / "missing.json", "--kappa", "0", "--omega", "0.5"})
            .exit_code == 2);
  std::ofstream(tmp / "zero.json") << R"({"L": 2, "inclusions": [{"shape": "disk",
      "center": [0, 0], "radius": 0, "eps": 4}]})";
  const CommandOutcome z =
      run({"solve", "--config", tmp / "zero.json", "--kappa", "0", "--omega", "0.5"});
  CHECK(z.exit_code == 2);
  CHECK(z.log.find("nonpositive extent") != std::string::npos);
  CHECK(run({"solve", "--config", kConfigs + "/rod.json", "--kappa", "0", "--omega", "0.5",
             "--nx", "7"})
            .exit_code == 1);
  CHECK(run({"modes", "--config", kConfigs + "/rod.json", "--window", "0.45:1.2"}).exit_code == 4);
}

TEST_CASE("solve and sweep") {
  TempDir tmp;
  const CommandOutcome s = run({"solve", "--config", kConfigs + "/homogeneous.json", "--kappa",
                                "0.1", "--omega", "0.4", "--nx", "16", "--nz", "16", "--out",
                                tmp / "s.json"});
  REQUIRE(s.exit_code == 0);
  const std::string text = slurp(tmp / "s.json");
  const auto body = nlohmann::json::parse(text.substr(text.find('\n') + 1));
  CHECK(body["T"][0].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(body["R"][0].get<double>()) < 1e-8);

  const std::vector<std::string> sweep{"sweep", "--config", kConfigs + "/rod.json", "--kappa",
                                       "0,0.02", "--omega", "0.3:0.6:7", "--nx", "16", "--nz",
                                       "16", "--out", tmp / "a.csv", "--threads", "1"};
  REQUIRE(run(sweep).exit_code == 0);
  auto parallel = sweep;
  parallel[parallel.size() - 3] = tmp / "b.csv";
  parallel.back() = "3";
  REQUIRE(run(parallel).exit_code == 0);
  CHECK(slurp(tmp / "a.csv") == slurp(tmp / "b.csv"));
  CHECK(slurp(tmp / "a.csv").find("kappa,omega,re_R,im_R,re_T,im_T,transmittance,energy_defect") !=
        std::string::npos);
}

TEST_CASE("validate a structure config") {
  const CommandOutcome v = run({"validate", "--config", kConfigs + "/rod.json"});
  CHECK(v.exit_code == 0);
  CHECK(v.log.find("z_symmetric=true") != std::string::npos);
  CHECK(run({"validate"}).exit_code == 1);
}
