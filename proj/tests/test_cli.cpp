#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "catch_amalgamated.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path d = [] {
    fs::path p = fs::temp_directory_path() / ("invgauss_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return d;
}

int run(const std::string& args, const std::string& log = "log.txt") {
  const std::string cmd = std::string(INVGAUSS_CLI_PATH) + " " + args + " > " + (workdir() / log).string() + " 2>&1";
  const int s = std::system(cmd.c_str());
  return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string out(const std::string& name) { return (workdir() / name).string(); }

}  // namespace

TEST_CASE("verify runs one suite and reports the mutation") {
  CHECK(run("verify --suite lemmaprel --out " + out("v1")) == 0);
  CHECK(slurp(workdir() / "log.txt").find("PASS lemmaprel") != std::string::npos);
  const std::string csv = slurp(workdir() / "v1" / "verify.csv");
  CHECK(csv.rfind("suite,case,expected_ref,observed,tolerance,pass\n", 0) == 0);
  CHECK(run("verify --suite lemmaprel --inject-eta-sign-error --out " + out("v2")) == 2);
  CHECK(slurp(workdir() / "log.txt").find("first failing suite: lemmaprel") != std::string::npos);
  CHECK(run("verify --suite no-such-suite --out " + out("v3")) == 1);
}

TEST_CASE("verify writes the JSON report schema") {
  REQUIRE(run("verify --suite adm --format json --out " + out("vj")) == 0);
  const auto j = nlohmann::json::parse(slurp(workdir() / "vj" / "verify.json"));
  CHECK(j["schema_version"] == "1");
  REQUIRE(j["records"].size() > 0);
  for (const auto& r : j["records"])
    for (const char* k : {"suite", "case", "expected_ref", "observed", "tolerance", "pass"}) CHECK(r.contains(k));
}

TEST_CASE("table single cell") {
  REQUIRE(run("table --lambda 1 --mu 1 --operator riesz --space X1 --format json --out " + out("t1")) == 0);
  const auto j = nlohmann::json::parse(slurp(workdir() / "t1" / "table.json"));
  CHECK(j["schema_version"] == "1");
  REQUIRE(j["cells"].size() == 1);
  CHECK(j["cells"][0]["computed"] == "Bounded");
  CHECK(j["cells"][0]["note"].get<std::string>().find("surrogate") != std::string::npos);
  CHECK(fs::exists(workdir() / "t1" / "table.csv"));
  CHECK(run("table --lambda 1,x --out " + out("t2")) == 1);
}

TEST_CASE("asymptotics writes CSV and SVG and rejects empty ranges") {
  REQUIRE(run("asymptotics --dim 1 --rho-lo 20 --rho-hi 80 --rho-count 3 --out " + out("a1")) == 0);
  const std::string csv = slurp(workdir() / "a1" / "asymptotics.csv");
  CHECK(csv.rfind("rho,probe,compensated,status\n", 0) == 0);
  const std::string svg = slurp(workdir() / "a1" / "asymptotics.svg");
  CHECK(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0) == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("href") == std::string::npos);
  CHECK(run("asymptotics --rho-lo 50 --rho-hi 50 --out " + out("a2")) == 1);
  CHECK(slurp(workdir() / "log.txt").find("usage error") != std::string::npos);
  CHECK(run("asymptotics --rho-lo 80 --rho-hi 50 --out " + out("a3")) == 1);
}

TEST_CASE("identical seeds give byte-identical reports") {
  REQUIRE(run("scan --samples 200 --format json --out " + out("s1")) == 0);
  REQUIRE(run("scan --samples 200 --format json --out " + out("s2") + " --threads 3") == 0);
  CHECK(slurp(workdir() / "s1" / "scan.json") == slurp(workdir() / "s2" / "scan.json"));
  REQUIRE(run("scan --samples 200 --seed 7 --format json --out " + out("s3")) == 0);
  CHECK(slurp(workdir() / "s1" / "scan.json") != slurp(workdir() / "s3" / "scan.json"));
}

TEST_CASE("weaktype is one-dimensional") {
  CHECK(run("weaktype --operator riesz1 --out " + out("w1")) == 0);
  CHECK(fs::exists(workdir() / "w1" / "weaktype.csv"));
  CHECK(run("weaktype --dim 2 --out " + out("w2")) == 1);
}

TEST_CASE("bad arguments are usage errors") {
  CHECK(run("") == 1);
  CHECK(run("table --format xml") == 1);
  CHECK(run("scan --kernel nope --out " + out("s4")) == 1);
}
