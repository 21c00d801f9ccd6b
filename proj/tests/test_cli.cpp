#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commands.hpp"

using metallab::cli::run_cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "metallic-lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return std::string(METALLAB_TEST_DATA) + "/" + name; }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("analyze") {
  const Run e1 = cli({"analyze", "example1"});
  CHECK(e1.code == 0);
  CHECK(e1.out.find("proper hemi-slant, theta = 1.150261992 rad") != std::string::npos);
  CHECK(e1.out.find("dims (1,1,0)") != std::string::npos);

  const Run jbar = cli({"analyze", "example1", "--structure", "jbar"});
  CHECK(jbar.code == 0);
  CHECK(jbar.out.find("semi-invariant, theta = 0") != std::string::npos);

  const Run e2 = cli({"analyze", "--builtin", "example2", "--format", "json"});
  REQUIRE(e2.code == 0);
  const auto doc = nlohmann::json::parse(e2.out);
  CHECK(doc["verdict"]["classification"] == "proper hemi-slant");
  CHECK(doc["verdict"]["dims"] == nlohmann::json::array({1, 2, 1}));
  CHECK(doc["verdict"]["cos_theta"].get<double>() == doctest::Approx(0.8310954633).epsilon(1e-9));

  CHECK(cli({"analyze", "paraboloid"}).code == 1);
}

TEST_CASE("verify") {
  const Run all = cli({"verify", "example1", "--checks", "all"});
  CHECK(all.code == 0);
  const Run two = cli({"verify", "example1", "--checks", "E99,E100", "--samples", "500", "--format", "json"});
  REQUIRE(two.code == 0);
  const auto doc = nlohmann::json::parse(two.out);
  REQUIRE(doc["checks"].size() == 2);
  for (const auto& c : doc["checks"]) {
    CHECK(c["samples"] == 500);
    CHECK(c["max_residual"].get<double>() < 1e-10);
  }
  const Run csv = cli({"verify", "--scenario", data("tilted_plane.toml"), "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("check_id,", 0) == 0);
  CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 4);
}

TEST_CASE("input errors exit with 2") {
  const Run broken = cli({"verify", data("broken.toml")});
  CHECK(broken.code == 2);
  CHECK(broken.err.find("line") != std::string::npos);
  CHECK(cli({"verify", data("pattern_mismatch.toml")}).code == 2);
  CHECK(cli({"verify", "example1", "--checks", "E999"}).code == 2);
  CHECK(cli({"verify"}).code == 2);
  CHECK(cli({"verify", "example1", "--builtin", "example2"}).code == 2);
  CHECK(cli({"analyze", "example1", "--format", "yaml"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"analyze", "example1", "--structure", "nope"}).code == 2);
}

TEST_CASE("reports are deterministic") {
  const std::vector<std::string> args = {"verify", "--builtin", "example2", "--checks", "all", "--seed", "7",
                                         "--format", "json"};
  const Run a = cli(args), b = cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const Run c = cli({"verify", "--builtin", "example2", "--checks", "all", "--seed", "8", "--format", "json"});
  CHECK(c.out != a.out);
}

TEST_CASE("seed from the environment") {
  const std::vector<std::string> args = {"verify", "example1", "--checks", "E99", "--format", "json"};
  ::setenv("METALLIC_LAB_SEED", "7", 1);
  const Run env = cli(args);
  ::unsetenv("METALLIC_LAB_SEED");
  const Run flag = cli({"verify", "example1", "--checks", "E99", "--format", "json", "--seed", "7"});
  CHECK(env.out == flag.out);
  CHECK(nlohmann::json::parse(env.out)["seed"] == 7);
  ::setenv("METALLIC_LAB_SEED", "seven", 1);
  CHECK(cli(args).code == 2);
  ::unsetenv("METALLIC_LAB_SEED");
}

TEST_CASE("angle sweep") {
  const Run r = cli({"angle-sweep", "example1", "--var", "t", "--grid", "pi/4:pi/4:1", "--format", "csv"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "t,cos_theta,theta");
  const double cos_theta = std::stod(row.substr(row.find(',') + 1));
  CHECK(cos_theta == doctest::Approx(1 / std::sqrt(6.0)).epsilon(1e-15));

  const Run small = cli({"angle-sweep", "example1", "--var", "t", "--grid", "1e-6:1e-6:1", "--format", "csv"});
  REQUIRE(small.code == 0);
  const std::string line = small.out.substr(small.out.find('\n') + 1);
  CHECK(std::stod(line.substr(line.find(',') + 1)) == doctest::Approx(1.0).epsilon(1e-10));

  const Run e2 = cli({"angle-sweep", "example2", "--var", "t", "--grid", "pi/4:pi/4:1", "--format", "csv"});
  REQUIRE(e2.code == 0);
  const std::string l2 = e2.out.substr(e2.out.find('\n') + 1);
  CHECK(std::stod(l2.substr(l2.find(',') + 1)) == doctest::Approx(0.8310954633).epsilon(1e-9));

  CHECK(cli({"angle-sweep", "example1", "--var", "t", "--grid", "0:3:4"}).code == 2);
  CHECK(cli({"angle-sweep", "example1", "--var", "zz", "--grid", "0:1:2"}).code == 2);
  CHECK(cli({"angle-sweep", "example1", "--var", "t", "--grid", "0:1"}).code == 2);
}

TEST_CASE("builtin list") {
  const Run r = cli({"builtin-list"});
  CHECK(r.code == 0);
  for (auto name : {"example1", "example1-jbar", "example1-golden", "example2", "example2-jbar", "paraboloid"})
    CHECK(r.out.find(name) != std::string::npos);
}

}
