#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "cli.hpp"
#include "lagexp/errors.hpp"
#include "lagexp/geom.hpp"
#include "lagexp/io.hpp"

using namespace lagexp;
using namespace lagexp::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const CommandSpec& command(const std::string& name) {
  const auto& all = commands();
  return *std::find_if(all.begin(), all.end(), [&](const CommandSpec& c) { return c.name == name; });
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("lagexp_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("angle literals") {
  CHECK(parse_angle("pi") == kPi);
  CHECK(parse_angle(" -pi/2 ") == -kPi / 2);
  CHECK(parse_angle("2pi/3") == 2 * kPi / 3);
  CHECK(parse_angle("2*pi/3") == 2 * kPi / 3);
  CHECK(parse_angle("0.5*pi") == 0.5 * kPi);
  CHECK(parse_angle("+1.25") == 1.25);
  CHECK(parse_angle("1e-3") == 1e-3);
  CHECK(parse_angles("0, 2pi/3") == std::vector<double>{0.0, 2 * kPi / 3});
  for (const char* bad : {"", "pie", "pi/0", "2pi3", "x", "1.5.2", "nan"}) {
    CHECK_THROWS_AS(parse_angle(bad), DomainError);
  }
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("defaults, then the config file, then flags") {
  const auto& solve = command("solve");
  const json file{{"rays", json::array({0, "pi"})}, {"step", 0.02}, {"tolerance", "1e-9"}};
  const auto c = resolve(solve, file, {{"step", "0.005"}});
  CHECK(c["rays"][1].get<double>() == kPi);
  CHECK(c["step"].get<double>() == 0.005);
  CHECK(c["tolerance"].get<double>() == 1e-9);
  CHECK(c["truncation_radius"].get<double>() == 6.0);
  CHECK(c["command"] == "solve");

  CHECK_THROWS_AS(resolve(solve, json::object(), {}), DomainError);
  CHECK_THROWS_AS(resolve(solve, json{{"bogus", 1}}, {{"rays", "0,pi"}}), DomainError);
  CHECK_THROWS_AS(resolve(solve, json::array(), {{"rays", "0,pi"}}), DomainError);
  CHECK_THROWS_AS(resolve(solve, {}, {{"rays", "0,pi"}, {"tolerance", "0"}}), DomainError);
  CHECK_THROWS_AS(resolve(solve, {}, {{"rays", "0,pi"}, {"step", "-0.01"}}), DomainError);

  const auto d = resolve(command("density"), {}, {{"grid", "2, 3,1"}, {"profile", "x.csv"}});
  CHECK(d["grid"] == json::array({2, 3, 1}));
  CHECK_THROWS_AS(resolve(command("density"), {}, {{"grid", "2,3.5,1"}}), DomainError);
  CHECK(resolve(command("check-all"), {}, {})["criteria"] == json::array());
  CHECK(resolve(command("check-all"), {}, {{"criteria", "1,8"}})["criteria"] == json::array({1, 8}));
}

TEST_CASE("solve is deterministic and embeds its configuration") {
  const auto dir = scratch("solve");
  const auto config = resolve(command("solve"), {}, {{"rays", "0,2pi/3"}, {"out", dir.string()}});
  REQUIRE(execute(command("solve"), config) == kExitPass);
  const auto first = read_text(dir / "profile.json");
  REQUIRE(execute(command("solve"), config) == kExitPass);
  CHECK(read_text(dir / "profile.json") == first);

  const auto j = parse_json(first);
  CHECK(j["config"] == config);
  CHECK(j["input_hash"] == sha256_hex(dump_json(config)));
  CHECK(j["profile_csv_sha256"] == sha256_hex(read_text(dir / "profile.csv")));
  CHECK(j["residual"].get<double>() < j["residual_threshold"].get<double>());
  CHECK(parse_json(read_text(dir / "decay.json"))["passed"] == true);

  // The profile feeds the other commands; its contents enter their input hash.
  const auto ddir = scratch("decay");
  const auto dc = resolve(command("decay-fit"), {},
                          {{"profile", (dir / "profile.csv").string()}, {"out", ddir.string()}});
  CHECK(execute(command("decay-fit"), dc) == kExitPass);
  const auto dj = parse_json(read_text(ddir / "decay.json"));
  CHECK(dj["input_hash"] == sha256_hex(dump_json(dc) + read_text(dir / "profile.csv")));
  CHECK(dj["b"].get<double>() >= 0.23);
  fs::remove_all(dir);
  fs::remove_all(ddir);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  auto run = [&](const std::string& name, std::map<std::string, std::string> flags) {
    flags["out"] = dir.string();
    return execute(command(name), resolve(command(name), {}, flags));
  };
  CHECK(run("solve", {{"rays", "0,pi/2"}}) == kExitFailure);
  CHECK(run("solve", {{"rays", "0,0"}}) == kExitFailure);
  CHECK(run("spectrum", {{"profile", (dir / "missing.csv").string()}}) == kExitIo);
  atomic_write(dir / "bad.csv", "s,r,phi,psi\n0,1,x,0\n");
  CHECK(run("decay-fit", {{"profile", (dir / "bad.csv").string()}}) == kExitIo);
  CHECK(run("density", {}) == kExitFailure);

  // A plane profile: density 1 at the origin, no decay to fit.
  CHECK(run("solve", {{"rays", "0,pi"}}) == kExitPass);
  CHECK(run("density", {{"profile", (dir / "profile.csv").string()}, {"grid", "2,2,1"}}) == kExitPass);
  const auto dj = parse_json(read_text(dir / "density.json"));
  CHECK(dj["theta_origin"]["theta"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(run("decay-fit", {{"profile", (dir / "profile.csv").string()}}) == kExitFailure);
  fs::remove_all(dir);
}
