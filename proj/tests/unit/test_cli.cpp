#include <doctest.h>

#include <filesystem>
#include <json.hpp>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "thickknot/cli.hpp"
#include "thickknot/io.hpp"

using namespace thickknot;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "thickknot");
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("thickknot_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ignored;
    fs::remove_all(path, ignored);
  }
  std::string file(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("construct, thickness and classify a circle") {
  TempDir dir;
  const auto c = dir.file("c.curve");
  const auto made = run({"construct", "circle", "--radius", "1", "--points", "256", "--out", c});
  REQUIRE(made.code == kExitOk);
  CHECK(json::parse(made.out)["points"] == 256);

  const auto t = run({"thickness", c, "--tau", "2"});
  REQUIRE(t.code == kExitOk);
  const auto j = json::parse(t.out);
  CHECK(j["thickness"].get<double>() == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(j["membership"]["member"] == true);

  const auto labels = json::parse(run({"classify", c}).out)["segments"];
  REQUIRE(labels.size() == 1);
  CHECK(labels[0]["kind"] == "unit_arc");
}

TEST_CASE("exit codes") {
  TempDir dir;
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"thickness"}).code == kExitUsage);
  const auto bad_flag = run({"thickness", "x.curve", "--bogus"});
  CHECK(bad_flag.code == kExitUsage);
  CHECK(bad_flag.err.find("usage error") != std::string::npos);
  CHECK(run({"construct", "pentagon"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);

  const auto missing = run({"thickness", dir.file("missing.curve")});
  CHECK(missing.code == kExitDomainError);
  CHECK(missing.err.find("error:") != std::string::npos);

  // Membership is only defined for closed curves.
  const auto seg = dir.file("s.curve");
  write_curve(seg, fixtures::segment({0, 0, 0}, {3, 0, 0}, 31));
  CHECK(run({"thickness", seg, "--tau", "1"}).code == kExitDomainError);
  CHECK(run({"thickness", seg}).code == kExitOk);

  // A plane without a long arc is incomplete.
  const auto c = dir.file("c.curve");
  REQUIRE(run({"construct", "circle", "--radius", "3", "--tube", "0.5", "--out", c}).code == kExitOk);
  CHECK(run({"diagnose", c, "--plane", "0,0,0,0,0,1"}).code == kExitUsage);
  CHECK(run({"diagnose", c}).code == kExitDomainError);
}

TEST_CASE("probe output is reproducible") {
  TempDir dir;
  const auto a = run({"--seed", "0", "probe", "cylinder", "--attempts", "2", "--out", dir.file("a.curve")});
  const auto b = run({"--seed", "0", "probe", "cylinder", "--attempts", "2", "--out", dir.file("b.curve")});
  REQUIRE(a.code == kExitOk);
  REQUIRE(b.code == kExitOk);
  CHECK(json::parse(a.out)["best_max_curvature"] == json::parse(b.out)["best_max_curvature"]);
  CHECK(json::parse(a.out)["best_max_curvature"].get<double>() >= 0.99);
  CHECK(read_text(dir.file("a.curve")) == read_text(dir.file("b.curve")));
}

TEST_CASE("export mesh") {
  TempDir dir;
  const auto c = dir.file("c.curve");
  write_curve(c, fixtures::circle(2.0, 64, 0.5));
  const auto r = run({"export-mesh", c, "--segments", "8", "--out", dir.file("t.obj")});
  REQUIRE(r.code == kExitOk);
  const auto j = json::parse(r.out);
  CHECK(j["vertices"] == 512);
  CHECK(j["euler_characteristic"] == 0);
  CHECK(j["watertight"] == true);
  CHECK(fs::file_size(dir.file("t.obj")) > 0);
  CHECK(run({"export-mesh", c}).code == kExitUsage);
  write_curve(c, fixtures::circle(2.0, 64));
  CHECK(run({"export-mesh", c, "--out", dir.file("u.obj")}).code == kExitDomainError);
}

TEST_CASE("tighten and cap through the command line") {
  TempDir dir;
  const auto a = dir.file("a.curve"), b = dir.file("b.curve");
  write_curve(a, fixtures::segment({-0.6, 0, 0}, {-0.6, 0, 6}, 61));
  write_curve(b, fixtures::segment({0.6, 0, 0}, {0.6, 0, 6}, 61));
  const auto closed = dir.file("closed.curve");
  const auto r = run({"cap", a, b, "--out", closed});
  REQUIRE(r.code == kExitOk);
  const auto loop = read_curve(closed);
  CHECK(loop.closed);
  CHECK(loop.tube_radius == 0.5);

  const auto t = run({"tighten", closed, "--tau", "1", "--max-iters", "20", "--out", dir.file("t.curve"), "--trace",
                      dir.file("t.jsonl"), "--sample-every", "5"});
  REQUIRE(t.code == kExitOk);
  CHECK(read_trace(dir.file("t.jsonl")).frames.size() >= 1);
  CHECK(fs::exists(dir.file("t.curve")));
}
