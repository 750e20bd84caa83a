#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "fixtures.hpp"
#include "thickknot/errors.hpp"
#include "thickknot/io.hpp"
#include "thickknot/thickness.hpp"

using namespace thickknot;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("thickknot_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ignored;
    fs::remove_all(path, ignored);
  }
};

DiscreteCurve jittered_circle() {
  auto c = fixtures::circle(1.7, 64, 0.5);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e-3, 1e-3);
  for (auto& p : c.points) p += Vec3{u(rng), u(rng), u(rng)};
  return c;
}

ErrorCode code_of(std::string_view text) {
  try {
    curve_from_json(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("curve json round trip is exact") {
  const auto c = jittered_circle();
  const auto back = curve_from_json(curve_to_json(c));
  CHECK(back.closed == c.closed);
  CHECK(back.tube_radius == c.tube_radius);
  REQUIRE(back.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(back.points[i].x == c.points[i].x);
    CHECK(back.points[i].y == c.points[i].y);
    CHECK(back.points[i].z == c.points[i].z);
  }
  const auto open = fixtures::segment({0, 0, 0}, {1, 2, 3}, 7);
  CHECK_FALSE(curve_from_json(curve_to_json(open)).closed);
}

TEST_CASE("malformed curve files") {
  CHECK(code_of("not json") == ErrorCode::Format);
  CHECK(code_of("[1, 2]") == ErrorCode::Format);
  CHECK(code_of(R"({"kind":"curve","closed":false,"tube_radius":0,"points":[[0,0,0],[1,0,0]]})") ==
        ErrorCode::Format);
  CHECK(code_of(R"({"format_version":2,"kind":"curve","closed":false,"tube_radius":0,"points":[[0,0,0],[1,0,0]]})") ==
        ErrorCode::Format);
  CHECK(code_of(R"({"format_version":1,"kind":"trace","closed":false,"tube_radius":0,"points":[]})") ==
        ErrorCode::Format);
  CHECK(code_of(R"({"format_version":1,"kind":"curve","closed":false,"tube_radius":0,"points":[[0,0],[1,0,0]]})") ==
        ErrorCode::Format);
  CHECK(code_of(R"({"format_version":1,"kind":"curve","closed":"no","tube_radius":0,"points":[]})") ==
        ErrorCode::Format);
  // Well-formed but structurally invalid.
  CHECK(code_of(R"({"format_version":1,"kind":"curve","closed":false,"tube_radius":0,"points":[[0,0,0],[0,0,0]]})") ==
        ErrorCode::DegenerateCurve);
}

TEST_CASE("trace round trip and spot check") {
  IsotopyTrace trace;
  trace.metadata["source"] = "test";
  for (int k = 0; k < 12; ++k) {
    auto c = fixtures::circle(1.0 + 0.05 * k, 48, 0.5);
    trace.frames.push_back({c, geometric_report(c), 10 * k});
  }
  const std::string text = trace_to_jsonl(trace);
  const auto back = trace_from_jsonl(text);
  REQUIRE(back.frames.size() == 12);
  CHECK(back.metadata.at("source") == "test");
  CHECK(back.frames[7].iteration == 70);
  CHECK(back.frames[7].curve.points == trace.frames[7].curve.points);
  CHECK(back.frames[7].report.thickness == trace.frames[7].report.thickness);

  // A report that no longer matches its curve is caught on a checked frame.
  auto tampered = trace;
  tampered.frames[10].report.length += 0.5;
  const std::string bad = trace_to_jsonl(tampered);
  CHECK_THROWS_AS(trace_from_jsonl(bad), Error);
  CHECK_NOTHROW(trace_from_jsonl(bad, false));

  // Frames disagreeing on the tube radius are rejected.
  auto mixed = trace;
  mixed.frames[3].curve.tube_radius = 0.25;
  CHECK_THROWS_AS(trace_to_jsonl(mixed), Error);

  // Truncated file: header promises more frames than it holds.
  const auto cut = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  CHECK_THROWS_AS(trace_from_jsonl(cut), Error);
  CHECK_THROWS_AS(trace_from_jsonl(""), Error);
}

TEST_CASE("files are written atomically") {
  TempDir dir;
  const auto file = dir.path / "c.curve";
  const auto c = jittered_circle();
  write_curve(file, c);
  CHECK(read_curve(file).points == c.points);
  write_curve(file, fixtures::circle(2.0, 16));
  CHECK(read_curve(file).size() == 16);
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++entries;
  CHECK(entries == 1);  // no temporary left behind

  CHECK_THROWS_AS(read_curve(dir.path / "missing.curve"), Error);
  CHECK_THROWS_AS(write_curve(dir.path / "no" / "such" / "dir.curve", c), Error);

  const auto tfile = dir.path / "t.jsonl";
  IsotopyTrace t;
  t.frames.push_back({c, geometric_report(c), 0});
  write_trace(tfile, t);
  CHECK(read_trace(tfile).frames.size() == 1);
}
