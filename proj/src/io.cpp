#include "thickknot/io.hpp"

#include <unistd.h>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "thickknot/errors.hpp"
#include "thickknot/thickness.hpp"

namespace thickknot {

using nlohmann::json;

namespace {

// JSON has no infinity; an absent bound (e.g. r2 of a curve without
// doubly-critical pairs) is stored as null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::Format, std::string("missing field '") + key + "'");
  if (it->is_null()) return std::numeric_limits<double>::infinity();
  if (!it->is_number()) throw Error(ErrorCode::Format, std::string("field '") + key + "' is not a number");
  return it->get<double>();
}

void check_version(const json& j, const char* kind) {
  if (!j.is_object()) throw Error(ErrorCode::Format, "expected a JSON object");
  const auto v = j.find("format_version");
  if (v == j.end() || !v->is_number_integer()) throw Error(ErrorCode::Format, "missing format_version");
  if (v->get<int>() != kFormatVersion) {
    throw Error(ErrorCode::Format, "unsupported format_version " + std::to_string(v->get<int>()));
  }
  const auto k = j.find("kind");
  if (k == j.end() || *k != kind) throw Error(ErrorCode::Format, std::string("expected a '") + kind + "' record");
}

json curve_json(const DiscreteCurve& c) {
  json pts = json::array();
  for (const auto& p : c.points) pts.push_back({p.x, p.y, p.z});
  return {{"closed", c.closed}, {"tube_radius", c.tube_radius}, {"points", std::move(pts)}};
}

DiscreteCurve curve_of(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Format, "curve must be an object");
  DiscreteCurve c;
  const auto closed = j.find("closed");
  if (closed == j.end() || !closed->is_boolean()) throw Error(ErrorCode::Format, "missing boolean 'closed'");
  c.closed = closed->get<bool>();
  c.tube_radius = number_from(j, "tube_radius");
  const auto pts = j.find("points");
  if (pts == j.end() || !pts->is_array()) throw Error(ErrorCode::Format, "missing 'points' array");
  c.points.reserve(pts->size());
  for (const auto& p : *pts) {
    if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number()) {
      throw Error(ErrorCode::Format, "points must be [x, y, z] number triples");
    }
    c.points.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
  }
  validate(c);
  return c;
}

json report_json(const GeometricReport& r) {
  return {{"length", number(r.length)},
          {"max_curvature", number(r.max_curvature)},
          {"r2", number(r.r2)},
          {"thickness", number(r.thickness)},
          {"diameter", number(r.diameter)}};
}

GeometricReport report_of(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Format, "report must be an object");
  GeometricReport r;
  r.length = number_from(j, "length");
  r.max_curvature = number_from(j, "max_curvature");
  r.r2 = number_from(j, "r2");
  r.thickness = number_from(j, "thickness");
  r.diameter = number_from(j, "diameter");
  return r;
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Format, std::string("invalid JSON: ") + e.what());
  }
}

bool close_enough(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

std::string curve_to_json(const DiscreteCurve& curve) {
  json j = curve_json(curve);
  j["format_version"] = kFormatVersion;
  j["kind"] = "curve";
  return j.dump(1) + "\n";
}

DiscreteCurve curve_from_json(std::string_view text) {
  const json j = parse(text);
  check_version(j, "curve");
  return curve_of(j);
}

void write_curve(const std::filesystem::path& path, const DiscreteCurve& curve) {
  write_text_atomic(path, curve_to_json(curve));
}

DiscreteCurve read_curve(const std::filesystem::path& path) { return curve_from_json(read_text(path)); }

std::string trace_to_jsonl(const IsotopyTrace& trace) {
  validate(trace);
  std::string out;
  json header{{"format_version", kFormatVersion}, {"kind", "trace"}, {"frames", trace.frames.size()},
              {"metadata", trace.metadata}};
  out += header.dump() + "\n";
  for (const auto& f : trace.frames) {
    json line{{"iteration", f.iteration}, {"curve", curve_json(f.curve)}, {"report", report_json(f.report)}};
    out += line.dump() + "\n";
  }
  return out;
}

IsotopyTrace trace_from_jsonl(std::string_view text, bool spot_check) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Format, "empty trace file");
  const json header = parse(line);
  check_version(header, "trace");
  IsotopyTrace trace;
  if (const auto m = header.find("metadata"); m != header.end()) {
    if (!m->is_object()) throw Error(ErrorCode::Format, "metadata must be an object");
    for (const auto& [k, v] : m->items()) {
      if (!v.is_string()) throw Error(ErrorCode::Format, "metadata values must be strings");
      trace.metadata[k] = v.get<std::string>();
    }
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = parse(line);
    if (!j.is_object() || !j.contains("curve") || !j.contains("report")) {
      throw Error(ErrorCode::Format, "frame record needs 'curve' and 'report'");
    }
    TraceFrame f;
    f.iteration = j.value("iteration", 0);
    f.curve = curve_of(j["curve"]);
    f.report = report_of(j["report"]);
    trace.frames.push_back(std::move(f));
  }
  const auto declared = header.find("frames");
  if (declared != header.end() && declared->is_number_unsigned() &&
      declared->get<std::size_t>() != trace.frames.size()) {
    throw Error(ErrorCode::Format, "trace declares " + std::to_string(declared->get<std::size_t>()) +
                                       " frames but holds " + std::to_string(trace.frames.size()));
  }
  validate(trace);
  if (spot_check) {
    for (std::size_t i = 0; i < trace.frames.size(); i += 10) {
      const auto& f = trace.frames[i];
      const GeometricReport fresh = geometric_report(f.curve);
      if (!close_enough(fresh.length, f.report.length) || !close_enough(fresh.max_curvature, f.report.max_curvature) ||
          !close_enough(fresh.r2, f.report.r2) || !close_enough(fresh.thickness, f.report.thickness) ||
          !close_enough(fresh.diameter, f.report.diameter)) {
        throw Error(ErrorCode::Format, "report of frame " + std::to_string(i) + " does not match its curve");
      }
    }
  }
  return trace;
}

void write_trace(const std::filesystem::path& path, const IsotopyTrace& trace) {
  write_text_atomic(path, trace_to_jsonl(trace));
}

IsotopyTrace read_trace(const std::filesystem::path& path, bool spot_check) {
  return trace_from_jsonl(read_text(path), spot_check);
}

void write_text_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorCode::InvalidArgument, "failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::InvalidArgument, "cannot move output into place at " + path.string());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace thickknot
