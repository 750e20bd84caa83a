#include "thickknot/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <ostream>

#include "thickknot/constructions.hpp"
#include "thickknot/diagnostics.hpp"
#include "thickknot/errors.hpp"
#include "thickknot/io.hpp"
#include "thickknot/mesh.hpp"
#include "thickknot/thickness.hpp"

namespace thickknot {

using nlohmann::json;

namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json vec(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json report_json(const GeometricReport& r) {
  return {{"length", number(r.length)},
          {"max_curvature", number(r.max_curvature)},
          {"r2", number(r.r2)},
          {"thickness", number(r.thickness)},
          {"diameter", number(r.diameter)}};
}

IndexRange parse_range(const std::string& text, std::size_t n) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--long-arc", "expected A:B");
  std::size_t a = 0, b = 0;
  try {
    a = std::stoul(text.substr(0, colon));
    b = std::stoul(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--long-arc", "expected two vertex indices A:B");
  }
  if (a >= n || b >= n) throw Error(ErrorCode::InvalidArgument, "long arc range outside the curve");
  return {a, b};
}

Plane parse_plane(const std::vector<double>& v) {
  const Vec3 normal{v[3], v[4], v[5]};
  if (!(norm(normal) > 0.0)) throw Error(ErrorCode::InvalidArgument, "plane normal is zero");
  return {{v[0], v[1], v[2]}, normalized(normal)};
}

json aperture_json(const ApertureTriple& a) {
  return {{"plane", {{"point", vec(a.plane.point)}, {"normal", vec(a.plane.normal)}}},
          {"passage", vec(a.passage)},
          {"tip", vec(a.tip)},
          {"cone_angle", a.cone_angle},
          {"disk_diameter", a.disk_diameter},
          {"disk_area", a.disk_area},
          {"near_contact_area", a.near_contact_area},
          {"grid_spacing", a.grid_spacing},
          {"contour_points", a.contour.size()},
          {"limitation", a.limitation}};
}

struct Options {
  std::uint64_t seed = 0;
  // construct
  std::string kind;
  std::size_t copies = 1;
  double radius = 1.0;
  double tube = -1.0;
  std::size_t points = 0;
  double wall_gap = 12.0;
  std::string strands_prefix;
  // shared file arguments
  std::string input, input2, out, trace;
  // tighten
  double tau = 2.0;
  int max_iters = 20000;
  double rate = 0.9995;
  std::vector<double> walls;
  int sample_every = 50;
  // thickness
  std::optional<double> member_tau;
  // diagnose
  std::string long_arc, classify_arc_range;
  std::vector<double> plane;
  // probe
  std::string probe_kind;
  int attempts = 100;
  // export-mesh
  int segments = 16;
};

void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

int cmd_construct(const Options& o, std::ostream& out) {
  json j{{"command", "construct"}, {"kind", o.kind}};
  DiscreteCurve curve;
  if (o.kind == "circle") {
    curve = round_circle(o.radius, o.points ? o.points : 512, o.tube >= 0.0 ? o.tube : o.radius);
  } else if (o.kind == "overhand") {
    curve = open_overhand(o.wall_gap, o.points ? o.points : 640);
    curve.tube_radius = 1.0;
  } else {
    BuildOptions b;
    b.wall_gap = o.wall_gap;
    if (o.points) b.core_points = o.points;
    b.seed = o.seed;
    if (o.kind == "k0") {
      const KnotBuild k0 = build_K0(b);
      curve = k0.curve;
      j["notes"] = k0.notes;
      j["caps"] = {{"top", to_string(k0.capped.top.word)}, {"bottom", to_string(k0.capped.bottom.word)}};
      j["cap_ranges"] = {{"top", {k0.capped.top_begin, k0.capped.top_end}},
                         {"bottom", {k0.capped.bottom_begin, k0.capped.bottom_end}}};
      if (!o.strands_prefix.empty()) {
        write_curve(o.strands_prefix + ".a.curve", k0.doubled.components[0]);
        write_curve(o.strands_prefix + ".b.curve", k0.doubled.components[1]);
      }
    } else {
      const StackBuild kn = build_Kn(o.copies, b);
      curve = kn.curve;
      j["copies"] = o.copies;
      j["notes"] = kn.notes;
      j["predicted_length"] = static_cast<double>(o.copies) * kn.module_length +
                              static_cast<double>(o.copies - 1) * kn.joiner_length + kn.cap_length;
    }
    j["unknot"] = to_string(unconstrained_unknot_check(curve, o.seed).verdict);
  }
  j["points"] = curve.size();
  j["closed"] = curve.closed;
  j["tube_radius"] = curve.tube_radius;
  j["report"] = report_json(geometric_report(curve));
  if (!o.out.empty()) {
    write_curve(o.out, curve);
    j["out"] = o.out;
  }
  emit(out, j);
  return kExitOk;
}

int cmd_tighten(const Options& o, std::ostream& out) {
  const DiscreteCurve curve = read_curve(o.input);
  TightenConfig cfg;
  cfg.target_thickness = o.tau;
  cfg.max_iters = o.max_iters;
  cfg.shrink_rate = o.rate;
  cfg.seed = o.seed;
  cfg.sample_every = o.sample_every;
  IsotopyTrace trace;
  trace.metadata = {{"command", "tighten"},
                    {"tau", json(o.tau).dump()},
                    {"rate", json(o.rate).dump()},
                    {"seed", std::to_string(o.seed)},
                    {"source", o.input}};
  TightenObserver observer;
  if (!o.trace.empty()) {
    observer = [&](const TightenSample& s) {
      TraceFrame f;
      f.curve = s.bundle->components.front();
      f.report = geometric_report(f.curve);
      f.iteration = s.iteration;
      trace.frames.push_back(std::move(f));
    };
  }
  TightenResult result;
  if (curve.closed) {
    result = tighten(curve, cfg, observer);
  } else {
    WallPlanes walls{curve.points.front().z, curve.points.back().z};
    if (!o.walls.empty()) walls = {o.walls[0], o.walls[1]};
    cfg.walls = walls;
    result = tighten_open(curve, cfg, observer);
  }
  json j{{"command", "tighten"},
         {"tau", o.tau},
         {"iterations", result.iterations},
         {"converged", result.converged},
         {"max_penetration", result.max_penetration},
         {"report", report_json(result.report)}};
  if (!o.out.empty()) {
    write_curve(o.out, result.final_curve);
    j["out"] = o.out;
  }
  if (!o.trace.empty()) {
    write_trace(o.trace, trace);
    j["trace"] = o.trace;
    j["trace_frames"] = trace.frames.size();
  }
  emit(out, j);
  return kExitOk;
}

int cmd_cap(const Options& o, std::ostream& out) {
  CurveBundle core;
  core.components = {read_curve(o.input), read_curve(o.input2)};
  const double r = o.tube >= 0.0 ? o.tube : 0.5;
  const CappedCurve capped = close_open_curve(core, cap_junctions(core), r);
  DiscreteCurve curve = capped.curve;
  curve.tube_radius = r;
  json j{{"command", "cap"},
         {"top", {{"word", to_string(capped.top.word)}, {"length", capped.top.total_length}}},
         {"bottom", {{"word", to_string(capped.bottom.word)}, {"length", capped.bottom.total_length}}},
         {"min_cap_core_distance", capped.min_cap_core_distance},
         {"points", curve.size()},
         {"report", report_json(geometric_report(curve))}};
  if (!o.out.empty()) {
    write_curve(o.out, curve);
    j["out"] = o.out;
  }
  emit(out, j);
  return kExitOk;
}

int cmd_thickness(const Options& o, std::ostream& out) {
  const DiscreteCurve curve = read_curve(o.input);
  const GeometricReport report = geometric_report(curve);
  json j{{"command", "thickness"}, {"points", curve.size()}, {"closed", curve.closed}, {"report", report_json(report)}};
  j["thickness"] = report.thickness;
  if (o.member_tau) {
    if (!curve.closed) throw Error(ErrorCode::NotAKnot, "membership is defined for closed curves only");
    const MembershipVerdict v = membership_from_report(report, *o.member_tau);
    j["membership"] = {{"tau", v.tau}, {"member", v.is_member}, {"reasons", v.reasons},
                       {"unknottedness", v.unknottedness}};
  }
  emit(out, j);
  return kExitOk;
}

int cmd_diagnose(const Options& o, std::ostream& out) {
  const DiscreteCurve curve = read_curve(o.input);
  json j{{"command", "diagnose"}};
  if (!o.classify_arc_range.empty()) {
    const IndexRange r = parse_range(o.classify_arc_range, curve.size());
    DiscreteCurve arc;
    for (std::size_t i = r.begin;; i = (i + 1) % curve.size()) {
      arc.points.push_back(curve.points[i]);
      if (i == r.end) break;
    }
    const ArcClass c = classify_arc(arc, ball_for_arc(arc));
    j["arc"] = {{"range", {r.begin, r.end}}, {"kind", to_string(c.kind)}, {"diameter", diameter(arc)},
                {"max_height_above", number(c.max_height_above)}};
  }
  if (o.long_arc.empty() && !o.plane.empty()) throw CLI::ValidationError("--plane", "needs --long-arc");
  std::optional<ApertureHint> hint;
  if (!o.long_arc.empty()) {
    const IndexRange r = parse_range(o.long_arc, curve.size());
    if (!o.plane.empty()) {
      hint = ApertureHint{r, parse_plane(o.plane)};
    } else if (const auto p = find_aperture_plane(curve, r)) {
      hint = ApertureHint{r, *p};
    }
  } else if (o.classify_arc_range.empty() || !o.trace.empty()) {
    hint = find_aperture_hint(curve);
  }
  if (hint) {
    j["long_arc"] = {hint->long_arc.begin, hint->long_arc.end};
    j["aperture"] = aperture_json(extract_aperture(curve, hint->long_arc, hint->plane));
  } else if (o.classify_arc_range.empty() || !o.long_arc.empty()) {
    throw Error(ErrorCode::NoAperture, "no plane with a bounded aperture was found");
  }
  if (!o.trace.empty() && hint) {
    const PersistenceReport p = trace_diagnostics(read_trace(o.trace), hint->long_arc, hint->plane);
    j["persistence"] = {{"frames", p.frames},
                        {"lost_frames", p.lost_frames},
                        {"min_disk_diameter", p.min_disk_diameter},
                        {"min_near_contact_area", p.min_near_contact_area},
                        {"min_cone_angle", p.min_cone_angle}};
  }
  emit(out, j);
  return kExitOk;
}

int cmd_probe(const Options& o, std::ostream& out) {
  const ProbeReport p = o.probe_kind == "ball" ? probe_ball_lemma(o.attempts, o.seed)
                                               : probe_cylinder_lemma(o.attempts, o.seed);
  json j{{"command", "probe"},
         {"probe", o.probe_kind},
         {"attempts", p.attempts},
         {"seed", o.seed},
         {"feasible", p.feasible},
         {"below_bound", p.below_bound},
         {"best_max_curvature", number(p.best_max_curvature)}};
  if (!o.out.empty() && p.feasible > 0) {
    write_curve(o.out, p.candidate);
    j["out"] = o.out;
  }
  emit(out, j);
  return kExitOk;
}

int cmd_classify(const Options& o, std::ostream& out) {
  const DiscreteCurve curve = read_curve(o.input);
  json labels = json::array();
  for (const auto& l : classify_segments(curve)) {
    labels.push_back({{"begin", l.begin}, {"end", l.end}, {"kind", to_string(l.kind)}, {"fit_residual", l.fit_residual}});
  }
  emit(out, {{"command", "classify"}, {"points", curve.size()}, {"segments", std::move(labels)}});
  return kExitOk;
}

int cmd_export_mesh(const Options& o, std::ostream& out) {
  DiscreteCurve curve = read_curve(o.input);
  if (o.tube >= 0.0) curve.tube_radius = o.tube;
  const TriangleMesh mesh = tube_mesh(curve, o.segments);
  write_text_atomic(o.out, to_obj(mesh));
  emit(out, {{"command", "export-mesh"},
             {"out", o.out},
             {"vertices", mesh.vertices.size()},
             {"triangles", mesh.triangles.size()},
             {"euler_characteristic", euler_characteristic(mesh)},
             {"watertight", is_watertight(mesh)}});
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curvature-constrained thick knots: construction, tightening and diagnostics", "thickknot"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();

  auto* construct = app.add_subcommand("construct", "Build a circle, the overhand seed, K0 or a stack Kn");
  construct->add_option("kind", o.kind)->required()->check(CLI::IsMember({"circle", "overhand", "k0", "kn"}));
  construct->add_option("--n", o.copies, "Copies in the stack (kn)")->check(CLI::PositiveNumber);
  construct->add_option("--radius", o.radius, "Circle radius")->check(CLI::PositiveNumber);
  construct->add_option("--tube", o.tube, "Tube radius (circle; default: the circle radius)");
  construct->add_option("--points", o.points, "Vertex count (circle, overhand core)");
  construct->add_option("--wall-gap", o.wall_gap, "Distance between the walls")->check(CLI::PositiveNumber);
  construct->add_option("--strands", o.strands_prefix, "Also write K0's strands to PREFIX.a.curve, PREFIX.b.curve");
  construct->add_option("--out", o.out, "Curve file to write");

  auto* tight = app.add_subcommand("tighten", "Shrink a curve while keeping it feasible");
  tight->add_option("curve", o.input)->required();
  tight->add_option("--tau", o.tau, "Target thickness")->check(CLI::Range(0.0, 2.0));
  tight->add_option("--max-iters", o.max_iters)->check(CLI::PositiveNumber);
  tight->add_option("--rate", o.rate, "Shrink factor per iteration")->check(CLI::Range(0.5, 1.0));
  tight->add_option("--walls", o.walls, "z_low,z_high for open curves")->delimiter(',')->expected(2);
  tight->add_option("--sample-every", o.sample_every)->check(CLI::PositiveNumber);
  tight->add_option("--out", o.out, "Curve file to write");
  tight->add_option("--trace", o.trace, "Trace file (.jsonl) of the sampled frames");

  auto* cap = app.add_subcommand("cap", "Close two strands with Dubins caps");
  cap->add_option("strand_a", o.input)->required();
  cap->add_option("strand_b", o.input2)->required();
  cap->add_option("--tube", o.tube, "Tube radius of the closed curve (default 0.5)");
  cap->add_option("--out", o.out, "Curve file to write");

  auto* thick = app.add_subcommand("thickness", "Thickness report and optional membership check");
  thick->add_option("curve", o.input)->required();
  thick->add_option("--tau", o.member_tau, "Check membership at this thickness")->check(CLI::Range(0.0, 2.0));

  auto* diag = app.add_subcommand("diagnose", "Aperture of a long arc and its persistence along a trace");
  diag->add_option("curve", o.input)->required();
  diag->add_option("--long-arc", o.long_arc, "Vertex range A:B of the long arc");
  diag->add_option("--plane", o.plane, "px,py,pz,nx,ny,nz")->delimiter(',')->expected(6);
  diag->add_option("--trace", o.trace, "Trace file (.jsonl) to follow the aperture along");
  diag->add_option("--classify-arc", o.classify_arc_range, "Classify the vertex range A:B as short or long");

  auto* probe = app.add_subcommand("probe", "Search for counterexamples to the ball or cylinder obstruction");
  probe->add_option("which", o.probe_kind)->required()->check(CLI::IsMember({"ball", "cylinder"}));
  probe->add_option("--attempts", o.attempts)->check(CLI::PositiveNumber);
  probe->add_option("--out", o.out, "Write the best candidate arc");

  auto* classify = app.add_subcommand("classify", "Label stretches as unit arcs, straights or helices");
  classify->add_option("curve", o.input)->required();

  auto* mesh = app.add_subcommand("export-mesh", "Write the tube as an OBJ triangle mesh");
  mesh->add_option("curve", o.input)->required();
  mesh->add_option("--segments", o.segments, "Vertices around each ring")->check(CLI::Range(3, 4096));
  mesh->add_option("--tube", o.tube, "Override the tube radius");
  mesh->add_option("--out", o.out, "OBJ file to write")->required();

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());  // CLI11 consumes a reversed vector
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*construct) return cmd_construct(o, out);
    if (*tight) return cmd_tighten(o, out);
    if (*cap) return cmd_cap(o, out);
    if (*thick) return cmd_thickness(o, out);
    if (*diag) return cmd_diagnose(o, out);
    if (*probe) return cmd_probe(o, out);
    if (*classify) return cmd_classify(o, out);
    if (*mesh) return cmd_export_mesh(o, out);
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what();
    if (!e.stage().empty()) err << " (stage " << e.stage() << ")";
    err << "\n";
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  return kExitUsage;
}

}  // namespace thickknot
