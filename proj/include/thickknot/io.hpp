#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "thickknot/curve.hpp"
#include "thickknot/trace.hpp"

namespace thickknot {

inline constexpr int kFormatVersion = 1;

/// `.curve` files: one JSON object with format_version, closed, tube_radius
/// and points as [x, y, z] triples. Doubles are written in shortest
/// round-trip form.
std::string curve_to_json(const DiscreteCurve& curve);
/// Throws Format for malformed input or an unknown format_version, and the
/// usual validation errors for a structurally invalid curve.
DiscreteCurve curve_from_json(std::string_view text);

void write_curve(const std::filesystem::path& path, const DiscreteCurve& curve);
DiscreteCurve read_curve(const std::filesystem::path& path);

/// `.jsonl` traces: a header line with the metadata, then one frame per
/// line (iteration, curve, report).
std::string trace_to_jsonl(const IsotopyTrace& trace);
/// Every tenth frame's report is recomputed and compared when `spot_check`
/// is set; a mismatch throws Format.
IsotopyTrace trace_from_jsonl(std::string_view text, bool spot_check = true);

void write_trace(const std::filesystem::path& path, const IsotopyTrace& trace);
IsotopyTrace read_trace(const std::filesystem::path& path, bool spot_check = true);

/// Writes to a temporary file next to `path` and renames it into place.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

}  // namespace thickknot
