#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spatialprompt/canonical.hpp"
#include "spatialprompt/geometry.hpp"

namespace spatialprompt {

/// Contour: primary outlines. Scaffold: volumetric framework. Anchor: local part.
enum class StrokeRole { Contour, Scaffold, Anchor };

std::string_view to_string(StrokeRole role) noexcept;
StrokeRole parse_role(std::string_view text, ErrorCode code);

struct Stroke {
  std::string stroke_id;
  std::string author_id;
  StrokeRole role = StrokeRole::Contour;
  std::vector<Point3> points;
  std::int64_t created_at = 0;  // ms since epoch
  std::int64_t color_index = 0;

  friend bool operator==(const Stroke&, const Stroke&) = default;
};

double polyline_length(std::span<const Point3> points);

struct AddStroke {
  Stroke stroke;
  friend bool operator==(const AddStroke&, const AddStroke&) = default;
};
struct DeleteStroke {
  std::string stroke_id;
  friend bool operator==(const DeleteStroke&, const DeleteStroke&) = default;
};
/// Applied per point as scale, then rotate, then translate.
struct TransformStroke {
  std::string stroke_id;
  Quaternion rotation;
  Point3 translation;
  double uniform_scale = 1.0;
  friend bool operator==(const TransformStroke&, const TransformStroke&) = default;
};
struct SetRole {
  std::string stroke_id;
  StrokeRole role = StrokeRole::Contour;
  friend bool operator==(const SetRole&, const SetRole&) = default;
};
struct SetCalibration {
  double scale = 1.0;
  friend bool operator==(const SetCalibration&, const SetCalibration&) = default;
};

using EditKind = std::variant<AddStroke, DeleteStroke, TransformStroke, SetRole, SetCalibration>;

struct EditOp {
  std::string op_id;
  std::string author_id;
  EditKind kind;
  std::optional<std::int64_t> seq;  // assigned by the session server

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

/// Immutable-by-convention document value. `strokes` iterates in ascending id.
struct SketchDocument {
  static constexpr std::int64_t kSchemaVersion = 1;

  std::string doc_id;
  std::int64_t schema_version = kSchemaVersion;
  double calibration_scale = 1.0;
  std::map<std::string, Stroke> strokes;
  std::int64_t revision = 0;
  std::vector<EditOp> op_log;

  static SketchDocument empty(std::string doc_id) {
    SketchDocument doc;
    doc.doc_id = std::move(doc_id);
    return doc;
  }

  friend bool operator==(const SketchDocument&, const SketchDocument&) = default;
};

/// Throws Error for ops that break the EditOp invariants (non-unit rotation,
/// non-positive scale, degenerate or non-finite stroke).
void check_well_formed(const EditOp& op);
void check_stroke(const Stroke& stroke, ErrorCode code);

/// Returns a new document with `op` applied and appended to the log.
SketchDocument apply_op(const SketchDocument& doc, const EditOp& op);

/// Re-applies `doc.op_log` from an empty document with the same id.
SketchDocument replay(const SketchDocument& doc);

/// Uniform arc-length samples; count = floor(length / spacing) + 1, at least 2.
std::vector<Point3> resample_stroke(std::span<const Point3> points, double spacing);
inline std::vector<Point3> resample_stroke(const Stroke& stroke, double spacing) {
  return resample_stroke(stroke.points, spacing);
}

EditOp calibrate(double measured_length, double actual_length, std::string op_id = "calibration",
                 std::string author_id = "");

Json to_json(const Stroke& stroke);
Json to_json(const EditOp& op);
Json to_json(const SketchDocument& doc);
Stroke stroke_from_json(const Json& value, ErrorCode code);
EditOp edit_op_from_json(const Json& value, ErrorCode code);

std::string canonical_serialize(const SketchDocument& doc);
/// Throws Error{MalformedDocument} on schema or invariant violations.
SketchDocument parse_document(std::string_view bytes);
SketchDocument document_from_json(const Json& value);

std::string document_digest(const SketchDocument& doc);

}  // namespace spatialprompt
