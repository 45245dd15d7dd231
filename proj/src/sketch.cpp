#include "spatialprompt/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace spatialprompt {

namespace {

constexpr ErrorCode kDoc = ErrorCode::MalformedDocument;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Stroke& find_stroke(std::map<std::string, Stroke>& strokes, const std::string& id) {
  auto it = strokes.find(id);
  if (it == strokes.end()) throw Error(ErrorCode::UnknownStroke, id);
  return it->second;
}

void check_scale(double s) {
  if (!std::isfinite(s)) throw Error(ErrorCode::NonFiniteCoordinate, "scale");
  if (!(s > 0.0)) throw Error(ErrorCode::NonPositiveScale);
}

}  // namespace

std::string_view to_string(StrokeRole role) noexcept {
  switch (role) {
    case StrokeRole::Contour: return "Contour";
    case StrokeRole::Scaffold: return "Scaffold";
    case StrokeRole::Anchor: return "Anchor";
  }
  return "Contour";
}

StrokeRole parse_role(std::string_view text, ErrorCode code) {
  if (text == "Contour") return StrokeRole::Contour;
  if (text == "Scaffold") return StrokeRole::Scaffold;
  if (text == "Anchor") return StrokeRole::Anchor;
  throw Error(code, "unknown role '" + std::string(text) + "'");
}

double polyline_length(std::span<const Point3> points) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += distance(points[i - 1], points[i]);
  return total;
}

void check_stroke(const Stroke& stroke, ErrorCode code) {
  if (stroke.stroke_id.empty()) throw Error(code, "empty stroke_id");
  if (stroke.color_index < 0) throw Error(code, "negative color_index");
  for (const auto& p : stroke.points)
    if (!is_finite(p)) throw Error(ErrorCode::NonFiniteCoordinate, stroke.stroke_id);
  if (stroke.points.size() < 2) throw Error(ErrorCode::DegenerateStroke, stroke.stroke_id);
  if (!(polyline_length(stroke.points) > 0.0))
    throw Error(ErrorCode::DegenerateStroke, stroke.stroke_id + " has zero length");
}

void check_well_formed(const EditOp& op) {
  std::visit(Overloaded{
                 [](const AddStroke& k) { check_stroke(k.stroke, ErrorCode::DegenerateStroke); },
                 [](const DeleteStroke&) {},
                 [](const TransformStroke& k) {
                   if (!is_finite(k.translation) || !std::isfinite(k.rotation.norm()))
                     throw Error(ErrorCode::NonFiniteCoordinate, "transform");
                   if (!k.rotation.is_unit())
                     throw Error(ErrorCode::InvalidRotation, "rotation is not a unit quaternion");
                   check_scale(k.uniform_scale);
                 },
                 [](const SetRole&) {},
                 [](const SetCalibration& k) { check_scale(k.scale); },
             },
             op.kind);
}

SketchDocument apply_op(const SketchDocument& doc, const EditOp& op) {
  check_well_formed(op);
  SketchDocument next = doc;
  std::visit(Overloaded{
                 [&](const AddStroke& k) {
                   if (next.strokes.contains(k.stroke.stroke_id))
                     throw Error(ErrorCode::DuplicateStrokeId, k.stroke.stroke_id);
                   next.strokes.emplace(k.stroke.stroke_id, k.stroke);
                 },
                 [&](const DeleteStroke& k) {
                   find_stroke(next.strokes, k.stroke_id);
                   next.strokes.erase(k.stroke_id);
                 },
                 [&](const TransformStroke& k) {
                   Stroke& s = find_stroke(next.strokes, k.stroke_id);
                   for (auto& p : s.points)
                     p = k.rotation.rotate(p * k.uniform_scale) + k.translation;
                   check_stroke(s, ErrorCode::DegenerateStroke);
                 },
                 [&](const SetRole& k) { find_stroke(next.strokes, k.stroke_id).role = k.role; },
                 [&](const SetCalibration& k) { next.calibration_scale = k.scale; },
             },
             op.kind);
  next.revision += 1;
  next.op_log.push_back(op);
  return next;
}

SketchDocument replay(const SketchDocument& doc) {
  SketchDocument out = SketchDocument::empty(doc.doc_id);
  out.schema_version = doc.schema_version;
  for (const auto& op : doc.op_log) out = apply_op(out, op);
  return out;
}

std::vector<Point3> resample_stroke(std::span<const Point3> points, double spacing) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw Error(ErrorCode::NonPositiveSpacing);
  if (points.size() < 2) throw Error(ErrorCode::DegenerateStroke, "fewer than 2 points");

  std::vector<double> cumulative(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i)
    cumulative[i] = cumulative[i - 1] + distance(points[i - 1], points[i]);
  const double length = cumulative.back();
  if (!(length > 0.0)) throw Error(ErrorCode::DegenerateStroke, "zero length");

  // The 1e-9 slack keeps exact multiples (length 1, spacing 0.25) from losing a sample.
  const auto intervals = static_cast<std::size_t>(std::floor(length / spacing + 1e-9));
  const std::size_t count = std::max<std::size_t>(2, intervals + 1);
  const double step = length / static_cast<double>(count - 1);

  std::vector<Point3> out;
  out.reserve(count);
  out.push_back(points.front());
  std::size_t seg = 0;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double target = step * static_cast<double>(i);
    while (seg + 2 < points.size() && cumulative[seg + 1] < target) ++seg;
    const double seg_len = cumulative[seg + 1] - cumulative[seg];
    const double t = seg_len > 0.0 ? std::clamp((target - cumulative[seg]) / seg_len, 0.0, 1.0) : 0.0;
    out.push_back(points[seg] + (points[seg + 1] - points[seg]) * t);
  }
  out.push_back(points.back());
  return out;
}

EditOp calibrate(double measured_length, double actual_length, std::string op_id,
                 std::string author_id) {
  if (!std::isfinite(measured_length) || !std::isfinite(actual_length) || !(measured_length > 0.0) ||
      !(actual_length > 0.0))
    throw Error(ErrorCode::NonPositiveLength);
  return EditOp{std::move(op_id), std::move(author_id),
                SetCalibration{actual_length / measured_length}, std::nullopt};
}

// ---------------------------------------------------------------------------
// JSON mapping

Json to_json(const Stroke& stroke) {
  Json pts = Json::array();
  for (const auto& p : stroke.points) pts.push_back(json_io::point(p));
  return Json{{"author_id", stroke.author_id},   {"color_index", stroke.color_index},
              {"created_at", stroke.created_at}, {"points", std::move(pts)},
              {"role", to_string(stroke.role)},  {"stroke_id", stroke.stroke_id}};
}

Stroke stroke_from_json(const Json& v, ErrorCode code) {
  using namespace json_io;
  Stroke s;
  s.stroke_id = string(field(v, "stroke_id", code), code);
  s.author_id = v.contains("author_id") ? string(v["author_id"], code) : std::string();
  s.role = v.contains("role") ? parse_role(string(v["role"], code), code) : StrokeRole::Contour;
  s.created_at = v.contains("created_at") ? integer(v["created_at"], code) : 0;
  s.color_index = v.contains("color_index") ? integer(v["color_index"], code) : 0;
  const Json& pts = field(v, "points", code);
  if (!pts.is_array()) throw Error(code, "points must be an array");
  for (const auto& p : pts) s.points.push_back(point(p, code));
  return s;
}

Json to_json(const EditOp& op) {
  Json out{{"author_id", op.author_id}, {"op_id", op.op_id}};
  if (op.seq) out["seq"] = *op.seq;
  std::visit(Overloaded{
                 [&](const AddStroke& k) {
                   out["kind"] = "AddStroke";
                   out["stroke"] = to_json(k.stroke);
                 },
                 [&](const DeleteStroke& k) {
                   out["kind"] = "DeleteStroke";
                   out["stroke_id"] = k.stroke_id;
                 },
                 [&](const TransformStroke& k) {
                   out["kind"] = "TransformStroke";
                   out["stroke_id"] = k.stroke_id;
                   out["rotation"] = Json::array({k.rotation.w, k.rotation.x, k.rotation.y, k.rotation.z});
                   out["translation"] = json_io::point(k.translation);
                   out["uniform_scale"] = k.uniform_scale;
                 },
                 [&](const SetRole& k) {
                   out["kind"] = "SetRole";
                   out["stroke_id"] = k.stroke_id;
                   out["role"] = to_string(k.role);
                 },
                 [&](const SetCalibration& k) {
                   out["kind"] = "SetCalibration";
                   out["scale"] = k.scale;
                 },
             },
             op.kind);
  return out;
}

EditOp edit_op_from_json(const Json& v, ErrorCode code) {
  using namespace json_io;
  EditOp op;
  op.op_id = string(field(v, "op_id", code), code);
  op.author_id = v.contains("author_id") ? string(v["author_id"], code) : std::string();
  if (v.contains("seq")) op.seq = integer(v["seq"], code);
  const std::string kind = string(field(v, "kind", code), code);
  if (kind == "AddStroke") {
    op.kind = AddStroke{stroke_from_json(field(v, "stroke", code), code)};
  } else if (kind == "DeleteStroke") {
    op.kind = DeleteStroke{string(field(v, "stroke_id", code), code)};
  } else if (kind == "TransformStroke") {
    TransformStroke t;
    t.stroke_id = string(field(v, "stroke_id", code), code);
    const Json& r = field(v, "rotation", code);
    if (!r.is_array() || r.size() != 4) throw Error(code, "rotation must be [w,x,y,z]");
    t.rotation = {finite_number(r[0], code), finite_number(r[1], code), finite_number(r[2], code),
                  finite_number(r[3], code)};
    t.translation = point(field(v, "translation", code), code);
    t.uniform_scale = finite_number(field(v, "uniform_scale", code), code);
    op.kind = t;
  } else if (kind == "SetRole") {
    op.kind = SetRole{string(field(v, "stroke_id", code), code),
                      parse_role(string(field(v, "role", code), code), code)};
  } else if (kind == "SetCalibration") {
    op.kind = SetCalibration{finite_number(field(v, "scale", code), code)};
  } else {
    throw Error(code, "unknown op kind '" + kind + "'");
  }
  return op;
}

Json to_json(const SketchDocument& doc) {
  Json strokes = Json::array();
  for (const auto& [id, s] : doc.strokes) strokes.push_back(to_json(s));
  Json log = Json::array();
  for (const auto& op : doc.op_log) log.push_back(to_json(op));
  return Json{{"calibration_scale", doc.calibration_scale},
              {"doc_id", doc.doc_id},
              {"op_log", std::move(log)},
              {"revision", doc.revision},
              {"schema_version", doc.schema_version},
              {"strokes", std::move(strokes)}};
}

std::string canonical_serialize(const SketchDocument& doc) { return canonical_dump(to_json(doc)); }

SketchDocument document_from_json(const Json& v) {
  using namespace json_io;
  SketchDocument doc;
  doc.schema_version = integer(field(v, "schema_version", kDoc), kDoc);
  if (doc.schema_version != SketchDocument::kSchemaVersion)
    throw Error(kDoc, "unsupported schema_version " + std::to_string(doc.schema_version));
  doc.doc_id = string(field(v, "doc_id", kDoc), kDoc);
  doc.calibration_scale = finite_number(field(v, "calibration_scale", kDoc), kDoc);
  if (!(doc.calibration_scale > 0.0)) throw Error(kDoc, "calibration_scale must be positive");
  doc.revision = integer(field(v, "revision", kDoc), kDoc);

  const Json& strokes = field(v, "strokes", kDoc);
  if (!strokes.is_array()) throw Error(kDoc, "strokes must be an array");
  for (const auto& js : strokes) {
    Stroke s = stroke_from_json(js, kDoc);
    try {
      check_stroke(s, kDoc);
    } catch (const Error& e) {
      throw Error(kDoc, e.what());
    }
    if (!doc.strokes.emplace(s.stroke_id, s).second)
      throw Error(kDoc, "duplicate stroke_id " + s.stroke_id);
  }

  const Json& log = field(v, "op_log", kDoc);
  if (!log.is_array()) throw Error(kDoc, "op_log must be an array");
  for (const auto& jo : log) {
    EditOp op = edit_op_from_json(jo, kDoc);
    try {
      check_well_formed(op);
    } catch (const Error& e) {
      throw Error(kDoc, e.what());
    }
    doc.op_log.push_back(std::move(op));
  }
  if (doc.revision != static_cast<std::int64_t>(doc.op_log.size()))
    throw Error(kDoc, "revision does not match op_log length");
  return doc;
}

SketchDocument parse_document(std::string_view bytes) {
  return document_from_json(json_io::parse_object(bytes, kDoc));
}

std::string document_digest(const SketchDocument& doc) { return sha256_hex(canonical_serialize(doc)); }

}  // namespace spatialprompt
