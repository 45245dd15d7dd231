#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spatialprompt/oriented_box.hpp"
#include "spatialprompt/sketch.hpp"

namespace spatialprompt {

inline constexpr double kDefaultResampleSpacing = 0.01;
inline constexpr double kMinJunctionEpsilon = 0.01;
inline constexpr double kRelationGap = 0.02;           // Above slack and Adjacent reach, meters
inline constexpr double kFootprintOverlapFraction = 0.25;
inline constexpr double kContainsFraction = 0.95;

/// Stroke after calibration and resampling; the unit of compilation.
struct PreparedStroke {
  std::string stroke_id;
  StrokeRole role = StrokeRole::Contour;
  std::vector<Point3> points;   // calibrated raw polyline
  std::vector<Point3> samples;  // uniform arc-length resampling of `points`
};

std::vector<PreparedStroke> prepare_strokes(const SketchDocument& doc, double spacing);

struct JunctionEdge {
  std::string stroke_id;
  std::size_t a = 0;
  std::size_t b = 0;
  std::vector<Point3> samples;
  friend bool operator==(const JunctionEdge&, const JunctionEdge&) = default;
};

struct JunctionGraph {
  std::vector<Point3> nodes;
  std::vector<JunctionEdge> edges;  // one per stroke, ascending stroke_id
  friend bool operator==(const JunctionGraph&, const JunctionGraph&) = default;
};

/// Endpoints within `epsilon` (inclusive) merge transitively into one node
/// placed at their centroid. Nodes are numbered in first-seen order walking
/// strokes by id, start endpoint before end endpoint.
JunctionGraph build_junction_graph(std::span<const PreparedStroke> strokes, double epsilon);
JunctionGraph build_junction_graph(const SketchDocument& doc, double epsilon,
                                   double spacing = kDefaultResampleSpacing);

/// Stroke-id groups by graph connectivity, ordered by smallest member id.
std::vector<std::vector<std::string>> connected_components(const JunctionGraph& graph);

enum class Hardness { Retain, Guide };
std::string_view to_string(Hardness h) noexcept;

Hardness assign_hardness(std::span<const StrokeRole> member_roles);

struct Component {
  int component_id = 0;
  std::vector<std::string> stroke_ids;
  OrientedBox box;
  std::array<double, 3> extents_sorted{};
  Hardness hardness = Hardness::Retain;
  friend bool operator==(const Component&, const Component&) = default;
};

struct ComponentProportion {
  int component_id = 0;
  double scale_ratio = 1.0;         // component max extent / global max extent
  std::array<double, 3> aspect{};   // extents_sorted / max extent
  friend bool operator==(const ComponentProportion&, const ComponentProportion&) = default;
};

std::vector<ComponentProportion> compute_proportions(std::span<const Component> components,
                                                     const OrientedBox& global_box);

enum class RelationKind { Above, Contains, Adjacent };
std::string_view to_string(RelationKind k) noexcept;

struct SpatialRelation {
  RelationKind kind = RelationKind::Above;
  int subject = 0;
  int object = 0;
  double parameter = 0.0;  // Above: vertical gap (m); Contains: fraction; Adjacent: distance (m)
  friend bool operator==(const SpatialRelation&, const SpatialRelation&) = default;
};

/// A box plus the point set it stands for; relations are defined over these.
struct RelationSubject {
  int id = 0;
  OrientedBox box;
  std::vector<Point3> samples;
};

/// Ordered by kind (Above, Contains, Adjacent), then subject, then object.
std::vector<SpatialRelation> derive_relations(std::span<const RelationSubject> subjects);

/// Smallest distance between the sets if it is at most `reach`, otherwise nullopt.
std::optional<double> min_distance_within(std::span<const Point3> a, std::span<const Point3> b,
                                          double reach);

struct CompileParams {
  std::optional<double> epsilon;  // default: max(0.01, 1.5 x median raw point spacing)
  double resample_spacing = kDefaultResampleSpacing;
};

struct ConstraintSet {
  std::string source_digest;
  std::int64_t source_revision = 0;
  OrientedBox global_box;
  std::vector<Component> components;
  std::vector<SpatialRelation> relations;
  JunctionGraph scaffold;
  std::vector<ComponentProportion> proportions;
  double resample_spacing = kDefaultResampleSpacing;
  double epsilon = kMinJunctionEpsilon;

  friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;

  const Component* component_of(std::string_view stroke_id) const;
};

double default_epsilon(const SketchDocument& doc);

ConstraintSet compile(const SketchDocument& doc, const CompileParams& params = {});

Json to_json(const ConstraintSet& cs);
ConstraintSet constraints_from_json(const Json& value, ErrorCode code = ErrorCode::MalformedConstraintSet);
std::string serialize_constraints(const ConstraintSet& cs);
ConstraintSet parse_constraints(std::string_view bytes);

}  // namespace spatialprompt
