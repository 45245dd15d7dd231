#include "spatialprompt/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "spatial_grid.hpp"
#include "spatialprompt/disjoint_set.hpp"

namespace spatialprompt {

// ---------------------------------------------------------------------------
// Preparation and junctions

std::vector<PreparedStroke> prepare_strokes(const SketchDocument& doc, double spacing) {
  std::vector<PreparedStroke> out;
  out.reserve(doc.strokes.size());
  for (const auto& [id, stroke] : doc.strokes) {
    PreparedStroke p{id, stroke.role, stroke.points, {}};
    for (auto& pt : p.points) pt *= doc.calibration_scale;
    p.samples = resample_stroke(p.points, spacing);
    out.push_back(std::move(p));
  }
  return out;
}

JunctionGraph build_junction_graph(std::span<const PreparedStroke> strokes, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw Error(ErrorCode::NonPositiveEpsilon);

  std::vector<Point3> endpoints;
  endpoints.reserve(strokes.size() * 2);
  for (const auto& s : strokes) {
    endpoints.push_back(s.points.front());
    endpoints.push_back(s.points.back());
  }

  DisjointSet clusters(endpoints.size());
  const detail::SpatialGrid grid(endpoints, epsilon);
  const double eps2 = epsilon * epsilon;
  for (std::size_t i = 0; i < endpoints.size(); ++i) {
    grid.for_each_near(endpoints[i], [&](std::size_t j) {
      if (j > i && squared_distance(endpoints[i], endpoints[j]) <= eps2) clusters.join(i, j);
    });
  }

  JunctionGraph graph;
  std::map<std::size_t, std::size_t> node_of_root;
  std::vector<std::size_t> node_of_endpoint(endpoints.size());
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < endpoints.size(); ++i) {
    const std::size_t root = clusters.find(i);
    auto [it, inserted] = node_of_root.emplace(root, graph.nodes.size());
    if (inserted) {
      graph.nodes.push_back(Point3{});
      members.push_back(0);
    }
    node_of_endpoint[i] = it->second;
    graph.nodes[it->second] += endpoints[i];
    ++members[it->second];
  }
  for (std::size_t n = 0; n < graph.nodes.size(); ++n)
    graph.nodes[n] *= 1.0 / static_cast<double>(members[n]);

  for (std::size_t s = 0; s < strokes.size(); ++s)
    graph.edges.push_back(JunctionEdge{strokes[s].stroke_id, node_of_endpoint[2 * s],
                                       node_of_endpoint[2 * s + 1], strokes[s].samples});
  return graph;
}

JunctionGraph build_junction_graph(const SketchDocument& doc, double epsilon, double spacing) {
  const auto prepared = prepare_strokes(doc, spacing);
  return build_junction_graph(prepared, epsilon);
}

std::vector<std::vector<std::string>> connected_components(const JunctionGraph& graph) {
  DisjointSet nodes(graph.nodes.size());
  for (const auto& e : graph.edges) nodes.join(e.a, e.b);

  // Edges are visited in ascending stroke id, so a group's first member is its smallest.
  std::vector<std::pair<std::string, std::size_t>> ordered;
  for (std::size_t i = 0; i < graph.edges.size(); ++i) ordered.emplace_back(graph.edges[i].stroke_id, i);
  std::sort(ordered.begin(), ordered.end());

  std::map<std::size_t, std::size_t> group_of_root;
  std::vector<std::vector<std::string>> groups;
  for (const auto& [id, edge] : ordered) {
    const std::size_t root = nodes.find(graph.edges[edge].a);
    auto [it, inserted] = group_of_root.emplace(root, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(id);
  }
  return groups;
}

// ---------------------------------------------------------------------------
// Per-component quantities

std::string_view to_string(Hardness h) noexcept { return h == Hardness::Retain ? "Retain" : "Guide"; }

Hardness assign_hardness(std::span<const StrokeRole> member_roles) {
  for (StrokeRole r : member_roles)
    if (r == StrokeRole::Contour || r == StrokeRole::Anchor) return Hardness::Retain;
  return Hardness::Guide;
}

std::vector<ComponentProportion> compute_proportions(std::span<const Component> components,
                                                     const OrientedBox& global_box) {
  const double global_max = global_box.max_extent();
  std::vector<ComponentProportion> out;
  out.reserve(components.size());
  for (const auto& c : components) {
    const double max_extent = c.extents_sorted[0];
    ComponentProportion p;
    p.component_id = c.component_id;
    // A rotated component box can be longer than the global box's longest side.
    p.scale_ratio = std::min(1.0, max_extent / global_max);
    for (std::size_t i = 0; i < 3; ++i) p.aspect[i] = c.extents_sorted[i] / max_extent;
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Relations

std::string_view to_string(RelationKind k) noexcept {
  switch (k) {
    case RelationKind::Above: return "Above";
    case RelationKind::Contains: return "Contains";
    case RelationKind::Adjacent: return "Adjacent";
  }
  return "Above";
}

std::optional<double> min_distance_within(std::span<const Point3> a, std::span<const Point3> b,
                                          double reach) {
  if (a.empty() || b.empty()) return std::nullopt;
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  const detail::SpatialGrid grid(large, reach);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : small)
    grid.for_each_near(p, [&](std::size_t j) { best = std::min(best, squared_distance(p, large[j])); });
  const double d = std::sqrt(best);
  if (d <= reach) return d;
  return std::nullopt;
}

namespace {

struct VerticalFootprint {
  double min_y, max_y, center_y;
  double min_x, max_x, min_z, max_z;
  double area() const { return (max_x - min_x) * (max_z - min_z); }
};

VerticalFootprint footprint_of(const OrientedBox& box) {
  VerticalFootprint f{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                      box.center.y, std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity()};
  for (const auto& c : box.corners()) {
    f.min_y = std::min(f.min_y, c.y);
    f.max_y = std::max(f.max_y, c.y);
    f.min_x = std::min(f.min_x, c.x);
    f.max_x = std::max(f.max_x, c.x);
    f.min_z = std::min(f.min_z, c.z);
    f.max_z = std::max(f.max_z, c.z);
  }
  return f;
}

double contained_fraction(const OrientedBox& box, std::span<const Point3> samples) {
  if (samples.empty()) return 0.0;
  std::size_t inside = 0;
  for (const auto& p : samples)
    if (box.contains(p)) ++inside;
  return static_cast<double>(inside) / static_cast<double>(samples.size());
}

}  // namespace

std::vector<SpatialRelation> derive_relations(std::span<const RelationSubject> subjects) {
  std::vector<SpatialRelation> above, contains, adjacent;
  const std::size_t n = subjects.size();
  std::vector<VerticalFootprint> prints;
  for (const auto& s : subjects) prints.push_back(footprint_of(s.box));

  // contains_frac[i][j]: fraction of j's samples inside i's box.
  std::vector<std::vector<double>> contains_frac(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) contains_frac[i][j] = contained_fraction(subjects[i].box, subjects[j].samples);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& a = prints[i];
      const auto& b = prints[j];
      const double gap = a.min_y - b.max_y;
      if (gap >= -kRelationGap && a.center_y > b.center_y) {
        const double ox = std::min(a.max_x, b.max_x) - std::max(a.min_x, b.min_x);
        const double oz = std::min(a.max_z, b.max_z) - std::max(a.min_z, b.min_z);
        const double overlap = (ox > 0.0 && oz > 0.0) ? ox * oz : 0.0;
        if (overlap > 0.0 && overlap >= kFootprintOverlapFraction * std::min(a.area(), b.area()))
          above.push_back({RelationKind::Above, subjects[i].id, subjects[j].id, gap});
      }
      if (contains_frac[i][j] >= kContainsFraction)
        contains.push_back({RelationKind::Contains, subjects[i].id, subjects[j].id, contains_frac[i][j]});
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (contains_frac[i][j] >= kContainsFraction || contains_frac[j][i] >= kContainsFraction) continue;
      if (auto d = min_distance_within(subjects[i].samples, subjects[j].samples, kRelationGap)) {
        const int lo = std::min(subjects[i].id, subjects[j].id);
        const int hi = std::max(subjects[i].id, subjects[j].id);
        adjacent.push_back({RelationKind::Adjacent, lo, hi, *d});
      }
    }
  }

  auto by_ids = [](const SpatialRelation& x, const SpatialRelation& y) {
    return std::tie(x.subject, x.object) < std::tie(y.subject, y.object);
  };
  std::sort(above.begin(), above.end(), by_ids);
  std::sort(contains.begin(), contains.end(), by_ids);
  std::sort(adjacent.begin(), adjacent.end(), by_ids);
  std::vector<SpatialRelation> out = std::move(above);
  out.insert(out.end(), contains.begin(), contains.end());
  out.insert(out.end(), adjacent.begin(), adjacent.end());
  return out;
}

// ---------------------------------------------------------------------------
// Compile

const Component* ConstraintSet::component_of(std::string_view stroke_id) const {
  for (const auto& c : components)
    if (std::find(c.stroke_ids.begin(), c.stroke_ids.end(), stroke_id) != c.stroke_ids.end()) return &c;
  return nullptr;
}

double default_epsilon(const SketchDocument& doc) {
  std::vector<double> gaps;
  for (const auto& [id, s] : doc.strokes)
    for (std::size_t i = 1; i < s.points.size(); ++i) {
      const double d = distance(s.points[i - 1], s.points[i]) * doc.calibration_scale;
      if (d > 0.0) gaps.push_back(d);
    }
  if (gaps.empty()) return kMinJunctionEpsilon;
  std::sort(gaps.begin(), gaps.end());
  const std::size_t m = gaps.size() / 2;
  const double median = gaps.size() % 2 ? gaps[m] : (gaps[m - 1] + gaps[m]) / 2.0;
  return std::max(kMinJunctionEpsilon, 1.5 * median);
}

ConstraintSet compile(const SketchDocument& doc, const CompileParams& params) {
  if (doc.strokes.empty()) throw Error(ErrorCode::EmptySketch);
  if (!(params.resample_spacing > 0.0)) throw Error(ErrorCode::NonPositiveSpacing);

  ConstraintSet cs;
  cs.source_digest = document_digest(doc);
  cs.source_revision = doc.revision;
  cs.resample_spacing = params.resample_spacing;
  cs.epsilon = params.epsilon.value_or(default_epsilon(doc));

  const auto prepared = prepare_strokes(doc, cs.resample_spacing);
  cs.scaffold = build_junction_graph(prepared, cs.epsilon);

  std::map<std::string, const PreparedStroke*> by_id;
  std::vector<Point3> all_points;
  for (const auto& p : prepared) {
    by_id.emplace(p.stroke_id, &p);
    all_points.insert(all_points.end(), p.points.begin(), p.points.end());
    all_points.insert(all_points.end(), p.samples.begin(), p.samples.end());
  }
  cs.global_box = fit_oriented_box(all_points);

  std::vector<RelationSubject> subjects;
  int next_id = 1;
  for (auto& ids : connected_components(cs.scaffold)) {
    Component c;
    c.component_id = next_id++;
    std::vector<Point3> points;
    std::vector<StrokeRole> roles;
    RelationSubject subject;
    subject.id = c.component_id;
    for (const auto& id : ids) {
      const PreparedStroke& s = *by_id.at(id);
      points.insert(points.end(), s.points.begin(), s.points.end());
      points.insert(points.end(), s.samples.begin(), s.samples.end());
      subject.samples.insert(subject.samples.end(), s.samples.begin(), s.samples.end());
      roles.push_back(s.role);
    }
    c.stroke_ids = std::move(ids);
    c.box = fit_oriented_box(points);
    for (std::size_t i = 0; i < 3; ++i) c.extents_sorted[i] = 2.0 * c.box.half_extents[i];
    c.hardness = assign_hardness(roles);
    subject.box = c.box;
    subjects.push_back(std::move(subject));
    cs.components.push_back(std::move(c));
  }

  cs.proportions = compute_proportions(cs.components, cs.global_box);
  cs.relations = derive_relations(subjects);
  return cs;
}

// ---------------------------------------------------------------------------
// Serialization

Json to_json(const ConstraintSet& cs) {
  Json components = Json::array();
  for (const auto& c : cs.components)
    components.push_back(Json{{"box", to_json(c.box)},
                              {"component_id", c.component_id},
                              {"extents_sorted", c.extents_sorted},
                              {"hardness", to_string(c.hardness)},
                              {"stroke_ids", c.stroke_ids}});
  Json relations = Json::array();
  for (const auto& r : cs.relations)
    relations.push_back(Json{{"kind", to_string(r.kind)},
                             {"object", r.object},
                             {"parameter", r.parameter},
                             {"subject", r.subject}});
  Json nodes = Json::array();
  for (const auto& n : cs.scaffold.nodes) nodes.push_back(json_io::point(n));
  Json edges = Json::array();
  for (const auto& e : cs.scaffold.edges) {
    Json samples = Json::array();
    for (const auto& p : e.samples) samples.push_back(json_io::point(p));
    edges.push_back(Json{{"a", e.a}, {"b", e.b}, {"samples", std::move(samples)}, {"stroke_id", e.stroke_id}});
  }
  Json proportions = Json::array();
  for (const auto& p : cs.proportions)
    proportions.push_back(
        Json{{"aspect", p.aspect}, {"component_id", p.component_id}, {"scale_ratio", p.scale_ratio}});
  return Json{{"components", std::move(components)},
              {"epsilon", cs.epsilon},
              {"global_box", to_json(cs.global_box)},
              {"proportions", std::move(proportions)},
              {"relations", std::move(relations)},
              {"resample_spacing", cs.resample_spacing},
              {"scaffold", Json{{"edges", std::move(edges)}, {"nodes", std::move(nodes)}}},
              {"source_digest", cs.source_digest},
              {"source_revision", cs.source_revision}};
}

namespace {

std::array<double, 3> triple(const Json& v, ErrorCode code) {
  if (!v.is_array() || v.size() != 3) throw Error(code, "expected 3 numbers");
  return {json_io::finite_number(v[0], code), json_io::finite_number(v[1], code),
          json_io::finite_number(v[2], code)};
}

Hardness parse_hardness(const std::string& s, ErrorCode code) {
  if (s == "Retain") return Hardness::Retain;
  if (s == "Guide") return Hardness::Guide;
  throw Error(code, "unknown hardness '" + s + "'");
}

RelationKind parse_relation_kind(const std::string& s, ErrorCode code) {
  if (s == "Above") return RelationKind::Above;
  if (s == "Contains") return RelationKind::Contains;
  if (s == "Adjacent") return RelationKind::Adjacent;
  throw Error(code, "unknown relation kind '" + s + "'");
}

int small_int(const Json& v, ErrorCode code) {
  const auto i = json_io::integer(v, code);
  if (i < 0 || i > std::numeric_limits<int>::max()) throw Error(code, "id out of range");
  return static_cast<int>(i);
}

}  // namespace

ConstraintSet constraints_from_json(const Json& v, ErrorCode code) {
  using namespace json_io;
  if (!v.is_object()) throw Error(code, "expected object");
  ConstraintSet cs;
  cs.source_digest = string(field(v, "source_digest", code), code);
  cs.source_revision = integer(field(v, "source_revision", code), code);
  cs.resample_spacing = finite_number(field(v, "resample_spacing", code), code);
  cs.epsilon = finite_number(field(v, "epsilon", code), code);
  if (!(cs.resample_spacing > 0.0) || !(cs.epsilon > 0.0)) throw Error(code, "non-positive spacing/epsilon");
  cs.global_box = box_from_json(field(v, "global_box", code), code);

  const Json& scaffold = field(v, "scaffold", code);
  for (const auto& n : field(scaffold, "nodes", code)) cs.scaffold.nodes.push_back(point(n, code));
  for (const auto& je : field(scaffold, "edges", code)) {
    JunctionEdge e;
    e.stroke_id = string(field(je, "stroke_id", code), code);
    e.a = static_cast<std::size_t>(unsigned_integer(field(je, "a", code), code));
    e.b = static_cast<std::size_t>(unsigned_integer(field(je, "b", code), code));
    if (e.a >= cs.scaffold.nodes.size() || e.b >= cs.scaffold.nodes.size())
      throw Error(code, "edge node index out of range");
    for (const auto& p : field(je, "samples", code)) e.samples.push_back(point(p, code));
    if (e.samples.size() < 2) throw Error(code, "edge needs at least 2 samples");
    cs.scaffold.edges.push_back(std::move(e));
  }

  std::set<std::string> edge_ids;
  for (const auto& e : cs.scaffold.edges)
    if (!edge_ids.insert(e.stroke_id).second) throw Error(code, "duplicate scaffold edge " + e.stroke_id);

  std::set<std::string> seen;
  for (const auto& jc : field(v, "components", code)) {
    Component c;
    c.component_id = small_int(field(jc, "component_id", code), code);
    if (c.component_id != static_cast<int>(cs.components.size()) + 1)
      throw Error(code, "component ids must be 1..n in order");
    const Json& ids = field(jc, "stroke_ids", code);
    if (!ids.is_array() || ids.empty()) throw Error(code, "component without strokes");
    for (const auto& id : ids) {
      c.stroke_ids.push_back(string(id, code));
      if (!edge_ids.contains(c.stroke_ids.back())) throw Error(code, "stroke without scaffold edge");
      if (!seen.insert(c.stroke_ids.back()).second) throw Error(code, "stroke in two components");
    }
    c.box = box_from_json(field(jc, "box", code), code);
    c.extents_sorted = triple(field(jc, "extents_sorted", code), code);
    for (std::size_t i = 0; i < 3; ++i)
      if (std::abs(c.extents_sorted[i] - 2.0 * c.box.half_extents[i]) > 1e-9)
        throw Error(code, "extents_sorted disagrees with box");
    c.hardness = parse_hardness(string(field(jc, "hardness", code), code), code);
    cs.components.push_back(std::move(c));
  }
  if (seen.size() != edge_ids.size()) throw Error(code, "components do not cover all strokes");
  const int component_count = static_cast<int>(cs.components.size());

  for (const auto& jp : field(v, "proportions", code)) {
    ComponentProportion p;
    p.component_id = small_int(field(jp, "component_id", code), code);
    p.scale_ratio = finite_number(field(jp, "scale_ratio", code), code);
    p.aspect = triple(field(jp, "aspect", code), code);
    if (!(p.scale_ratio > 0.0 && p.scale_ratio <= 1.0)) throw Error(code, "scale_ratio outside (0,1]");
    for (double a : p.aspect)
      if (!(a > 0.0 && a <= 1.0)) throw Error(code, "aspect outside (0,1]");
    cs.proportions.push_back(p);
  }
  if (static_cast<int>(cs.proportions.size()) != component_count)
    throw Error(code, "one proportion entry per component required");

  for (const auto& jr : field(v, "relations", code)) {
    SpatialRelation r;
    r.kind = parse_relation_kind(string(field(jr, "kind", code), code), code);
    r.subject = small_int(field(jr, "subject", code), code);
    r.object = small_int(field(jr, "object", code), code);
    r.parameter = finite_number(field(jr, "parameter", code), code);
    if (r.subject == r.object) throw Error(code, "relation subject equals object");
    if (r.subject < 1 || r.subject > component_count || r.object < 1 || r.object > component_count)
      throw Error(code, "relation references unknown component");
    cs.relations.push_back(r);
  }
  return cs;
}

std::string serialize_constraints(const ConstraintSet& cs) { return canonical_dump(to_json(cs)); }

ConstraintSet parse_constraints(std::string_view bytes) {
  return constraints_from_json(json_io::parse_object(bytes, ErrorCode::MalformedConstraintSet));
}

}  // namespace spatialprompt
