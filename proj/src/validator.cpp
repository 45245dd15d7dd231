#include "spatialprompt/validator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spatialprompt {

namespace {

std::string fmt_num(double v) { return format_shortest(v); }

void require_mesh(const TriangleMesh& mesh) {
  if (mesh.triangles.empty() || mesh.vertices.empty()) throw Error(ErrorCode::EmptyMesh);
}

}  // namespace

ValidationReport make_report(std::vector<CheckResult> checks, std::string source_digest) {
  ValidationReport r;
  r.source_digest = std::move(source_digest);
  r.checks = std::move(checks);
  std::size_t passing = 0;
  r.overall_pass = true;
  for (const auto& c : r.checks) {
    if (c.pass) ++passing;
    if (c.kind == CheckKind::Hard && !c.pass) r.overall_pass = false;
  }
  r.score = r.checks.empty() ? 1.0 : static_cast<double>(passing) / static_cast<double>(r.checks.size());
  return r;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (values[hi] - values[lo]) * (rank - static_cast<double>(lo));
}

std::vector<StrokeProximity> scaffold_proximity(const TriangleMesh& mesh, const ConstraintSet& cs,
                                                const ValidationTolerances& tol) {
  require_mesh(mesh);
  const TriangleBvh bvh(mesh);
  const double threshold = std::max(tol.proximity_floor, tol.proximity_fraction * cs.global_box.diagonal());
  std::vector<StrokeProximity> out;
  for (const auto& edge : cs.scaffold.edges) {
    std::vector<double> d;
    d.reserve(edge.samples.size());
    for (const auto& s : edge.samples) d.push_back(bvh.distance(s));
    StrokeProximity sp;
    sp.stroke_id = edge.stroke_id;
    sp.p95 = percentile(std::move(d), 0.95);
    sp.threshold = threshold;
    const Component* c = cs.component_of(edge.stroke_id);
    sp.hard = c == nullptr || c->hardness == Hardness::Retain;
    sp.pass = sp.p95 <= threshold;
    out.push_back(std::move(sp));
  }
  return out;
}

double containment_margin(const OrientedBox& box, const ValidationTolerances& tol) {
  return std::max(tol.containment_inflation_floor, tol.containment_inflation_fraction * box.diagonal());
}

double containment_check(const TriangleMesh& mesh, const OrientedBox& box, double margin) {
  if (mesh.vertices.empty()) throw Error(ErrorCode::EmptyMesh);
  std::size_t inside = 0;
  for (const auto& v : mesh.vertices)
    if (box.contains(v, margin)) ++inside;
  return static_cast<double>(inside) / static_cast<double>(mesh.vertices.size());
}

ProportionResult proportion_check(const TriangleMesh& mesh, const ConstraintSet& cs,
                                  const ValidationTolerances& tol) {
  if (mesh.vertices.empty()) throw Error(ErrorCode::EmptyMesh);
  const auto& box = cs.global_box;
  std::array<double, 3> lo{}, hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& v : mesh.vertices) {
    const Vec3 l = box.to_local(v);
    for (std::size_t i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], l[static_cast<int>(i)]);
      hi[i] = std::max(hi[i], l[static_cast<int>(i)]);
    }
  }
  std::array<double, 3> extents{hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]};
  std::sort(extents.begin(), extents.end(), std::greater<>());
  if (!(extents[0] > 0.0)) throw Error(ErrorCode::DegenerateMesh, "zero extent mesh");

  ProportionResult r;
  for (std::size_t i = 0; i < 3; ++i) {
    r.measured[i] = extents[i] / extents[0];
    r.target[i] = box.half_extents[i] / box.half_extents[0];
    r.deviation = std::max(r.deviation, std::abs(r.measured[i] - r.target[i]));
  }
  r.pass = r.deviation <= tol.proportion_tolerance;
  return r;
}

std::vector<RelationResult> relation_check(const TriangleMesh& mesh, const ConstraintSet& cs) {
  std::vector<RelationResult> out;
  if (cs.relations.empty()) return out;

  const std::size_t n = cs.components.size();
  std::vector<OrientedBox> inflated;
  for (const auto& c : cs.components) {
    OrientedBox b = c.box;
    for (auto& h : b.half_extents) h *= 1.5;
    inflated.push_back(b);
  }
  std::vector<std::vector<Point3>> assigned(n);
  for (const auto& v : mesh.vertices) {
    std::size_t best = n;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < 2 && best == n; ++pass) {
      for (std::size_t i = 0; i < n; ++i) {
        if (pass == 0 && !inflated[i].contains(v, 0.0)) continue;
        const double d2 = squared_distance(v, cs.components[i].box.center);
        if (d2 < best_d2) {
          best_d2 = d2;
          best = i;
        }
      }
    }
    if (best < n) assigned[best].push_back(v);
  }

  std::vector<RelationSubject> subjects;
  for (std::size_t i = 0; i < n; ++i) {
    if (assigned[i].empty()) continue;
    RelationSubject s;
    s.id = cs.components[i].component_id;
    s.box = fit_oriented_box(assigned[i]);
    s.samples = std::move(assigned[i]);
    subjects.push_back(std::move(s));
  }
  const auto found = derive_relations(subjects);
  for (const auto& expected : cs.relations) {
    const bool hit = std::any_of(found.begin(), found.end(), [&](const SpatialRelation& r) {
      return r.kind == expected.kind && r.subject == expected.subject && r.object == expected.object;
    });
    out.push_back({expected, hit});
  }
  return out;
}

ValidationReport validate(const TriangleMesh& mesh, const ConstraintSet& cs, const ValidationTolerances& tol) {
  require_mesh(mesh);
  std::vector<CheckResult> checks;

  const double margin = containment_margin(cs.global_box, tol);
  const double inside = containment_check(mesh, cs.global_box, margin);
  checks.push_back({"containment", CheckKind::Hard,
                    "fraction of vertices inside global box grown by " + fmt_num(margin) + " m",
                    inside, tol.containment_min_fraction, inside >= tol.containment_min_fraction});

  const auto prop = proportion_check(mesh, cs, tol);
  checks.push_back({"proportion", CheckKind::Hard,
                    "aspect " + fmt_num(prop.target[0]) + ":" + fmt_num(prop.target[1]) + ":" +
                        fmt_num(prop.target[2]) + ", measured " + fmt_num(prop.measured[0]) + ":" +
                        fmt_num(prop.measured[1]) + ":" + fmt_num(prop.measured[2]),
                    prop.deviation, tol.proportion_tolerance, prop.pass});

  for (const auto& sp : scaffold_proximity(mesh, cs, tol))
    checks.push_back({"scaffold:" + sp.stroke_id, sp.hard ? CheckKind::Hard : CheckKind::Soft,
                      "p95 distance from stroke samples to mesh", sp.p95, sp.threshold, sp.pass});

  for (const auto& rr : relation_check(mesh, cs)) {
    const auto& r = rr.expected;
    checks.push_back({"relation:" + std::string(to_string(r.kind)) + ":" + std::to_string(r.subject) + ":" +
                          std::to_string(r.object),
                      CheckKind::Soft, "relation reproduced on mesh", rr.reproduced ? 1.0 : 0.0, 1.0,
                      rr.reproduced});
  }
  return make_report(std::move(checks), cs.source_digest);
}

Json to_json(const ValidationReport& report) {
  Json checks = Json::array();
  for (const auto& c : report.checks)
    checks.push_back(Json{{"kind", c.kind == CheckKind::Hard ? "hard" : "soft"},
                          {"measured", c.measured},
                          {"name", c.name},
                          {"pass", c.pass},
                          {"target", c.target},
                          {"tolerance", c.tolerance}});
  return Json{{"checks", std::move(checks)},
              {"overall_pass", report.overall_pass},
              {"score", report.score},
              {"source_digest", report.source_digest}};
}

std::string serialize_report(const ValidationReport& report) { return canonical_dump(to_json(report)); }

ValidationReport parse_report(std::string_view bytes) {
  using namespace json_io;
  constexpr auto code = ErrorCode::MalformedDocument;
  const Json v = parse_object(bytes, code);
  std::vector<CheckResult> checks;
  for (const auto& jc : field(v, "checks", code)) {
    CheckResult c;
    c.name = string(field(jc, "name", code), code);
    const auto kind = string(field(jc, "kind", code), code);
    if (kind != "hard" && kind != "soft") throw Error(code, "check kind must be hard or soft");
    c.kind = kind == "hard" ? CheckKind::Hard : CheckKind::Soft;
    c.target = string(field(jc, "target", code), code);
    c.measured = number(field(jc, "measured", code), code);
    c.tolerance = number(field(jc, "tolerance", code), code);
    if (!field(jc, "pass", code).is_boolean()) throw Error(code, "pass must be boolean");
    c.pass = jc["pass"].get<bool>();
    checks.push_back(std::move(c));
  }
  ValidationReport r = make_report(std::move(checks), string(field(v, "source_digest", code), code));
  const Json& overall = field(v, "overall_pass", code);
  if (!overall.is_boolean() || overall.get<bool>() != r.overall_pass)
    throw Error(code, "overall_pass inconsistent with checks");
  return r;
}

}  // namespace spatialprompt
