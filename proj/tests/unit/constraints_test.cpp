#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "spatialprompt/constraints.hpp"

namespace sp = spatialprompt;
using sp::Point3;

namespace {

sp::Stroke line(const std::string& id, std::vector<Point3> pts, sp::StrokeRole role = sp::StrokeRole::Contour) {
  sp::Stroke s;
  s.stroke_id = id;
  s.role = role;
  s.points = std::move(pts);
  return s;
}

sp::SketchDocument doc_of(std::initializer_list<sp::Stroke> strokes) {
  auto doc = sp::SketchDocument::empty("d");
  for (const auto& s : strokes) doc = sp::apply_op(doc, sptest::add_op(s));
  return doc;
}

sptest::ComponentSets as_sets(const std::vector<std::vector<std::string>>& groups) {
  sptest::ComponentSets out;
  for (const auto& g : groups) out.insert({g.begin(), g.end()});
  return out;
}

sp::RelationSubject subject(int id, std::vector<Point3> pts) {
  return {id, sp::fit_oriented_box(pts), std::move(pts)};
}

std::vector<Point3> box_samples(Point3 lo, Point3 hi, int n = 6) {
  std::vector<Point3> out;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k)
        out.push_back({lo.x + (hi.x - lo.x) * i / n, lo.y + (hi.y - lo.y) * j / n, lo.z + (hi.z - lo.z) * k / n});
  return out;
}

}  // namespace

TEST(Junctions, SharedEndpointGivesThreeNodes) {
  const auto g = sp::build_junction_graph(doc_of({line("a", {{0, 0, 0}, {1, 0, 0}}), line("b", {{1, 0, 0}, {1, 1, 0}})}), 0.01);
  EXPECT_EQ(g.nodes.size(), 3u);
  EXPECT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(g.edges[0].b, g.edges[1].a);
}

TEST(Junctions, NearbyEndpointsMergeAtCentroid) {
  const auto g = sp::build_junction_graph(
      doc_of({line("a", {{0, 0, 0}, {1, 0, 0}}), line("b", {{1.005, 0, 0}, {2, 0, 0}})}), 0.01);
  EXPECT_EQ(g.nodes.size(), 3u);
  EXPECT_NEAR(g.nodes[g.edges[0].b].x, 1.0025, 1e-12);
}

TEST(Junctions, EpsilonIsInclusive) {
  const auto doc = doc_of({line("a", {{0, 0, 0}, {1, 0, 0}}), line("b", {{1.5, 0, 0}, {3, 0, 0}})});
  EXPECT_EQ(sp::build_junction_graph(doc, 0.5).nodes.size(), 3u);
  EXPECT_EQ(sp::build_junction_graph(doc, 0.4999).nodes.size(), 4u);
}

TEST(Junctions, CubeWireframe) {
  const auto doc = sptest::cube_wireframe();
  const auto g = sp::build_junction_graph(doc, 0.01);
  EXPECT_EQ(g.nodes.size(), 8u);
  EXPECT_EQ(g.edges.size(), 12u);
  const auto comps = sp::connected_components(g);
  ASSERT_EQ(comps.size(), 1u);
  EXPECT_EQ(comps[0].size(), 12u);
}

TEST(Junctions, TransitiveChainMerges) {
  // Endpoints 8 mm apart pairwise, 16 mm end to end: one node by transitivity.
  const auto doc = doc_of({line("a", {{0, 0, 0}, {0, 1, 0}}), line("b", {{0.008, 0, 0}, {0.008, -1, 0}}),
                           line("c", {{0.016, 0, 0}, {1, 0, 0}})});
  const auto g = sp::build_junction_graph(doc, 0.01);
  EXPECT_EQ(g.nodes.size(), 4u);
}

TEST(Junctions, ClosedLoopStrokeIsSelfEdge) {
  const auto g = sp::build_junction_graph(doc_of({line("o", {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 0, 0}})}), 0.01);
  ASSERT_EQ(g.nodes.size(), 1u);
  EXPECT_EQ(g.edges[0].a, g.edges[0].b);
}

TEST(Junctions, RejectsNonPositiveEpsilon) {
  try {
    sp::build_junction_graph(doc_of({line("a", {{0, 0, 0}, {1, 0, 0}})}), 0.0);
    FAIL();
  } catch (const sp::Error& e) {
    EXPECT_EQ(e.code(), sp::ErrorCode::NonPositiveEpsilon);
  }
}

TEST(Components, DisjointAndEmpty) {
  EXPECT_EQ(sp::connected_components(sp::build_junction_graph(
                                         doc_of({line("a", {{0, 0, 0}, {1, 0, 0}}), line("b", {{0, 1, 0}, {1, 1, 0}})}), 0.01))
                .size(),
            2u);
  EXPECT_TRUE(sp::connected_components(sp::build_junction_graph(sp::SketchDocument::empty("e"), 0.01)).empty());
}

TEST(Components, OrderedBySmallestMember) {
  const auto comps = sp::connected_components(sp::build_junction_graph(
      doc_of({line("z", {{0, 0, 0}, {1, 0, 0}}), line("b", {{5, 0, 0}, {6, 0, 0}}), line("a", {{1, 0, 0}, {2, 0, 0}})}),
      0.01));
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_EQ(comps[0], (std::vector<std::string>{"a", "z"}));
  EXPECT_EQ(comps[1], (std::vector<std::string>{"b"}));
}

TEST(Components, MatchBruteForceOracle) {
  sptest::Rng rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    sptest::SketchShape shape;
    shape.max_strokes = 50;
    shape.region = 0.6;
    const auto doc = sptest::random_document(rng, shape);
    const double eps = sptest::uniform(rng, 0.005, 0.08);
    EXPECT_EQ(as_sets(sp::connected_components(sp::build_junction_graph(doc, eps))),
              sptest::brute_force_components(doc, eps))
        << trial;
  }
}

TEST(Hardness, Rules) {
  using R = sp::StrokeRole;
  const std::vector<R> scaffold{R::Scaffold, R::Scaffold};
  const std::vector<R> mixed{R::Scaffold, R::Contour};
  const std::vector<R> anchor{R::Anchor};
  EXPECT_EQ(sp::assign_hardness(scaffold), sp::Hardness::Guide);
  EXPECT_EQ(sp::assign_hardness(mixed), sp::Hardness::Retain);
  EXPECT_EQ(sp::assign_hardness(anchor), sp::Hardness::Retain);
}

TEST(Proportions, AspectAndScaleRatio) {
  sp::Component big;
  big.component_id = 1;
  big.extents_sorted = {2, 1, 0.5};
  sp::Component small;
  small.component_id = 2;
  small.extents_sorted = {1, 1, 1};
  sp::OrientedBox global;
  global.half_extents = {1, 0.5, 0.25};
  const std::vector<sp::Component> both{big, small};
  const auto props = sp::compute_proportions(both, global);
  ASSERT_EQ(props.size(), 2u);
  EXPECT_EQ(props[0].aspect, (std::array<double, 3>{1, 0.5, 0.25}));
  EXPECT_DOUBLE_EQ(props[0].scale_ratio, 1.0);
  EXPECT_DOUBLE_EQ(props[1].scale_ratio, 0.5);
}

TEST(Relations, AboveWithFullOverlap) {
  const std::vector<sp::RelationSubject> subjects{subject(1, box_samples({0, 1.0, 0}, {1, 1.5, 1})),
                                                  subject(2, box_samples({0, 0, 0}, {1, 0.95, 1}))};
  const auto rel = sp::derive_relations(subjects);
  ASSERT_FALSE(rel.empty());
  EXPECT_EQ(rel[0].kind, sp::RelationKind::Above);
  EXPECT_EQ(rel[0].subject, 1);
  EXPECT_EQ(rel[0].object, 2);
  for (const auto& r : rel) EXPECT_FALSE(r.kind == sp::RelationKind::Above && r.subject == 2);
}

TEST(Relations, NoAboveWithoutFootprintOverlap) {
  const std::vector<sp::RelationSubject> subjects{subject(1, box_samples({5, 1.0, 5}, {6, 1.5, 6})),
                                                  subject(2, box_samples({0, 0, 0}, {1, 0.95, 1}))};
  for (const auto& r : sp::derive_relations(subjects)) EXPECT_NE(r.kind, sp::RelationKind::Above);
}

TEST(Relations, ContainsSmallInsideLarge) {
  const std::vector<sp::RelationSubject> subjects{subject(1, box_samples({0, 0, 0}, {2, 2, 2})),
                                                  subject(2, box_samples({0.8, 0.8, 0.8}, {1.2, 1.2, 1.2}, 3))};
  const auto rel = sp::derive_relations(subjects);
  const bool found = std::any_of(rel.begin(), rel.end(), [](const sp::SpatialRelation& r) {
    return r.kind == sp::RelationKind::Contains && r.subject == 1 && r.object == 2;
  });
  EXPECT_TRUE(found);
  for (const auto& r : rel) EXPECT_NE(r.kind, sp::RelationKind::Adjacent);
}

TEST(Relations, AdjacentAt15mm) {
  const std::vector<sp::RelationSubject> subjects{subject(1, {{0, 0, 0}, {1, 0, 0}}),
                                                  subject(2, {{1.015, 0, 0}, {2, 0.3, 0}})};
  const auto rel = sp::derive_relations(subjects);
  ASSERT_EQ(rel.size(), 1u);
  EXPECT_EQ(rel[0].kind, sp::RelationKind::Adjacent);
  EXPECT_NEAR(rel[0].parameter, 0.015, 1e-12);
}

TEST(Relations, FarApartHaveNone) {
  const std::vector<sp::RelationSubject> subjects{subject(1, {{0, 0, 0}, {1, 0, 0}}),
                                                  subject(2, {{3, 0, 0}, {4, 0, 0}})};
  EXPECT_TRUE(sp::derive_relations(subjects).empty());
}

TEST(Compile, SingleStroke) {
  const auto doc = doc_of({line("a", {{0, 0, 0}, {1, 0, 0}}, sp::StrokeRole::Scaffold)});
  const auto cs = sp::compile(doc);
  ASSERT_EQ(cs.components.size(), 1u);
  EXPECT_EQ(cs.components[0].hardness, sp::Hardness::Guide);
  EXPECT_EQ(cs.components[0].box, cs.global_box);
  EXPECT_TRUE(cs.relations.empty());
  EXPECT_EQ(cs.source_digest, sp::document_digest(doc));
  EXPECT_EQ(cs.source_revision, 1);
}

TEST(Compile, CubeWithStrokeAbove) {
  auto doc = sptest::cube_wireframe();
  doc = sp::apply_op(doc, sptest::add_op(line("top", {{0.2, 3, 0.5}, {0.8, 3, 0.5}})));
  const auto cs = sp::compile(doc);
  ASSERT_EQ(cs.components.size(), 2u);
  const int top = cs.component_of("top")->component_id;
  const int cube = cs.component_of("e00")->component_id;
  const bool above = std::any_of(cs.relations.begin(), cs.relations.end(), [&](const sp::SpatialRelation& r) {
    return r.kind == sp::RelationKind::Above && r.subject == top && r.object == cube;
  });
  EXPECT_TRUE(above);
}

TEST(Compile, EmptySketchRejected) {
  try {
    sp::compile(sp::SketchDocument::empty("e"));
    FAIL();
  } catch (const sp::Error& e) {
    EXPECT_EQ(e.code(), sp::ErrorCode::EmptySketch);
  }
}

TEST(Compile, AppliesCalibration) {
  auto doc = doc_of({line("a", {{0, 0, 0}, {1, 0, 0}})});
  doc = sp::apply_op(doc, sp::calibrate(0.5, 1.0));
  const auto cs = sp::compile(doc);
  EXPECT_NEAR(cs.global_box.half_extents[0], 1.02, 1e-12);
}

TEST(Compile, DefaultEpsilonHasFloor) {
  EXPECT_DOUBLE_EQ(sp::default_epsilon(doc_of({line("a", {{0, 0, 0}, {0.001, 0, 0}})})), 0.01);
  EXPECT_DOUBLE_EQ(sp::default_epsilon(doc_of({line("a", {{0, 0, 0}, {1, 0, 0}})})), 1.5);
}

TEST(Compile, DeterministicAndRoundTrips) {
  sptest::Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    const auto doc = sptest::random_document(rng);
    const std::string a = sp::serialize_constraints(sp::compile(doc));
    const std::string b = sp::serialize_constraints(sp::compile(doc));
    EXPECT_EQ(a, b);
    const auto parsed = sp::parse_constraints(a);
    EXPECT_EQ(sp::serialize_constraints(parsed), a);
    EXPECT_EQ(parsed, sp::compile(doc));
  }
}

TEST(Compile, CorruptedHalfExtentRejected) {
  sp::Json j = sp::to_json(sp::compile(doc_of({line("a", {{0, 0, 0}, {1, 0, 0}})})));
  j["global_box"]["half_extents"][0] = -1.0;
  try {
    sp::parse_constraints(j.dump());
    FAIL();
  } catch (const sp::Error& e) {
    EXPECT_EQ(e.code(), sp::ErrorCode::MalformedConstraintSet);
  }
  EXPECT_THROW(sp::parse_constraints("{\"components\":"), sp::Error);
}
