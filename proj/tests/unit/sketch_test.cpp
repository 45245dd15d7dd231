#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "generators.hpp"
#include "oracles.hpp"
#include "spatialprompt/sketch.hpp"

namespace sp = spatialprompt;
using sp::Point3;

namespace {

sp::Stroke segment(const std::string& id, Point3 a, Point3 b) {
  sp::Stroke s;
  s.stroke_id = id;
  s.author_id = "alice";
  s.points = {a, b};
  return s;
}

sp::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const sp::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return sp::ErrorCode::ProtocolError;
}

}  // namespace

TEST(ApplyOp, AddStrokeBumpsRevision) {
  const auto doc = sp::apply_op(sp::SketchDocument::empty("d"), sptest::add_op(segment("s1", {0, 0, 0}, {1, 0, 0})));
  EXPECT_EQ(doc.strokes.size(), 1u);
  EXPECT_EQ(doc.revision, 1);
  EXPECT_EQ(doc.op_log.size(), 1u);
}

TEST(ApplyOp, DeleteMissingIsUnknownStroke) {
  EXPECT_EQ(code_of([] {
              sp::apply_op(sp::SketchDocument::empty("d"), {"o", "a", sp::DeleteStroke{"missing"}, std::nullopt});
            }),
            sp::ErrorCode::UnknownStroke);
}

TEST(ApplyOp, TranslationShiftsEveryPoint) {
  auto doc = sp::apply_op(sp::SketchDocument::empty("d"), sptest::add_op(segment("s1", {0, 0, 0}, {1, 2, 3})));
  doc = sp::apply_op(doc, {"t", "a", sp::TransformStroke{"s1", {}, {1, 0, 0}, 1.0}, std::nullopt});
  EXPECT_EQ(doc.strokes.at("s1").points[0], (Point3{1, 0, 0}));
  EXPECT_EQ(doc.strokes.at("s1").points[1], (Point3{2, 2, 3}));
}

TEST(ApplyOp, TransformOrderIsScaleRotateTranslate) {
  auto doc = sp::apply_op(sp::SketchDocument::empty("d"), sptest::add_op(segment("s1", {1, 0, 0}, {2, 0, 0})));
  const auto quarter = sp::Quaternion::from_axis_angle({0, 0, 1}, std::numbers::pi / 2);
  doc = sp::apply_op(doc, {"t", "a", sp::TransformStroke{"s1", quarter, {0, 0, 5}, 2.0}, std::nullopt});
  const Point3 p = doc.strokes.at("s1").points[0];
  EXPECT_NEAR(p.x, 0.0, 1e-12);
  EXPECT_NEAR(p.y, 2.0, 1e-12);
  EXPECT_NEAR(p.z, 5.0, 1e-12);
}

TEST(ApplyOp, RejectsMalformedOps) {
  const auto doc = sp::apply_op(sp::SketchDocument::empty("d"), sptest::add_op(segment("s1", {0, 0, 0}, {1, 0, 0})));
  EXPECT_EQ(code_of([&] { sp::apply_op(doc, sptest::add_op(segment("s1", {0, 0, 0}, {1, 0, 0}), "dup")); }),
            sp::ErrorCode::DuplicateStrokeId);
  EXPECT_EQ(code_of([&] { sp::apply_op(doc, sptest::add_op(segment("s2", {0, 0, 0}, {0, 0, 0}))); }),
            sp::ErrorCode::DegenerateStroke);
  sp::Stroke lonely;
  lonely.stroke_id = "s3";
  lonely.points = {{0, 0, 0}};
  EXPECT_EQ(code_of([&] { sp::apply_op(doc, sptest::add_op(lonely)); }), sp::ErrorCode::DegenerateStroke);
  EXPECT_EQ(code_of([&] {
              sp::apply_op(doc, sptest::add_op(segment("s4", {0, 0, 0}, {std::nan(""), 0, 0})));
            }),
            sp::ErrorCode::NonFiniteCoordinate);
  EXPECT_EQ(code_of([&] {
              sp::apply_op(doc, {"t", "a", sp::TransformStroke{"s1", {}, {}, 0.0}, std::nullopt});
            }),
            sp::ErrorCode::NonPositiveScale);
  EXPECT_EQ(code_of([&] {
              sp::apply_op(doc, {"t", "a", sp::TransformStroke{"s1", {2, 0, 0, 0}, {}, 1.0}, std::nullopt});
            }),
            sp::ErrorCode::InvalidRotation);
  EXPECT_EQ(code_of([&] { sp::apply_op(doc, {"c", "a", sp::SetCalibration{-1}, std::nullopt}); }),
            sp::ErrorCode::NonPositiveScale);
}

TEST(ApplyOp, InputDocumentUnchanged) {
  const auto doc = sp::apply_op(sp::SketchDocument::empty("d"), sptest::add_op(segment("s1", {0, 0, 0}, {1, 0, 0})));
  const auto copy = doc;
  (void)sp::apply_op(doc, {"x", "a", sp::DeleteStroke{"s1"}, std::nullopt});
  EXPECT_EQ(doc, copy);
}

TEST(Resample, StraightSegmentQuarterSpacing) {
  const std::vector<Point3> pts{{0, 0, 0}, {1, 0, 0}};
  const auto out = sp::resample_stroke(pts, 0.25);
  ASSERT_EQ(out.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(out[static_cast<std::size_t>(i)].x, 0.25 * i, 1e-12);
}

TEST(Resample, SpacingLongerThanStrokeKeepsEndpoints) {
  const std::vector<Point3> pts{{0, 0, 0}, {1, 0, 0}};
  const auto out = sp::resample_stroke(pts, 10.0);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out.front(), pts.front());
  EXPECT_EQ(out.back(), pts.back());
}

TEST(Resample, RightAngleHitsCorner) {
  const std::vector<Point3> pts{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}};
  const auto out = sp::resample_stroke(pts, 0.5);
  ASSERT_EQ(out.size(), 5u);
  EXPECT_NEAR(sp::distance(out[2], {1, 0, 0}), 0.0, 1e-12);
}

TEST(Resample, MatchesArcLengthWalkOracle) {
  sptest::Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto stroke = sptest::random_stroke(rng, "s", {0, 0, 0});
    const double spacing = sptest::uniform(rng, 0.01, 0.3);
    const auto got = sp::resample_stroke(stroke.points, spacing);
    const auto want = sptest::walk_resample(stroke.points, spacing);
    ASSERT_EQ(got.size(), want.size());
    const double tol = 1e-4 * std::max(1.0, sp::polyline_length(stroke.points));
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_LT(sp::distance(got[i], want[i]), tol) << i;
  }
}

TEST(Resample, RejectsBadSpacing) {
  const std::vector<Point3> pts{{0, 0, 0}, {1, 0, 0}};
  EXPECT_EQ(code_of([&] { sp::resample_stroke(pts, 0.0); }), sp::ErrorCode::NonPositiveSpacing);
  EXPECT_EQ(code_of([&] { sp::resample_stroke(pts, -1.0); }), sp::ErrorCode::NonPositiveSpacing);
}

TEST(Calibrate, Ratios) {
  auto scale = [](double m, double a) { return std::get<sp::SetCalibration>(sp::calibrate(m, a).kind).scale; };
  EXPECT_DOUBLE_EQ(scale(0.5, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(scale(1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(scale(2.0, 0.5), 0.25);
  EXPECT_EQ(code_of([] { sp::calibrate(0.0, 1.0); }), sp::ErrorCode::NonPositiveLength);
  EXPECT_EQ(code_of([] { sp::calibrate(1.0, -1.0); }), sp::ErrorCode::NonPositiveLength);
}

TEST(Serialization, RoundTripAndDeterminism) {
  sptest::Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto doc = sptest::random_document(rng);
    const std::string bytes = sp::canonical_serialize(doc);
    EXPECT_EQ(sp::parse_document(bytes), doc);
    EXPECT_EQ(sp::canonical_serialize(sp::parse_document(bytes)), bytes);
  }
}

TEST(Serialization, OutOfOrderStrokesCanonicalize) {
  auto doc = sp::apply_op(sp::SketchDocument::empty("d"), sptest::add_op(segment("b", {0, 0, 0}, {1, 0, 0})));
  doc = sp::apply_op(doc, sptest::add_op(segment("a", {0, 1, 0}, {1, 1, 0})));
  sp::Json j = sp::to_json(doc);
  std::swap(j["strokes"][0], j["strokes"][1]);
  const std::string shuffled = j.dump(2);
  EXPECT_EQ(sp::canonical_serialize(sp::parse_document(shuffled)), sp::canonical_serialize(doc));
}

TEST(Serialization, RejectsBrokenDocuments) {
  const auto doc = sp::apply_op(sp::SketchDocument::empty("d"), sptest::add_op(segment("s1", {0, 0, 0}, {1, 0, 0})));
  sp::Json j = sp::to_json(doc);
  auto expect_malformed = [](const sp::Json& v) {
    EXPECT_EQ(code_of([&] { sp::parse_document(v.dump()); }), sp::ErrorCode::MalformedDocument) << v.dump();
  };
  auto bad = j;
  bad["schema_version"] = 99;
  expect_malformed(bad);
  bad = j;
  bad["revision"] = 5;
  expect_malformed(bad);
  bad = j;
  bad["strokes"][0]["points"] = sp::Json::array({sp::Json::array({0, 0, 0})});
  expect_malformed(bad);
  bad = j;
  bad.erase("op_log");
  expect_malformed(bad);
  EXPECT_EQ(code_of([] { sp::parse_document("{not json"); }), sp::ErrorCode::MalformedDocument);
}

TEST(Digest, StableAndSensitive) {
  sptest::Rng rng(3);
  const auto doc = sptest::random_document(rng);
  EXPECT_EQ(sp::document_digest(doc), sp::document_digest(sp::parse_document(sp::canonical_serialize(doc))));
  const auto more = sp::apply_op(doc, sptest::add_op(segment("zz", {0, 0, 0}, {1, 0, 0})));
  EXPECT_NE(sp::document_digest(doc), sp::document_digest(more));
}

TEST(Replay, ReproducesDocument) {
  sptest::Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto doc = sptest::random_document(rng);
    EXPECT_EQ(sp::document_digest(sp::replay(doc)), sp::document_digest(doc));
  }
}
