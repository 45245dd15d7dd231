#pragma once

#include <array>
#include <string>
#include <vector>

#include "spatialprompt/constraints.hpp"
#include "spatialprompt/mesh.hpp"

namespace spatialprompt {

/// Engine defaults; all overridable from the CLI.
struct ValidationTolerances {
  double containment_min_fraction = 0.99;
  /// Each half extent grows by max(floor, fraction x global box diagonal).
  double containment_inflation_fraction = 0.05;
  double containment_inflation_floor = 0.005;
  double proportion_tolerance = 0.15;
  double proximity_fraction = 0.05;  // of the global box diagonal
  double proximity_floor = 0.01;     // meters
};

enum class CheckKind { Hard, Soft };

struct CheckResult {
  std::string name;
  CheckKind kind = CheckKind::Hard;
  std::string target;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  friend bool operator==(const CheckResult&, const CheckResult&) = default;
};

struct ValidationReport {
  std::string source_digest;
  std::vector<CheckResult> checks;
  double score = 0.0;
  bool overall_pass = false;
  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// score = passing / total (1 for an empty list); overall_pass = every hard check passes.
ValidationReport make_report(std::vector<CheckResult> checks, std::string source_digest = {});

struct StrokeProximity {
  std::string stroke_id;
  double p95 = 0.0;
  double threshold = 0.0;
  bool hard = true;
  bool pass = false;
};

/// Linear-interpolation percentile, q in [0, 1].
double percentile(std::vector<double> values, double q);

std::vector<StrokeProximity> scaffold_proximity(const TriangleMesh& mesh, const ConstraintSet& cs,
                                                const ValidationTolerances& tol = {});

/// Fraction of mesh vertices inside `box` with each half extent grown by `margin`.
double containment_check(const TriangleMesh& mesh, const OrientedBox& box, double margin);
double containment_margin(const OrientedBox& box, const ValidationTolerances& tol = {});

struct ProportionResult {
  std::array<double, 3> measured{};
  std::array<double, 3> target{};
  double deviation = 0.0;  // max |measured_i - target_i| on max-normalized triples
  bool pass = false;
};

ProportionResult proportion_check(const TriangleMesh& mesh, const ConstraintSet& cs,
                                  const ValidationTolerances& tol = {});

struct RelationResult {
  SpatialRelation expected;
  bool reproduced = false;
};

std::vector<RelationResult> relation_check(const TriangleMesh& mesh, const ConstraintSet& cs);

ValidationReport validate(const TriangleMesh& mesh, const ConstraintSet& cs,
                          const ValidationTolerances& tol = {});

Json to_json(const ValidationReport& report);
std::string serialize_report(const ValidationReport& report);
ValidationReport parse_report(std::string_view bytes);

}  // namespace spatialprompt
