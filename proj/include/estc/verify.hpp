#pragma once

// Invariant suites run by `verify` (and partly by `build` / `apply`) plus
// the run report they feed.

#include <cstdint>
#include <string>
#include <vector>

#include "estc/dset.hpp"
#include "estc/field_model.hpp"
#include "estc/projector.hpp"

namespace estc {

struct CheckResult {
  std::string name;  // the invariant, e.g. "dset.multiply_vs_dense"
  double observed = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// observed <= tolerance; NaN fails.
CheckResult make_check(std::string name, double observed, double tolerance);

struct ResidualRow {
  MultiIndex site{};
  int g4d = 0;          // from the window center
  bool processed = false;
  bool interior = false;
  double residual = 0.0;  // |f(n) C| with zero extension past the window
};

struct RunReport {
  std::string command;
  std::uint64_t fingerprint = 0;
  std::vector<StageDiagnostics> stages;
  std::vector<ResidualRow> residuals;
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;

  bool passed() const;
  void add(const std::vector<CheckResult>& more) { checks.insert(checks.end(), more.begin(), more.end()); }
  // Deterministic JSON; no timings.
  std::string to_json() const;
  // First failing check as "name: observed (tolerance)"; empty if none.
  std::string first_failure() const;
};

// Gamma listing properties, the multiplication table against dense products,
// D-set product / square / invariants / inverse on seeded random matrices.
// `table` is the table under test (the standard one unless injected).
std::vector<CheckResult> check_dset_algebra(const StructureTable& table, std::uint64_t seed,
                                            int samples = 200);

// L = sum V V^dagger, a L = U, det L = |L|^2 > 0, N(n,m) = N(m,n)^dagger,
// N = 0 past g4d 2, at every site of the window.
std::vector<CheckResult> check_field_model(const FieldModel& field, const Window& window);

// Block Hermiticity, idempotence, trace 4, pairwise orthogonality, total
// trace, absorption of every processed row, and the fundamental-solution
// residual, probed with seeded random multispinors.
std::vector<CheckResult> check_projector(const ProjectorAccumulator& acc, std::uint64_t seed,
                                         double residual_tol);

// Residual of C at every window site; `processed` marks scheduled sites.
std::vector<ResidualRow> residual_table(const Multispinor& c, const FieldModel& field,
                                        const std::vector<MultiIndex>& processed);
std::string residual_csv(const std::vector<ResidualRow>& rows);
// stage,n1..n4,g4d,rcond,hermiticity_defect,support_size
std::string stages_csv(const std::vector<StageDiagnostics>& stages, const Window& window);

}  // namespace estc
