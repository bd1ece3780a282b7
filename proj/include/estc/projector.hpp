#pragma once

// Recurrent construction of the projector of the truncated lattice system
// P(n) C = 0 (n interior to a window) and of the fundamental solution
// S = U - P.
//
// The projector is assembled one site per stage. Stage k adds
//   rho_k(m) = F_k(m)^dagger A_k(m) F_k(m),
// where the one-form F_k(m) is the equation row f(m) with its component in
// the span of all earlier rows removed, and A_k(m) = [L(m) - G_k(m)]^{-1}.
// Each block is stored as its 4x4 core A_k plus the components
// Phi_k(m, n') = <F_k(m), e(n')> over its support.

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "estc/dset.hpp"
#include "estc/field_model.hpp"
#include "estc/lattice.hpp"

namespace estc {

// Bispinor amplitudes c(n) over the sites of a window.
class Multispinor {
 public:
  explicit Multispinor(std::shared_ptr<const SiteIndex> sites);

  // Independent standard-normal real and imaginary parts at every site.
  static Multispinor random(std::shared_ptr<const SiteIndex> sites, std::uint64_t seed);

  const SiteIndex& sites() const { return *sites_; }
  const std::shared_ptr<const SiteIndex>& site_index() const { return sites_; }
  std::size_t size() const { return values_.size(); }

  Bispinor& operator[](std::size_t i) { return values_[i]; }
  const Bispinor& operator[](std::size_t i) const { return values_[i]; }
  // Zero for sites outside the window.
  Bispinor at(const MultiIndex& n) const;

  double norm() const;

  Multispinor& operator+=(const Multispinor& other);
  Multispinor& operator-=(const Multispinor& other);
  Multispinor& operator*=(Complex s);
  friend Multispinor operator+(Multispinor a, const Multispinor& b) { return a += b; }
  friend Multispinor operator-(Multispinor a, const Multispinor& b) { return a -= b; }

 private:
  std::shared_ptr<const SiteIndex> sites_;
  std::vector<Bispinor> values_;
};

// Components of one stage block over its support.
struct SupportEntry {
  std::size_t site;  // index into the window's SiteIndex
  Matrix4 phi;
};

struct OperatorBlock {
  std::size_t stage = 0;
  MultiIndex site{};
  DSet core;                          // A_k(m), real D-set
  std::vector<SupportEntry> support;  // ascending site index

  // Phi_k(m, n') for n' given by its site index; nullptr outside the support.
  const Matrix4* phi(std::size_t site_index) const;
  // out += sign * rho_k(m) in.
  void apply_add(const Multispinor& in, Multispinor& out, double sign = 1.0) const;
};

// The single-row projector P(n) = f(n)^dagger a(n) f(n).
struct BareBlock {
  MultiIndex site{};
  DSet core;                      // a(n)
  std::array<Matrix4, 13> row{};  // V(n, s_i)

  OperatorBlock as_operator(const SiteIndex& sites) const;
};

// Throws NotInterior when a neighbor of n leaves the window.
BareBlock bare_block(const MultiIndex& n, const FieldModel& field, const Window& window);
Multispinor apply(const BareBlock& block, const Multispinor& c);

// |sum_s V(n, s) c(n + s)|. Throws NotInterior.
double residual(const Multispinor& c, const MultiIndex& n, const FieldModel& field);
// Same sum with amplitudes outside the window taken as zero; defined for
// every window site. Equals residual() on interior sites.
double truncated_residual(const Multispinor& c, const MultiIndex& n, const FieldModel& field);

// A finished (or partial) projector: the window numbering plus the blocks.
// This is everything needed to apply P or S; the coupling recurrences are
// not part of it.
class ProjectorOperator {
 public:
  ProjectorOperator(std::shared_ptr<const SiteIndex> sites, std::vector<OperatorBlock> blocks);

  const std::shared_ptr<const SiteIndex>& sites() const { return sites_; }
  const std::vector<OperatorBlock>& blocks() const { return blocks_; }
  std::size_t stages() const { return blocks_.size(); }

  // R_k(m', m, n') = Phi_k(m, m')^dagger A_k(m) Phi_k(m, n'); zero outside support.
  Matrix4 rho_components(const MultiIndex& m_prime, std::size_t stage,
                         const MultiIndex& n_prime) const;
  Multispinor apply_block(std::size_t stage, const Multispinor& c) const;
  Multispinor apply_projector(const Multispinor& c) const;
  // C = C0 - P C0.
  Multispinor apply_fundamental(const Multispinor& c0) const;

 private:
  friend class ProjectorAccumulator;
  std::shared_ptr<const SiteIndex> sites_;
  std::vector<OperatorBlock> blocks_;
};

struct EngineOptions {
  double rcond_threshold = 1e-10;
  // Coupling storage grows quadratically in stages.
  std::size_t max_stages = 1024;
};

struct StageDiagnostics {
  std::size_t stage = 0;
  MultiIndex site{};
  double rcond = 0.0;               // of L(m) - G_k(m), 1-norm estimate
  double hermiticity_defect = 0.0;  // largest imaginary D-set part of L - G before symmetrizing
  std::size_t support_size = 0;
};

// C_kj(m_k, m_j) for j < k. The transposed family is C_jk = C_kj^dagger and
// is never stored.
class CouplingStore {
 public:
  std::size_t stages() const { return rows_.size(); }
  // C_kj for any k != j.
  Matrix4 get(std::size_t k, std::size_t j) const;
  const Matrix4& lower(std::size_t k, std::size_t j) const { return rows_[k][j]; }
  void append(std::vector<Matrix4> row) { rows_.push_back(std::move(row)); }

 private:
  std::vector<std::vector<Matrix4>> rows_;
};

class ProjectorAccumulator {
 public:
  ProjectorAccumulator(FieldModel field, const Window& window, EngineOptions options = {});

  const FieldModel& field() const { return field_; }
  const StageSchedule& schedule() const { return schedule_; }
  const ProjectorOperator& op() const { return op_; }
  const CouplingStore& couplings() const { return couplings_; }
  const std::vector<StageDiagnostics>& diagnostics() const { return diagnostics_; }
  std::size_t stages_done() const { return op_.blocks_.size(); }
  bool complete() const { return stages_done() == schedule_.size(); }

  // Adds the block for m, which must be the next scheduled site. Throws
  // StageSingular when L(m) - G_k(m) is (nearly) singular and
  // CapacityExceeded past options.max_stages.
  void stage_step(const MultiIndex& m);
  // Runs every remaining stage.
  void run();

 private:
  FieldModel field_;
  EngineOptions options_;
  StageSchedule schedule_;
  ProjectorOperator op_;
  CouplingStore couplings_;
  std::vector<StageDiagnostics> diagnostics_;
};

}  // namespace estc
