#include "estc/projector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "estc/errors.hpp"

namespace estc {

namespace {

double one_norm(const Matrix4& a) {
  double best = 0.0;
  for (int c = 0; c < 4; ++c) {
    double col = 0.0;
    for (int r = 0; r < 4; ++r) col += std::abs(a(r, c));
    best = std::max(best, col);
  }
  return best;
}

Bispinor adjoint_times(const Matrix4& a, const Bispinor& v) {
  Bispinor out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out[c] += std::conj(a(r, c)) * v[r];
  return out;
}

double bispinor_norm(const Bispinor& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

}  // namespace

// ------------------------------------------------------------ Multispinor

Multispinor::Multispinor(std::shared_ptr<const SiteIndex> sites)
    : sites_(std::move(sites)), values_(sites_->size()) {}

Multispinor Multispinor::random(std::shared_ptr<const SiteIndex> sites, std::uint64_t seed) {
  Multispinor c(std::move(sites));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : c.values_)
    for (auto& x : v) {
      const double re = normal(rng);
      const double im = normal(rng);
      x = {re, im};
    }
  return c;
}

Bispinor Multispinor::at(const MultiIndex& n) const {
  const long i = sites_->find(n);
  return i < 0 ? Bispinor{} : values_[static_cast<std::size_t>(i)];
}

double Multispinor::norm() const {
  double s = 0.0;
  for (const auto& v : values_)
    for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

Multispinor& Multispinor::operator+=(const Multispinor& other) {
  for (std::size_t i = 0; i < values_.size(); ++i)
    for (int k = 0; k < 4; ++k) values_[i][k] += other.values_[i][k];
  return *this;
}

Multispinor& Multispinor::operator-=(const Multispinor& other) {
  for (std::size_t i = 0; i < values_.size(); ++i)
    for (int k = 0; k < 4; ++k) values_[i][k] -= other.values_[i][k];
  return *this;
}

Multispinor& Multispinor::operator*=(Complex s) {
  for (auto& v : values_)
    for (auto& x : v) x *= s;
  return *this;
}

// ---------------------------------------------------------- OperatorBlock

const Matrix4* OperatorBlock::phi(std::size_t site_index) const {
  const auto it = std::lower_bound(
      support.begin(), support.end(), site_index,
      [](const SupportEntry& e, std::size_t s) { return e.site < s; });
  if (it == support.end() || it->site != site_index) return nullptr;
  return &it->phi;
}

void OperatorBlock::apply_add(const Multispinor& in, Multispinor& out, double sign) const {
  Bispinor projected{};
  for (const auto& e : support) {
    const Bispinor t = e.phi * in[e.site];
    for (int r = 0; r < 4; ++r) projected[r] += t[r];
  }
  Bispinor y = matrix_from_dset(core) * projected;
  for (auto& x : y) x *= sign;
  for (const auto& e : support) {
    const Bispinor t = adjoint_times(e.phi, y);
    for (int r = 0; r < 4; ++r) out[e.site][r] += t[r];
  }
}

// -------------------------------------------------------------- BareBlock

BareBlock bare_block(const MultiIndex& n, const FieldModel& field, const Window& window) {
  if (!window.contains(n) || !interior(n, window)) {
    throw NotInterior("site " + n.str() + " is not interior to the window");
  }
  BareBlock block;
  block.site = n;
  block.core = field.a(n);
  for (int i = 0; i < 13; ++i) block.row[i] = field.v(n, i);
  return block;
}

OperatorBlock BareBlock::as_operator(const SiteIndex& sites) const {
  OperatorBlock op;
  op.site = site;
  op.core = core;
  const auto& shifts = shifts_s13();
  for (int i = 0; i < 13; ++i) {
    const long idx = sites.find(site + shifts[i]);
    if (idx < 0) throw NotInterior("site " + site.str() + " is not interior to the window");
    op.support.push_back({static_cast<std::size_t>(idx), row[i]});
  }
  std::sort(op.support.begin(), op.support.end(),
            [](const SupportEntry& x, const SupportEntry& y) { return x.site < y.site; });
  return op;
}

Multispinor apply(const BareBlock& block, const Multispinor& c) {
  Multispinor out(c.site_index());
  block.as_operator(c.sites()).apply_add(c, out);
  return out;
}

double residual(const Multispinor& c, const MultiIndex& n, const FieldModel& field) {
  const auto& shifts = shifts_s13();
  for (const auto& s : shifts)
    if (c.sites().find(n + s) < 0) {
      throw NotInterior("site " + n.str() + " is not interior to the window");
    }
  return truncated_residual(c, n, field);
}

double truncated_residual(const Multispinor& c, const MultiIndex& n, const FieldModel& field) {
  const auto& shifts = shifts_s13();
  Bispinor sum{};
  for (int i = 0; i < 13; ++i) {
    const Bispinor t = field.v(n, i) * c.at(n + shifts[i]);
    for (int r = 0; r < 4; ++r) sum[r] += t[r];
  }
  return bispinor_norm(sum);
}

// ------------------------------------------------------ ProjectorOperator

ProjectorOperator::ProjectorOperator(std::shared_ptr<const SiteIndex> sites,
                                     std::vector<OperatorBlock> blocks)
    : sites_(std::move(sites)), blocks_(std::move(blocks)) {}

Matrix4 ProjectorOperator::rho_components(const MultiIndex& m_prime, std::size_t stage,
                                          const MultiIndex& n_prime) const {
  if (stage >= blocks_.size()) throw std::out_of_range("no such stage");
  const long i = sites_->find(m_prime), j = sites_->find(n_prime);
  if (i < 0 || j < 0) return Matrix4::zero();
  const OperatorBlock& block = blocks_[stage];
  const Matrix4* left = block.phi(static_cast<std::size_t>(i));
  const Matrix4* right = block.phi(static_cast<std::size_t>(j));
  if (!left || !right) return Matrix4::zero();
  return left->adjoint() * matrix_from_dset(block.core) * *right;
}

Multispinor ProjectorOperator::apply_block(std::size_t stage, const Multispinor& c) const {
  Multispinor out(c.site_index());
  blocks_.at(stage).apply_add(c, out);
  return out;
}

Multispinor ProjectorOperator::apply_projector(const Multispinor& c) const {
  Multispinor out(c.site_index());
  for (const auto& block : blocks_) block.apply_add(c, out);
  return out;
}

Multispinor ProjectorOperator::apply_fundamental(const Multispinor& c0) const {
  Multispinor out = c0;
  for (const auto& block : blocks_) block.apply_add(c0, out, -1.0);
  return out;
}

// ---------------------------------------------------------- CouplingStore

Matrix4 CouplingStore::get(std::size_t k, std::size_t j) const {
  if (k == j) throw std::invalid_argument("C_kk is not defined");
  return k > j ? rows_[k][j] : rows_[j][k].adjoint();
}

// --------------------------------------------------- ProjectorAccumulator

ProjectorAccumulator::ProjectorAccumulator(FieldModel field, const Window& window,
                                           EngineOptions options)
    : field_(std::move(field)),
      options_(options),
      schedule_(make_schedule(window)),
      op_(std::make_shared<const SiteIndex>(window), {}) {}

void ProjectorAccumulator::run() {
  if (schedule_.size() > options_.max_stages) {
    throw CapacityExceeded("schedule has " + std::to_string(schedule_.size()) +
                           " stages, cap is " + std::to_string(options_.max_stages));
  }
  while (!complete()) stage_step(schedule_[stages_done()]);
}

void ProjectorAccumulator::stage_step(const MultiIndex& m) {
  const std::size_t k = stages_done();
  if (k >= schedule_.size() || schedule_[k] != m) {
    throw std::invalid_argument("site " + m.str() + " is not the next scheduled site");
  }
  if (k >= options_.max_stages) {
    throw CapacityExceeded("stage cap of " + std::to_string(options_.max_stages) + " reached");
  }
  const SiteIndex& sites = *op_.sites_;
  const auto& shifts = shifts_s13();
  const auto& blocks = op_.blocks_;

  // Row overlaps N(m, n_j); most vanish (g4d > 2 or no shared amplitude).
  std::vector<Matrix4> overlap(k);
  std::vector<char> coupled(k, 0);
  for (std::size_t j = 0; j < k; ++j) {
    if (!couples(m, schedule_[j])) continue;
    coupled[j] = 1;
    overlap[j] = field_.overlap(m, schedule_[j]);
  }

  // D_kj(m, n_j) = [N(m, n_j) - sum_{i<j} N(m, n_i) C_ij(n_i, n_j)] A_j(n_j).
  std::vector<Matrix4> d(k);
  std::vector<char> d_nonzero(k, 0);
  for (std::size_t j = 0; j < k; ++j) {
    Matrix4 t;
    bool any = false;
    if (coupled[j]) {
      t = overlap[j];
      any = true;
    }
    for (std::size_t i = 0; i < j; ++i) {
      if (!coupled[i]) continue;
      t -= overlap[i] * couplings_.lower(j, i).adjoint();
      any = true;
    }
    if (!any) continue;
    d[j] = t * matrix_from_dset(blocks[j].core);
    d_nonzero[j] = 1;
  }

  // C_ki = D_ki - sum_{i<j<k} D_kj C_ji, from i = k-1 down to 0.
  std::vector<Matrix4> c(k);
  for (std::size_t ii = k; ii-- > 0;) {
    Matrix4 t = d[ii];
    for (std::size_t j = ii + 1; j < k; ++j) {
      if (!d_nonzero[j]) continue;
      t -= d[j] * couplings_.lower(j, ii);
    }
    c[ii] = t;
  }

  // G_k(m) = sum_j C_kj(m, n_j) N(n_j, m); A_k = [L(m) - G_k(m)]^{-1}.
  Matrix4 g;
  for (std::size_t j = 0; j < k; ++j)
    if (coupled[j]) g += c[j] * overlap[j].adjoint();

  StageDiagnostics diag;
  diag.stage = k;
  diag.site = m;

  const DSet raw = dset_from_matrix(matrix_from_dset(field_.l(m)) - g);
  diag.hermiticity_defect = raw.max_imag();
  const DSet reduced = raw.real_part();
  DSet core;
  if (k == 0) {
    core = field_.a(m);
  } else {
    try {
      core = dset_inverse(reduced);
    } catch (const SingularMatrix&) {
      throw StageSingular(k, m.str(), 0.0);
    }
  }
  diag.rcond = 1.0 / (one_norm(matrix_from_dset(reduced)) * one_norm(matrix_from_dset(core)));
  if (!(diag.rcond >= options_.rcond_threshold)) throw StageSingular(k, m.str(), diag.rcond);

  // Phi_k(m, n') = V(m, n' - m) - sum_j C_kj(m, n_j) V(n_j, n' - n_j).
  std::vector<Matrix4> phi(sites.size());
  std::vector<char> touched(sites.size(), 0);
  auto site_of = [&](const MultiIndex& n) {
    const long idx = sites.find(n);
    if (idx < 0) throw NotInterior("support of " + m.str() + " leaves the window");
    return static_cast<std::size_t>(idx);
  };
  for (int i = 0; i < 13; ++i) {
    const std::size_t idx = site_of(m + shifts[i]);
    phi[idx] += field_.v(m, i);
    touched[idx] = 1;
  }
  for (std::size_t j = 0; j < k; ++j) {
    const MultiIndex& n = schedule_[j];
    for (int i = 0; i < 13; ++i) {
      const std::size_t idx = site_of(n + shifts[i]);
      phi[idx] -= c[j] * field_.v(n, i);
      touched[idx] = 1;
    }
  }

  OperatorBlock block;
  block.stage = k;
  block.site = m;
  block.core = core;
  for (std::size_t idx = 0; idx < sites.size(); ++idx)
    if (touched[idx]) block.support.push_back({idx, phi[idx]});
  diag.support_size = block.support.size();

  op_.blocks_.push_back(std::move(block));
  couplings_.append(std::move(c));
  diagnostics_.push_back(diag);
}

}  // namespace estc
