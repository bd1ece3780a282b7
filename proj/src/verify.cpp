#include "estc/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "estc/config.hpp"
#include "json.hpp"

namespace estc {

namespace {

constexpr double kExact = 0.0;
constexpr double kAlgebraTol = 1e-12;
constexpr double kInvariantTol = 1e-10;
constexpr double kBlockTol = 1e-8;

using Dense4 = Eigen::Matrix4cd;

Dense4 dense(const Matrix4& a) {
  Dense4 out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out(r, c) = a(r, c);
  return out;
}

Matrix4 random_matrix(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix4 a;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const double re = normal(rng);
      a(r, c) = {re, normal(rng)};
    }
  return a;
}

double rel(const Matrix4& got, const Matrix4& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}

double rel(Complex got, Complex want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

Complex dot(const Multispinor& x, const Multispinor& y) {
  Complex s{};
  for (std::size_t i = 0; i < x.size(); ++i)
    for (int k = 0; k < 4; ++k) s += std::conj(x[i][k]) * y[i][k];
  return s;
}

Complex block_trace(const OperatorBlock& b) {
  const Matrix4 core = matrix_from_dset(b.core);
  Complex t{};
  for (const auto& e : b.support) t += (e.phi.adjoint() * core * e.phi).trace();
  return t;
}

}  // namespace

CheckResult make_check(std::string name, double observed, double tolerance) {
  return {std::move(name), observed, tolerance, observed <= tolerance};
}

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string RunReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.passed) {
      return c.name + ": observed " + format_double(c.observed) + " exceeds tolerance " +
             format_double(c.tolerance);
    }
  return {};
}

std::string RunReport::to_json() const {
  using nlohmann::ordered_json;
  auto site = [](const MultiIndex& m) { return ordered_json::array({m[0], m[1], m[2], m[3]}); };
  ordered_json doc;
  doc["command"] = command;
  doc["fingerprint"] = format_hex64(fingerprint);
  doc["passed"] = passed();
  ordered_json checks_json = ordered_json::array();
  for (const auto& c : checks) {
    checks_json.push_back(ordered_json{{"name", c.name},
                                       {"observed", c.observed},
                                       {"tolerance", c.tolerance},
                                       {"passed", c.passed}});
  }
  doc["checks"] = std::move(checks_json);
  ordered_json stages_json = ordered_json::array();
  for (const auto& s : stages) {
    stages_json.push_back(ordered_json{{"stage", s.stage},
                                       {"site", site(s.site)},
                                       {"rcond", s.rcond},
                                       {"hermiticity_defect", s.hermiticity_defect},
                                       {"support_size", s.support_size}});
  }
  doc["stages"] = std::move(stages_json);
  if (!residuals.empty()) {
    double max_processed = 0.0;
    std::vector<double> other;
    for (const auto& r : residuals) {
      if (r.processed) max_processed = std::max(max_processed, r.residual);
      else other.push_back(r.residual);
    }
    std::sort(other.begin(), other.end());
    double median = 0.0;
    if (!other.empty()) {
      const std::size_t h = other.size() / 2;
      median = other.size() % 2 ? other[h] : 0.5 * (other[h - 1] + other[h]);
    }
    ordered_json rows = ordered_json::array();
    for (const auto& r : residuals) {
      rows.push_back(ordered_json{{"site", site(r.site)},
                                  {"g4d", r.g4d},
                                  {"processed", r.processed},
                                  {"interior", r.interior},
                                  {"residual", r.residual}});
    }
    doc["residual_summary"] = ordered_json{{"max_processed", max_processed},
                                           {"median_unprocessed", median},
                                           {"unprocessed_sites", other.size()}};
    doc["residuals"] = std::move(rows);
  }
  doc["notes"] = notes;
  return doc.dump(1) + "\n";
}

std::vector<CheckResult> check_dset_algebra(const StructureTable& table, std::uint64_t seed,
                                            int samples) {
  std::vector<CheckResult> out;

  double involution = 0.0;
  for (int nu = 0; nu < 16; ++nu) {
    const Matrix4 g = gamma_matrix(DiracIndex(nu));
    involution = std::max({involution, (g * g - Matrix4::identity()).max_abs(), (g - g.adjoint()).max_abs()});
  }
  out.push_back(make_check("gamma.hermitian_involution", involution, kExact));

  double table_err = 0.0;
  for (int l = 0; l < 16; ++l)
    for (int u = 0; u < 16; ++u) {
      const auto& sc = table(l, u);
      const Matrix4 lhs = gamma_matrix(DiracIndex(l)) * gamma_matrix(DiracIndex(u));
      const Matrix4 rhs = gamma_matrix(sc.product) * sc.phase;
      table_err = std::max(table_err, (lhs - rhs).max_abs());
    }
  out.push_back(make_check("dset.structure_table_vs_dense", table_err, kExact));

  std::mt19937_64 rng(seed);
  double roundtrip = 0.0, product = 0.0, square = 0.0, trace = 0.0, det = 0.0, adj = 0.0, inv = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Matrix4 a = random_matrix(rng), b = random_matrix(rng);
    const DSet da = dset_from_matrix(a), db = dset_from_matrix(b);
    roundtrip = std::max(roundtrip, rel(matrix_from_dset(da), a));
    product = std::max(product, rel(matrix_from_dset(dset_multiply(da, db, table)), a * b));
    const DSet sq = dset_multiply(da, da, table);
    square = std::max(square, rel(matrix_from_dset(dset_square(da)), matrix_from_dset(sq)));
    const CharInvariants ci = char_invariants(da);
    trace = std::max(trace, rel(ci.i1, a.trace()));
    det = std::max(det, rel(ci.i4, dense(a).determinant()));
    adj = std::max(adj, rel(a * matrix_from_dset(dset_adjoint(da)), Matrix4::identity() * ci.i4));
    Matrix4 shifted = a;
    for (int k = 0; k < 4; ++k) shifted(k, k) += 6.0;
    const Matrix4 x = matrix_from_dset(dset_inverse(dset_from_matrix(shifted)));
    inv = std::max(inv, rel(shifted * x, Matrix4::identity()));
  }
  out.push_back(make_check("dset.roundtrip", roundtrip, kAlgebraTol));
  out.push_back(make_check("dset.multiply_vs_dense", product, kAlgebraTol));
  out.push_back(make_check("dset.square_closed_form", square, kAlgebraTol));
  out.push_back(make_check("dset.invariant_trace", trace, kInvariantTol));
  out.push_back(make_check("dset.invariant_determinant", det, kInvariantTol));
  out.push_back(make_check("dset.adjugate", adj, kInvariantTol));
  out.push_back(make_check("dset.inverse", inv, kInvariantTol));
  return out;
}

std::vector<CheckResult> check_field_model(const FieldModel& field, const Window& window) {
  const auto sites = window_points(window);
  double gram = 0.0, inverse = 0.0, det_sq = 0.0, hermitian = 0.0, range = 0.0;
  double min_det = std::numeric_limits<double>::infinity();
  for (const auto& n : sites) {
    Matrix4 sum;
    for (int i = 0; i < 13; ++i) sum += field.v(n, i) * field.v(n, i).adjoint();
    const Matrix4 l = matrix_from_dset(field.l(n));
    gram = std::max(gram, rel(l, sum));
    inverse = std::max(inverse, rel(matrix_from_dset(field.a(n)) * l, Matrix4::identity()));
    const double d = field.det(n);
    const Complex dense_det = dense(l).determinant();
    det_sq = std::max(det_sq, rel(Complex(d * d), dense_det));
    min_det = std::min(min_det, d);
  }
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = i; j < sites.size(); ++j) {
      const int gen = g4d(sites[j] - sites[i]);
      if (gen > 3) continue;
      const Matrix4 nij = field.overlap(sites[i], sites[j]);
      if (gen > 2) {
        range = std::max(range, nij.max_abs());
        continue;
      }
      const Matrix4 nji = field.overlap(sites[j], sites[i]);
      hermitian = std::max(hermitian, (nji - nij.adjoint()).max_abs());
    }
  return {
      make_check("field.gram_sum", gram, kAlgebraTol),
      make_check("field.a_inverts_l", inverse, kAlgebraTol),
      make_check("field.det_squared_vs_dense", det_sq, kAlgebraTol),
      make_check("field.det_positive", min_det > 0.0 ? 0.0 : 1.0, kExact),
      make_check("field.overlap_hermitian", hermitian, 1e-14),
      make_check("field.overlap_vanishes_past_g4d_2", range, kExact),
  };
}

std::vector<CheckResult> check_projector(const ProjectorAccumulator& acc, std::uint64_t seed,
                                         double residual_tol) {
  const ProjectorOperator& op = acc.op();
  const auto& sites = op.sites();
  const std::size_t k = op.stages();
  const Multispinor x = Multispinor::random(sites, seed);
  const Multispinor y = Multispinor::random(sites, seed + 1);
  const double nx = x.norm(), ny = y.norm();

  std::vector<Multispinor> rx;
  rx.reserve(k);
  double hermitian = 0.0, idempotent = 0.0, trace = 0.0;
  Complex total_trace{};
  for (std::size_t s = 0; s < k; ++s) {
    rx.push_back(op.apply_block(s, x));
    const Multispinor ry = op.apply_block(s, y);
    hermitian = std::max(hermitian, std::abs(dot(x, ry) - dot(rx[s], y)) / (nx * ny));
    idempotent = std::max(idempotent, (op.apply_block(s, rx[s]) - rx[s]).norm() / nx);
    const Complex t = block_trace(op.blocks()[s]);
    trace = std::max(trace, std::abs(t - 4.0));
    total_trace += t;
  }
  double orthogonal = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j) orthogonal = std::max(orthogonal, op.apply_block(i, rx[j]).norm() / nx);

  Multispinor px(sites);
  for (const auto& r : rx) px += r;
  double absorption = 0.0, residual = 0.0;
  const Window& window = sites->window();
  const Multispinor c = x - px;
  for (std::size_t s = 0; s < k; ++s) {
    const BareBlock bare = bare_block(acc.schedule()[s], acc.field(), window);
    absorption = std::max(absorption, (apply(bare, px) - apply(bare, x)).norm() / nx);
    residual = std::max(residual, ::estc::residual(c, acc.schedule()[s], acc.field()) / nx);
  }

  return {
      make_check("projector.block_hermitian", hermitian, kBlockTol),
      make_check("projector.block_idempotent", idempotent, kBlockTol),
      make_check("projector.block_trace", trace, kBlockTol),
      make_check("projector.pairwise_orthogonal", orthogonal, kBlockTol),
      make_check("projector.total_trace", std::abs(total_trace - 4.0 * static_cast<double>(k)), 1e-6),
      make_check("projector.absorption", absorption, kBlockTol),
      make_check("projector.fundamental_residual", residual, residual_tol),
  };
}

std::vector<ResidualRow> residual_table(const Multispinor& c, const FieldModel& field,
                                        const std::vector<MultiIndex>& processed) {
  const SiteIndex& sites = c.sites();
  std::vector<char> flag(sites.size(), 0);
  for (const auto& n : processed) {
    const long i = sites.find(n);
    if (i >= 0) flag[static_cast<std::size_t>(i)] = 1;
  }
  std::vector<ResidualRow> rows;
  rows.reserve(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const MultiIndex& n = sites.site(i);
    rows.push_back({n, g4d(n - sites.window().center), flag[i] != 0, interior(n, sites.window()),
                    truncated_residual(c, n, field)});
  }
  return rows;
}

std::string residual_csv(const std::vector<ResidualRow>& rows) {
  std::string out = "n1,n2,n3,n4,g4d,processed,interior,residual\n";
  for (const auto& r : rows) {
    for (int x : r.site.n) out += std::to_string(x) + ",";
    out += std::to_string(r.g4d) + "," + (r.processed ? "1" : "0") + "," + (r.interior ? "1" : "0") +
           "," + format_double(r.residual) + "\n";
  }
  return out;
}

std::string stages_csv(const std::vector<StageDiagnostics>& stages, const Window& window) {
  std::string out = "stage,n1,n2,n3,n4,g4d,rcond,hermiticity_defect,support_size\n";
  for (const auto& s : stages) {
    out += std::to_string(s.stage);
    for (int x : s.site.n) out += "," + std::to_string(x);
    out += "," + std::to_string(g4d(s.site - window.center)) + "," + format_double(s.rcond) + "," +
           format_double(s.hermiticity_defect) + "," + std::to_string(s.support_size) + "\n";
  }
  return out;
}

}  // namespace estc
