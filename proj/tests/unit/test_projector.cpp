#include <stdexcept>

#include "doctest.h"
#include "estc/combiner.hpp"
#include "estc/errors.hpp"
#include "estc/projector.hpp"
#include "oracles.hpp"

using namespace estc;
using Eigen::MatrixXcd;

namespace {

struct Setup {
  FieldConfig field;
  DimensionlessParams params;
};

Setup random_setup(std::uint64_t seed) {
  oracle::Rng rng(seed);
  return {oracle::random_field(rng), oracle::random_params(rng)};
}

MatrixXcd dense_operator(const ProjectorOperator& op) {
  const auto n = static_cast<Eigen::Index>(4 * op.sites()->size());
  MatrixXcd out(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
    e(c) = 1.0;
    out.col(c) = oracle::to_vector(op.apply_projector(oracle::from_vector(e, op.sites())));
  }
  return out;
}

double dist(const MatrixXcd& a, const MatrixXcd& b) { return (a - b).norm(); }

}  // namespace

TEST_CASE("bare block P(n) = f(n)^dagger a(n) f(n)") {
  const Setup s = random_setup(301);
  const FieldModel field(s.field, s.params);
  const Window w{2, {}};
  const auto sites = std::make_shared<const SiteIndex>(w);

  oracle::Rng rng(302);
  for (int trial = 0; trial < 10; ++trial) {
    const MultiIndex n = oracle::random_site(rng, 1);
    if (!interior(n, w)) continue;
    CAPTURE(n.str());
    const BareBlock b = bare_block(n, field, w);
    CHECK(oracle::max_abs_diff(b.core, field.a(n)) == 0.0);
    const MatrixXcd p = oracle::dense_block(b.as_operator(*sites), *sites);
    const MatrixXcd want = oracle::row_projector(oracle::dense_row(n, *sites, s.field, s.params));
    CHECK(dist(p, want) <= 1e-10 * want.norm());
    CHECK(dist(p, p.adjoint()) <= 1e-12);
    CHECK(dist(p * p, p) <= 1e-10);
    CHECK(std::abs(p.trace() - 4.0) <= 1e-10);

    const Multispinor c = Multispinor::random(sites, 1000 + trial);
    const Multispinor pc = apply(b, c);
    CHECK((oracle::to_vector(pc) - p * oracle::to_vector(c)).norm() <= 1e-10 * c.norm());
    // P(n) C solves the row equation's image; (U - P(n)) C solves row n.
    CHECK(residual(c - pc, n, field) <= 1e-10 * c.norm());
  }

  SUBCASE("product of two bare blocks has core a(m) N(m,n) a(n)") {
    const MultiIndex m{}, n{{0, 0, 1, 1}};
    const MatrixXcd fm = oracle::dense_row(m, *sites, s.field, s.params);
    const MatrixXcd fn = oracle::dense_row(n, *sites, s.field, s.params);
    const MatrixXcd pm = oracle::dense_block(bare_block(m, field, w).as_operator(*sites), *sites);
    const MatrixXcd pn = oracle::dense_block(bare_block(n, field, w).as_operator(*sites), *sites);
    const MatrixXcd core = oracle::matrix_of(field.a(m)) * oracle::to_eigen(field.overlap(m, n)) *
                           oracle::matrix_of(field.a(n));
    CHECK(dist(pm * pn, fm.adjoint() * core * fn) <= 1e-10 * (pm * pn).norm());
  }

  CHECK_THROWS_AS(bare_block(MultiIndex{{0, 0, 2, 0}}, field, w), NotInterior);
  CHECK_THROWS_AS(bare_block(MultiIndex{{0, 0, 0, 6}}, field, w), NotInterior);
  CHECK_NOTHROW(bare_block(MultiIndex{{0, 0, 1, 1}}, field, w));
}

TEST_CASE("residual") {
  const Setup s = random_setup(311);
  const FieldModel field(s.field, s.params);
  const Window w{2, {}};
  const auto sites = std::make_shared<const SiteIndex>(w);
  const Multispinor zero(sites);
  CHECK(residual(zero, MultiIndex{}, field) == 0.0);

  const Multispinor c = Multispinor::random(sites, 7);
  const MatrixXcd f = oracle::dense_row(MultiIndex{}, *sites, s.field, s.params);
  CHECK(std::abs(residual(c, MultiIndex{}, field) - (f * oracle::to_vector(c)).norm()) <=
        1e-12 * c.norm());
  for (const auto& n : make_schedule(w).sites)
    CHECK(residual(c, n, field) == truncated_residual(c, n, field));
  CHECK_THROWS_AS(residual(c, MultiIndex{{0, 0, 2, 2}}, field), NotInterior);
  CHECK_NOTHROW(truncated_residual(c, MultiIndex{{0, 0, 2, 2}}, field));
}

TEST_CASE("first stages") {
  const Setup s = random_setup(321);
  const FieldModel field(s.field, s.params);
  const Window w{2, {}};
  ProjectorAccumulator acc(field, w);
  const auto& sched = acc.schedule();
  acc.stage_step(sched[0]);
  acc.stage_step(sched[1]);

  const auto& b0 = acc.op().blocks()[0];
  CHECK(oracle::max_abs_diff(b0.core, field.a(sched[0])) == 0.0);
  CHECK(b0.support.size() == 13);

  // C_10 = N(n1, n0) a(n0); A_1 = [L(n1) - C_10 N(n0, n1)]^{-1}.
  const Matrix4 c10 = field.overlap(sched[1], sched[0]) * matrix_from_dset(field.a(sched[0]));
  CHECK((acc.couplings().get(1, 0) - c10).max_abs() <= 1e-12);
  CHECK((acc.couplings().get(0, 1) - c10.adjoint()).max_abs() <= 1e-12);
  const oracle::Mat4 l_minus_g = oracle::matrix_of(field.l(sched[1])) -
                                 oracle::to_eigen(c10 * field.overlap(sched[0], sched[1]));
  CHECK(oracle::rel_err(oracle::matrix_of(acc.op().blocks()[1].core), l_minus_g.inverse()) <= 1e-10);

  CHECK_THROWS_AS(acc.stage_step(sched[1]), std::invalid_argument);
  CHECK_THROWS_AS(acc.stage_step(sched[3]), std::invalid_argument);
  CHECK(acc.stages_done() == 2);
  CHECK_FALSE(acc.complete());
}

TEST_CASE("engine projector matches the dense row projector") {
  for (int radius : {2, 3}) {
    for (std::uint64_t seed : {331u, 332u, 333u}) {
      if (radius == 3 && seed != 331u) continue;
      CAPTURE(radius);
      CAPTURE(seed);
      const Setup s = random_setup(seed);
      const Window w{radius, {}};
      ProjectorAccumulator acc(FieldModel(s.field, s.params), w);
      acc.run();
      REQUIRE(acc.complete());
      const ProjectorOperator& op = acc.op();
      const auto& sched = acc.schedule();
      const std::size_t k = sched.size();
      CHECK(op.stages() == k);

      const MatrixXcd p = dense_operator(op);
      const MatrixXcd want =
          oracle::row_projector(oracle::dense_rows(sched.sites, *op.sites(), s.field, s.params));
      CHECK(dist(p, want) <= 1e-8 * want.norm());
      CHECK(dist(p, p.adjoint()) <= 1e-10);
      CHECK(dist(p * p, p) <= 1e-8);
      CHECK(std::abs(p.trace() - 4.0 * static_cast<double>(k)) <= 1e-8 * static_cast<double>(k));

      for (const auto& d : acc.diagnostics()) {
        CHECK(d.hermiticity_defect <= 1e-10);
        CHECK(d.rcond > 1e-10);
      }

      // Absorption: P(n) P = P(n) for every processed row.
      for (std::size_t i = 0; i < k; i += 7) {
        const auto bare = oracle::dense_block(
            bare_block(sched[i], acc.field(), w).as_operator(*op.sites()), *op.sites());
        CHECK(dist(bare * p, bare) <= 1e-8);
      }

      if (radius == 2) {
        std::vector<MatrixXcd> blocks;
        for (const auto& b : op.blocks()) blocks.push_back(oracle::dense_block(b, *op.sites()));
        for (std::size_t i = 0; i < k; ++i) {
          CHECK(dist(blocks[i] * blocks[i], blocks[i]) <= 1e-9);
          CHECK(std::abs(blocks[i].trace() - 4.0) <= 1e-9);
          for (std::size_t j = i + 1; j < k; ++j) CHECK((blocks[i] * blocks[j]).norm() <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("engine agrees with iterated pair combination") {
  const Setup s = random_setup(341);
  const Window w{2, {}};
  const FieldModel field(s.field, s.params);
  ProjectorAccumulator acc(field, w);
  acc.run();
  const auto sites = acc.op().sites();
  MatrixXcd alpha = MatrixXcd::Zero(4 * sites->size(), 4 * sites->size());
  for (const auto& n : acc.schedule().sites) {
    const MatrixXcd beta = oracle::dense_block(bare_block(n, field, w).as_operator(*sites), *sites);
    alpha = combine_pair(alpha, beta).projector;
  }
  CHECK(dist(alpha, dense_operator(acc.op())) <= 1e-8 * alpha.norm());
}

TEST_CASE("rho_components") {
  const Setup s = random_setup(351);
  const Window w{2, {}};
  ProjectorAccumulator acc(FieldModel(s.field, s.params), w);
  acc.run();
  const ProjectorOperator& op = acc.op();
  const auto& sites = *op.sites();

  for (std::size_t k = 0; k < op.stages(); ++k) {
    CAPTURE(k);
    const MatrixXcd dense = oracle::dense_block(op.blocks()[k], sites);
    Complex trace{};
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const Matrix4 diag = op.rho_components(sites.site(i), k, sites.site(i));
      trace += diag.trace();
      for (std::size_t j = 0; j < sites.size(); j += 3) {
        const Matrix4 r = op.rho_components(sites.site(i), k, sites.site(j));
        const Matrix4 rt = op.rho_components(sites.site(j), k, sites.site(i));
        CHECK((r - rt.adjoint()).max_abs() <= 1e-12);
        const auto ii = static_cast<Eigen::Index>(4 * i), jj = static_cast<Eigen::Index>(4 * j);
        CHECK(oracle::rel_err(oracle::to_eigen(r), dense.block(ii, jj, 4, 4)) <= 1e-10);
      }
    }
    CHECK(std::abs(trace - 4.0) <= 1e-9);
    CHECK(op.rho_components(MultiIndex{{0, 0, 0, 8}}, k, MultiIndex{}) == Matrix4::zero());
  }
  CHECK_THROWS_AS(op.rho_components(MultiIndex{}, op.stages(), MultiIndex{}), std::out_of_range);
}

TEST_CASE("fundamental solution annihilates every processed row") {
  for (std::uint64_t seed : {361u, 362u, 363u}) {
    const Setup s = random_setup(seed);
    const Window w{3, {}};
    const FieldModel field(s.field, s.params);
    ProjectorAccumulator acc(field, w);
    acc.run();
    const Multispinor c0 = Multispinor::random(acc.op().sites(), seed);
    const Multispinor c = acc.op().apply_fundamental(c0);
    double worst = 0.0;
    for (const auto& n : acc.schedule().sites) worst = std::max(worst, residual(c, n, field));
    CHECK(worst <= 1e-8 * c0.norm());

    // S is idempotent: applying it to a solution changes nothing.
    CHECK((acc.op().apply_fundamental(c) - c).norm() <= 1e-8 * c0.norm());
    CHECK(acc.op().apply_fundamental(Multispinor(acc.op().sites())).norm() == 0.0);
  }
}

TEST_CASE("failure modes") {
  SUBCASE("stage cap") {
    const Setup s = random_setup(371);
    EngineOptions opts;
    opts.max_stages = 5;
    ProjectorAccumulator acc(FieldModel(s.field, s.params), Window{2, {}}, opts);
    CHECK_THROWS_AS(acc.run(), CapacityExceeded);
    for (std::size_t k = 0; k < 5; ++k) acc.stage_step(acc.schedule()[k]);
    CHECK_THROWS_AS(acc.stage_step(acc.schedule()[5]), CapacityExceeded);
  }

  SUBCASE("mass-shell site makes a later stage singular") {
    FieldConfig f;
    f.re(1, 2) = 1e-9;
    DimensionlessParams p;
    p.omega = 0.5;
    ProjectorAccumulator acc(FieldModel(f, p), Window{3, {}});
    try {
      acc.run();
      FAIL("expected StageSingular");
    } catch (const StageSingular& e) {
      CHECK(e.stage() > 0);
      CHECK(e.rcond() < 1e-10);
      CHECK(acc.stages_done() == e.stage());
    }
  }

  CHECK_THROWS_AS(ProjectorAccumulator(FieldModel(random_setup(372).field, random_setup(372).params),
                                       Window{1, {{1, 0, 0, 0}}}),
                  std::invalid_argument);
}
