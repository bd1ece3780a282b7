#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "doctest.h"
#include "estc/commands.hpp"
#include "estc/errors.hpp"
#include "oracles.hpp"

using namespace estc;
namespace fs = std::filesystem;

namespace {

const char* kMinimal =
    "# minimal run\n"
    "a12 = 0.1\n"
    "q1 = 0\n"
    "Omega = 0.5\n"
    "R = 2\n";

fs::path scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const fs::path dir = fs::temp_directory_path() /
                       ("estc_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RunConfig random_config(oracle::Rng& rng) {
  RunConfig c;
  c.field = oracle::random_field(rng);
  c.params = oracle::random_params(rng);
  c.radius = rng.integer(1, 4);
  c.n_ref = oracle::random_site(rng, 3);
  c.tolerances.rcond = rng.uniform(1e-14, 1e-6);
  c.tolerances.residual = rng.uniform(1e-12, 1e-6);
  c.seed = rng.engine();
  c.out_dir = "runs/out " + std::to_string(rng.integer(0, 99));
  c.max_stages = static_cast<std::size_t>(rng.integer(1, 5000));
  c.command = rng.integer(0, 1) ? "verify" : "";
  return c;
}

}  // namespace

TEST_CASE("parse_config") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.field.re(1, 2) == 0.1);
  CHECK(field_intensity(c.field) == doctest::Approx(0.02));
  CHECK(c.params.omega == 0.5);
  CHECK(c.radius == 2);
  CHECK(c.n_ref == MultiIndex{});

  SUBCASE("complex amplitude and separate imaginary part") {
    const RunConfig d = parse_config("a12 = 0.1 -0.25\nb23 = 0.5\nn_ref = 1 0 0 1\n");
    CHECK(d.field.im(1, 2) == -0.25);
    CHECK(d.field.im(2, 3) == 0.5);
    CHECK(d.n_ref == MultiIndex{{1, 0, 0, 1}});
  }

  SUBCASE("transversality violation names the key") {
    try {
      parse_config("a11 = 0.3\nOmega = 0.5\n");
      FAIL("expected TransversalityViolation");
    } catch (const TransversalityViolation& e) {
      CHECK(e.key() == "a11");
    }
    try {
      parse_config("a12 = 0.1\nb41 = 0.3\n");
      FAIL("expected TransversalityViolation");
    } catch (const TransversalityViolation& e) {
      CHECK(e.key() == "b41");
    }
  }

  SUBCASE("zero field is rejected") {
    CHECK_THROWS_AS(parse_config("Omega = 0.5\nR = 2\n"), ZeroField);
  }

  SUBCASE("parse errors carry line and key") {
    struct Bad {
      const char* text;
      const char* key;
      int line;
    };
    for (const Bad& b : {Bad{"a12 = 0.1\n\nfoo = 1\n", "foo", 3},
                         Bad{"a12 = 0.1\na12 = 0.2\n", "a12", 2},
                         Bad{"a12 = 0.1 0.2\nb12 = 0.3\n", "b12", 2},
                         Bad{"a12 = zero\n", "a12", 1},
                         Bad{"a12 = 0.1\nOmega = 1,5\n", "Omega", 2},
                         Bad{"a12 = 0.1\nR = 0\n", "R", 2},
                         Bad{"a12 = 0.1\nn_ref = 1 0 0 0\n", "n_ref", 2},
                         Bad{"a12 = 0.1\nn_ref = 0 0 0\n", "n_ref", 2},
                         Bad{"a12 = 0.1\nrcond = 2\n", "rcond", 2},
                         Bad{"a12 = 0.1\ncommand = run\n", "command", 2},
                         Bad{"a12 = 0.1\nq1\n", "q1", 2},
                         Bad{"a12 = inf\n", "a12", 1},
                         Bad{"a12 =\n", "a12", 1}}) {
      CAPTURE(b.text);
      try {
        parse_config(b.text);
        FAIL("expected ParseError");
      } catch (const ParseError& e) {
        CHECK(e.key() == b.key);
        CHECK(e.line() == b.line);
      }
    }
  }

  SUBCASE("Omega must be positive") {
    CHECK_THROWS_AS(parse_config("a12 = 0.1\nOmega = 0\n"), ValidationError);
  }
}

TEST_CASE("serialize_config round-trips exactly") {
  oracle::Rng rng(401);
  for (int trial = 0; trial < 300; ++trial) {
    const RunConfig c = random_config(rng);
    const std::string text = serialize_config(c);
    CAPTURE(text);
    const RunConfig back = parse_config(text);
    CHECK(back == c);
    CHECK(serialize_config(back) == text);
    CHECK(config_fingerprint(back) == config_fingerprint(c));
  }
  for (double x : {0.1, 1.0 / 3.0, -2.5e-150, 1.0000000000000002e150, 123456789.0})
    CHECK(parse_config("a12 = " + format_double(x) + "\n").field.re(1, 2) == x);
}

TEST_CASE("config fingerprint tracks only operator-defining keys") {
  const RunConfig base = parse_config(kMinimal);
  RunConfig c = base;
  c.seed = 99;
  c.out_dir = "elsewhere";
  c.tolerances.residual = 1e-3;
  c.command = "apply";
  CHECK(config_fingerprint(c) == config_fingerprint(base));

  c = base;
  c.field.re(1, 2) = std::nextafter(0.1, 1.0);
  CHECK(config_fingerprint(c) != config_fingerprint(base));
  c = base;
  c.radius = 3;
  CHECK(config_fingerprint(c) != config_fingerprint(base));
  c = base;
  c.n_ref = MultiIndex{{1, 1, 0, 0}};
  CHECK(config_fingerprint(c) != config_fingerprint(base));
  c = base;
  c.tolerances.rcond = 1e-9;
  CHECK(config_fingerprint(c) != config_fingerprint(base));
  CHECK(format_hex64(0x1a) == "000000000000001a");
}

TEST_CASE("build with R = 1 is the single bare projector at the center") {
  RunConfig cfg = parse_config(kMinimal);
  cfg.radius = 1;
  const ProjectorAccumulator acc = build_projector(cfg);
  REQUIRE(acc.op().stages() == 1);
  const auto& sites = *acc.op().sites();
  const auto dense = oracle::dense_block(acc.op().blocks()[0], sites);
  const auto want = oracle::dense_block(bare_block(MultiIndex{}, acc.field(), cfg.window()).as_operator(sites), sites);
  CHECK((dense - want).norm() <= 1e-14);
}

TEST_CASE("operator dumps") {
  oracle::Rng rng(411);
  RunConfig cfg = parse_config(kMinimal);
  cfg.field = oracle::random_field(rng);
  cfg.params = oracle::random_params(rng);
  const std::uint64_t fp = config_fingerprint(cfg);

  const std::string first = encode_operator(build_projector(cfg).op(), fp);
  const std::string second = encode_operator(build_projector(cfg).op(), fp);
  CHECK(first == second);

  const OperatorDump dump = decode_operator(first);
  CHECK(dump.fingerprint == fp);
  CHECK(dump.window.radius == cfg.radius);
  CHECK(encode_operator(dump.op, fp) == first);

  SUBCASE("JSON export re-imports bit for bit") {
    const std::string json = export_operator_json(dump);
    const OperatorDump back = import_operator_json(json);
    CHECK(encode_operator(back.op, back.fingerprint) == first);
  }

  SUBCASE("CSV export has one row per matrix entry") {
    const std::string csv = export_operator_csv(dump);
    std::size_t entries = 0;
    for (const auto& b : dump.op.blocks()) entries += 16 * (1 + b.support.size());
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == entries + 1);
  }

  SUBCASE("malformed dumps are rejected") {
    CHECK_THROWS_AS(decode_operator(""), IoError);
    CHECK_THROWS_AS(decode_operator(first.substr(0, first.size() - 1)), IoError);
    CHECK_THROWS_AS(decode_operator(first + "x"), IoError);
    std::string bad_magic = first;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(decode_operator(bad_magic), IoError);
    CHECK_THROWS_AS(import_operator_json("{\"format\": \"other\"}"), IoError);
    CHECK_THROWS_AS(import_operator_json("not json"), IoError);
  }
}

TEST_CASE("apply") {
  oracle::Rng rng(421);
  RunConfig cfg = parse_config(kMinimal);
  cfg.field = oracle::random_field(rng);
  cfg.params = oracle::random_params(rng);
  const OperatorDump dump = decode_operator(encode_operator(build_projector(cfg).op(), config_fingerprint(cfg)));

  SUBCASE("zero seed gives the zero solution") {
    const ApplyResult r = apply_operator(cfg, dump, Multispinor(dump.op.sites()));
    CHECK(r.solution.norm() == 0.0);
    for (const auto& row : r.report.residuals) CHECK(row.residual == 0.0);
    CHECK(r.report.passed());
  }

  SUBCASE("random seed: processed residuals within tolerance") {
    const Multispinor c0 = Multispinor::random(dump.op.sites(), 5);
    const ApplyResult r = apply_operator(cfg, dump, c0);
    CHECK(r.report.passed());
    std::size_t processed = 0;
    for (const auto& row : r.report.residuals) processed += row.processed;
    CHECK(processed == dump.op.stages());
    CHECK(parse_solution_csv(solution_csv(r.solution), dump.op.sites()).norm() == r.solution.norm());
    const Multispinor back = parse_solution_csv(solution_csv(r.solution), dump.op.sites());
    CHECK((back - r.solution).norm() == 0.0);
  }

  SUBCASE("fingerprint mismatch is refused") {
    RunConfig other = cfg;
    other.params.omega *= 1.5;
    try {
      apply_operator(other, dump, Multispinor(dump.op.sites()));
      FAIL("expected FingerprintMismatch");
    } catch (const FingerprintMismatch& e) {
      CHECK(exit_code(e) == 1);
    }
  }

  SUBCASE("seed files outside the window are rejected") {
    CHECK_THROWS_AS(parse_solution_csv("9,9,0,0,1,0,0,0,0,0,0,0\n", dump.op.sites()), ParseError);
    CHECK_THROWS_AS(parse_solution_csv("0,0,0,0,1,0\n", dump.op.sites()), ParseError);
  }
}

TEST_CASE("file-level commands are byte-deterministic") {
  RunConfig cfg = parse_config(kMinimal);
  const fs::path a = scratch_dir("a"), b = scratch_dir("b");
  cmd_build(cfg, a);
  cmd_build(cfg, b);
  for (const char* f : {"operator.bin", "report.json", "stages.csv"})
    CHECK(read_file(a / f) == read_file(b / f));

  const SeedSource seed{17, std::nullopt};
  const RunReport ra = cmd_apply(cfg, a / "operator.bin", seed, a / "apply");
  cmd_apply(cfg, b / "operator.bin", seed, b / "apply");
  CHECK(ra.passed());
  for (const char* f : {"solution.csv", "residuals.csv", "apply_report.json"})
    CHECK(read_file(a / "apply" / f) == read_file(b / "apply" / f));

  // Reapplying S to a solution read back from CSV reproduces it.
  const SeedSource from_file{std::nullopt, a / "apply" / "solution.csv"};
  cmd_apply(cfg, a / "operator.bin", from_file, a / "again");
  const auto sites = decode_operator(read_file(a / "operator.bin")).op.sites();
  const Multispinor first = parse_solution_csv(read_file(a / "apply" / "solution.csv"), sites);
  const Multispinor again = parse_solution_csv(read_file(a / "again" / "solution.csv"), sites);
  CHECK((first - again).norm() <= 1e-12 * first.norm());

  CHECK(cmd_export(a / "operator.bin", ExportFormat::json) == cmd_export(b / "operator.bin", ExportFormat::json));
  CHECK_THROWS_AS(cmd_export(a / "missing.bin", ExportFormat::csv), IoError);

  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("verify") {
  const RunConfig cfg = parse_config(kMinimal);
  const RunReport report = cmd_verify(cfg);
  for (const auto& c : report.checks) {
    CAPTURE(c.name);
    CAPTURE(c.observed);
    CHECK(c.passed);
  }
  CHECK(report.passed());
  CHECK(report.first_failure().empty());
  CHECK(report.to_json() == cmd_verify(cfg).to_json());

  SUBCASE("tampered structure table fails the table and product checks") {
    StructureTable table = StructureTable::generate();
    auto entry = table(2, 3);
    entry.phase = -entry.phase;
    table.set(2, 3, entry);
    const RunReport bad = cmd_verify(cfg, table);
    CHECK_FALSE(bad.passed());
    bool table_failed = false, product_failed = false;
    for (const auto& c : bad.checks) {
      if (c.name == "dset.structure_table_vs_dense") table_failed = !c.passed && c.observed > 1.0;
      if (c.name == "dset.multiply_vs_dense") product_failed = !c.passed;
    }
    CHECK(table_failed);
    CHECK(product_failed);
    CHECK(bad.first_failure().rfind("dset.structure_table_vs_dense", 0) == 0);
  }

  SUBCASE("degenerate configuration surfaces the stage") {
    const RunConfig sing = parse_config("a12 = 1e-9\nOmega = 0.5\nR = 3\n");
    try {
      cmd_verify(sing);
      FAIL("expected StageSingular");
    } catch (const StageSingular& e) {
      CHECK(e.stage() > 0);
      CHECK(exit_code(e) == 2);
    }
  }
}

TEST_CASE("exit codes") {
  CHECK(exit_code(ZeroField()) == 1);
  CHECK(exit_code(ParseError("x", "k", 1)) == 1);
  CHECK(exit_code(StageSingular(3, "(0,0,0,0)", 0.0)) == 2);
  CHECK(exit_code(DegenerateOverlap("x", 0.0)) == 2);
  CHECK(exit_code(CapacityExceeded("x")) == 2);
  CHECK(exit_code(IoError("x")) == 3);
  CHECK(exit_code(VerificationFailed("x")) == 4);
}
