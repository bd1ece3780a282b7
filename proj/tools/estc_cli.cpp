// estc: build, apply, verify and export lattice projector operators.
//
//   estc build  --config run.cfg [--out DIR]
//   estc apply  --config run.cfg --operator DIR/operator.bin (--seed N | --input C0.csv) [--out DIR]
//   estc verify --config run.cfg [--report FILE]
//   estc export --operator DIR/operator.bin --format json|csv [--out FILE]
//
// Exit codes: 0 ok, 1 validation, 2 engine degeneracy, 3 I/O, 4 failed verification.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "estc/commands.hpp"
#include "estc/errors.hpp"

namespace {

using Clock = std::chrono::steady_clock;

void print_checks(const estc::RunReport& report) {
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " observed=" << estc::format_double(c.observed)
              << " tolerance=" << estc::format_double(c.tolerance) << "\n";
  }
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projector construction for the Dirac equation in a space-time crystal field"};
  app.require_subcommand(1);

  std::string config_path, operator_path, out, input, report_path, format = "json";
  std::uint64_t seed = 0;

  auto* build = app.add_subcommand("build", "Construct the projector and write operator.bin");
  build->add_option("--config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
  build->add_option("--out", out, "Output directory (default: the config's `out`)");

  auto* apply = app.add_subcommand("apply", "Apply S = U - P to a seed multispinor");
  apply->add_option("--config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
  apply->add_option("--operator", operator_path, "Operator dump from build")->required();
  auto* seed_opt = apply->add_option("--seed", seed, "Random seed multispinor");
  auto* input_opt = apply->add_option("--input", input, "Seed multispinor CSV")->check(CLI::ExistingFile);
  seed_opt->excludes(input_opt);
  apply->add_option("--out", out, "Output directory (default: the config's `out`)");

  auto* verify = app.add_subcommand("verify", "Run the invariant suites");
  verify->add_option("--config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
  verify->add_option("--report", report_path, "Also write the report JSON here");

  auto* exp = app.add_subcommand("export", "Export an operator dump as JSON or CSV");
  exp->add_option("--operator", operator_path, "Operator dump from build")->required();
  exp->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  exp->add_option("--out", out, "Output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto t0 = Clock::now();
    if (*build) {
      const estc::RunConfig cfg = estc::load_config(config_path);
      const std::filesystem::path dir = out.empty() ? cfg.out_dir : out;
      const estc::RunReport report = estc::cmd_build(cfg, dir);
      std::cout << "built " << report.stages.size() << " stages, fingerprint "
                << estc::format_hex64(report.fingerprint) << " -> " << (dir / "operator.bin").string()
                << "\n";
      print_checks(report);
      std::cerr << "build time " << seconds_since(t0) << " s\n";
      return report.passed() ? 0 : 4;
    }
    if (*apply) {
      const estc::RunConfig cfg = estc::load_config(config_path);
      const std::filesystem::path dir = out.empty() ? cfg.out_dir : out;
      estc::SeedSource source;
      if (*seed_opt) source.seed = seed;
      if (*input_opt) source.input = input;
      const estc::RunReport report = estc::cmd_apply(cfg, operator_path, source, dir);
      std::cout << "wrote " << (dir / "solution.csv").string() << ", " << (dir / "residuals.csv").string()
                << "\n";
      print_checks(report);
      std::cerr << "apply time " << seconds_since(t0) << " s\n";
      return report.passed() ? 0 : 4;
    }
    if (*verify) {
      const estc::RunConfig cfg = estc::load_config(config_path);
      const estc::RunReport report = estc::cmd_verify(cfg);
      print_checks(report);
      if (!report_path.empty()) estc::write_file(report_path, report.to_json());
      std::cerr << "verify time " << seconds_since(t0) << " s\n";
      if (!report.passed()) throw estc::VerificationFailed(report.first_failure());
      return 0;
    }
    if (*exp) {
      const auto fmt = format == "csv" ? estc::ExportFormat::csv : estc::ExportFormat::json;
      const std::string text = estc::cmd_export(operator_path, fmt);
      if (out.empty()) std::cout << text;
      else estc::write_file(out, text);
      return 0;
    }
  } catch (const estc::ValidationError& e) {
    std::cerr << "error: " << e.what();
    if (!e.key().empty()) std::cerr << " [key " << e.key() << "]";
    std::cerr << "\n";
    return estc::exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return estc::exit_code(e);
  }
  return 0;
}
