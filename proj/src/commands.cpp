#include "estc/commands.hpp"

#include <algorithm>
#include <numeric>
#include <system_error>

#include "estc/errors.hpp"

namespace estc {

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::vector<MultiIndex> processed_sites(const ProjectorOperator& op) {
  std::vector<MultiIndex> out;
  out.reserve(op.stages());
  for (const auto& b : op.blocks()) out.push_back(b.site);
  return out;
}

}  // namespace

FingerprintMismatch::FingerprintMismatch(std::uint64_t expected, std::uint64_t found)
    : ValidationError("operator fingerprint " + format_hex64(found) +
                          " does not match configuration fingerprint " + format_hex64(expected),
                      "fingerprint") {}

ProjectorAccumulator build_projector(const RunConfig& cfg) {
  EngineOptions options;
  options.rcond_threshold = cfg.tolerances.rcond;
  options.max_stages = cfg.max_stages;
  ProjectorAccumulator acc(FieldModel(cfg.field, cfg.params), cfg.window(), options);
  acc.run();
  return acc;
}

RunReport cmd_build(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  const ProjectorAccumulator acc = build_projector(cfg);
  RunReport report;
  report.command = "build";
  report.fingerprint = config_fingerprint(cfg);
  report.stages = acc.diagnostics();
  const double worst_defect = std::accumulate(
      report.stages.begin(), report.stages.end(), 0.0,
      [](double m, const StageDiagnostics& d) { return std::max(m, d.hermiticity_defect); });
  report.checks.push_back(make_check("engine.hermiticity_defect", worst_defect, 1e-10));
  report.notes.push_back("stages: " + std::to_string(acc.stages_done()));

  write_operator(out_dir / "operator.bin", acc.op(), report.fingerprint);
  write_file(out_dir / "stages.csv", stages_csv(report.stages, cfg.window()));
  write_file(out_dir / "report.json", report.to_json());
  return report;
}

ApplyResult apply_operator(const RunConfig& cfg, const OperatorDump& dump, const Multispinor& c0) {
  const std::uint64_t expected = config_fingerprint(cfg);
  if (dump.fingerprint != expected) throw FingerprintMismatch(expected, dump.fingerprint);
  const FieldModel field(cfg.field, cfg.params);
  Multispinor c = dump.op.apply_fundamental(c0);

  RunReport report;
  report.command = "apply";
  report.fingerprint = expected;
  report.residuals = residual_table(c, field, processed_sites(dump.op));
  double worst = 0.0;
  for (const auto& r : report.residuals)
    if (r.processed) worst = std::max(worst, r.residual);
  const double scale = c0.norm();
  report.checks.push_back(
      make_check("apply.processed_residual", scale > 0.0 ? worst / scale : worst, cfg.tolerances.residual));
  return {std::move(c), std::move(report)};
}

RunReport cmd_apply(const RunConfig& cfg, const std::filesystem::path& operator_path,
                    const SeedSource& source, const std::filesystem::path& out_dir) {
  const OperatorDump dump = read_operator(operator_path);
  const std::uint64_t expected = config_fingerprint(cfg);
  if (dump.fingerprint != expected) throw FingerprintMismatch(expected, dump.fingerprint);
  const Multispinor c0 = source.input
                             ? parse_solution_csv(read_file(*source.input), dump.op.sites())
                             : Multispinor::random(dump.op.sites(), source.seed.value_or(cfg.seed));
  ApplyResult result = apply_operator(cfg, dump, c0);
  ensure_dir(out_dir);
  write_file(out_dir / "solution.csv", solution_csv(result.solution));
  write_file(out_dir / "residuals.csv", residual_csv(result.report.residuals));
  write_file(out_dir / "apply_report.json", result.report.to_json());
  return std::move(result.report);
}

RunReport cmd_verify(const RunConfig& cfg, const StructureTable& table) {
  RunReport report;
  report.command = "verify";
  report.fingerprint = config_fingerprint(cfg);
  report.add(check_dset_algebra(table, cfg.seed));
  const FieldModel field(cfg.field, cfg.params);
  report.add(check_field_model(field, cfg.window()));
  const ProjectorAccumulator acc = build_projector(cfg);
  report.stages = acc.diagnostics();
  report.add(check_projector(acc, cfg.seed, cfg.tolerances.residual));
  return report;
}

std::string cmd_export(const std::filesystem::path& operator_path, ExportFormat format) {
  const OperatorDump dump = read_operator(operator_path);
  return format == ExportFormat::json ? export_operator_json(dump) : export_operator_csv(dump);
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return 1;
  if (dynamic_cast<const StageSingular*>(&e) || dynamic_cast<const DegenerateOverlap*>(&e) ||
      dynamic_cast<const SingularMatrix*>(&e) || dynamic_cast<const CapacityExceeded*>(&e)) {
    return 2;
  }
  if (dynamic_cast<const IoError*>(&e)) return 3;
  if (dynamic_cast<const VerificationFailed*>(&e)) return 4;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return 1;
  if (dynamic_cast<const Error*>(&e)) return 2;
  return 3;
}

}  // namespace estc
