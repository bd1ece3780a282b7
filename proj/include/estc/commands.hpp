#pragma once

// The four batch commands behind the CLI. Each writes its artifacts into an
// output directory and returns the run report; errors propagate as
// estc::Error subclasses and are mapped to exit codes by exit_code().

#include <filesystem>
#include <optional>
#include <string>

#include "estc/config.hpp"
#include "estc/dump.hpp"
#include "estc/errors.hpp"
#include "estc/verify.hpp"

namespace estc {

class FingerprintMismatch : public ValidationError {
 public:
  FingerprintMismatch(std::uint64_t expected, std::uint64_t found);
};

class VerificationFailed : public Error {
 public:
  using Error::Error;
};

// Runs every stage of the configured window. Used by build and verify.
ProjectorAccumulator build_projector(const RunConfig& cfg);

// Writes <out>/operator.bin, report.json, stages.csv.
RunReport cmd_build(const RunConfig& cfg, const std::filesystem::path& out_dir);

// Seed multispinor for apply: from a CSV file if given, otherwise random
// with the given seed.
struct SeedSource {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> input;
};

struct ApplyResult {
  Multispinor solution;
  RunReport report;
};

// C = S C0 from a loaded operator. Throws FingerprintMismatch when the dump
// was built from a different configuration.
ApplyResult apply_operator(const RunConfig& cfg, const OperatorDump& dump, const Multispinor& c0);
// Writes <out>/solution.csv, residuals.csv, apply_report.json.
RunReport cmd_apply(const RunConfig& cfg, const std::filesystem::path& operator_path,
                    const SeedSource& source, const std::filesystem::path& out_dir);

// Algebra, field-model and projector suites on the configured window.
RunReport cmd_verify(const RunConfig& cfg,
                     const StructureTable& table = StructureTable::standard());

enum class ExportFormat { json, csv };
std::string cmd_export(const std::filesystem::path& operator_path, ExportFormat format);

// 0 ok, 1 validation, 2 engine degeneracy, 3 I/O, 4 failed verification.
int exit_code(const std::exception& e);

}  // namespace estc
