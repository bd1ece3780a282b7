#pragma once

// Operator dumps and plain-text exports.
//
// Binary operator dump, all integers and doubles little-endian:
//
//   char[8]  magic "ESTCOP01"
//   u64      config fingerprint
//   i32      window radius
//   i32[4]   window center
//   u64      stage count K
//   K times:
//     u64      stage index
//     i32[4]   site
//     f64[32]  core D-set, 16 (re, im) pairs in basis order
//     u64      support size S
//     S times:
//       u64      site index in window order
//       f64[32]  Phi, 4x4 row-major, (re, im) pairs
//
// JSON export (one line) carries the same content with D-sets as 16
// [re, im] pairs. Doubles are written in shortest round-trip form, so
// importing the JSON reproduces the operator bit for bit.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "estc/projector.hpp"

namespace estc {

struct OperatorDump {
  std::uint64_t fingerprint = 0;
  Window window;
  ProjectorOperator op;
};

std::string encode_operator(const ProjectorOperator& op, std::uint64_t fingerprint);
// Throws IoError on malformed input.
OperatorDump decode_operator(const std::string& bytes);

void write_operator(const std::filesystem::path& path, const ProjectorOperator& op,
                    std::uint64_t fingerprint);
OperatorDump read_operator(const std::filesystem::path& path);

std::string export_operator_json(const OperatorDump& dump);
OperatorDump import_operator_json(const std::string& text);
// One row per matrix entry: stage,n1..n4,part,site1..site4,row,col,re,im
// where part is "core" (site columns repeat the stage site) or "phi".
std::string export_operator_csv(const OperatorDump& dump);

// n1..n4,c0_re,c0_im,...,c3_re,c3_im for every window site in window order.
std::string solution_csv(const Multispinor& c);
// Reads the solution_csv layout; every listed site must be in the window and
// missing sites are zero.
Multispinor parse_solution_csv(const std::string& text,
                               std::shared_ptr<const SiteIndex> sites);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace estc
