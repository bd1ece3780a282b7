#pragma once

// Run configuration: a flat `key = value` text file.
//
//   # comment
//   a12 = 0.1 0.05      complex amplitude a_jk + i b_jk as "re [im]"
//   b12 = 0.05          the imaginary part alone may also be given as b_jk
//   q1 = 0  q2 .. q4    quasimomentum and frequency
//   Omega = 0.5
//   R = 2               window radius
//   n_ref = 0 0 0 0     window center (a lattice site)
//   rcond = 1e-10       stage / overlap degeneracy threshold
//   residual_tol = 1e-8 relative residual tolerance for apply and verify
//   max_stages = 1024
//   seed = 1            seed for random multispinors
//   out = out           output directory
//   command = build     optional: build | apply | verify | export
//
// Unset keys keep their defaults; amplitudes default to zero. Numbers are
// read and written locale-free, doubles in shortest round-trip form.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "estc/field_model.hpp"
#include "estc/lattice.hpp"

namespace estc {

struct Tolerances {
  double rcond = 1e-10;
  double residual = 1e-8;

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct RunConfig {
  FieldConfig field;
  DimensionlessParams params;
  int radius = 2;
  MultiIndex n_ref{};
  Tolerances tolerances;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::size_t max_stages = 1024;
  std::string command;

  Window window() const { return Window{radius, n_ref}; }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Throws ParseError (with line and key) for malformed text or unknown keys,
// and forwards the field-model validation errors.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

// Every key, in a fixed order. parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

// FNV-1a 64 over the keys that determine the operator (field, parameters,
// window, rcond, max_stages). Seed, residual tolerance, output directory and
// command do not change it.
std::uint64_t config_fingerprint(const RunConfig& c);

// Locale-free shortest round-trip decimal.
std::string format_double(double x);
std::string format_hex64(std::uint64_t x);

}  // namespace estc
