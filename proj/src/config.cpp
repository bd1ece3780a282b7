#include "estc/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "estc/errors.hpp"

namespace estc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

struct Line {
  std::string key;
  std::vector<std::string_view> values;
  int number;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("line " + std::to_string(number) + ": " + key + ": " + what, key, number);
  }

  void expect_count(std::size_t lo, std::size_t hi) const {
    if (values.size() < lo || values.size() > hi) {
      fail(lo == hi ? "expected " + std::to_string(lo) + " value(s)"
                    : "expected " + std::to_string(lo) + " to " + std::to_string(hi) + " values");
    }
  }

  double real(std::size_t i) const {
    double x = 0.0;
    const auto v = values[i];
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size()) fail("not a number: '" + std::string(v) + "'");
    if (!std::isfinite(x)) fail("value must be finite");
    return x;
  }

  template <typename Int>
  Int integer(std::size_t i) const {
    Int x = 0;
    const auto v = values[i];
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size()) fail("not an integer: '" + std::string(v) + "'");
    return x;
  }
};

// Amplitude key "a12" / "b41" -> (amplitude, j, k), or nothing.
bool amplitude_key(const std::string& key, char& amp, int& j, int& k) {
  if (key.size() != 3 || (key[0] != 'a' && key[0] != 'b')) return false;
  if (key[1] < '1' || key[1] > '6' || key[2] < '1' || key[2] > '3') return false;
  amp = key[0];
  j = key[1] - '0';
  k = key[2] - '0';
  return true;
}

const std::set<std::string>& commands() {
  static const std::set<std::string> names = {"build", "apply", "verify", "export"};
  return names;
}

void append(std::string& out, std::string_view key, std::string_view value) {
  out.append(key);
  out.append(" = ");
  out.append(value);
  out.push_back('\n');
}

void append_operator_keys(std::string& out, const RunConfig& c) {
  for (int j = 1; j <= 6; ++j)
    for (int k = 1; k <= 3; ++k) {
      const std::string suffix = std::to_string(j) + std::to_string(k);
      if (c.field.re(j, k) != 0.0) append(out, "a" + suffix, format_double(c.field.re(j, k)));
      if (c.field.im(j, k) != 0.0) append(out, "b" + suffix, format_double(c.field.im(j, k)));
    }
  append(out, "q1", format_double(c.params.q[0]));
  append(out, "q2", format_double(c.params.q[1]));
  append(out, "q3", format_double(c.params.q[2]));
  append(out, "q4", format_double(c.params.q4));
  append(out, "Omega", format_double(c.params.omega));
  append(out, "R", std::to_string(c.radius));
  const auto& n = c.n_ref.n;
  append(out, "n_ref", std::to_string(n[0]) + " " + std::to_string(n[1]) + " " +
                           std::to_string(n[2]) + " " + std::to_string(n[3]));
  append(out, "rcond", format_double(c.tolerances.rcond));
  append(out, "max_stages", std::to_string(c.max_stages));
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  (void)ec;
  return std::string(buf.data(), ptr);
}

std::string format_hex64(std::uint64_t x) {
  std::array<char, 17> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + 16, x, 16);
  (void)ec;
  std::string s(buf.data(), ptr);
  return std::string(16 - s.size(), '0') + s;
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::set<std::string> seen;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;

    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) {
      const std::string key(trim(raw));
      throw ParseError("line " + std::to_string(number) + ": expected 'key = value'", key, number);
    }
    Line line{std::string(trim(raw.substr(0, eq))), tokens(raw.substr(eq + 1)), number};
    if (line.key.empty()) line.fail("missing key");
    if (line.values.empty()) line.fail("missing value");

    char amp = 0;
    int j = 0, k = 0;
    const bool is_amp = amplitude_key(line.key, amp, j, k);
    if (!seen.insert(line.key).second) line.fail("duplicate key");

    if (is_amp && amp == 'a') {
      line.expect_count(1, 2);
      c.field.re(j, k) = line.real(0);
      if (line.values.size() == 2) {
        if (!seen.insert("b" + line.key.substr(1)).second) line.fail("imaginary part given twice");
        c.field.im(j, k) = line.real(1);
      }
    } else if (is_amp) {
      line.expect_count(1, 1);
      c.field.im(j, k) = line.real(0);
    } else if (line.key == "q1" || line.key == "q2" || line.key == "q3") {
      line.expect_count(1, 1);
      c.params.q[line.key[1] - '1'] = line.real(0);
    } else if (line.key == "q4") {
      line.expect_count(1, 1);
      c.params.q4 = line.real(0);
    } else if (line.key == "Omega") {
      line.expect_count(1, 1);
      c.params.omega = line.real(0);
    } else if (line.key == "R") {
      line.expect_count(1, 1);
      c.radius = line.integer<int>(0);
      if (c.radius < 1) line.fail("window radius must be at least 1");
    } else if (line.key == "n_ref") {
      line.expect_count(4, 4);
      for (std::size_t i = 0; i < 4; ++i) c.n_ref.n[i] = line.integer<int>(i);
      if (!on_lattice(c.n_ref)) line.fail("n_ref " + c.n_ref.str() + " is not a lattice site");
    } else if (line.key == "rcond") {
      line.expect_count(1, 1);
      c.tolerances.rcond = line.real(0);
      if (!(c.tolerances.rcond > 0.0 && c.tolerances.rcond < 1.0)) line.fail("must lie in (0, 1)");
    } else if (line.key == "residual_tol") {
      line.expect_count(1, 1);
      c.tolerances.residual = line.real(0);
      if (!(c.tolerances.residual > 0.0)) line.fail("must be positive");
    } else if (line.key == "max_stages") {
      line.expect_count(1, 1);
      c.max_stages = line.integer<std::size_t>(0);
      if (c.max_stages == 0) line.fail("must be positive");
    } else if (line.key == "seed") {
      line.expect_count(1, 1);
      c.seed = line.integer<std::uint64_t>(0);
    } else if (line.key == "out") {
      c.out_dir = std::string(trim(raw.substr(eq + 1)));
    } else if (line.key == "command") {
      line.expect_count(1, 1);
      c.command = std::string(line.values[0]);
      if (!commands().count(c.command)) line.fail("unknown command '" + c.command + "'");
    } else {
      line.fail("unknown key");
    }
  }
  validate(c.field);
  validate(c.params);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const RunConfig& c) {
  std::string out;
  append_operator_keys(out, c);
  append(out, "residual_tol", format_double(c.tolerances.residual));
  append(out, "seed", std::to_string(c.seed));
  append(out, "out", c.out_dir);
  if (!c.command.empty()) append(out, "command", c.command);
  return out;
}

std::uint64_t config_fingerprint(const RunConfig& c) {
  std::string text;
  append_operator_keys(text, c);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace estc
