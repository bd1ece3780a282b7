#include "estc/dump.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "estc/config.hpp"
#include "estc/errors.hpp"
#include "json.hpp"

namespace estc {

namespace {

constexpr char kMagic[8] = {'E', 'S', 'T', 'C', 'O', 'P', '0', '1'};

class Writer {
 public:
  void u64(std::uint64_t x) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
  }
  void i32(std::int32_t x) {
    const auto u = static_cast<std::uint32_t>(x);
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
  }
  void f64(double x) { u64(std::bit_cast<std::uint64_t>(x)); }
  void complex(Complex z) {
    f64(z.real());
    f64(z.imag());
  }
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint64_t u64() {
    need(8);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i)
      x |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return x;
  }
  std::int32_t i32() {
    need(4);
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i)
      x |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return static_cast<std::int32_t>(x);
  }
  double f64() { return std::bit_cast<double>(u64()); }
  Complex complex() {
    const double re = f64();
    return {re, f64()};
  }
  void expect(const char* p, std::size_t n) {
    need(n);
    if (std::memcmp(bytes_.data() + pos_, p, n) != 0) throw IoError("operator dump: bad magic");
    pos_ += n;
  }
  bool done() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw IoError("operator dump: truncated");
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

MultiIndex read_site(Reader& r) {
  MultiIndex m;
  for (auto& x : m.n) x = r.i32();
  return m;
}

void check_block(const OperatorBlock& b, const SiteIndex& sites, std::size_t expected_stage) {
  if (b.stage != expected_stage) throw IoError("operator dump: stages out of order");
  if (sites.find(b.site) < 0) throw IoError("operator dump: stage site outside window");
  for (std::size_t i = 0; i < b.support.size(); ++i) {
    if (b.support[i].site >= sites.size()) throw IoError("operator dump: support site out of range");
    if (i > 0 && b.support[i].site <= b.support[i - 1].site) {
      throw IoError("operator dump: support not in ascending site order");
    }
  }
}

Window checked_window(int radius, const MultiIndex& center) {
  if (radius < 1 || radius > 64 || !on_lattice(center)) throw IoError("operator dump: bad window");
  return Window{radius, center};
}

using nlohmann::json;

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw IoError("operator json: expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json site_json(const MultiIndex& m) { return json::array({m[0], m[1], m[2], m[3]}); }

MultiIndex site_from(const json& j) {
  if (!j.is_array() || j.size() != 4) throw IoError("operator json: expected a 4-index site");
  MultiIndex m;
  for (std::size_t i = 0; i < 4; ++i) m.n[i] = j[i].get<int>();
  return m;
}

void csv_entry(std::string& out, std::size_t stage, const MultiIndex& site, const char* part,
               const MultiIndex& other, int row, int col, Complex z) {
  out += std::to_string(stage);
  for (int x : site.n) out += "," + std::to_string(x);
  out += ",";
  out += part;
  for (int x : other.n) out += "," + std::to_string(x);
  out += "," + std::to_string(row) + "," + std::to_string(col) + "," + format_double(z.real()) +
         "," + format_double(z.imag()) + "\n";
}

}  // namespace

std::string encode_operator(const ProjectorOperator& op, std::uint64_t fingerprint) {
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u64(fingerprint);
  const Window& win = op.sites()->window();
  w.i32(win.radius);
  for (int x : win.center.n) w.i32(x);
  w.u64(op.blocks().size());
  for (const auto& b : op.blocks()) {
    w.u64(b.stage);
    for (int x : b.site.n) w.i32(x);
    for (int nu = 0; nu < 16; ++nu) w.complex(b.core[nu]);
    w.u64(b.support.size());
    for (const auto& e : b.support) {
      w.u64(e.site);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) w.complex(e.phi(r, c));
    }
  }
  return w.take();
}

OperatorDump decode_operator(const std::string& bytes) {
  Reader r(bytes);
  r.expect(kMagic, sizeof kMagic);
  const std::uint64_t fingerprint = r.u64();
  const int radius = r.i32();
  const MultiIndex center = read_site(r);
  const Window window = checked_window(radius, center);
  auto sites = std::make_shared<const SiteIndex>(window);

  const std::uint64_t count = r.u64();
  if (count > sites->size()) throw IoError("operator dump: more stages than window sites");
  std::vector<OperatorBlock> blocks;
  blocks.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    OperatorBlock b;
    b.stage = r.u64();
    b.site = read_site(r);
    for (int nu = 0; nu < 16; ++nu) b.core[nu] = r.complex();
    const std::uint64_t support = r.u64();
    if (support > sites->size()) throw IoError("operator dump: support larger than window");
    b.support.resize(support);
    for (auto& e : b.support) {
      e.site = r.u64();
      for (int row = 0; row < 4; ++row)
        for (int col = 0; col < 4; ++col) e.phi(row, col) = r.complex();
    }
    check_block(b, *sites, k);
    blocks.push_back(std::move(b));
  }
  if (!r.done()) throw IoError("operator dump: trailing bytes");
  return OperatorDump{fingerprint, window, ProjectorOperator(std::move(sites), std::move(blocks))};
}

void write_operator(const std::filesystem::path& path, const ProjectorOperator& op,
                    std::uint64_t fingerprint) {
  write_file(path, encode_operator(op, fingerprint));
}

OperatorDump read_operator(const std::filesystem::path& path) {
  return decode_operator(read_file(path));
}

std::string export_operator_json(const OperatorDump& dump) {
  json stages = json::array();
  const SiteIndex& sites = *dump.op.sites();
  for (const auto& b : dump.op.blocks()) {
    json core = json::array();
    for (int nu = 0; nu < 16; ++nu) core.push_back(complex_json(b.core[nu]));
    json support = json::array();
    for (const auto& e : b.support) {
      json phi = json::array();
      for (int r = 0; r < 4; ++r) {
        json row = json::array();
        for (int c = 0; c < 4; ++c) row.push_back(complex_json(e.phi(r, c)));
        phi.push_back(std::move(row));
      }
      support.push_back(json{{"site", site_json(sites.site(e.site))}, {"phi", std::move(phi)}});
    }
    stages.push_back(json{{"stage", b.stage},
                          {"site", site_json(b.site)},
                          {"core", std::move(core)},
                          {"support", std::move(support)}});
  }
  const json doc{{"format", "estc-operator"},
                 {"version", 1},
                 {"fingerprint", format_hex64(dump.fingerprint)},
                 {"radius", dump.window.radius},
                 {"center", site_json(dump.window.center)},
                 {"stages", std::move(stages)}};
  return doc.dump() + "\n";
}

OperatorDump import_operator_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("operator json: ") + e.what());
  }
  try {
    if (doc.value("format", "") != "estc-operator") throw IoError("operator json: wrong format tag");
    const std::string fp = doc.at("fingerprint").get<std::string>();
    std::uint64_t fingerprint = 0;
    const auto [ptr, ec] = std::from_chars(fp.data(), fp.data() + fp.size(), fingerprint, 16);
    if (ec != std::errc() || ptr != fp.data() + fp.size()) throw IoError("operator json: bad fingerprint");

    const Window window = checked_window(doc.at("radius").get<int>(), site_from(doc.at("center")));
    auto sites = std::make_shared<const SiteIndex>(window);
    std::vector<OperatorBlock> blocks;
    for (const auto& s : doc.at("stages")) {
      OperatorBlock b;
      b.stage = s.at("stage").get<std::size_t>();
      b.site = site_from(s.at("site"));
      const auto& core = s.at("core");
      if (core.size() != 16) throw IoError("operator json: core must have 16 entries");
      for (int nu = 0; nu < 16; ++nu) b.core[nu] = complex_from(core[nu]);
      for (const auto& e : s.at("support")) {
        const long idx = sites->find(site_from(e.at("site")));
        if (idx < 0) throw IoError("operator json: support site outside window");
        SupportEntry entry{static_cast<std::size_t>(idx), {}};
        const auto& phi = e.at("phi");
        if (phi.size() != 4) throw IoError("operator json: phi must be 4x4");
        for (int r = 0; r < 4; ++r) {
          if (phi[r].size() != 4) throw IoError("operator json: phi must be 4x4");
          for (int c = 0; c < 4; ++c) entry.phi(r, c) = complex_from(phi[r][c]);
        }
        b.support.push_back(entry);
      }
      check_block(b, *sites, blocks.size());
      blocks.push_back(std::move(b));
    }
    return OperatorDump{fingerprint, window, ProjectorOperator(std::move(sites), std::move(blocks))};
  } catch (const json::exception& e) {
    throw IoError(std::string("operator json: ") + e.what());
  }
}

std::string export_operator_csv(const OperatorDump& dump) {
  std::string out = "stage,n1,n2,n3,n4,part,m1,m2,m3,m4,row,col,re,im\n";
  const SiteIndex& sites = *dump.op.sites();
  for (const auto& b : dump.op.blocks()) {
    const Matrix4 core = matrix_from_dset(b.core);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) csv_entry(out, b.stage, b.site, "core", b.site, r, c, core(r, c));
    for (const auto& e : b.support)
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
          csv_entry(out, b.stage, b.site, "phi", sites.site(e.site), r, c, e.phi(r, c));
  }
  return out;
}

std::string solution_csv(const Multispinor& c) {
  std::string out = "n1,n2,n3,n4,c0_re,c0_im,c1_re,c1_im,c2_re,c2_im,c3_re,c3_im\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    const MultiIndex& n = c.sites().site(i);
    out += std::to_string(n[0]) + "," + std::to_string(n[1]) + "," + std::to_string(n[2]) + "," +
           std::to_string(n[3]);
    for (const auto& z : c[i]) out += "," + format_double(z.real()) + "," + format_double(z.imag());
    out += "\n";
  }
  return out;
}

Multispinor parse_solution_csv(const std::string& text, std::shared_ptr<const SiteIndex> sites) {
  Multispinor c(sites);
  std::istringstream in(text);
  std::string line;
  int number = 0;
  std::vector<char> filled(sites->size(), 0);
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (number == 1 && line.rfind("n1,", 0) == 0)) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 12) throw ParseError("multispinor csv: expected 12 fields", "", number);
    MultiIndex n;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto f = fields[i];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), n.n[i]);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError("multispinor csv: bad site index", "", number);
      }
    }
    const long idx = sites->find(n);
    if (idx < 0) throw ParseError("multispinor csv: site " + n.str() + " outside window", "", number);
    if (filled[idx]) throw ParseError("multispinor csv: site " + n.str() + " repeated", "", number);
    filled[idx] = 1;
    for (std::size_t k = 0; k < 4; ++k) {
      double parts[2];
      for (std::size_t p = 0; p < 2; ++p) {
        const auto f = fields[4 + 2 * k + p];
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), parts[p]);
        if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(parts[p])) {
          throw ParseError("multispinor csv: bad number '" + std::string(f) + "'", "", number);
        }
      }
      c[static_cast<std::size_t>(idx)][k] = {parts[0], parts[1]};
    }
  }
  return c;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace estc
