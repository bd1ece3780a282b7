#include "estc/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace estc {

std::string MultiIndex::str() const {
  return "(" + std::to_string(n[0]) + "," + std::to_string(n[1]) + "," +
         std::to_string(n[2]) + "," + std::to_string(n[3]) + ")";
}

std::size_t MultiIndexHash::operator()(const MultiIndex& m) const noexcept {
  std::size_t h = 0;
  for (int x : m.n) h = h * 1000003u + static_cast<std::size_t>(x + 4096);
  return h;
}

int g4d(const Shift& s) {
  return std::max(std::abs(s[0]) + std::abs(s[1]) + std::abs(s[2]), std::abs(s[3]));
}

const std::array<Shift, 13>& shifts_s13() {
  static const std::array<Shift, 13> shifts = {{
      {{0, 0, 0, 0}},
      {{0, 0, -1, -1}},
      {{0, -1, 0, -1}},
      {{-1, 0, 0, -1}},
      {{1, 0, 0, -1}},
      {{0, 1, 0, -1}},
      {{0, 0, 1, -1}},
      {{0, 0, -1, 1}},
      {{0, -1, 0, 1}},
      {{-1, 0, 0, 1}},
      {{1, 0, 0, 1}},
      {{0, 1, 0, 1}},
      {{0, 0, 1, 1}},
  }};
  return shifts;
}

int s13_position(const Shift& s) {
  const auto& shifts = shifts_s13();
  for (int i = 0; i < 13; ++i)
    if (shifts[i] == s) return i;
  return -1;
}

bool couples(const MultiIndex& m, const MultiIndex& n) {
  const Shift d = n - m;
  if (g4d(d) > 2) return false;
  // m + s = n + s'  <=>  s - s' = n - m.
  for (const auto& s : shifts_s13())
    if (s13_position(s - d) >= 0) return true;
  return false;
}

bool Window::contains(const MultiIndex& n) const {
  return on_lattice(n) && g4d(n - center) <= radius;
}

std::vector<MultiIndex> window_points(const Window& w) {
  if (w.radius < 0) throw std::invalid_argument("window radius must be non-negative");
  std::vector<MultiIndex> out;
  const int r = w.radius;
  for (int a = -r; a <= r; ++a)
    for (int b = -r; b <= r; ++b)
      for (int c = -r; c <= r; ++c)
        for (int d = -r; d <= r; ++d) {
          const MultiIndex n = w.center + MultiIndex{{a, b, c, d}};
          if (w.contains(n)) out.push_back(n);
        }
  std::sort(out.begin(), out.end(), [&](const MultiIndex& x, const MultiIndex& y) {
    const int gx = g4d(x - w.center), gy = g4d(y - w.center);
    if (gx != gy) return gx < gy;
    return x < y;
  });
  return out;
}

bool interior(const MultiIndex& n, const Window& w) {
  for (const auto& s : shifts_s13())
    if (!w.contains(n + s)) return false;
  return true;
}

StageSchedule make_schedule(const Window& w) {
  if (!on_lattice(w.center)) {
    throw std::invalid_argument("window center " + w.center.str() + " is not a lattice site");
  }
  StageSchedule schedule;
  for (const auto& n : window_points(w))
    if (interior(n, w)) schedule.sites.push_back(n);
  if (schedule.sites.empty()) {
    throw std::invalid_argument("window of radius " + std::to_string(w.radius) +
                                " has no interior sites");
  }
  return schedule;
}

SiteIndex::SiteIndex(const Window& w) : window_(w), sites_(window_points(w)) {
  lookup_.reserve(sites_.size());
  for (std::size_t i = 0; i < sites_.size(); ++i) lookup_.emplace(sites_[i], i);
}

long SiteIndex::find(const MultiIndex& n) const {
  const auto it = lookup_.find(n);
  return it == lookup_.end() ? -1 : static_cast<long>(it->second);
}

}  // namespace estc
