#pragma once

// The four-dimensional Fourier lattice: sites n = (n1, n2, n3, n4) with an
// even coordinate sum, the 13 coupling shifts, and finite truncation windows.

#include <array>
#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace estc {

struct MultiIndex {
  std::array<int, 4> n{};

  constexpr int operator[](int i) const { return n[i]; }
  constexpr int& operator[](int i) { return n[i]; }

  friend constexpr MultiIndex operator+(MultiIndex a, const MultiIndex& b) {
    for (int i = 0; i < 4; ++i) a.n[i] += b.n[i];
    return a;
  }
  friend constexpr MultiIndex operator-(MultiIndex a, const MultiIndex& b) {
    for (int i = 0; i < 4; ++i) a.n[i] -= b.n[i];
    return a;
  }
  friend constexpr MultiIndex operator-(MultiIndex a) {
    for (auto& x : a.n) x = -x;
    return a;
  }
  friend constexpr auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
  friend constexpr bool operator==(const MultiIndex&, const MultiIndex&) = default;

  std::string str() const;
};

// Shifts are differences of sites; they share the representation.
using Shift = MultiIndex;

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& m) const noexcept;
};

constexpr bool on_lattice(const MultiIndex& m) {
  return ((m[0] + m[1] + m[2] + m[3]) % 2) == 0;
}

// Generation metric: max(|s1| + |s2| + |s3|, |s4|).
int g4d(const Shift& s);

// s_h(0) = 0 followed by the 12 first-generation shifts, in coupling order.
const std::array<Shift, 13>& shifts_s13();
// Position of s in shifts_s13(), or -1.
int s13_position(const Shift& s);

// True iff some pair s, s' in S13 satisfies m + s = n + s', i.e. the rows at
// m and n share an amplitude.
bool couples(const MultiIndex& m, const MultiIndex& n);

// All lattice sites within generation distance `radius` of `center`.
struct Window {
  int radius = 1;
  MultiIndex center{};

  bool contains(const MultiIndex& n) const;
};

// Sites sorted by g4d from the center, ties broken lexicographically.
std::vector<MultiIndex> window_points(const Window& w);

// True iff every S13 neighbor of n lies in the window.
bool interior(const MultiIndex& n, const Window& w);

// Stage-ordered interior sites; one site per stage, stage 0 = window center.
struct StageSchedule {
  std::vector<MultiIndex> sites;

  std::size_t size() const { return sites.size(); }
  const MultiIndex& operator[](std::size_t k) const { return sites[k]; }
};

// Throws std::invalid_argument if the interior is empty.
StageSchedule make_schedule(const Window& w);

// Dense numbering of the sites of a window. Shared by multispinors and the
// projector engine so that site data can live in flat arrays.
class SiteIndex {
 public:
  explicit SiteIndex(const Window& w);

  const Window& window() const { return window_; }
  std::size_t size() const { return sites_.size(); }
  const std::vector<MultiIndex>& sites() const { return sites_; }
  const MultiIndex& site(std::size_t i) const { return sites_[i]; }
  // Index of n, or -1 if outside the window.
  long find(const MultiIndex& n) const;

 private:
  Window window_;
  std::vector<MultiIndex> sites_;
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> lookup_;
};

}  // namespace estc
