#pragma once

// The space-time crystal field (three standing waves built from six plane
// waves of a common frequency) and every quantity derived pointwise from it:
// the 13 coupling matrices V(n, s) of the Fourier-lattice system
//   sum_{s in S13} V(n, s) c(n + s) = 0,
// their row Gram matrices L(n), inverses a(n), and row overlaps N(m, n).

#include <array>

#include "estc/dset.hpp"
#include "estc/lattice.hpp"

namespace estc {

// Complex amplitudes A_j = sum_k (a_jk + i b_jk) e_k of the six plane waves.
// Indices are 1-based to match the usual a_jk naming; waves j and j+3 travel
// along +e_j and -e_j, so a_jj, b_jj, a_{j+3,j}, b_{j+3,j} must vanish.
struct FieldConfig {
  std::array<std::array<double, 3>, 6> a{};
  std::array<std::array<double, 3>, 6> b{};

  double& re(int j, int k) { return a[j - 1][k - 1]; }
  double re(int j, int k) const { return a[j - 1][k - 1]; }
  double& im(int j, int k) { return b[j - 1][k - 1]; }
  double im(int j, int k) const { return b[j - 1][k - 1]; }

  friend bool operator==(const FieldConfig&, const FieldConfig&) = default;
};

// Quasimomentum (q1, q2, q3), frequency q4 and crystal frequency omega, all in
// electron rest-energy units.
struct DimensionlessParams {
  std::array<double, 3> q{};
  double q4 = 0.0;
  double omega = 1.0;

  friend bool operator==(const DimensionlessParams&, const DimensionlessParams&) = default;
};

// True for the (j, k) slots that transversality pins to zero.
constexpr bool constrained_slot(int j, int k) {
  return k == (j <= 3 ? j : j - 3);
}

// Throws TransversalityViolation naming the first offending key, or ZeroField.
FieldConfig validate(const FieldConfig& f);
// Throws ValidationError unless omega > 0 and every value is finite.
DimensionlessParams validate(const DimensionlessParams& p);

// I_A = 2 sum_j |A_j|^2.
double field_intensity(const FieldConfig& f);

struct WVector {
  std::array<double, 4> w{};
  double operator[](int i) const { return w[i]; }
};

// w_j = q_j + n_j omega (j = 1..4, with q4 as the fourth component).
WVector w_vector(const MultiIndex& n, const DimensionlessParams& p);

// D-set of V(n, s). Throws ShiftNotInS13.
DSet v_coupling(const MultiIndex& n, const Shift& s, const FieldConfig& f,
                const DimensionlessParams& p);

// L(n) = sum_s V(n, s) V(n, s)^dagger, in closed form. Real D-set.
DSet l_matrix(const MultiIndex& n, const FieldConfig& f, const DimensionlessParams& p);

// Normalizer of the closed-form inverse of L(n):
//   I_A^2 + 2 I_A (1 + w^2) + (1 + |w_spatial|^2 - w4^2)^2.
// L(n) has doubly degenerate eigenvalues and det L(n) is the square of this.
double det_l(const MultiIndex& n, const FieldConfig& f, const DimensionlessParams& p);

// a(n) = L(n)^{-1} in closed form. Throws SingularMatrix if det_l vanishes.
DSet a_matrix(const MultiIndex& n, const FieldConfig& f, const DimensionlessParams& p);

// N(m, n) = sum over s, s' in S13 with m + s = n + s' of V(m, s) V(n, s')^dagger.
Matrix4 n_overlap(const MultiIndex& m, const MultiIndex& n, const FieldConfig& f,
                  const DimensionlessParams& p);

// Validated field and parameters with the 12 site-independent couplings
// precomputed. Immutable after construction.
class FieldModel {
 public:
  FieldModel(const FieldConfig& f, const DimensionlessParams& p);

  const FieldConfig& field() const { return field_; }
  const DimensionlessParams& params() const { return params_; }
  double intensity() const { return intensity_; }

  // V(n, shifts_s13()[index]) as a dense matrix.
  Matrix4 v(const MultiIndex& n, int shift_index) const;
  DSet v_dset(const MultiIndex& n, int shift_index) const;
  DSet l(const MultiIndex& n) const;
  DSet a(const MultiIndex& n) const;
  double det(const MultiIndex& n) const;
  Matrix4 overlap(const MultiIndex& m, const MultiIndex& n) const;

 private:
  FieldConfig field_;
  DimensionlessParams params_;
  double intensity_;
  std::array<DSet, 13> field_dsets_;
  std::array<Matrix4, 13> field_dense_;
};

}  // namespace estc
