#include "estc/field_model.hpp"

#include <cmath>
#include <string>

#include "estc/errors.hpp"

namespace estc {

namespace {

constexpr Complex kI{0.0, 1.0};

// Each field shift carries two amplitude components of one wave at D-set
// positions 13..15, as -i a_jk + sign * b_jk.
struct CouplingTerm {
  int position;
  int j;
  int k;
};

struct FieldShiftCoupling {
  CouplingTerm first;
  CouplingTerm second;
  double b_sign;
};

// Indexed by S13 position 1..12.
constexpr std::array<FieldShiftCoupling, 13> kFieldCouplings = {{
    {{0, 0, 0}, {0, 0, 0}, 0.0},
    {{14, 3, 1}, {15, 3, 2}, +1.0},
    {{13, 2, 3}, {14, 2, 1}, +1.0},
    {{13, 1, 3}, {15, 1, 2}, +1.0},
    {{13, 4, 3}, {15, 4, 2}, +1.0},
    {{13, 5, 3}, {14, 5, 1}, +1.0},
    {{14, 6, 1}, {15, 6, 2}, +1.0},
    {{14, 6, 1}, {15, 6, 2}, -1.0},
    {{13, 5, 3}, {14, 5, 1}, -1.0},
    {{13, 4, 3}, {15, 4, 2}, -1.0},
    {{13, 1, 3}, {15, 1, 2}, -1.0},
    {{13, 2, 3}, {14, 2, 1}, -1.0},
    {{14, 3, 1}, {15, 3, 2}, -1.0},
}};

DSet field_shift_dset(int index, const FieldConfig& f) {
  const auto& c = kFieldCouplings[index];
  DSet d;
  for (const auto& t : {c.first, c.second})
    d[t.position] = -kI * f.re(t.j, t.k) + c.b_sign * f.im(t.j, t.k);
  return d;
}

DSet zero_shift_dset(const WVector& w) {
  DSet d;
  d[0] = 1.0;
  d[4] = -w[3];
  d[13] = kI * w[2];
  d[14] = kI * w[0];
  d[15] = kI * w[1];
  return d;
}

double spatial_w2(const WVector& w) { return w[0] * w[0] + w[1] * w[1] + w[2] * w[2]; }

DSet l_from(const WVector& w, double intensity) {
  DSet d;
  d[0] = 1.0 + intensity + spatial_w2(w) + w[3] * w[3];
  d[4] = -2.0 * w[3];
  d[9] = 2.0 * w[2] * w[3];
  d[10] = 2.0 * w[0] * w[3];
  d[11] = 2.0 * w[1] * w[3];
  return d;
}

double det_from(const WVector& w, double intensity) {
  const double w2 = spatial_w2(w) + w[3] * w[3];
  const double mass_shell = 1.0 + spatial_w2(w) - w[3] * w[3];
  return intensity * intensity + 2.0 * intensity * (1.0 + w2) + mass_shell * mass_shell;
}

DSet a_from(const WVector& w, double intensity) {
  const double det = det_from(w, intensity);
  if (!(det > 0.0) || !std::isfinite(det)) {
    throw SingularMatrix("L(n) is singular", det);
  }
  DSet d = l_from(w, intensity);
  for (int nu : {4, 9, 10, 11}) d[nu] = -d[nu];
  return d * (1.0 / det);
}

template <typename VFn>
Matrix4 overlap_sum(const MultiIndex& m, const MultiIndex& n, VFn&& v) {
  Matrix4 sum;
  const Shift d = n - m;
  if (g4d(d) > 2) return sum;
  const auto& shifts = shifts_s13();
  for (int i = 0; i < 13; ++i) {
    const int j = s13_position(shifts[i] - d);
    if (j < 0) continue;
    sum += v(m, i) * v(n, j).adjoint();
  }
  return sum;
}

}  // namespace

FieldConfig validate(const FieldConfig& f) {
  for (int j = 1; j <= 6; ++j) {
    for (int k = 1; k <= 3; ++k) {
      const double re = f.re(j, k), im = f.im(j, k);
      if (!std::isfinite(re) || !std::isfinite(im)) {
        throw ValidationError("non-finite amplitude a/b" + std::to_string(j) + std::to_string(k),
                              "a" + std::to_string(j) + std::to_string(k));
      }
      if (!constrained_slot(j, k)) continue;
      if (re != 0.0) throw TransversalityViolation('a', j, k, re);
      if (im != 0.0) throw TransversalityViolation('b', j, k, im);
    }
  }
  if (!(field_intensity(f) > 0.0)) throw ZeroField();
  return f;
}

DimensionlessParams validate(const DimensionlessParams& p) {
  const char* names[3] = {"q1", "q2", "q3"};
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(p.q[i])) throw ValidationError("q must be finite", names[i]);
  }
  if (!std::isfinite(p.q4)) throw ValidationError("q4 must be finite", "q4");
  if (!std::isfinite(p.omega) || !(p.omega > 0.0)) {
    throw ValidationError("Omega must be finite and positive", "Omega");
  }
  return p;
}

double field_intensity(const FieldConfig& f) {
  double sum = 0.0;
  for (int j = 0; j < 6; ++j)
    for (int k = 0; k < 3; ++k) sum += f.a[j][k] * f.a[j][k] + f.b[j][k] * f.b[j][k];
  return 2.0 * sum;
}

WVector w_vector(const MultiIndex& n, const DimensionlessParams& p) {
  return {{p.q[0] + n[0] * p.omega, p.q[1] + n[1] * p.omega, p.q[2] + n[2] * p.omega,
           p.q4 + n[3] * p.omega}};
}

DSet v_coupling(const MultiIndex& n, const Shift& s, const FieldConfig& f,
                const DimensionlessParams& p) {
  const int index = s13_position(s);
  if (index < 0) throw ShiftNotInS13("shift " + s.str() + " is not in S13");
  if (index == 0) return zero_shift_dset(w_vector(n, p));
  return field_shift_dset(index, f);
}

DSet l_matrix(const MultiIndex& n, const FieldConfig& f, const DimensionlessParams& p) {
  return l_from(w_vector(n, p), field_intensity(f));
}

double det_l(const MultiIndex& n, const FieldConfig& f, const DimensionlessParams& p) {
  return det_from(w_vector(n, p), field_intensity(f));
}

DSet a_matrix(const MultiIndex& n, const FieldConfig& f, const DimensionlessParams& p) {
  return a_from(w_vector(n, p), field_intensity(f));
}

Matrix4 n_overlap(const MultiIndex& m, const MultiIndex& n, const FieldConfig& f,
                  const DimensionlessParams& p) {
  return overlap_sum(m, n, [&](const MultiIndex& site, int i) {
    return matrix_from_dset(v_coupling(site, shifts_s13()[i], f, p));
  });
}

// ------------------------------------------------------------- FieldModel

FieldModel::FieldModel(const FieldConfig& f, const DimensionlessParams& p)
    : field_(validate(f)), params_(validate(p)), intensity_(field_intensity(f)) {
  for (int i = 1; i < 13; ++i) {
    field_dsets_[i] = field_shift_dset(i, field_);
    field_dense_[i] = matrix_from_dset(field_dsets_[i]);
  }
}

DSet FieldModel::v_dset(const MultiIndex& n, int shift_index) const {
  if (shift_index == 0) return zero_shift_dset(w_vector(n, params_));
  return field_dsets_[shift_index];
}

Matrix4 FieldModel::v(const MultiIndex& n, int shift_index) const {
  if (shift_index == 0) return matrix_from_dset(zero_shift_dset(w_vector(n, params_)));
  return field_dense_[shift_index];
}

DSet FieldModel::l(const MultiIndex& n) const {
  return l_from(w_vector(n, params_), intensity_);
}

DSet FieldModel::a(const MultiIndex& n) const {
  return a_from(w_vector(n, params_), intensity_);
}

double FieldModel::det(const MultiIndex& n) const {
  return det_from(w_vector(n, params_), intensity_);
}

Matrix4 FieldModel::overlap(const MultiIndex& m, const MultiIndex& n) const {
  return overlap_sum(m, n, [&](const MultiIndex& site, int i) { return v(site, i); });
}

}  // namespace estc
