#pragma once

// Arithmetic in the numbered 16-element Dirac basis.
//
// Every 4x4 complex matrix A is expanded as A = sum_nu A_nu Gamma_nu, where
// nu = 8M + 4N + 2m + n and the binary digits (M, N, m, n) encode the block
// structure of Gamma_nu. The coefficient array {A_nu} is the "D-set" of A.
// All Gamma_nu are Hermitian involutions, so A_nu = tr(A Gamma_nu) / 4.

#include <array>
#include <complex>
#include <cstdint>

namespace estc {

using Complex = std::complex<double>;

// Index into the Dirac basis, 0..15. Construction from an int range-checks.
class DiracIndex {
 public:
  constexpr DiracIndex() = default;
  explicit DiracIndex(int value);

  constexpr int value() const { return value_; }
  constexpr int M() const { return (value_ >> 3) & 1; }
  constexpr int N() const { return (value_ >> 2) & 1; }
  constexpr int m() const { return (value_ >> 1) & 1; }
  constexpr int n() const { return value_ & 1; }

  friend constexpr bool operator==(DiracIndex, DiracIndex) = default;

 private:
  int value_ = 0;
};

// Dense 4x4 complex matrix, row-major.
class Matrix4 {
 public:
  constexpr Matrix4() = default;

  static Matrix4 identity();
  static Matrix4 zero() { return Matrix4{}; }

  Complex& operator()(int row, int col) { return e_[4 * row + col]; }
  const Complex& operator()(int row, int col) const { return e_[4 * row + col]; }

  Matrix4 adjoint() const;
  Complex trace() const;
  double max_abs() const;
  // Frobenius norm.
  double norm() const;
  bool is_zero() const;

  Matrix4& operator+=(const Matrix4& other);
  Matrix4& operator-=(const Matrix4& other);
  Matrix4& operator*=(Complex s);

  friend Matrix4 operator+(Matrix4 a, const Matrix4& b) { return a += b; }
  friend Matrix4 operator-(Matrix4 a, const Matrix4& b) { return a -= b; }
  friend Matrix4 operator*(Matrix4 a, Complex s) { return a *= s; }
  friend Matrix4 operator*(Complex s, Matrix4 a) { return a *= s; }
  friend Matrix4 operator*(const Matrix4& a, const Matrix4& b);
  friend bool operator==(const Matrix4&, const Matrix4&) = default;

 private:
  std::array<Complex, 16> e_{};
};

using Bispinor = std::array<Complex, 4>;

Bispinor operator*(const Matrix4& a, const Bispinor& v);

// The D-set: 16 coefficients in nu-order.
class DSet {
 public:
  constexpr DSet() = default;
  explicit DSet(const std::array<Complex, 16>& coefficients) : c_(coefficients) {}

  static DSet identity();
  static DSet unit(DiracIndex nu);

  Complex& operator[](int nu) { return c_[nu]; }
  const Complex& operator[](int nu) const { return c_[nu]; }
  const std::array<Complex, 16>& coefficients() const { return c_; }

  // D-set of the conjugate-transpose matrix.
  DSet conj() const;
  // Drops imaginary parts; the D-set of the Hermitian part of the matrix.
  DSet real_part() const;
  double max_abs() const;
  double max_imag() const;

  DSet& operator+=(const DSet& other);
  DSet& operator-=(const DSet& other);
  DSet& operator*=(Complex s);

  friend DSet operator+(DSet a, const DSet& b) { return a += b; }
  friend DSet operator-(DSet a, const DSet& b) { return a -= b; }
  friend DSet operator*(DSet a, Complex s) { return a *= s; }
  friend DSet operator*(Complex s, DSet a) { return a *= s; }
  friend bool operator==(const DSet&, const DSet&) = default;

 private:
  std::array<Complex, 16> c_{};
};

// Gamma_lambda Gamma_mu = phase * Gamma_product.
struct StructureConstant {
  DiracIndex product;
  Complex phase;
};

// The 256 products Gamma_lambda Gamma_mu, regenerated from the closed-form
// rule. Mutable only so verification code can inject faults.
class StructureTable {
 public:
  static StructureTable generate();
  // Process-wide table generated on first use.
  static const StructureTable& standard();

  const StructureConstant& operator()(int lambda, int mu) const {
    return table_[16 * lambda + mu];
  }
  void set(int lambda, int mu, StructureConstant entry) {
    table_[16 * lambda + mu] = entry;
  }

 private:
  std::array<StructureConstant, 256> table_{};
};

// Coefficients of lambda^4 - I1 lambda^3 + I2 lambda^2 - I3 lambda + I4.
struct CharInvariants {
  Complex i1;
  Complex i2;
  Complex i3;
  Complex i4;
};

// b_nu: the nonzero element in the first row of Gamma_nu, one of {1,-1,i,-i}.
Complex leading_element(DiracIndex nu);
Matrix4 gamma_matrix(DiracIndex nu);
// Evaluates the bitwise product rule directly (no table).
StructureConstant structure_constant(DiracIndex lambda, DiracIndex mu);

DSet dset_from_matrix(const Matrix4& a);
Matrix4 matrix_from_dset(const DSet& d);

DSet dset_multiply(const DSet& a, const DSet& b,
                   const StructureTable& table = StructureTable::standard());
// Closed-form expansion of D_s(A^2).
DSet dset_square(const DSet& d);

CharInvariants char_invariants(const DSet& d);
// D-set of the adjugate, via Hamilton-Cayley: adj A = I3 U - I2 A + I1 A^2 - A^3.
DSet dset_adjoint(const DSet& d);

// Default singularity threshold on |I4|: 1e-12 * (1 + max|D_nu|).
double default_inverse_tolerance(const DSet& d);
// Throws SingularMatrix when |I4| <= tol.
DSet dset_inverse(const DSet& d, double tol);
DSet dset_inverse(const DSet& d);

}  // namespace estc
