#include "estc/dset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "estc/errors.hpp"

namespace estc {

namespace {

Complex i_power(int p) {
  switch (((p % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

double sign_power(int p) { return (p % 2 == 0) ? 1.0 : -1.0; }

const std::array<Matrix4, 16>& basis() {
  static const std::array<Matrix4, 16> gammas = [] {
    std::array<Matrix4, 16> out;
    for (int nu = 0; nu < 16; ++nu) out[nu] = gamma_matrix(DiracIndex(nu));
    return out;
  }();
  return gammas;
}

}  // namespace

DiracIndex::DiracIndex(int value) : value_(value) {
  if (value < 0 || value > 15) {
    throw std::out_of_range("Dirac index out of range: " + std::to_string(value));
  }
}

// ---------------------------------------------------------------- Matrix4

Matrix4 Matrix4::identity() {
  Matrix4 u;
  for (int i = 0; i < 4; ++i) u(i, i) = 1.0;
  return u;
}

Matrix4 Matrix4::adjoint() const {
  Matrix4 out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

Complex Matrix4::trace() const {
  return e_[0] + e_[5] + e_[10] + e_[15];
}

double Matrix4::max_abs() const {
  double m = 0.0;
  for (const auto& x : e_) m = std::max(m, std::abs(x));
  return m;
}

double Matrix4::norm() const {
  double s = 0.0;
  for (const auto& x : e_) s += std::norm(x);
  return std::sqrt(s);
}

bool Matrix4::is_zero() const {
  return std::all_of(e_.begin(), e_.end(),
                     [](const Complex& x) { return x == Complex{}; });
}

Matrix4& Matrix4::operator+=(const Matrix4& other) {
  for (int i = 0; i < 16; ++i) e_[i] += other.e_[i];
  return *this;
}

Matrix4& Matrix4::operator-=(const Matrix4& other) {
  for (int i = 0; i < 16; ++i) e_[i] -= other.e_[i];
  return *this;
}

Matrix4& Matrix4::operator*=(Complex s) {
  for (auto& x : e_) x *= s;
  return *this;
}

Matrix4 operator*(const Matrix4& a, const Matrix4& b) {
  Matrix4 c;
  for (int r = 0; r < 4; ++r) {
    for (int k = 0; k < 4; ++k) {
      const Complex ark = a(r, k);
      if (ark == Complex{}) continue;
      for (int col = 0; col < 4; ++col) c(r, col) += ark * b(k, col);
    }
  }
  return c;
}

Bispinor operator*(const Matrix4& a, const Bispinor& v) {
  Bispinor out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out[r] += a(r, c) * v[c];
  return out;
}

// ------------------------------------------------------------------- DSet

DSet DSet::identity() {
  DSet d;
  d[0] = 1.0;
  return d;
}

DSet DSet::unit(DiracIndex nu) {
  DSet d;
  d[nu.value()] = 1.0;
  return d;
}

DSet DSet::conj() const {
  DSet out;
  for (int nu = 0; nu < 16; ++nu) out[nu] = std::conj(c_[nu]);
  return out;
}

DSet DSet::real_part() const {
  DSet out;
  for (int nu = 0; nu < 16; ++nu) out[nu] = c_[nu].real();
  return out;
}

double DSet::max_abs() const {
  double m = 0.0;
  for (const auto& x : c_) m = std::max(m, std::abs(x));
  return m;
}

double DSet::max_imag() const {
  double m = 0.0;
  for (const auto& x : c_) m = std::max(m, std::abs(x.imag()));
  return m;
}

DSet& DSet::operator+=(const DSet& other) {
  for (int i = 0; i < 16; ++i) c_[i] += other.c_[i];
  return *this;
}

DSet& DSet::operator-=(const DSet& other) {
  for (int i = 0; i < 16; ++i) c_[i] -= other.c_[i];
  return *this;
}

DSet& DSet::operator*=(Complex s) {
  for (auto& x : c_) x *= s;
  return *this;
}

// ------------------------------------------------------------ Dirac basis

Complex leading_element(DiracIndex nu) {
  const int M = nu.M(), N = nu.N(), m = nu.m(), n = nu.n();
  return i_power(M * N + m * n) *
         sign_power((1 - M) * m * n + M * (1 + N + m + n));
}

Matrix4 gamma_matrix(DiracIndex nu) {
  const int M = nu.M(), N = nu.N(), m = nu.m(), n = nu.n();
  const Complex b = leading_element(nu);

  // 2x2 block X: diagonal for m = 0, off-diagonal for m = 1.
  Complex x[2][2] = {};
  if (m == 0) {
    x[0][0] = b;
    x[1][1] = sign_power(n) * b;
  } else {
    x[0][1] = b;
    x[1][0] = sign_power(n) * b;
  }

  // M = 0: diag(X, (-1)^N X). M = 1: [[0, X], [(-1)^N X, 0]].
  Matrix4 g;
  const int top_col = 2 * M;
  const double lower = sign_power(N);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      g(r, top_col + c) = x[r][c];
      g(2 + r, (M == 0 ? 2 : 0) + c) = lower * x[r][c];
    }
  }
  return g;
}

StructureConstant structure_constant(DiracIndex lambda, DiracIndex mu) {
  const int G = lambda.M(), H = lambda.N(), g = lambda.m(), h = lambda.n();
  const int J = mu.M(), K = mu.N(), j = mu.m(), k = mu.n();

  const int product = 8 * std::abs(G - J) + 4 * std::abs(H - K) +
                      2 * std::abs(g - j) + std::abs(h - k);
  const int z = G * K * (1 - J - H) + J * H * (G + K) +
                (G * j + J * g) * (1 - h - k) + G * k * (1 - g) +
                J * h * (1 - j) + g * k * (1 - j - h) + j * h * (g + k);
  const Complex phase = i_power(G * K + J * H + g * k + j * h) * sign_power(z);
  return {DiracIndex(product), phase};
}

StructureTable StructureTable::generate() {
  StructureTable t;
  for (int l = 0; l < 16; ++l)
    for (int u = 0; u < 16; ++u)
      t.set(l, u, structure_constant(DiracIndex(l), DiracIndex(u)));
  return t;
}

const StructureTable& StructureTable::standard() {
  static const StructureTable table = generate();
  return table;
}

// ------------------------------------------------------------- D-set maps

DSet dset_from_matrix(const Matrix4& a) {
  const auto& gammas = basis();
  DSet d;
  for (int nu = 0; nu < 16; ++nu) {
    // tr(A Gamma) with Gamma having one nonzero per row.
    Complex tr{};
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        if (gammas[nu](c, r) != Complex{}) tr += a(r, c) * gammas[nu](c, r);
    d[nu] = 0.25 * tr;
  }
  return d;
}

Matrix4 matrix_from_dset(const DSet& d) {
  const auto& gammas = basis();
  Matrix4 a;
  for (int nu = 0; nu < 16; ++nu) {
    if (d[nu] == Complex{}) continue;
    a += gammas[nu] * d[nu];
  }
  return a;
}

DSet dset_multiply(const DSet& a, const DSet& b, const StructureTable& table) {
  // C_nu = sum_lambda A_lambda B_mu f(lambda, mu), mu = nu XOR lambda.
  DSet c;
  for (int nu = 0; nu < 16; ++nu) {
    Complex acc{};
    for (int lambda = 0; lambda < 16; ++lambda) {
      const int mu = nu ^ lambda;
      acc += a[lambda] * b[mu] * table(lambda, mu).phase;
    }
    c[nu] = acc;
  }
  return c;
}

DSet dset_square(const DSet& d) {
  const Complex a = d[0], b = d[1], c = d[2], dd = d[3], e = d[4], f = d[5],
                g = d[6], h = d[7], s = d[8], t = d[9], u = d[10], v = d[11],
                w = d[12], x = d[13], y = d[14], z = d[15];
  Complex i0{};
  for (int nu = 1; nu < 16; ++nu) i0 += d[nu] * d[nu];

  DSet out;
  out[0] = a * a + i0;
  out[1] = 2.0 * (a * b + e * f - s * t - w * x);
  out[2] = 2.0 * (a * c + e * g - s * u - w * y);
  out[3] = 2.0 * (a * dd + e * h - s * v - w * z);
  out[4] = 2.0 * (a * e + b * f + c * g + dd * h);
  out[5] = 2.0 * (b * e + a * f + v * y - u * z);
  out[6] = 2.0 * (c * e + a * g - v * x + t * z);
  out[7] = 2.0 * (dd * e + a * h + u * x - t * y);
  out[8] = 2.0 * (a * s - b * t - c * u - dd * v);
  out[9] = 2.0 * (a * t - b * s - h * y + g * z);
  out[10] = 2.0 * (a * u - c * s + h * x - f * z);
  out[11] = 2.0 * (a * v - s * dd - g * x + f * y);
  out[12] = 2.0 * (a * w - b * x - c * y - dd * z);
  out[13] = 2.0 * (h * u - g * v - b * w + a * x);
  out[14] = 2.0 * (f * v - h * t - c * w + a * y);
  out[15] = 2.0 * (g * t - f * u - dd * w + a * z);
  return out;
}

CharInvariants char_invariants(const DSet& D) {
  const Complex a = D[0], b = D[1], c = D[2], d = D[3], e = D[4], f = D[5],
                g = D[6], h = D[7], s = D[8], t = D[9], u = D[10], v = D[11],
                w = D[12], x = D[13], y = D[14], z = D[15];
  Complex i0{};
  for (int nu = 1; nu < 16; ++nu) i0 += D[nu] * D[nu];

  const Complex s2 = s * s, t2 = t * t, u2 = u * u, v2 = v * v;
  const Complex w2 = w * w, x2 = x * x, y2 = y * y, z2 = z * z;

  const Complex quad = s2 - t2 - u2 - v2 - w2 + x2 + y2 + z2;
  const Complex cross = -s * w + t * x + u * y + v * z;

  Complex i4 = ((a - e) * (a - e) - (b - f) * (b - f) - (c - g) * (c - g) -
                (d - h) * (d - h)) *
               ((a + e) * (a + e) - (b + f) * (b + f) - (c + g) * (c + g) -
                (d + h) * (d + h));
  i4 += 4.0 * cross * cross + quad * quad;
  i4 -= 2.0 * ((b * b - f * f) * (s2 + t2 - u2 - v2 + w2 + x2 - y2 - z2) +
               (c * c - g * g) * (s2 - t2 + u2 - v2 + w2 - x2 + y2 - z2) +
               (d * d - h * h) * (s2 - t2 - u2 + v2 + w2 - x2 - y2 + z2) +
               (a * a - e * e) * (s2 + t2 + u2 + v2 + w2 + x2 + y2 + z2));
  i4 -= 8.0 * ((d * g - c * h) * (s * x - t * w) + (a * b - e * f) * (s * t + w * x) +
               (d * f - b * h) * (u * w - s * y) + (d * e - a * h) * (u * x - t * y) +
               (a * c - e * g) * (s * u + w * y) + (b * c - f * g) * (t * u + x * y) +
               (b * g - c * f) * (v * w - s * z) + (a * g - c * e) * (v * x - t * z) +
               (b * e - a * f) * (v * y - u * z) + (a * d - e * h) * (s * v + w * z) +
               (b * d - f * h) * (t * v + x * z) + (c * d - g * h) * (u * v + y * z));

  const Complex i3 =
      4.0 * a * (a * a - i0) +
      8.0 * (c * e * g + d * e * h - c * s * u - d * s * v + h * u * x - g * v * x +
             b * (e * f - s * t - w * x) + y * (f * v - h * t - c * w) +
             z * (g * t - d * w - f * u));

  return {4.0 * a, 6.0 * a * a - 2.0 * i0, i3, i4};
}

namespace {
DSet adjoint_from(const DSet& d, const CharInvariants& inv) {
  DSet out = DSet::identity() * inv.i3 - d * inv.i2;
  out += dset_multiply(dset_square(d), DSet::identity() * inv.i1 - d);
  return out;
}
}  // namespace

DSet dset_adjoint(const DSet& d) { return adjoint_from(d, char_invariants(d)); }

double default_inverse_tolerance(const DSet& d) {
  return 1e-12 * (1.0 + d.max_abs());
}

DSet dset_inverse(const DSet& d, double tol) {
  const CharInvariants inv = char_invariants(d);
  if (!(std::abs(inv.i4) > tol)) {
    throw SingularMatrix("4x4 matrix is singular: |det| = " +
                             std::to_string(std::abs(inv.i4)),
                         std::abs(inv.i4));
  }
  return adjoint_from(d, inv) * (1.0 / inv.i4);
}

DSet dset_inverse(const DSet& d) {
  return dset_inverse(d, default_inverse_tolerance(d));
}

}  // namespace estc
