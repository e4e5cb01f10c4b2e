#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>

// Small dense complex linear algebra on fixed-size matrices, plus a cyclic
// Jacobi eigensolver for Hermitian matrices.  Everything is value-typed and
// allocation-free; the sizes in this project are 2x2 and 4x4.

namespace dirac {

using cplx = std::complex<double>;

template <std::size_t N>
using Vec = std::array<cplx, N>;

template <std::size_t N>
struct Mat {
  std::array<cplx, N * N> a{};

  cplx& operator()(std::size_t i, std::size_t j) { return a[i * N + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return a[i * N + j]; }

  static Mat zero() { return Mat{}; }

  static Mat identity() {
    Mat m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  Mat adjoint() const {
    Mat m;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) m(i, j) = std::conj((*this)(j, i));
    return m;
  }

  friend Mat operator+(const Mat& x, const Mat& y) {
    Mat m;
    for (std::size_t i = 0; i < N * N; ++i) m.a[i] = x.a[i] + y.a[i];
    return m;
  }

  friend Mat operator-(const Mat& x, const Mat& y) {
    Mat m;
    for (std::size_t i = 0; i < N * N; ++i) m.a[i] = x.a[i] - y.a[i];
    return m;
  }

  friend Mat operator*(cplx s, const Mat& x) {
    Mat m;
    for (std::size_t i = 0; i < N * N; ++i) m.a[i] = s * x.a[i];
    return m;
  }

  friend Mat operator*(const Mat& x, const Mat& y) {
    Mat m;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const cplx xik = x(i, k);
        for (std::size_t j = 0; j < N; ++j) m(i, j) += xik * y(k, j);
      }
    return m;
  }

  friend Vec<N> operator*(const Mat& x, const Vec<N>& v) {
    Vec<N> r{};
    for (std::size_t i = 0; i < N; ++i) {
      cplx acc = 0.0;
      for (std::size_t j = 0; j < N; ++j) acc += x(i, j) * v[j];
      r[i] = acc;
    }
    return r;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const cplx& z : a) s += std::norm(z);
    return std::sqrt(s);
  }
};

// <u|v> with the convention of conjugating the first argument.
template <std::size_t N>
inline cplx dot(const Vec<N>& u, const Vec<N>& v) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) acc += std::conj(u[i]) * v[i];
  return acc;
}

template <std::size_t N>
inline double norm(const Vec<N>& v) {
  double s = 0.0;
  for (const cplx& z : v) s += std::norm(z);
  return std::sqrt(s);
}

template <std::size_t N>
inline Vec<N> normalized(const Vec<N>& v) {
  const double n = norm(v);
  if (n == 0.0) throw std::invalid_argument("cannot normalize a zero vector");
  Vec<N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = v[i] / n;
  return r;
}

template <std::size_t N, std::size_t M>
inline Mat<N * M> kron(const Mat<N>& x, const Mat<M>& y) {
  Mat<N * M> m;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t r = 0; r < M; ++r)
        for (std::size_t c = 0; c < M; ++c)
          m(i * M + r, j * M + c) = x(i, j) * y(r, c);
  return m;
}

template <std::size_t N, std::size_t M>
inline Vec<N * M> kron(const Vec<N>& x, const Vec<M>& y) {
  Vec<N * M> v;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t r = 0; r < M; ++r) v[i * M + r] = x[i] * y[r];
  return v;
}

template <std::size_t N>
struct EigenResult {
  std::array<double, N> values;  // ascending
  Mat<N> vectors;                // column j is the eigenvector of values[j]
};

namespace detail {

template <std::size_t N>
inline double off_diagonal_norm(const Mat<N>& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (i != j) s += std::norm(m(i, j));
  return std::sqrt(s);
}

}  // namespace detail

// Cyclic Jacobi diagonalization of a Hermitian matrix.  Each rotation zeroes
// one off-diagonal pair exactly; sweeps repeat until the off-diagonal norm
// falls below tol * ||A||_F.  Eigenvalues are returned ascending with the
// matching eigenvector columns.
template <std::size_t N>
inline EigenResult<N> jacobi_hermitian(const Mat<N>& input, double tol = 1e-14,
                                       int max_sweeps = 60) {
  Mat<N> m = input;
  const double herm_defect = (m - m.adjoint()).frobenius_norm();
  const double scale = m.frobenius_norm();
  if (herm_defect > 1e-10 * std::max(1.0, scale))
    throw std::invalid_argument("jacobi_hermitian: matrix is not Hermitian");

  Mat<N> v = Mat<N>::identity();
  const double stop = tol * std::max(scale, 1e-300);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (detail::off_diagonal_norm(m) <= stop) break;
    for (std::size_t p = 0; p < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const cplx apq = m(p, q);
        const double beta = std::abs(apq);
        if (beta <= 1e-300) continue;
        // Phase that makes the pivot real, then a real Jacobi rotation.
        const cplx phase = std::conj(apq) / beta;
        const double alpha = m(p, p).real();
        const double delta = m(q, q).real();
        const double theta = (delta - alpha) / (2.0 * beta);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx sp = s * phase;
        const cplx cp = c * phase;

        for (std::size_t r = 0; r < N; ++r) {  // M <- M J
          const cplx mp = m(r, p), mq = m(r, q);
          m(r, p) = c * mp - sp * mq;
          m(r, q) = s * mp + cp * mq;
        }
        for (std::size_t r = 0; r < N; ++r) {  // M <- J^dagger M
          const cplx mp = m(p, r), mq = m(q, r);
          m(p, r) = c * mp - std::conj(sp) * mq;
          m(q, r) = s * mp + std::conj(cp) * mq;
        }
        for (std::size_t r = 0; r < N; ++r) {  // V <- V J
          const cplx vp = v(r, p), vq = v(r, q);
          v(r, p) = c * vp - sp * vq;
          v(r, q) = s * vp + cp * vq;
        }
        m(p, q) = 0.0;
        m(q, p) = 0.0;
      }
    }
  }

  std::array<std::size_t, N> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return m(i, i).real() < m(j, j).real(); });

  EigenResult<N> out;
  for (std::size_t j = 0; j < N; ++j) {
    out.values[j] = m(order[j], order[j]).real();
    for (std::size_t i = 0; i < N; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

}  // namespace dirac
