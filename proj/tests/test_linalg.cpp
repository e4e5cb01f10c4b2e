#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "dirac/linalg.hpp"
#include "dirac/rng.hpp"

using namespace dirac;

namespace {

Mat<4> random_hermitian(RandomStream& rng, double scale) {
  Mat<4> h;
  for (std::size_t i = 0; i < 4; ++i) {
    h(i, i) = scale * rng.next_normal();
    for (std::size_t j = i + 1; j < 4; ++j) {
      h(i, j) = scale * cplx(rng.next_normal(), rng.next_normal());
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

}  // namespace

TEST_CASE("kron reproduces hand-computed tensor products") {
  const Mat<2> id = Mat<2>::identity();
  Mat<2> sx, sy;
  sx(0, 1) = 1.0;
  sx(1, 0) = 1.0;
  sy(0, 1) = cplx(0.0, -1.0);
  sy(1, 0) = cplx(0.0, 1.0);

  const Mat<4> k = kron(sx, sy);
  // (sx)_{ab} (sy)_{cd} sits at row 2a+c, col 2b+d.
  CHECK(k(0, 3) == cplx(0.0, -1.0));
  CHECK(k(1, 2) == cplx(0.0, 1.0));
  CHECK(k(2, 1) == cplx(0.0, -1.0));
  CHECK(k(3, 0) == cplx(0.0, 1.0));
  CHECK(std::abs(k(0, 0)) == 0.0);
  CHECK(std::abs(k(1, 1)) == 0.0);

  const Mat<4> k2 = kron(id, id);
  CHECK((k2 - Mat<4>::identity()).frobenius_norm() == 0.0);

  Vec<2> a{1.0, 2.0}, b{cplx(0.0, 1.0), 3.0};
  const Vec<4> v = kron(a, b);
  CHECK(v[0] == cplx(0.0, 1.0));
  CHECK(v[1] == cplx(3.0, 0.0));
  CHECK(v[2] == cplx(0.0, 2.0));
  CHECK(v[3] == cplx(6.0, 0.0));
}

TEST_CASE("dot conjugates its first argument") {
  Vec<2> a{cplx(0.0, 1.0), 0.0};
  Vec<2> b{1.0, 0.0};
  CHECK(dot(a, b) == cplx(0.0, -1.0));
  CHECK(dot(b, a) == cplx(0.0, 1.0));
  CHECK(std::abs(norm(normalized(Vec<2>{3.0, 4.0})) - 1.0) < 1e-15);
}

TEST_CASE("jacobi handles trivial matrices") {
  const Mat<4> zero;
  const auto rz = jacobi_hermitian(zero);
  for (double v : rz.values) CHECK(v == 0.0);
  CHECK((rz.vectors.adjoint() * rz.vectors - Mat<4>::identity()).frobenius_norm() < 1e-14);

  Mat<4> diag;
  diag(0, 0) = 3.0;
  diag(1, 1) = -1.0;
  diag(2, 2) = 2.0;
  diag(3, 3) = 0.5;
  const auto rd = jacobi_hermitian(diag);
  CHECK(rd.values[0] == -1.0);
  CHECK(rd.values[1] == 0.5);
  CHECK(rd.values[2] == 2.0);
  CHECK(rd.values[3] == 3.0);
}

TEST_CASE("jacobi reconstructs random Hermitian matrices") {
  RandomStream rng(20240817, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const double scale = std::pow(10.0, -2 + 4 * rng.next_double());
    const Mat<4> h = random_hermitian(rng, scale);
    const auto r = jacobi_hermitian(h);

    // ascending eigenvalues
    for (std::size_t i = 1; i < 4; ++i) CHECK(r.values[i] >= r.values[i - 1]);

    // unitary eigenvector matrix
    CHECK((r.vectors.adjoint() * r.vectors - Mat<4>::identity()).frobenius_norm() < 1e-13);

    // A = V diag V^dagger
    Mat<4> lam;
    for (std::size_t i = 0; i < 4; ++i) lam(i, i) = r.values[i];
    const Mat<4> rebuilt = r.vectors * lam * r.vectors.adjoint();
    CHECK((rebuilt - h).frobenius_norm() < 1e-12 * std::max(h.frobenius_norm(), 1.0));

    // each column is an eigenvector
    for (std::size_t c = 0; c < 4; ++c) {
      Vec<4> col;
      for (std::size_t i = 0; i < 4; ++i) col[i] = r.vectors(i, c);
      Vec<4> hv = h * col;
      for (std::size_t i = 0; i < 4; ++i) hv[i] -= r.values[c] * col[i];
      CHECK(norm(hv) < 1e-12 * std::max(h.frobenius_norm(), 1.0));
    }
  }
}

TEST_CASE("jacobi rejects non-Hermitian input") {
  Mat<4> m;
  m(0, 1) = 1.0;  // missing conjugate partner
  CHECK_THROWS_AS(jacobi_hermitian(m), std::invalid_argument);
}
