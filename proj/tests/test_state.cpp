#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "dirac/entanglement.hpp"
#include "dirac/model.hpp"
#include "dirac/rng.hpp"
#include "dirac/state.hpp"

using namespace dirac;

namespace {

double amp_distance(const Vec<4>& a, const Vec<4>& b) {
  Vec<4> d = a;
  for (std::size_t i = 0; i < 4; ++i) d[i] -= b[i];
  return norm(d);
}

}  // namespace

TEST_CASE("named states have the documented amplitudes") {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx I(0.0, 1.0);
  CHECK(amp_distance(named_state("psi_x_up").amp, {r, r, 0.0, 0.0}) < 1e-15);
  CHECK(amp_distance(named_state("psi_y_up").amp, {r, I * r, 0.0, 0.0}) < 1e-15);
  CHECK(amp_distance(named_state("bell_1").amp, {r, 0.0, 0.0, r}) < 1e-15);
  CHECK(amp_distance(named_state("bell_2").amp, {0.0, r, r, 0.0}) < 1e-15);
  CHECK(named_state_name(NamedState::bell_2) == std::string("bell_2"));
}

TEST_CASE("unknown state names are listed in the error") {
  try {
    named_state("psi_z_down");
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    for (const char* n : {"psi_x_up", "psi_y_up", "bell_1", "bell_2"})
      CHECK(msg.find(n) != std::string::npos);
  }
}

TEST_CASE("product state from Bloch angles matches a hand computation") {
  const double pi = std::numbers::pi;
  // pseudospin angles (pi/2, 3pi/2), spin angles (pi/2, pi)
  const SpinorState st = product_state({pi / 2, 3 * pi / 2, pi / 2, pi});
  const Vec<4> expected{0.5, cplx(0.0, -0.5), -0.5, cplx(0.0, 0.5)};
  CHECK(amp_distance(st.amp, expected) < 1e-14);
  CHECK(concurrence(st) < 1e-14);
  const BlochVectors bv = bloch_vectors(st);
  CHECK(bv.pseudospin[1] == Catch::Approx(-1.0).margin(1e-14));  // phi = 3pi/2 -> -y
  CHECK(bv.spin[0] == Catch::Approx(-1.0).margin(1e-14));        // phi = pi    -> -x
}

TEST_CASE("bloch vectors of named states") {
  const BlochVectors x = bloch_vectors(named_state("psi_x_up"));
  CHECK(x.pseudospin[0] == Catch::Approx(1.0).margin(1e-14));
  CHECK(x.spin[2] == Catch::Approx(1.0).margin(1e-14));
  CHECK(x.spin_norm() == Catch::Approx(1.0).margin(1e-14));

  const BlochVectors b = bloch_vectors(named_state("bell_1"));
  CHECK(b.spin_norm() == Catch::Approx(0.0).margin(1e-14));
  CHECK(b.pseudospin_norm() == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("bloch length and concurrence are complementary for pure states") {
  RandomStream rng(101, 0);
  for (int i = 0; i < 2000; ++i) {
    const SpinorState st = random_haar_state(rng);
    const double c = concurrence(st);
    const BlochVectors bv = bloch_vectors(st);
    CHECK(std::abs(bv.spin_norm() - bv.pseudospin_norm()) < 1e-10);
    CHECK(bv.spin_norm() * bv.spin_norm() + c * c == Catch::Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("eigenstate bloch length follows the closed-form law") {
  for (double eps : {0.0, 18.75, 37.5, 75.0, 375.0}) {
    const EigenSystem sys = analytic_eigensystem({eps, 0.0, 37.5, +1});
    const double expected = eps / std::hypot(eps, 37.5);
    for (const EigenLevel& lv : sys.levels) {
      const BlochVectors bv = bloch_vectors(SpinorState{lv.state});
      CHECK(bv.spin_norm() == Catch::Approx(expected).margin(1e-12));
      CHECK(bv.pseudospin_norm() == Catch::Approx(expected).margin(1e-12));
    }
  }
}

TEST_CASE("haar sampling statistics") {
  RandomStream rng(2024, 5);
  const int n = 20000;
  double mean_c = 0.0;
  double mean_s[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const SpinorState st = random_haar_state(rng);
    CHECK(std::abs(norm(st.amp) - 1.0) < 1e-12);
    mean_c += concurrence(st);
    const BlochVectors bv = bloch_vectors(st);
    for (int k = 0; k < 3; ++k) mean_s[k] += bv.spin[k];
  }
  mean_c /= n;
  // E[C] over Haar-random two-qubit pure states is 3 pi / 16 = 0.58905;
  // sd(C) ~ 0.22 so 4 sigma of the mean is ~6e-3.
  CHECK(mean_c == Catch::Approx(3.0 * std::numbers::pi / 16.0).margin(6.5e-3));
  for (int k = 0; k < 3; ++k) CHECK(std::abs(mean_s[k] / n) < 0.02);
}

TEST_CASE("separable sampling produces product states") {
  RandomStream rng(2024, 6);
  double mean_sz = 0.0;
  const int n = 5000;
  for (int i = 0; i < n; ++i) {
    const SpinorState st = random_separable_state(rng);
    CHECK(std::abs(norm(st.amp) - 1.0) < 1e-12);
    CHECK(concurrence(st) < 1e-12);
    mean_sz += bloch_vectors(st).spin[2];
  }
  // uniform-on-sphere spin direction: mean z-component consistent with 0
  CHECK(std::abs(mean_sz / n) < 0.03);
}

TEST_CASE("sampling is deterministic per seed and stream") {
  RandomStream a(42, 3), b(42, 3), c(42, 4);
  const SpinorState sa = random_haar_state(a);
  const SpinorState sb = random_haar_state(b);
  const SpinorState sc = random_haar_state(c);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(sa.amp[i] == sb.amp[i]);
  }
  CHECK(amp_distance(sa.amp, sc.amp) > 1e-3);
}

TEST_CASE("from_amplitudes normalizes") {
  const SpinorState st = SpinorState::from_amplitudes({2.0, 0.0, 0.0, 0.0});
  CHECK(std::abs(norm(st.amp) - 1.0) < 1e-15);
  CHECK(st.amp[0] == cplx(1.0, 0.0));
}
