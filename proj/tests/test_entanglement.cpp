#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "dirac/averaging.hpp"
#include "dirac/dynamics.hpp"
#include "dirac/entanglement.hpp"
#include "dirac/rng.hpp"

using namespace dirac;

namespace {

Mat<2> random_unitary_2(RandomStream& rng) {
  Vec<2> a{cplx(rng.next_normal(), rng.next_normal()), cplx(rng.next_normal(), rng.next_normal())};
  a = normalized(a);
  Mat<2> u;
  u(0, 0) = a[0];
  u(1, 0) = a[1];
  u(0, 1) = -std::conj(a[1]);
  u(1, 1) = std::conj(a[0]);
  return u;
}

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("concurrence of reference states") {
  CHECK(concurrence(named_state("bell_1")) == Catch::Approx(1.0).margin(1e-15));
  CHECK(concurrence(named_state("bell_2")) == Catch::Approx(1.0).margin(1e-15));
  CHECK(concurrence(named_state("psi_x_up")) == Catch::Approx(0.0).margin(1e-15));
  // partially entangled superposition: C = 2|ad - bc| = 2 * 0.6 * 0.8
  const SpinorState st = SpinorState::from_amplitudes({0.6, 0.0, 0.0, 0.8});
  CHECK(concurrence(st) == Catch::Approx(0.96).margin(1e-15));
}

TEST_CASE("concurrence formula agrees with the partial-trace purity route") {
  RandomStream rng(555, 0);
  for (int i = 0; i < 10000; ++i) {
    const SpinorState st = random_haar_state(rng);
    CHECK(std::abs(concurrence(st) - concurrence_oracle(st)) < 1e-12);
  }
}

TEST_CASE("concurrence is invariant under local unitaries") {
  RandomStream rng(556, 0);
  for (int i = 0; i < 500; ++i) {
    const SpinorState st = random_haar_state(rng);
    const Mat<4> u = kron(random_unitary_2(rng), random_unitary_2(rng));
    const SpinorState rotated{u * st.amp};
    CHECK(std::abs(concurrence(rotated) - concurrence(st)) < 1e-12);
  }
}

TEST_CASE("chsh beta from concurrence") {
  CHECK(chsh_beta(0.0) == 1.0);
  CHECK(chsh_beta(1.0) == Catch::Approx(std::sqrt(2.0)).margin(1e-15));
  CHECK(chsh_beta(0.5) == Catch::Approx(1.118033988749895).margin(1e-15));
}

TEST_CASE("averaging spec validation") {
  CHECK_NOTHROW(AveragingSpec{}.validate());
  CHECK_THROWS_AS(AveragingSpec({40.0 * kPi, 32768}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(AveragingSpec({200.0 * kPi, 1000}).validate(), std::invalid_argument);
}

TEST_CASE("time-averaged concurrence at reference points") {
  const double lam = 37.5;
  const AveragingSpec spec{};

  // stationary Bell state stays maximally entangled
  CHECK(time_averaged_concurrence(Propagator({0.0, 0.0, lam, +1}), named_state("bell_1"), spec) ==
        Catch::Approx(1.0).margin(1e-12));

  // mean of (1/2)|sin| is 1/pi at the neutrality point
  CHECK(time_averaged_concurrence(Propagator({0.0, 0.0, lam, +1}), named_state("psi_x_up"), spec) ==
        Catch::Approx(1.0 / kPi).margin(0.01));

  // high-energy asymptote 2/pi for psi_y_up and the Bell states
  for (const char* name : {"psi_y_up", "bell_1", "bell_2"}) {
    CHECK(time_averaged_concurrence(Propagator({100.0 * lam, 0.0, lam, +1}), named_state(name),
                                    spec) == Catch::Approx(2.0 / kPi).margin(0.01));
  }

  // psi_x_up decays with energy
  const double at10 = time_averaged_concurrence(Propagator({10.0 * lam, 0.0, lam, +1}),
                                                named_state("psi_x_up"), spec);
  const double at30 = time_averaged_concurrence(Propagator({30.0 * lam, 0.0, lam, +1}),
                                                named_state("psi_x_up"), spec);
  const double at100 = time_averaged_concurrence(Propagator({100.0 * lam, 0.0, lam, +1}),
                                                 named_state("psi_x_up"), spec);
  CHECK(at10 == Catch::Approx(0.0804).margin(1e-3));
  CHECK(at10 > at30);
  CHECK(at30 > at100);
  CHECK(at100 < 0.05);

  // interior landmark: the Bell-state average dips lowest near epsilon = lambda_R
  CHECK(time_averaged_concurrence(Propagator({lam, 0.0, lam, +1}), named_state("bell_1"), spec) ==
        Catch::Approx(0.4653024294385571).margin(1e-6));
}

TEST_CASE("time-averaged concurrence depends only on the ratio epsilon over lambda_R") {
  const AveragingSpec spec{};
  for (const char* name : {"psi_x_up", "bell_1"}) {
    for (double f : {0.3, 1.0, 30.0}) {
      const double a =
          time_averaged_concurrence(Propagator({f * 37.5, 0.0, 37.5, +1}), named_state(name), spec);
      const double b = time_averaged_concurrence(Propagator({f * 3750.0, 0.0, 3750.0, +1}),
                                                 named_state(name), spec);
      CHECK(std::abs(a - b) < 1e-10);
    }
  }
}

TEST_CASE("finite-horizon estimator is stable for epsilon at or above 0.2 lambda_R") {
  // doubling the horizon moves the estimate by less than 1e-3 in this regime
  const AveragingSpec base{};
  const AveragingSpec longer{400.0 * kPi, 32768};
  for (double f : {0.2, 1.0, 5.0}) {
    const Propagator p({f * 37.5, 0.0, 37.5, +1});
    const double a = time_averaged_concurrence(p, named_state("psi_y_up"), base);
    const double b = time_averaged_concurrence(p, named_state("psi_y_up"), longer);
    CHECK(std::abs(a - b) < 1e-3);
  }
}

TEST_CASE("ensemble members are deterministic and stream-separated") {
  const SpinorState h0 = ensemble_member(Ensemble::haar, 9, 0);
  const SpinorState h0_again = ensemble_member(Ensemble::haar, 9, 0);
  const SpinorState h1 = ensemble_member(Ensemble::haar, 9, 1);
  const SpinorState s0 = ensemble_member(Ensemble::separable, 9, 0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(h0.amp[i] == h0_again.amp[i]);
  CHECK(std::abs(h0.amp[0] - h1.amp[0]) > 1e-6);
  CHECK(std::abs(h0.amp[0] - s0.amp[0]) > 1e-6);
  CHECK(concurrence(s0) < 1e-12);
  CHECK(std::string(ensemble_name(Ensemble::haar)) == "haar");
  CHECK(std::string(ensemble_name(Ensemble::separable)) == "separable");
}

TEST_CASE("ensemble averages are byte-identical across thread counts") {
  const ModelParams params{30.0, 0.0, 37.5, +1};
  const AveragingSpec quick{50.0 * kPi, 4096};
  const EnsembleStats one = ensemble_average(params, Ensemble::haar, 40, quick, 7, 1);
  const EnsembleStats four = ensemble_average(params, Ensemble::haar, 40, quick, 7, 4);
  CHECK(one.mean == four.mean);
  CHECK(one.std_error == four.std_error);
  CHECK(one.n == 40);
  CHECK(one.label == "haar");
}

TEST_CASE("ensemble edge cases") {
  const ModelParams params{30.0, 0.0, 37.5, +1};
  const AveragingSpec quick{50.0 * kPi, 4096};
  const EnsembleStats single = ensemble_average(params, Ensemble::separable, 1, quick, 7, 1);
  CHECK(single.n == 1);
  CHECK(single.std_error == 0.0);

  const EnsembleStats t0 = ensemble_initial_average(Ensemble::haar, 500, 7);
  CHECK(t0.label == "haar_t0");
  CHECK(t0.mean == Catch::Approx(3.0 * kPi / 16.0).margin(4.0 * 0.011));  // ~4 sigma
}

TEST_CASE("time averaging does not move the haar ensemble") {
  // the Haar measure is invariant under the (unitary) dynamics, so the
  // time-averaged ensemble mean must match the t = 0 mean within noise
  const ModelParams params{0.7 * 37.5, 0.0, 37.5, +1};
  const AveragingSpec quick{50.0 * kPi, 4096};
  const EnsembleStats avg = ensemble_average(params, Ensemble::haar, 150, quick, 11, 1);
  const EnsembleStats t0 = ensemble_initial_average(Ensemble::haar, 150, 11);
  const double combined = std::sqrt(avg.std_error * avg.std_error + t0.std_error * t0.std_error);
  CHECK(std::abs(avg.mean - t0.mean) < 4.0 * combined);
}
