#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "artifact/errors.hpp"
#include "artifact/rng.hpp"
#include "artifact/waveforms.hpp"

using namespace cr;
using namespace cr::wave;

namespace {
SingleCarrierSpec target_spec() {
  SingleCarrierSpec s;
  s.symbol_period = 1.0 / 20e6;  // 20 MHz symbol rate
  s.constellation = Constellation::qam4;
  return s;
}
}  // namespace

TEST_CASE("rectangular pulse holds one value per symbol") {
  auto rng = trial_rng(1, 0);
  auto spec = target_spec();
  auto sig = gen_single_carrier(spec, 40, 200e6, rng);
  REQUIRE(sig.samples.size() == 40);
  for (int sym = 0; sym < 4; ++sym) {
    for (int j = 1; j < 10; ++j) {
      CHECK(sig.samples[sym * 10 + j] == sig.samples[sym * 10]);
    }
  }
  CHECK(sig.cyclic_frequency == doctest::Approx(20e6));
  CHECK(sig.sample_period == doctest::Approx(0.5e-8));
}

TEST_CASE("generated signals have unit average power") {
  auto rng = trial_rng(2, 0);
  auto spec = target_spec();
  for (Pulse p : {Pulse::rectangular, Pulse::raised_cosine}) {
    spec.pulse = p;
    auto sig = gen_single_carrier(spec, 100000, 200e6, rng);
    double acc = 0.0;
    for (const auto& s : sig.samples) acc += std::norm(s);
    CHECK(acc / sig.samples.size() == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("sample rate below the symbol rate is rejected") {
  auto rng = trial_rng(3, 0);
  auto spec = target_spec();
  CHECK_THROWS_AS(gen_single_carrier(spec, 100, 10e6, rng), ConfigError);
}

TEST_CASE("cac closes the geometric sum for constant-modulus input") {
  auto rng = trial_rng(4, 0);
  auto spec = target_spec();  // 4-QAM, rectangular, duty 1: |s(n)| = 1
  auto sig = gen_single_carrier(spec, 500, 200e6, rng);
  // alpha*Ts = 0.1 (non-integer), alpha*Ts*N = 50 (integer)
  auto z = cac(sig, 20e6, 500);
  CHECK(std::abs(z) < 1e-12);
}

TEST_CASE("cac at zero frequency is the mean power") {
  auto rng = trial_rng(5, 0);
  auto spec = target_spec();
  spec.pulse = Pulse::raised_cosine;
  auto sig = gen_single_carrier(spec, 2000, 200e6, rng);
  auto z = cac(sig, 0.0, 2000);
  double acc = 0.0;
  for (const auto& s : sig.samples) acc += std::norm(s);
  CHECK(z.imag() == doctest::Approx(0.0));
  CHECK(z.real() == doctest::Approx(acc / 2000).epsilon(1e-12));
  CHECK(z.real() >= 0.0);
}

TEST_CASE("cac is quadratic in the signal scale") {
  auto rng = trial_rng(6, 0);
  auto spec = target_spec();
  spec.pulse = Pulse::raised_cosine;
  auto sig = gen_single_carrier(spec, 500, 200e6, rng);
  auto scaled = sig;
  for (auto& s : scaled.samples) s *= std::complex<double>(1.2, -0.7);
  const double c2 = std::norm(std::complex<double>(1.2, -0.7));
  auto z1 = cac(sig, 20e6, 500);
  auto z2 = cac(scaled, 20e6, 500);
  CHECK(std::abs(z2 - c2 * z1) < 1e-12 * c2);
}

TEST_CASE("cac shows the symbol-rate line of a bursty rectangular signal") {
  // duty < 1 gives |s(n)|^2 a strong symbol-rate component
  auto spec = target_spec();
  spec.duty = 0.5;
  double on_rate = 0.0, off_rate = 0.0;
  std::complex<double> on_acc{0, 0}, off_acc{0, 0};
  for (int trial = 0; trial < 200; ++trial) {
    auto rng = trial_rng(7, trial);
    auto sig = gen_single_carrier(spec, 500, 200e6, rng);
    on_acc += cac(sig, 20e6, 500);
    off_acc += cac(sig, 13e6, 500);
  }
  on_rate = std::abs(on_acc) / 200.0;
  off_rate = std::abs(off_acc) / 200.0;
  CHECK(on_rate >= 10.0 * off_rate);
}

TEST_CASE("cac argument checks") {
  auto rng = trial_rng(8, 0);
  auto sig = gen_single_carrier(target_spec(), 100, 200e6, rng);
  CHECK_THROWS_AS(cac(sig, 20e6, 0), DomainError);
  CHECK_THROWS_AS(cac(sig, 20e6, 101), DomainError);
}

TEST_CASE("ccc basics") {
  auto rng = trial_rng(9, 0);
  auto u = gen_single_carrier(target_spec(), 300, 200e6, rng);
  auto zero = u;
  for (auto& s : zero.samples) s = 0.0;
  CHECK(std::abs(ccc(u, zero, 20e6)) == 0.0);

  // real-valued u: ccc(u, u) = 2 cac(u)
  auto real_u = u;
  for (auto& s : real_u.samples) s = std::complex<double>(s.real(), 0.0);
  auto z1 = ccc(real_u, real_u, 20e6);
  auto z2 = cac(real_u, 20e6, 300);
  CHECK(std::abs(z1 - 2.0 * z2) < 1e-12);

  auto v = u;
  v.sample_period *= 2.0;
  CHECK_THROWS_AS(ccc(u, v, 20e6), DomainError);
}

TEST_CASE("ccc of independent signals has zero mean") {
  SingleCarrierSpec ispec;
  ispec.symbol_period = 1.0 / 25e6;
  std::complex<double> acc{0, 0};
  double acc2 = 0.0;
  const int trials = 500;
  std::vector<std::complex<double>> vals;
  for (int t = 0; t < trials; ++t) {
    auto rng = trial_rng(10, t);
    auto u = gen_single_carrier(target_spec(), 500, 200e6, rng);
    auto v = gen_single_carrier(ispec, 500, 200e6, rng);
    auto z = ccc(u, v, 20e6);
    vals.push_back(z);
    acc += z;
  }
  auto mean = acc / static_cast<double>(trials);
  for (const auto& z : vals) acc2 += std::norm(z - mean);
  const double sd = std::sqrt(acc2 / (trials - 1));
  CHECK(std::abs(mean) < 3.0 * sd / std::sqrt(static_cast<double>(trials)));
}

TEST_CASE("minimum sample count separating two cyclic frequencies") {
  CHECK(min_samples(200e6, 5e6) == 400);
  CHECK(min_samples(500e3, 236e3) == 30);
  CHECK(min_samples(1e6, 1e6) == 10);
  CHECK_THROWS_AS(min_samples(1e6, 0.0), DomainError);
}

TEST_CASE("ofdm generation") {
  OfdmSpec wlan;
  wlan.subcarriers = 64;
  wlan.subcarrier_spacing = 312.5e3;
  wlan.cyclic_prefix = 0.8e-6;
  CHECK(wlan.symbol_period() == doctest::Approx(4e-6));
  CHECK(wlan.cyclic_frequency() == doctest::Approx(250e3));

  auto rng = trial_rng(11, 0);
  auto sig = gen_ofdm(wlan, 5000, 500e3, rng);
  CHECK(sig.cyclic_frequency == doctest::Approx(250e3));
  double acc = 0.0;
  for (const auto& s : sig.samples) acc += std::norm(s);
  CHECK(acc / sig.samples.size() == doctest::Approx(1.0).epsilon(0.05));

  OfdmSpec tiny;
  tiny.subcarriers = 2;
  tiny.subcarrier_spacing = 1e3;
  tiny.cyclic_prefix = 0.0;
  CHECK(tiny.symbol_period() == doctest::Approx(1e-3));

  OfdmSpec bad = wlan;
  bad.cyclic_prefix = -1e-9;
  CHECK_THROWS_AS(gen_ofdm(bad, 10, 500e3, rng), ConfigError);
  OfdmSpec odd = wlan;
  odd.subcarriers = 63;
  CHECK_THROWS_AS(gen_ofdm(odd, 10, 500e3, rng), ConfigError);
}

TEST_CASE("lte-like ofdm parameters") {
  OfdmSpec lte;
  lte.subcarriers = 1024;
  lte.subcarrier_spacing = 15e3;
  lte.cyclic_prefix = 4.7e-6;
  CHECK(lte.symbol_period() == doctest::Approx(71.4e-6).epsilon(1e-3));
  CHECK(lte.cyclic_frequency() == doctest::Approx(14.0e3).epsilon(2e-3));
  auto rng = trial_rng(12, 0);
  auto sig = gen_ofdm(lte, 100, 500e3, rng);
  CHECK(sig.samples.size() == 100);
}

TEST_CASE("constellation moments") {
  CHECK(constellation_kurtosis(Constellation::qam4) == doctest::Approx(1.0));
  CHECK(constellation_kurtosis(Constellation::qam16) == doctest::Approx(1.32));
  auto rng = trial_rng(13, 0);
  for (Constellation c : {Constellation::qam4, Constellation::qam16}) {
    std::complex<double> m1{0, 0}, m2sq{0, 0};
    double p = 0.0, p4 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      auto a = draw_symbol(c, rng);
      m1 += a;
      m2sq += a * a;
      p += std::norm(a);
      p4 += std::norm(a) * std::norm(a);
    }
    CHECK(std::abs(m1) / n < 0.01);
    CHECK(std::abs(m2sq) / n < 0.01);
    CHECK(p / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(p4 / n == doctest::Approx(constellation_kurtosis(c)).epsilon(0.02));
  }
}
