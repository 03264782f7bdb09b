#include "artifact/waveforms.hpp"

#include <cmath>

#include "artifact/errors.hpp"
#include "artifact/rng.hpp"

namespace cr::wave {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double rrc_value(double t, double beta) {
  const double at = std::abs(t);
  if (at < 1e-10) return 1.0 - beta + 4.0 * beta / 3.141592653589793238;
  if (beta > 0.0 && std::abs(at - 1.0 / (4.0 * beta)) < 1e-8) {
    const double s = std::sin(3.141592653589793238 / (4.0 * beta));
    const double c = std::cos(3.141592653589793238 / (4.0 * beta));
    return (beta / std::sqrt(2.0)) *
           ((1.0 + 2.0 / 3.141592653589793238) * s + (1.0 - 2.0 / 3.141592653589793238) * c);
  }
  const double pi = 3.141592653589793238;
  const double num = std::sin(pi * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(pi * t * (1.0 + beta));
  const double den = pi * t * (1.0 - 16.0 * beta * beta * t * t);
  return num / den;
}

std::complex<double> draw_symbol(Constellation c, std::mt19937_64& rng) {
  if (c == Constellation::qam4) {
    static const double lv[2] = {-1.0, 1.0};
    const std::uint64_t idx = uniform_index(rng, 4);
    const double s = 1.0 / std::sqrt(2.0);
    return {lv[idx & 1] * s, lv[(idx >> 1) & 1] * s};
  }
  static const double lv16[4] = {-3.0, -1.0, 1.0, 3.0};
  const std::uint64_t idx = uniform_index(rng, 16);
  const double s = 1.0 / std::sqrt(10.0);
  return {lv16[idx & 3] * s, lv16[(idx >> 2) & 3] * s};
}

double constellation_kurtosis(Constellation c) {
  return c == Constellation::qam4 ? 1.0 : 1.32;
}

SampledSignal gen_single_carrier(const SingleCarrierSpec& spec, std::size_t n,
                                 double sample_rate, std::mt19937_64& rng) {
  if (!(spec.symbol_period > 0.0))
    throw ConfigError("gen_single_carrier: symbol period must be positive");
  if (!(sample_rate > 1.0 / spec.symbol_period))
    throw ConfigError("gen_single_carrier: sample rate must exceed the symbol rate");
  if (n < 1) throw DomainError("gen_single_carrier: need at least one sample");
  if (!(spec.duty > 0.0) || spec.duty > 1.0)
    throw ConfigError("gen_single_carrier: duty must lie in (0, 1]");
  if (spec.rolloff < 0.0 || spec.rolloff > 1.0)
    throw ConfigError("gen_single_carrier: rolloff must lie in [0, 1]");
  if (spec.span_symbols < 1)
    throw ConfigError("gen_single_carrier: pulse span must be >= 1 symbol");

  const double ts = 1.0 / sample_rate;
  const double tg = spec.symbol_period;
  const double sps = tg * sample_rate;

  long l_min = 0, l_max = 0;
  double amp = 1.0;
  if (spec.pulse == Pulse::rectangular) {
    l_min = 0;
    l_max = static_cast<long>(std::floor((n - 1) * ts / tg)) + 1;
    if (spec.unit_power) amp = 1.0 / std::sqrt(spec.duty);
  } else {
    const int span = spec.span_symbols;
    l_min = -span - 1;
    l_max = static_cast<long>(std::ceil((n - 1) * ts / tg)) + span + 1;
    // Unit average power: phase-averaged sum of squared pulse samples equals 1.
    const long isps = std::lround(sps);
    double sumsq = 0.0;
    if (std::abs(sps - static_cast<double>(isps)) < 1e-9 * sps) {
      for (long j = -span * isps; j <= span * isps; ++j) {
        const double g = rrc_value(static_cast<double>(j) / static_cast<double>(isps), spec.rolloff);
        sumsq += g * g;
      }
      sumsq /= static_cast<double>(isps);
    } else {
      const int grid = 4096;
      for (int j = -span * grid; j <= span * grid; ++j) {
        const double g = rrc_value(static_cast<double>(j) / grid, spec.rolloff);
        sumsq += g * g;
      }
      sumsq /= grid;
    }
    if (spec.unit_power) amp = 1.0 / std::sqrt(sumsq);
  }

  std::vector<std::complex<double>> symbols;
  symbols.reserve(static_cast<std::size_t>(l_max - l_min + 1));
  for (long l = l_min; l <= l_max; ++l) symbols.push_back(draw_symbol(spec.constellation, rng));

  SampledSignal out;
  out.sample_period = ts;
  out.cyclic_frequency = 1.0 / tg;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * ts;
    std::complex<double> acc{0.0, 0.0};
    if (spec.pulse == Pulse::rectangular) {
      const long l = static_cast<long>(std::floor(t / tg + 1e-12));
      const double frac = t - static_cast<double>(l) * tg;
      if (l >= l_min && l <= l_max && frac < spec.duty * tg - 1e-12 * tg + 1e-30)
        acc = symbols[static_cast<std::size_t>(l - l_min)];
    } else {
      const int span = spec.span_symbols;
      const long lo = static_cast<long>(std::ceil((t - span * tg) / tg - 1e-9));
      const long hi = static_cast<long>(std::floor((t + span * tg) / tg + 1e-9));
      for (long l = std::max(lo, l_min); l <= std::min(hi, l_max); ++l) {
        const double g = rrc_value((t - static_cast<double>(l) * tg) / tg, spec.rolloff);
        acc += symbols[static_cast<std::size_t>(l - l_min)] * g;
      }
    }
    acc *= amp;
    if (spec.carrier_offset != 0.0) {
      const double ang = kTwoPi * spec.carrier_offset * t;
      acc *= std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out.samples[i] = acc;
  }
  return out;
}

SampledSignal gen_ofdm(const OfdmSpec& spec, std::size_t n, double sample_rate,
                       std::mt19937_64& rng) {
  if (spec.subcarriers < 2 || spec.subcarriers % 2 != 0)
    throw ConfigError("gen_ofdm: subcarrier count must be even and >= 2");
  if (!(spec.subcarrier_spacing > 0.0))
    throw ConfigError("gen_ofdm: subcarrier spacing must be positive");
  if (spec.cyclic_prefix < 0.0)
    throw ConfigError("gen_ofdm: cyclic prefix must be nonnegative");
  if (spec.window != Pulse::rectangular)
    throw ConfigError("gen_ofdm: only the rectangular symbol window is supported");
  if (n < 1) throw DomainError("gen_ofdm: need at least one sample");
  const double tg = spec.symbol_period();
  if (!(sample_rate > 1.0 / tg))
    throw ConfigError("gen_ofdm: sample rate must exceed the cyclic frequency");

  const double ts = 1.0 / sample_rate;
  const int nc = spec.subcarriers;
  const long l_max = static_cast<long>(std::floor((n - 1) * ts / tg)) + 1;
  const double cscale = 1.0 / std::sqrt(static_cast<double>(nc));

  std::vector<std::complex<double>> syms(static_cast<std::size_t>(l_max + 1) * nc);
  for (auto& s : syms) s = draw_symbol(spec.constellation, rng) * cscale;

  SampledSignal out;
  out.sample_period = ts;
  out.cyclic_frequency = spec.cyclic_frequency();
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * ts;
    long l = static_cast<long>(std::floor(t / tg + 1e-12));
    if (l < 0) l = 0;
    if (l > l_max) l = l_max;
    const double tau = t - static_cast<double>(l) * tg - spec.cyclic_prefix;
    const double base = kTwoPi * spec.subcarrier_spacing * tau;
    const std::complex<double> step{std::cos(base), std::sin(base)};
    const double a0 = base * (-nc / 2);
    std::complex<double> rot{std::cos(a0), std::sin(a0)};
    std::complex<double> acc{0.0, 0.0};
    const std::complex<double>* row = &syms[static_cast<std::size_t>(l) * nc];
    for (int k = 0; k < nc; ++k) {
      acc += row[k] * rot;
      rot *= step;
    }
    if (spec.carrier_offset != 0.0) {
      const double ang = kTwoPi * spec.carrier_offset * t;
      acc *= std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out.samples[i] = acc;
  }
  return out;
}

std::complex<double> cac(const SampledSignal& signal, double alpha, std::size_t n) {
  if (n == 0) throw DomainError("cac: sample count must be positive");
  if (n > signal.samples.size())
    throw DomainError("cac: sample count exceeds signal length");
  const double w = kTwoPi * alpha * signal.sample_period;
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::norm(signal.samples[i]);
    const double ang = -w * static_cast<double>(i);
    acc += p * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return acc / static_cast<double>(n);
}

std::complex<double> ccc(const SampledSignal& u, const SampledSignal& v, double alpha) {
  if (u.samples.size() != v.samples.size())
    throw DomainError("ccc: signals must have equal length");
  if (u.sample_period != v.sample_period)
    throw DomainError("ccc: signals must share the sampling period");
  const std::size_t n = u.samples.size();
  if (n == 0) throw DomainError("ccc: empty signals");
  const double w = kTwoPi * alpha * u.sample_period;
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double re2 = 2.0 * (u.samples[i] * std::conj(v.samples[i])).real();
    const double ang = -w * static_cast<double>(i);
    acc += re2 * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return acc / static_cast<double>(n);
}

long min_samples(double sample_rate, double delta_alpha) {
  if (!(sample_rate > 0.0)) throw DomainError("min_samples: sample rate must be positive");
  if (!(delta_alpha > 0.0))
    throw DomainError("min_samples: cyclic frequencies must differ");
  return 10 * static_cast<long>(std::ceil(sample_rate / delta_alpha - 1e-9));
}

}  // namespace cr::wave
