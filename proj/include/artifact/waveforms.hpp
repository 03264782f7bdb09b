#pragma once
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

namespace cr::wave {

enum class Pulse { rectangular, raised_cosine };
enum class Constellation { qam4, qam16 };

struct SingleCarrierSpec {
  double symbol_period = 0.0;  // seconds
  Pulse pulse = Pulse::rectangular;
  double rolloff = 0.25;       // raised-cosine only
  int span_symbols = 4;        // one-sided truncation of the shaped pulse
  double duty = 1.0;           // occupied fraction of a rectangular symbol
  double carrier_offset = 0.0; // Hz, complex-baseband offset
  Constellation constellation = Constellation::qam4;
  bool unit_power = true;
};

struct OfdmSpec {
  int subcarriers = 0;
  double subcarrier_spacing = 0.0;  // Hz
  double cyclic_prefix = 0.0;       // seconds
  Pulse window = Pulse::rectangular;
  double carrier_offset = 0.0;
  Constellation constellation = Constellation::qam4;
  double symbol_period() const { return 1.0 / subcarrier_spacing + cyclic_prefix; }
  double cyclic_frequency() const { return 1.0 / symbol_period(); }
};

struct SampledSignal {
  std::vector<std::complex<double>> samples;
  double sample_period = 0.0;    // seconds
  double cyclic_frequency = 0.0; // Hz, nominal
};

SampledSignal gen_single_carrier(const SingleCarrierSpec& spec, std::size_t n,
                                 double sample_rate, std::mt19937_64& rng);
SampledSignal gen_ofdm(const OfdmSpec& spec, std::size_t n, double sample_rate,
                       std::mt19937_64& rng);

std::complex<double> cac(const SampledSignal& signal, double alpha, std::size_t n);
std::complex<double> ccc(const SampledSignal& u, const SampledSignal& v, double alpha);

// Exclusive lower bound on the sample count separating two cyclic frequencies.
long min_samples(double sample_rate, double delta_alpha);

// Root-raised-cosine value at t (in symbol periods) for rolloff beta.
double rrc_value(double t, double beta);

// Draw one unit-average-power constellation point.
std::complex<double> draw_symbol(Constellation c, std::mt19937_64& rng);

// Fourth moment E|a|^4 of the unit-power constellation (E[a^2] = 0 for both).
double constellation_kurtosis(Constellation c);

}  // namespace cr::wave
