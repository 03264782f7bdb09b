#include "artifact/band_policy_theory.hpp"

#include <algorithm>
#include <cmath>

#include "artifact/errors.hpp"
#include "artifact/numkit.hpp"

namespace cr::band_theory {

namespace {

void check_common(int su_antennas, int pu_antennas, double icap, double pmax,
                  double duty, const char* who) {
  if (pu_antennas < 0)
    throw DomainError(std::string(who) + ": pu_antennas must be non-negative");
  if (su_antennas <= pu_antennas)
    throw DomainError(std::string(who) + ": su_antennas must exceed pu_antennas");
  if (!(icap > 0.0)) throw DomainError(std::string(who) + ": icap must be positive");
  if (!(pmax > 0.0)) throw DomainError(std::string(who) + ": pmax must be positive");
  if (!(duty > 0.0 && duty <= 1.0))
    throw DomainError(std::string(who) + ": duty must lie in (0, 1]");
}

// E[log2(1 + p x)] for x ~ Gamma(order, 1).
double gamma_log_rate(int order, double p) {
  if (p <= 0.0) return 0.0;
  num::QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-13;
  spec.truncation = order + 40.0 * std::sqrt(static_cast<double>(order)) + 40.0;
  return num::semi_infinite_quadrature(
      [order, p](double x) {
        return std::log2(1.0 + p * x) * num::max_eig_pdf(order, x);
      },
      spec);
}

}  // namespace

double fbfp_rate(const cr::band::TrafficChain& chain, double alpha,
                 int su_antennas, int pu_antennas, double icap, double pmax,
                 double duty) {
  check_common(su_antennas, pu_antennas, icap, pmax, duty, "fbfp_rate");
  const double pi0 = chain.stationary(0);
  double rate = duty * pi0 * gamma_log_rate(su_antennas, pmax);
  if (pi0 < 1.0) {
    const double pf = cr::band::fixed_power(chain, alpha, pu_antennas, icap, pmax);
    rate += duty * (1.0 - pi0) * gamma_log_rate(su_antennas - pu_antennas, pf);
  }
  return rate;
}

double fbdp_rate(const cr::band::TrafficChain& chain, double alpha,
                 int su_antennas, int pu_antennas, double icap, double pmax,
                 double duty) {
  check_common(su_antennas, pu_antennas, icap, pmax, duty, "fbdp_rate");
  const double pi0 = chain.stationary(0);
  double rate = duty * pi0 * gamma_log_rate(su_antennas, pmax);
  if (pi0 < 1.0) {
    cr::band::ReversalDistribution dist = cr::band::expected_link_reversal(chain);
    double active = 0.0;
    for (std::size_t k = 0; k < dist.table.size(); ++k) {
      const double p = cr::band::dynamic_power(alpha, static_cast<int>(k + 1),
                                               pu_antennas, icap, pmax);
      active += dist.table[k] * gamma_log_rate(su_antennas - pu_antennas, p);
    }
    rate += duty * (1.0 - pi0) * active;
  }
  return rate;
}

double dbfp_rate(const std::vector<cr::band::TrafficChain>& bands,
                 int su_antennas, int pu_antennas, double icap, double pmax,
                 double duty) {
  if (bands.empty()) throw DomainError("dbfp_rate: at least one band required");
  double sum = 0.0;
  for (const cr::band::TrafficChain& chain : bands)
    sum += fbfp_rate(chain, chain.alpha, su_antennas, pu_antennas, icap, pmax, duty);
  return sum / static_cast<double>(bands.size());
}

std::vector<double> dbfp_interference_ratio(
    const std::vector<cr::band::TrafficChain>& bands, int hop_period) {
  if (bands.empty())
    throw DomainError("dbfp_interference_ratio: at least one band required");
  if (hop_period < 1)
    throw DomainError("dbfp_interference_ratio: hop_period must be positive");
  std::vector<double> ratios;
  ratios.reserve(bands.size());
  for (const cr::band::TrafficChain& chain : bands) {
    const double resident =
        cr::band::reversal_weight(cr::band::expected_link_reversal(chain), chain.alpha);
    const double strided = cr::band::reversal_weight(
        cr::band::expected_link_reversal(chain, 1e-9, hop_period), chain.alpha);
    ratios.push_back(resident > 0.0 ? strided / resident : 1.0);
  }
  return ratios;
}

double clairvoyant_gain_bound(const std::vector<cr::band::TrafficChain>& bands,
                              int su_antennas, int pu_antennas, double icap,
                              double pmax, double duty) {
  check_common(su_antennas, pu_antennas, icap, pmax, duty, "clairvoyant_gain_bound");
  if (bands.empty())
    throw DomainError("clairvoyant_gain_bound: at least one band required");
  std::size_t best = 0;
  double best_power = -1.0;
  std::vector<double> powers(bands.size());
  for (std::size_t f = 0; f < bands.size(); ++f) {
    const cr::band::TrafficChain& chain = bands[f];
    const double active = chain.stationary(1) + chain.stationary(2);
    powers[f] = active <= 1e-12
                    ? pmax
                    : cr::band::fixed_power(chain, chain.alpha, pu_antennas, icap, pmax);
    if (powers[f] > best_power) {
      best_power = powers[f];
      best = f;
    }
  }
  double others_all_busy = 1.0;
  for (std::size_t f = 0; f < bands.size(); ++f)
    if (f != best) others_all_busy *= 1.0 - bands[f].stationary(0);
  const double busy_with_idle_alternative =
      (1.0 - bands[best].stationary(0)) * (1.0 - others_all_busy);
  const double per_slot =
      std::log2(1.0 + pmax * su_antennas) -
      gamma_log_rate(su_antennas - pu_antennas, best_power);
  return duty * busy_with_idle_alternative * per_slot;
}

double state_error_probability(const cr::band::TrafficChain& chain, double alpha,
                               int age, double snr_db, int su_antennas,
                               int pu_antennas, int sense_samples, double p_miss) {
  if (pu_antennas < 1)
    throw DomainError("state_error_probability: pu_antennas must be positive");
  if (su_antennas <= pu_antennas)
    throw DomainError("state_error_probability: su_antennas must exceed pu_antennas");
  if (age < 1) throw DomainError("state_error_probability: age must be at least 1");
  if (sense_samples < 1)
    throw DomainError("state_error_probability: sense_samples must be positive");
  if (!(p_miss > 0.0 && p_miss < 1.0))
    throw DomainError("state_error_probability: p_miss must lie in (0, 1)");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw DomainError("state_error_probability: alpha must lie in [0, 1]");

  const double ms = su_antennas;
  const double n = sense_samples;
  const double snr = std::pow(10.0, snr_db / 10.0);
  const double pu_power = snr / pu_antennas;

  const double mu = ms * (snr + 1.0);
  const double sigma = std::sqrt((mu * mu + 1.0) / n);
  const double decay = std::pow(alpha, 2.0 * age);
  const double mu_p = (1.0 - decay) * mu + decay * ms;
  const double sigma_p = (1.0 - decay) * sigma;
  const double threshold = num::q_inverse(p_miss) * sigma_p + mu_p;

  // Reversal hypothesis: P_null moment-matched to a Gamma law.
  const double m2 = pu_power * pu_power + 1.0 + 1.0 / (n * n);
  const double m1 = pu_power + 1.0 + 1.0 / n;
  const double shape = ms * pu_antennas * m1 * m1 / m2;
  const double scale = m2 / m1;
  const double miss = sigma_p > 0.0 ? p_miss : 0.0;
  return chain.stationary(1) * miss +
         chain.stationary(2) * num::gamma_cdf({shape, scale}, threshold);
}

}  // namespace cr::band_theory
