#include "artifact/mimo_theory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>

#include "artifact/errors.hpp"

namespace cr::mimo_theory {

namespace {

double rate_factor(const mimo::DownlinkScenario& sc, int su, int set_size,
                   bool update_vectors) {
  const int hardened = update_vectors ? set_size : sc.sus;
  const int dof = sc.antennas - hardened - sc.pu_pairs + 1;
  if (dof < 1) throw DomainError("power_distribution: no zero-forcing headroom");
  const double need = std::pow(2.0, sc.rate_targets(su)) - 1.0;
  return need / ((sc.su_beta(su) + sc.sigma_delta2) * dof);
}

}  // namespace

PowerLaw power_distribution(const mimo::DownlinkScenario& sc, int su, int set_size,
                            bool update_vectors) {
  if (su < 0 || su >= sc.sus) throw DomainError("power_distribution: SU out of range");
  if (set_size < 1 || set_size > sc.sus)
    throw DomainError("power_distribution: set size out of range");
  const double gamma = rate_factor(sc, su, set_size, update_vectors);
  const double base = sc.noise_power + sc.epsilon2;
  double s1 = 0.0, s2 = 0.0;
  for (int l = 0; l < sc.pu_pairs; ++l) {
    const double a = sc.pt_power * sc.pt_su_beta(l, su);
    s1 += a;
    s2 += a * a;
  }
  PowerLaw out;
  if (s2 <= 0.0) {
    out.degenerate = true;
    out.point_mass = gamma * base;
    return out;
  }
  const double kappa = (base + s1) * (base + s1) / s2;
  const double theta = s2 / (base + s1);
  out.law = {kappa, gamma * theta};
  return out;
}

num::GammaParams sum_power_distribution(const std::vector<num::GammaParams>& laws) {
  if (laws.empty()) throw DomainError("sum_power_distribution: empty set");
  double mean = 0.0, var = 0.0;
  for (const auto& g : laws) {
    if (!(g.shape > 0.0) || !(g.scale > 0.0))
      throw DomainError("sum_power_distribution: parameters must be positive");
    mean += g.mean();
    var += g.variance();
  }
  return num::gamma_moment_match(mean, var);
}

double rate_ccdf(const mimo::DownlinkScenario& sc, int su, const std::vector<int>& set,
                 double y, bool update_vectors) {
  if (su < 0 || su >= sc.sus) throw DomainError("rate_ccdf: SU out of range");
  if (std::find(set.begin(), set.end(), su) == set.end())
    throw DomainError("rate_ccdf: SU must belong to the set");
  if (!std::isfinite(y)) throw DomainError("rate_ccdf: rate must be finite");
  if (y <= 0.0) return 1.0;

  const double beta = sc.su_beta(su);
  const double c_y = beta / (beta + sc.sigma_delta2) *
                     (std::pow(2.0, sc.rate_targets(su)) - 1.0) / (std::pow(2.0, y) - 1.0);
  const double bound = c_y * (sc.noise_power + sc.epsilon2) - sc.noise_power;

  std::vector<num::GammaTerm> terms;
  // Leakage from the other served SUs through the estimation error of su.
  if (sc.sigma_delta2 > 0.0 && set.size() > 1) {
    double m1 = 0.0, m2 = 0.0;
    for (int j : set) {
      if (j == su) continue;
      const PowerLaw pl = power_distribution(sc, j, static_cast<int>(set.size()),
                                             update_vectors);
      const double mean = pl.mean();
      m1 += mean;
      m2 += pl.degenerate ? mean * mean
                          : pl.law.scale * pl.law.scale * pl.law.shape *
                                (pl.law.shape + 2.0);
    }
    if (m1 > 0.0 && m2 > 0.0) {
      const double kappa = m1 * m1 / m2;
      terms.push_back({kappa, sc.sigma_delta2 * m1 / kappa});
    }
  }
  // Primary transmitter terms; the scale goes negative below the target rate.
  for (int l = 0; l < sc.pu_pairs; ++l) {
    const double scale = (1.0 - c_y) * sc.pt_power * sc.pt_su_beta(l, su);
    if (scale != 0.0) terms.push_back({1.0, scale});
  }
  if (terms.empty()) return bound >= 0.0 ? 1.0 : 0.0;
  return num::gamma_sum_cdf(terms, bound);
}

SelectionStats expected_selection_stats(const mimo::DownlinkScenario& sc,
                                        bool update_vectors, int cap) {
  const int k = sc.sus;
  if (cap < 1) throw DomainError("expected_selection_stats: cap must be positive");
  if (k > cap)
    throw ConfigError("expected_selection_stats: subset recursion refused above the cap");
  const double budget = sc.power_cap();
  const auto count = static_cast<std::uint32_t>(1u << k);

  // Laws only vary with the selected-set size (and SU) through the hardened
  // gain, so build one table per size.
  std::vector<std::vector<PowerLaw>> laws(static_cast<std::size_t>(k) + 1);
  for (int s = 1; s <= k; ++s) {
    laws[static_cast<std::size_t>(s)].reserve(static_cast<std::size_t>(k));
    for (int su = 0; su < k; ++su)
      laws[static_cast<std::size_t>(s)].push_back(
          power_distribution(sc, su, s, update_vectors));
  }
  for (int su = 1; su < k; ++su)
    if (laws[1][static_cast<std::size_t>(su)].degenerate != laws[1][0].degenerate)
      throw DomainError(
          "expected_selection_stats: mixed point-mass and Gamma power laws");

  std::vector<double> feasible(count, 1.0);
  for (std::uint32_t mask = 1; mask < count; ++mask) {
    const int s = std::popcount(mask);
    const auto& table = laws[static_cast<std::size_t>(s)];
    bool degenerate = false;
    double total = 0.0;
    std::vector<num::GammaParams> members;
    members.reserve(static_cast<std::size_t>(s));
    for (int su = 0; su < k; ++su)
      if (mask & (1u << su)) {
        const auto& pl = table[static_cast<std::size_t>(su)];
        if (pl.degenerate) degenerate = true;
        total += pl.mean();
        if (!pl.degenerate) members.push_back(pl.law);
      }
    if (degenerate)
      feasible[mask] = total <= budget ? 1.0 : 0.0;
    else
      feasible[mask] = num::gamma_cdf(sum_power_distribution(members), budget);
  }

  // Probability that SU `drop` holds the largest power in `mask`.
  const auto pr_max = [&](std::uint32_t mask, int drop) {
    const int s = std::popcount(mask);
    const auto& table = laws[static_cast<std::size_t>(s)];
    const auto& target = table[static_cast<std::size_t>(drop)];
    if (target.degenerate) {
      for (int su = 0; su < k; ++su) {
        if (!(mask & (1u << su)) || su == drop) continue;
        const double other = table[static_cast<std::size_t>(su)].point_mass;
        if (other > target.point_mass) return 0.0;
        if (other == target.point_mass && su < drop) return 0.0;
      }
      return 1.0;
    }
    // The integrand lives on the target density's support; the other
    // factors are bounded CDFs.  The result is a probability, so absolute
    // accuracy well below the Monte-Carlo noise floor is plenty.
    num::QuadratureSpec spec;
    spec.rel_tol = 1e-8;
    spec.abs_tol = 1e-10;
    spec.truncation = target.law.mean() + 40.0 * std::sqrt(target.law.variance());
    try {
      return num::semi_infinite_quadrature(
          [&](double x) {
            double v = num::gamma_pdf(target.law, x);
            for (int su = 0; su < k; ++su)
              if ((mask & (1u << su)) && su != drop)
                v *= num::gamma_cdf(table[static_cast<std::size_t>(su)].law, x);
            return v;
          },
          spec);
    } catch (const cr::NumericalError&) {
      std::fprintf(stderr, "pr_max fail mask=%u drop=%d target k=%.17g th=%.17g trunc=%.6g\n",
                   mask, drop, target.law.shape, target.law.scale, spec.truncation);
      for (int su = 0; su < k; ++su)
        if ((mask & (1u << su)) && su != drop)
          std::fprintf(stderr, "  other su=%d k=%.17g th=%.17g\n", su,
                       table[static_cast<std::size_t>(su)].law.shape,
                       table[static_cast<std::size_t>(su)].law.scale);
      throw;
    }
  };

  // Reach probabilities over drop paths, propagated from the full set down.
  std::vector<double> reach(count, 0.0);
  reach[count - 1] = 1.0;
  std::vector<std::uint32_t> order(count);
  for (std::uint32_t m = 0; m < count; ++m) order[m] = m;
  std::sort(order.begin(), order.end(), [](std::uint32_t a, std::uint32_t b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa > pb : a < b;
  });

  SelectionStats stats;
  for (std::uint32_t mask_id : order) {
    const std::uint32_t mask = mask_id;
    if (reach[mask] <= 0.0) continue;
    const double f = feasible[mask];
    const double stop = reach[mask] * f;
    if (stop > 0.0 && mask != 0) {
      const int s = std::popcount(mask);
      std::vector<int> members;
      members.reserve(static_cast<std::size_t>(s));
      for (int su = 0; su < k; ++su)
        if (mask & (1u << su)) members.push_back(su);
      stats.mean_selected += stop * s;
      for (int su : members) {
        stats.mean_achieving +=
            stop * rate_ccdf(sc, su, members, sc.rate_targets(su), update_vectors);
        stats.mean_interference +=
            stop * sc.sigma_Delta2 *
            laws[static_cast<std::size_t>(s)][static_cast<std::size_t>(su)].mean();
      }
    }
    if (mask == 0 || f >= 1.0) continue;
    const double go_on = reach[mask] * (1.0 - f);
    for (int su = 0; su < k; ++su)
      if (mask & (1u << su))
        reach[mask & ~(1u << su)] += go_on * pr_max(mask, su);
  }
  return stats;
}

}  // namespace cr::mimo_theory
