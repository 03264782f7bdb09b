#include "artifact/mimo_downlink.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "artifact/errors.hpp"
#include "artifact/rng.hpp"

namespace cr::mimo {

namespace {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

Vec2 annulus_point(double r_min, double r_max, std::mt19937_64& rng) {
  const double u = uniform_double(rng);
  const double r = std::sqrt(r_min * r_min + u * (r_max * r_max - r_min * r_min));
  const double ang = 2.0 * M_PI * uniform_double(rng);
  return {r * std::cos(ang), r * std::sin(ang)};
}

// beta = 10^((-10 gamma log10 d + X) / 10), X ~ N(0, shadow_db^2).
double draw_gain(double d, double exponent, double shadow_db, std::mt19937_64& rng) {
  const double db = -10.0 * exponent * std::log10(d) + shadow_db * normal(rng);
  return std::pow(10.0, db / 10.0);
}

void check_config(const DownlinkConfig& c) {
  if (c.antennas < 1 || c.sus < 1 || c.pu_pairs < 0)
    throw ConfigError("draw_scenario: need antennas >= 1, sus >= 1, pu_pairs >= 0");
  if (c.antennas <= c.sus + c.pu_pairs)
    throw ConfigError("draw_scenario: antennas must exceed sus + pu_pairs");
  if (!(c.cell_radius > 0.0) || !(c.min_distance > 0.0))
    throw ConfigError("draw_scenario: radius and min distance must be positive");
  if (c.min_distance >= c.cell_radius)
    throw ConfigError("draw_scenario: min distance must be below the cell radius");
  if (!(c.path_loss_exponent > 0.0))
    throw ConfigError("draw_scenario: path loss exponent must be positive");
  if (c.shadowing_std_db < 0.0)
    throw ConfigError("draw_scenario: shadowing deviation must be nonnegative");
  if (!(c.noise_power > 0.0) || !(c.pt_power > 0.0) || !(c.power_budget > 0.0) ||
      !(c.interference_cap > 0.0))
    throw ConfigError("draw_scenario: powers must be positive");
  if (!(c.rate_target > 0.0) && !(c.uniform_rate_max > 0.0))
    throw ConfigError("draw_scenario: rate target must be positive");
}

int first_argmax(const std::vector<double>& v, const std::vector<int>& members) {
  int best = members.front();
  double best_val = v[static_cast<std::size_t>(best)];
  for (int idx : members) {
    const double val = v[static_cast<std::size_t>(idx)];
    if (val > best_val) {
      best_val = val;
      best = idx;
    }
  }
  return best;
}

// ZF + QoS for a candidate set; returns false when the budget is violated so
// callers can keep the partial evaluation.
struct SetEvaluation {
  Eigen::MatrixXcd vectors;
  std::vector<double> powers;
  double total = 0.0;
};

SetEvaluation evaluate_set(const std::vector<int>& set, const DownlinkScenario& sc,
                           const Eigen::VectorXd& reverse) {
  SetEvaluation ev;
  const int s = static_cast<int>(set.size());
  if (s == 0) {
    ev.vectors.resize(sc.antennas, 0);
    return ev;
  }
  Eigen::MatrixXcd channels(sc.antennas, s + sc.pu_pairs);
  for (int i = 0; i < s; ++i) channels.col(i) = sc.su_estimates.col(set[static_cast<std::size_t>(i)]);
  for (int l = 0; l < sc.pu_pairs; ++l) channels.col(s + l) = sc.pr_estimates.col(l);
  ev.vectors = zf_vectors(channels, s);
  ev.powers.resize(set.size());
  const double base = sc.noise_power + sc.epsilon2;
  for (int i = 0; i < s; ++i) {
    const int k = set[static_cast<std::size_t>(i)];
    const double gain = std::norm(sc.su_estimates.col(k).dot(ev.vectors.col(i)));
    if (!(gain > 0.0))
      throw DomainError("qos_power: zero effective channel gain");
    const double need = std::pow(2.0, sc.rate_targets(k)) - 1.0;
    ev.powers[static_cast<std::size_t>(i)] = need * (base + reverse(k)) / gain;
  }
  ev.total = std::accumulate(ev.powers.begin(), ev.powers.end(), 0.0);
  return ev;
}

int count_achieved(const SelectionResult& result, const DownlinkScenario& sc) {
  const auto rates = realized_rate(result, sc);
  int achieved = 0;
  for (std::size_t i = 0; i < result.selected.size(); ++i)
    if (rates[i] >= sc.rate_targets(result.selected[i])) ++achieved;
  return achieved;
}

}  // namespace

double DownlinkScenario::power_cap() const {
  if (epsilon1 > 0.0) return std::min(interference_cap / epsilon1, power_budget);
  return power_budget;
}

Eigen::VectorXd DownlinkScenario::reverse_interference() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sus);
  for (int k = 0; k < sus; ++k)
    for (int l = 0; l < pu_pairs; ++l)
      out(k) += pt_power * std::norm(pt_su_channels(l, k));
  return out;
}

double SelectionResult::total_power() const {
  return std::accumulate(powers.begin(), powers.end(), 0.0);
}

DownlinkScenario draw_scenario(const DownlinkConfig& config, std::mt19937_64& rng) {
  check_config(config);
  DownlinkScenario sc;
  sc.antennas = config.antennas;
  sc.sus = config.sus;
  sc.pu_pairs = config.pu_pairs;
  sc.noise_power = config.noise_power;
  sc.pt_power = config.pt_power;
  sc.power_budget = config.power_budget;
  sc.interference_cap = config.interference_cap;
  sc.sigma_delta2 = config.sigma_delta2 >= 0.0 ? config.sigma_delta2
                                               : config.noise_power / config.power_budget;
  sc.sigma_Delta2 = config.sigma_Delta2 >= 0.0 ? config.sigma_Delta2
                                               : config.noise_power / config.pt_power;
  sc.epsilon1 = config.epsilon1 >= 0.0 ? config.epsilon1 : sc.sigma_Delta2;
  sc.epsilon2 = config.epsilon2 >= 0.0 ? config.epsilon2
                                       : config.power_budget * sc.sigma_delta2;

  std::vector<Vec2> su_pos(static_cast<std::size_t>(config.sus));
  std::vector<Vec2> pt_pos(static_cast<std::size_t>(config.pu_pairs));
  std::vector<Vec2> pr_pos(static_cast<std::size_t>(config.pu_pairs));
  for (auto& p : su_pos) p = annulus_point(config.min_distance, config.cell_radius, rng);
  for (auto& p : pt_pos) p = annulus_point(config.min_distance, config.cell_radius, rng);
  for (auto& p : pr_pos) p = annulus_point(config.min_distance, config.cell_radius, rng);

  sc.su_beta.resize(config.sus);
  for (int k = 0; k < config.sus; ++k) {
    const double d = std::hypot(su_pos[static_cast<std::size_t>(k)].x,
                                su_pos[static_cast<std::size_t>(k)].y);
    sc.su_beta(k) = draw_gain(d, config.path_loss_exponent, config.shadowing_std_db, rng);
  }
  sc.pr_beta.resize(config.pu_pairs);
  for (int l = 0; l < config.pu_pairs; ++l) {
    const double d = std::hypot(pr_pos[static_cast<std::size_t>(l)].x,
                                pr_pos[static_cast<std::size_t>(l)].y);
    sc.pr_beta(l) = draw_gain(d, config.path_loss_exponent, config.shadowing_std_db, rng);
  }
  sc.pt_su_beta.resize(config.pu_pairs, config.sus);
  for (int l = 0; l < config.pu_pairs; ++l)
    for (int k = 0; k < config.sus; ++k) {
      const auto& a = pt_pos[static_cast<std::size_t>(l)];
      const auto& b = su_pos[static_cast<std::size_t>(k)];
      const double d = std::max(std::hypot(a.x - b.x, a.y - b.y), 1.0);
      sc.pt_su_beta(l, k) =
          draw_gain(d, config.path_loss_exponent, config.shadowing_std_db, rng);
    }

  sc.rate_targets.resize(config.sus);
  for (int k = 0; k < config.sus; ++k)
    sc.rate_targets(k) = config.uniform_rate_max > 0.0
                             ? config.uniform_rate_max * (1.0 - uniform_double(rng))
                             : config.rate_target;

  redraw_channels(sc, rng);
  return sc;
}

void redraw_channels(DownlinkScenario& sc, std::mt19937_64& rng) {
  const int m = sc.antennas;
  sc.su_channels.resize(m, sc.sus);
  sc.su_estimates.resize(m, sc.sus);
  for (int k = 0; k < sc.sus; ++k)
    for (int i = 0; i < m; ++i) {
      const auto h = complex_normal(rng, sc.su_beta(k));
      sc.su_channels(i, k) = h;
      sc.su_estimates(i, k) =
          sc.sigma_delta2 > 0.0 ? h + complex_normal(rng, sc.sigma_delta2) : h;
    }
  sc.pr_channels.resize(m, sc.pu_pairs);
  sc.pr_estimates.resize(m, sc.pu_pairs);
  for (int l = 0; l < sc.pu_pairs; ++l)
    for (int i = 0; i < m; ++i) {
      const auto h = complex_normal(rng, sc.pr_beta(l));
      sc.pr_channels(i, l) = h;
      sc.pr_estimates(i, l) =
          sc.sigma_Delta2 > 0.0 ? h + complex_normal(rng, sc.sigma_Delta2) : h;
    }
  sc.pt_su_channels.resize(sc.pu_pairs, sc.sus);
  for (int l = 0; l < sc.pu_pairs; ++l)
    for (int k = 0; k < sc.sus; ++k)
      sc.pt_su_channels(l, k) = complex_normal(rng, sc.pt_su_beta(l, k));
}

Eigen::MatrixXcd zf_vectors(const Eigen::MatrixXcd& channels, int wanted) {
  const int m = static_cast<int>(channels.rows());
  const int n = static_cast<int>(channels.cols());
  if (wanted < 0 || wanted > n)
    throw DomainError("zf_vectors: wanted columns out of range");
  if (n == 0 || wanted == 0) return Eigen::MatrixXcd(m, 0);
  if (n > m) throw DomainError("zf_vectors: more constraints than antennas");

  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(channels);
  Eigen::MatrixXcd thin_q = qr.householderQ() * Eigen::MatrixXcd::Identity(m, n);
  Eigen::MatrixXcd r = qr.matrixQR().topLeftCorner(n, n).template triangularView<Eigen::Upper>();
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(r(i, i)));
  for (int i = 0; i < n; ++i)
    if (std::abs(r(i, i)) <= 1e-12 * max_diag)
      throw NumericalError("zf_vectors: channel matrix is rank deficient", 0.0);

  // G (G^H G)^{-1} = Q R^{-H}; columns then normalized to unit power.
  Eigen::MatrixXcd raw =
      thin_q * r.adjoint().template triangularView<Eigen::Lower>().solve(
                   Eigen::MatrixXcd::Identity(n, n));
  Eigen::MatrixXcd out(m, wanted);
  for (int i = 0; i < wanted; ++i) {
    const double norm = raw.col(i).norm();
    if (!(norm > 0.0))
      throw NumericalError("zf_vectors: degenerate direction", 0.0);
    out.col(i) = raw.col(i) / norm;
  }
  return out;
}

std::vector<double> qos_power(const std::vector<int>& set,
                              const Eigen::MatrixXcd& vectors,
                              const DownlinkScenario& sc) {
  if (static_cast<int>(set.size()) != vectors.cols())
    throw DomainError("qos_power: set and vector count mismatch");
  const Eigen::VectorXd reverse = sc.reverse_interference();
  std::vector<double> powers(set.size());
  const double base = sc.noise_power + sc.epsilon2;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const int k = set[i];
    if (k < 0 || k >= sc.sus) throw DomainError("qos_power: SU index out of range");
    const double gain =
        std::norm(sc.su_estimates.col(k).dot(vectors.col(static_cast<int>(i))));
    if (!(gain > 0.0)) throw DomainError("qos_power: zero effective channel gain");
    powers[i] = (std::pow(2.0, sc.rate_targets(k)) - 1.0) * (base + reverse(k)) / gain;
  }
  return powers;
}

SelectionResult dmp_select(const DownlinkScenario& sc, bool update_vectors) {
  const Eigen::VectorXd reverse = sc.reverse_interference();
  const double cap = sc.power_cap();
  SelectionResult result;

  std::vector<int> set(static_cast<std::size_t>(sc.sus));
  std::iota(set.begin(), set.end(), 0);
  SetEvaluation ev = evaluate_set(set, sc, reverse);
  std::vector<double> frozen(static_cast<std::size_t>(sc.sus));
  for (int k = 0; k < sc.sus; ++k) frozen[static_cast<std::size_t>(k)] = ev.powers[static_cast<std::size_t>(k)];
  Eigen::MatrixXcd frozen_vectors = ev.vectors;

  while (!set.empty() && ev.total > cap) {
    std::vector<double> by_su(static_cast<std::size_t>(sc.sus), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < set.size(); ++i)
      by_su[static_cast<std::size_t>(set[i])] =
          update_vectors ? ev.powers[i] : frozen[static_cast<std::size_t>(set[i])];
    const int drop = first_argmax(by_su, set);
    result.dropped.push_back(drop);
    set.erase(std::find(set.begin(), set.end(), drop));
    if (update_vectors) {
      ev = evaluate_set(set, sc, reverse);
    } else {
      ev.total = 0.0;
      for (int k : set) ev.total += frozen[static_cast<std::size_t>(k)];
    }
  }

  result.selected = set;
  if (update_vectors) {
    result.vectors = ev.vectors;
    result.powers = ev.powers;
  } else {
    result.vectors.resize(sc.antennas, static_cast<int>(set.size()));
    result.powers.resize(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
      result.vectors.col(static_cast<int>(i)) = frozen_vectors.col(set[i]);
      result.powers[i] = frozen[static_cast<std::size_t>(set[i])];
    }
  }
  result.achieved = count_achieved(result, sc);
  return result;
}

double water_level(const std::vector<double>& lambdas, double budget) {
  if (lambdas.empty()) throw DomainError("water_level: empty set");
  if (!(budget >= 0.0)) throw DomainError("water_level: negative budget");
  for (double l : lambdas)
    if (!(l > 0.0)) throw DomainError("water_level: nonpositive gain ratio");
  const auto filled = [&](double mu) {
    double sum = 0.0;
    for (double l : lambdas) sum += std::max(mu - 1.0 / l, 0.0);
    return sum;
  };
  double lo = 0.0;
  double hi = budget + 1.0 / *std::min_element(lambdas.begin(), lambdas.end());
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double res = filled(mid) - budget;
    if (std::abs(res) <= 1e-12 * std::max(1.0, budget)) return mid;
    (res > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

SelectionResult mdml_select(const DownlinkScenario& sc) {
  const Eigen::VectorXd reverse = sc.reverse_interference();
  const double cap = sc.power_cap();
  const double base = sc.noise_power + sc.epsilon2;

  struct Fill {
    Eigen::MatrixXcd vectors;
    std::vector<double> lambdas;  // aligned with the candidate set
    std::vector<double> powers;
    double rate = 0.0;
  };
  const auto fill_set = [&](const std::vector<int>& set) {
    Fill f;
    const int s = static_cast<int>(set.size());
    Eigen::MatrixXcd channels(sc.antennas, s + sc.pu_pairs);
    for (int i = 0; i < s; ++i) channels.col(i) = sc.su_estimates.col(set[static_cast<std::size_t>(i)]);
    for (int l = 0; l < sc.pu_pairs; ++l) channels.col(s + l) = sc.pr_estimates.col(l);
    f.vectors = zf_vectors(channels, s);
    f.lambdas.resize(set.size());
    for (int i = 0; i < s; ++i) {
      const int k = set[static_cast<std::size_t>(i)];
      const double gain = std::norm(sc.su_estimates.col(k).dot(f.vectors.col(i)));
      if (!(gain > 0.0)) throw DomainError("mdml_select: zero effective channel gain");
      f.lambdas[static_cast<std::size_t>(i)] = gain / (base + reverse(k));
    }
    const double mu = water_level(f.lambdas, cap);
    f.powers.resize(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
      f.powers[i] = std::max(mu - 1.0 / f.lambdas[i], 0.0);
      f.rate += std::log2(1.0 + f.powers[i] * f.lambdas[i]);
    }
    return f;
  };

  SelectionResult result;
  std::vector<int> set(static_cast<std::size_t>(sc.sus));
  std::iota(set.begin(), set.end(), 0);
  Fill current = fill_set(set);
  while (set.size() > 1) {
    std::size_t weakest = 0;
    for (std::size_t i = 1; i < set.size(); ++i)
      if (current.lambdas[i] < current.lambdas[weakest]) weakest = i;
    std::vector<int> trimmed = set;
    trimmed.erase(trimmed.begin() + static_cast<std::ptrdiff_t>(weakest));
    Fill candidate = fill_set(trimmed);
    if (candidate.rate > current.rate) {
      result.dropped.push_back(set[weakest]);
      set = std::move(trimmed);
      current = std::move(candidate);
    } else {
      break;
    }
  }

  result.selected = set;
  result.powers = current.powers;
  result.vectors = current.vectors;
  result.achieved = count_achieved(result, sc);
  return result;
}

SelectionResult optimal_select(const DownlinkScenario& sc, int cap) {
  if (sc.sus > cap)
    throw ConfigError("optimal_select: exhaustive search refused above the cardinality cap");
  const Eigen::VectorXd reverse = sc.reverse_interference();
  const double budget = sc.power_cap();

  SelectionResult result;
  for (int size = sc.sus; size >= 1; --size) {
    // Lexicographic combinations of the given size.
    std::vector<int> combo(static_cast<std::size_t>(size));
    std::iota(combo.begin(), combo.end(), 0);
    while (true) {
      SetEvaluation ev = evaluate_set(combo, sc, reverse);
      if (ev.total <= budget) {
        result.selected = combo;
        result.powers = ev.powers;
        result.vectors = ev.vectors;
        result.achieved = count_achieved(result, sc);
        return result;
      }
      int i = size - 1;
      while (i >= 0 && combo[static_cast<std::size_t>(i)] == sc.sus - size + i) --i;
      if (i < 0) break;
      ++combo[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < size; ++j)
        combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  result.vectors.resize(sc.antennas, 0);
  return result;
}

std::vector<double> realized_rate(const SelectionResult& result,
                                  const DownlinkScenario& sc) {
  const Eigen::VectorXd reverse = sc.reverse_interference();
  std::vector<double> rates(result.selected.size());
  for (std::size_t i = 0; i < result.selected.size(); ++i) {
    const int k = result.selected[i];
    const auto& h = sc.su_channels.col(k);
    const double signal =
        result.powers[i] * std::norm(h.dot(result.vectors.col(static_cast<int>(i))));
    double cross = 0.0;
    for (std::size_t j = 0; j < result.selected.size(); ++j)
      if (j != i)
        cross += result.powers[j] *
                 std::norm(h.dot(result.vectors.col(static_cast<int>(j))));
    rates[i] = std::log2(1.0 + signal / (sc.noise_power + reverse(k) + cross));
  }
  return rates;
}

std::vector<double> realized_interference(const SelectionResult& result,
                                          const DownlinkScenario& sc) {
  std::vector<double> out(static_cast<std::size_t>(sc.pu_pairs), 0.0);
  for (int l = 0; l < sc.pu_pairs; ++l) {
    const auto& h = sc.pr_channels.col(l);
    for (std::size_t i = 0; i < result.selected.size(); ++i)
      out[static_cast<std::size_t>(l)] +=
          result.powers[i] * std::norm(h.dot(result.vectors.col(static_cast<int>(i))));
  }
  return out;
}

double sinr_loss(double interference, double noise_power) {
  if (!(noise_power > 0.0)) throw DomainError("sinr_loss: noise power must be positive");
  if (interference < 0.0) throw DomainError("sinr_loss: negative interference");
  return 10.0 * std::log10(1.0 + interference / noise_power);
}

}  // namespace cr::mimo
