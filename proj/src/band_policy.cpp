#include "artifact/band_policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "artifact/errors.hpp"
#include "artifact/numkit.hpp"
#include "artifact/rng.hpp"

namespace cr::band {

namespace {

constexpr double kRowSumTol = 1e-9;

Eigen::Vector3d solve_stationary(const Eigen::Matrix3d& t) {
  Eigen::Matrix<double, 4, 3> a;
  a.topRows<3>() = t.transpose() - Eigen::Matrix3d::Identity();
  a.bottomRows<1>().setOnes();
  Eigen::Vector4d b = Eigen::Vector4d::Zero();
  b(3) = 1.0;
  Eigen::Vector3d pi = a.colPivHouseholderQr().solve(b);
  for (int i = 0; i < 3; ++i) {
    if (pi(i) < 0.0 && pi(i) > -1e-12) pi(i) = 0.0;
  }
  if (pi.minCoeff() < 0.0 || (pi.transpose() * t - pi.transpose()).norm() > 1e-8)
    throw ConfigError("chain_from_matrix: transition matrix has no valid stationary distribution");
  return pi / pi.sum();
}

void check_alpha(double alpha, const char* who) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw DomainError(std::string(who) + ": alpha must lie in [0, 1]");
}

int sample_state(const Eigen::Vector3d& row, double u) {
  double c = 0.0;
  for (int i = 0; i < 2; ++i) {
    c += row(i);
    if (u < c) return i;
  }
  return 2;
}

}  // namespace

TrafficChain chain_from_matrix(const Eigen::Matrix3d& transition, double alpha, int id) {
  check_alpha(alpha, "chain_from_matrix");
  for (int i = 0; i < 3; ++i) {
    double sum = 0.0;
    for (int j = 0; j < 3; ++j) {
      double p = transition(i, j);
      if (p < -1e-12 || p > 1.0 + 1e-12)
        throw ConfigError("chain_from_matrix: transition probabilities must lie in [0, 1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
      throw ConfigError("chain_from_matrix: transition row " + std::to_string(i) +
                        " sums to " + std::to_string(sum) + ", not 1");
  }
  TrafficChain chain;
  chain.transition = transition;
  chain.stationary = solve_stationary(transition);
  chain.alpha = alpha;
  chain.id = id;
  return chain;
}

TrafficChain builtin_config(int id, double alpha) {
  Eigen::Matrix3d t;
  switch (id) {
    case 0: t << 0, 0, 1, 1, 0, 0, 0, 0.2, 0.8; break;
    case 1: t << 0, 0, 1, 2.0 / 3, 1.0 / 3, 0, 0, 0.5, 0.5; break;
    case 2: t << 0, 0, 1, 0.4, 0.6, 0, 0, 1, 0; break;
    case 3: t << 0, 0, 1, 0.2, 0.8, 0, 0, 1.0 / 3, 2.0 / 3; break;
    case 4: t << 0, 0, 1, 1.0 / 6, 5.0 / 6, 0, 0, 0.5, 0.5; break;
    case 5: t << 0, 0, 1, 1.0 / 7, 6.0 / 7, 0, 0, 1, 0; break;
    case 6: t << 0, 0, 1, 1, 0, 0, 0, 0.4, 0.6; break;
    default:
      throw ConfigError("builtin_config: id must lie in 0..6, got " + std::to_string(id));
  }
  return chain_from_matrix(t, alpha, id);
}

ReversalDistribution expected_link_reversal(const TrafficChain& chain,
                                            double tail_tol, int stride) {
  if (!(tail_tol > 0.0 && tail_tol < 1.0))
    throw DomainError("expected_link_reversal: tail_tol must lie in (0, 1)");
  if (stride < 1)
    throw DomainError("expected_link_reversal: stride must be at least 1");
  const Eigen::Vector3d& pi = chain.stationary;
  if (pi(1) <= 0.0 || pi(2) <= 0.0)
    throw DomainError("expected_link_reversal: chain stationary distribution gives state " +
                      std::string(pi(1) <= 0.0 ? "1" : "2") +
                      " probability zero; link reversals never happen");

  Eigen::Matrix3d w = Eigen::Matrix3d::Identity();
  for (int k = 0; k < stride; ++k) w = w * chain.transition;

  // Masses of (tau = i, current state 1): the chain sat in state 2 exactly i
  // strides ago and avoided it since; symmetrically for current state 2.
  Eigen::Matrix2d taboo2, taboo1;
  taboo2 << w(0, 0), w(0, 1), w(1, 0), w(1, 1);  // states {0, 1}
  taboo1 << w(0, 0), w(0, 2), w(2, 0), w(2, 2);  // states {0, 2}
  Eigen::Vector2d into1(w(2, 0), w(2, 1));
  Eigen::Vector2d into2(w(1, 0), w(1, 2));
  Eigen::Vector2d va(0.0, 1.0), vb(0.0, 1.0);

  const double active = pi(1) + pi(2);
  ReversalDistribution dist;
  dist.active_mass = active;
  dist.stride = stride;
  double cum = 0.0, mean = 0.0;
  const int max_ages = 500000;
  bool converged = false;
  for (int i = 1; i <= max_ages; ++i) {
    double mass = pi(2) * into1.dot(va) + pi(1) * into2.dot(vb);
    dist.table.push_back(mass);
    cum += mass;
    mean += static_cast<double>(i) * stride * mass;
    if (active - cum <= tail_tol * active) {
      converged = true;
      break;
    }
    va = taboo2 * va;
    vb = taboo1 * vb;
  }
  if (!converged)
    throw NumericalError("expected_link_reversal: tail mass did not fall below tolerance after " +
                             std::to_string(max_ages) + " ages",
                         mean);
  for (double& p : dist.table) p /= cum;
  dist.expected_tau = mean;
  return dist;
}

double reversal_weight(const ReversalDistribution& dist, double alpha) {
  check_alpha(alpha, "reversal_weight");
  double g = 0.0;
  for (std::size_t k = 0; k < dist.table.size(); ++k)
    g += dist.table[k] * (1.0 - std::pow(alpha, 2.0 * static_cast<double>((k + 1) * dist.stride)));
  return g;
}

double fixed_power(const TrafficChain& chain, double alpha, int pu_antennas,
                   double icap, double pmax) {
  check_alpha(alpha, "fixed_power");
  if (pu_antennas < 0) throw DomainError("fixed_power: pu_antennas must be non-negative");
  if (!(icap > 0.0)) throw DomainError("fixed_power: icap must be positive");
  if (!(pmax > 0.0)) throw DomainError("fixed_power: pmax must be positive");
  if (pu_antennas == 0) return pmax;
  double leak = pu_antennas * reversal_weight(expected_link_reversal(chain), alpha);
  if (leak <= 0.0) return pmax;
  return std::min(icap / leak, pmax);
}

double dynamic_power(double alpha, int tau, int pu_antennas, double icap, double pmax) {
  check_alpha(alpha, "dynamic_power");
  if (tau < 1) throw DomainError("dynamic_power: tau must be at least 1");
  if (pu_antennas < 0) throw DomainError("dynamic_power: pu_antennas must be non-negative");
  if (!(icap > 0.0)) throw DomainError("dynamic_power: icap must be positive");
  if (!(pmax > 0.0)) throw DomainError("dynamic_power: pmax must be positive");
  double leak = pu_antennas * (1.0 - std::pow(alpha, 2.0 * tau));
  if (leak <= 0.0) return pmax;
  return std::min(icap / leak, pmax);
}

void gauss_markov_step(Eigen::MatrixXcd& x, double alpha, std::mt19937_64& rng) {
  check_alpha(alpha, "gauss_markov_step");
  const double innov = 1.0 - alpha * alpha;
  std::complex<double>* p = x.data();
  const Eigen::Index n = x.size();
  for (Eigen::Index i = 0; i < n; ++i)
    p[i] = alpha * p[i] + complex_normal(rng, innov);
}

NullSpaceEstimate estimate_null_space(const Eigen::MatrixXcd& samples, int pu_antennas) {
  const Eigen::Index ms = samples.rows();
  const Eigen::Index n = samples.cols();
  if (pu_antennas < 1 || pu_antennas >= ms)
    throw DomainError("estimate_null_space: pu_antennas must lie in [1, rows)");
  if (n < 1) throw DomainError("estimate_null_space: at least one sample column required");
  Eigen::MatrixXcd cov = (samples * samples.adjoint()) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(cov);
  NullSpaceEstimate out;
  out.basis = eig.eigenvectors().leftCols(ms - pu_antennas);
  out.ill_conditioned = n < ms;
  return out;
}

Eigen::MatrixXcd exact_null_space(const Eigen::MatrixXcd& g) {
  const Eigen::Index ms = g.rows();
  const Eigen::Index mp = g.cols();
  if (mp < 1 || mp >= ms)
    throw DomainError("exact_null_space: channel must have columns in [1, rows)");
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  return q.rightCols(ms - mp);
}

StateEstimate estimate_pu_state(const Eigen::MatrixXcd& samples,
                                const Eigen::MatrixXcd* aged_null, int age,
                                double alpha, double p_miss, double p_fa) {
  check_alpha(alpha, "estimate_pu_state");
  if (!(p_miss > 0.0 && p_miss < 1.0))
    throw DomainError("estimate_pu_state: p_miss must lie in (0, 1)");
  if (!(p_fa > 0.0 && p_fa < 1.0))
    throw DomainError("estimate_pu_state: p_fa must lie in (0, 1)");
  const double ms = static_cast<double>(samples.rows());
  const double n = static_cast<double>(samples.cols());
  if (n < 1) throw DomainError("estimate_pu_state: at least one sample column required");

  StateEstimate out;
  const double trq = samples.squaredNorm() / n;
  const double idle_gate = ms + num::q_inverse(p_fa) * std::sqrt(ms / n);
  if (trq <= idle_gate) {
    out.state = 0;
    out.resolved = true;
    return out;
  }
  if (aged_null == nullptr) {
    out.state = 1;
    out.resolved = false;
    return out;
  }
  if (age < 1) throw DomainError("estimate_pu_state: age must be at least 1");
  out.p_null = (aged_null->adjoint() * samples).squaredNorm() / n;
  const double decay = std::pow(alpha, 2.0 * age);
  const double mu_p = (1.0 - decay) * trq + decay * ms;
  const double sigma_p = (1.0 - decay) * std::sqrt((trq * trq + 1.0) / n);
  const double threshold = num::q_inverse(p_miss) * sigma_p + mu_p;
  out.state = out.p_null > threshold ? 2 : 1;
  out.resolved = true;
  return out;
}

const char* policy_name(Policy policy) {
  switch (policy) {
    case Policy::FixedBandFixedPower: return "fbfp";
    case Policy::FixedBandDynamicPower: return "fbdp";
    case Policy::RoundRobin: return "round-robin";
    case Policy::RandomHop: return "random";
    case Policy::Dsee: return "dsee";
    case Policy::Clairvoyant: return "clairvoyant";
  }
  return "unknown";
}

Policy policy_from_name(const std::string& name) {
  if (name == "fbfp") return Policy::FixedBandFixedPower;
  if (name == "fbdp") return Policy::FixedBandDynamicPower;
  if (name == "round-robin") return Policy::RoundRobin;
  if (name == "random") return Policy::RandomHop;
  if (name == "dsee") return Policy::Dsee;
  if (name == "clairvoyant") return Policy::Clairvoyant;
  throw ConfigError("policy: unknown name '" + name + "'");
}

double PolicyRun::mean_rate() const {
  if (slots.empty()) return 0.0;
  double sum = 0.0;
  for (const SlotOutcome& o : slots) sum += o.rate;
  return sum / static_cast<double>(slots.size());
}

double PolicyRun::mean_interference() const {
  double sum = 0.0;
  long count = 0;
  for (const SlotOutcome& o : slots) {
    if (o.state != 0 && !o.deferred) {
      sum += o.interference;
      ++count;
    }
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

namespace {

struct BandSim {
  TrafficChain chain;
  int state = 0;
  Eigen::MatrixXcd h;                  // SU link, M_s x M_s
  Eigen::MatrixXcd g11, g12, g21, g22; // PU-i to SU-j, M_s x M_p
  Eigen::MatrixXcd a1, b1, a2, b2;     // stored null-space bases
  int a1_slot = -1, b1_slot = -1, a2_slot = -1, b2_slot = -1;
  double p_fix = 0.0;
  std::mt19937_64 evo;
};

struct DseeSchedule {
  bool exploring = true;
  int epoch = 0;
  long pos = 0;        // slots consumed in the current phase
  long phase_len = 0;
  int exploit_band = 0;
  std::vector<double> reward_sum;
  std::vector<long> visits;
};

Eigen::MatrixXcd draw_cn(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  Eigen::MatrixXcd m(rows, cols);
  std::complex<double>* p = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) p[i] = complex_normal(rng, 1.0);
  return m;
}

}  // namespace

PolicyRun run_policy(Policy policy, const std::vector<TrafficChain>& bands,
                     int su_antennas, int pu_antennas, int slots,
                     const RunConfig& config, std::mt19937_64& rng) {
  const int nf = static_cast<int>(bands.size());
  if (nf < 1) throw ConfigError("run_policy: at least one band required");
  if (pu_antennas < 1) throw ConfigError("run_policy: pu_antennas must be positive");
  if (su_antennas <= pu_antennas)
    throw ConfigError("run_policy: su_antennas must exceed pu_antennas");
  if (slots < 1) throw ConfigError("run_policy: slots must be positive");
  if (!(config.duty > 0.0 && config.duty <= 1.0))
    throw ConfigError("run_policy: duty must lie in (0, 1]");
  if (!(config.icap > 0.0)) throw ConfigError("run_policy: icap must be positive");
  if (!(config.pmax > 0.0)) throw ConfigError("run_policy: pmax must be positive");
  if (config.sense_samples < 1)
    throw ConfigError("run_policy: sense_samples must be positive");
  if (config.dsee_explore_len < 1 || config.dsee_exploit_base < 1)
    throw ConfigError("run_policy: dsee phase lengths must be positive");
  if (config.dsee_growth < 1.0)
    throw ConfigError("run_policy: dsee_growth must be at least 1");

  const std::uint64_t master = rng();
  std::mt19937_64 policy_rng = trial_rng(master, 1);
  std::mt19937_64 sense_rng = trial_rng(master, 2);

  const bool dynamic_tx = policy == Policy::FixedBandDynamicPower ||
                          policy == Policy::Clairvoyant;

  std::vector<BandSim> sims(nf);
  for (int f = 0; f < nf; ++f) {
    BandSim& b = sims[f];
    b.chain = bands[f];
    b.evo = trial_rng(master, 100 + static_cast<std::uint64_t>(f));
    b.state = sample_state(b.chain.stationary, uniform_double(b.evo));
    b.h = draw_cn(su_antennas, su_antennas, b.evo);
    b.g11 = draw_cn(su_antennas, pu_antennas, b.evo);
    b.g12 = draw_cn(su_antennas, pu_antennas, b.evo);
    b.g21 = draw_cn(su_antennas, pu_antennas, b.evo);
    b.g22 = draw_cn(su_antennas, pu_antennas, b.evo);
    double active = b.chain.stationary(1) + b.chain.stationary(2);
    b.p_fix = active <= 1e-12
                  ? config.pmax
                  : fixed_power(b.chain, b.chain.alpha, pu_antennas, config.icap,
                                config.pmax);
  }

  int home_band = 0;
  for (int f = 1; f < nf; ++f)
    if (sims[f].p_fix > sims[home_band].p_fix) home_band = f;

  DseeSchedule dsee;
  if (policy == Policy::Dsee) {
    dsee.phase_len = static_cast<long>(config.dsee_explore_len) * nf;
    dsee.reward_sum.assign(nf, 0.0);
    dsee.visits.assign(nf, 0);
  }

  const double snr = std::pow(10.0, config.sensing_snr_db / 10.0);
  const double px = snr / pu_antennas;

  // Sensing on the visited band: refresh the transmitting PU's null pair and,
  // when enabled, run the detector. Returns the state the SU acts on.
  auto sense = [&](BandSim& b, int t) -> int {
    const int s = b.state;
    int est = s;
    Eigen::MatrixXcd y1, y2;
    const bool sampled = config.noisy_sensing || config.estimate_state;
    if (sampled) {
      const Eigen::MatrixXcd* tx1 = s == 1 ? &b.g11 : (s == 2 ? &b.g21 : nullptr);
      const Eigen::MatrixXcd* tx2 = s == 1 ? &b.g12 : (s == 2 ? &b.g22 : nullptr);
      Eigen::MatrixXcd x = draw_cn(pu_antennas, config.sense_samples, sense_rng) * std::sqrt(px);
      y1 = draw_cn(su_antennas, config.sense_samples, sense_rng);
      y2 = draw_cn(su_antennas, config.sense_samples, sense_rng);
      if (tx1 != nullptr) {
        y1 += *tx1 * x;
        y2 += *tx2 * x;
      }
    }
    if (config.estimate_state) {
      const bool prefer1 = b.a1_slot >= b.a2_slot;
      const Eigen::MatrixXcd* ref = nullptr;
      int ref_pu = 0, age = 0;
      if (prefer1 && b.a1_slot >= 0) {
        ref = &b.a1;
        ref_pu = 1;
        age = t - b.a1_slot;
      } else if (!prefer1 && b.a2_slot >= 0) {
        ref = &b.a2;
        ref_pu = 2;
        age = t - b.a2_slot;
      }
      StateEstimate se = estimate_pu_state(y1, ref, std::max(age, 1), b.chain.alpha,
                                           config.p_miss, config.p_fa);
      if (se.state == 0) est = 0;
      else if (!se.resolved) est = 1;
      else est = se.state == 1 ? ref_pu : 3 - ref_pu;
    }
    if (est != 0 && s != 0) {
      Eigen::MatrixXcd na, nb;
      if (config.noisy_sensing) {
        na = estimate_null_space(y1, pu_antennas).basis;
        nb = estimate_null_space(y2, pu_antennas).basis;
      } else {
        na = exact_null_space(s == 1 ? b.g11 : b.g21);
        nb = exact_null_space(s == 1 ? b.g12 : b.g22);
      }
      if (est == 1) {
        b.a1 = na; b.a1_slot = t;
        b.b1 = nb; b.b1_slot = t;
      } else {
        b.a2 = na; b.a2_slot = t;
        b.b2 = nb; b.b2_slot = t;
      }
    }
    return est;
  };

  auto transmit = [&](BandSim& b, int f, int t, int est) -> SlotOutcome {
    SlotOutcome o;
    o.slot = t;
    o.band = f;
    o.state = b.state;
    o.state_est = est;
    const int s = b.state;
    if (est == 0) {
      Eigen::RowVectorXcd row = b.h.row(0);
      o.gain = row.squaredNorm();
      o.power = config.pmax;
      o.rate = config.duty * std::log2(1.0 + o.power * o.gain);
      if (s != 0 && o.gain > 0.0) {
        Eigen::VectorXcd v = row.adjoint() / std::sqrt(o.gain);
        const Eigen::MatrixXcd& grx = s == 1 ? b.g21 : b.g11;
        o.interference = o.power * (grx.adjoint() * v).squaredNorm();
      }
      return o;
    }
    const Eigen::MatrixXcd& stale = est == 2 ? b.a1 : b.a2;
    const int stale_slot = est == 2 ? b.a1_slot : b.a2_slot;
    const Eigen::MatrixXcd& fresh = est == 2 ? b.b2 : b.b1;
    const int fresh_slot = est == 2 ? b.b2_slot : b.b1_slot;
    if (stale_slot < 0 || stale_slot >= t || fresh_slot < 0) {
      o.deferred = true;
      return o;
    }
    o.age = t - stale_slot;
    o.power = dynamic_tx ? dynamic_power(b.chain.alpha, o.age, pu_antennas,
                                         config.icap, config.pmax)
                         : b.p_fix;
    Eigen::RowVectorXcd r = fresh.col(0).adjoint() * b.h * stale;
    o.gain = r.squaredNorm();
    o.rate = config.duty * std::log2(1.0 + o.power * o.gain);
    if (s != 0 && o.gain > 0.0) {
      Eigen::VectorXcd v = stale * (r.adjoint() / std::sqrt(o.gain));
      const Eigen::MatrixXcd& grx = s == 1 ? b.g21 : b.g11;
      o.interference = o.power * (grx.adjoint() * v).squaredNorm();
    }
    return o;
  };

  PolicyRun run;
  run.bands = nf;
  run.slots.reserve(slots);
  run.band_states.resize(static_cast<std::size_t>(slots) * nf);

  for (int t = 0; t < slots; ++t) {
    for (int f = 0; f < nf; ++f) {
      BandSim& b = sims[f];
      b.state = sample_state(b.chain.transition.row(b.state), uniform_double(b.evo));
      gauss_markov_step(b.h, b.chain.alpha, b.evo);
      gauss_markov_step(b.g11, b.chain.alpha, b.evo);
      gauss_markov_step(b.g12, b.chain.alpha, b.evo);
      gauss_markov_step(b.g21, b.chain.alpha, b.evo);
      gauss_markov_step(b.g22, b.chain.alpha, b.evo);
      run.band_states[static_cast<std::size_t>(t) * nf + f] =
          static_cast<signed char>(b.state);
    }

    SlotOutcome out;
    if (policy == Policy::Clairvoyant) {
      // Genie reading of every band's occupancy, no sensing overhead. Ranked
      // by expected rate an idle band at full power beats any occupied one,
      // so the genie leaves its home band only when the home PU link is
      // active and some other band is idle; otherwise it stays home with
      // age-adapted power.
      std::vector<int> est(nf);
      for (int f = 0; f < nf; ++f) est[f] = sense(sims[f], t);
      int f_t = home_band;
      if (est[home_band] != 0) {
        for (int f = 0; f < nf; ++f) {
          if (est[f] == 0) {
            f_t = f;
            break;
          }
        }
      }
      out = transmit(sims[f_t], f_t, t, est[f_t]);
    } else {
      int f_t = home_band;
      if (policy == Policy::RoundRobin) f_t = t % nf;
      else if (policy == Policy::RandomHop)
        f_t = static_cast<int>(uniform_index(policy_rng, nf));
      else if (policy == Policy::Dsee)
        f_t = dsee.exploring ? static_cast<int>(dsee.pos % nf) : dsee.exploit_band;
      int est = sense(sims[f_t], t);
      out = transmit(sims[f_t], f_t, t, est);
    }

    if (policy == Policy::Dsee) {
      if (dsee.exploring) {
        // Arm statistic per the fixed-power bandit abstraction, not the
        // realized rate; see the module notes.
        dsee.reward_sum[out.band] +=
            config.duty * std::log2(1.0 + sims[out.band].p_fix * out.gain);
        dsee.visits[out.band] += 1;
      }
      if (++dsee.pos >= dsee.phase_len) {
        dsee.pos = 0;
        if (dsee.exploring) {
          dsee.exploring = false;
          int best = 0;
          double best_mean = -std::numeric_limits<double>::infinity();
          for (int f = 0; f < nf; ++f) {
            double m = dsee.visits[f] > 0
                           ? dsee.reward_sum[f] / static_cast<double>(dsee.visits[f])
                           : -std::numeric_limits<double>::infinity();
            if (m > best_mean) {
              best_mean = m;
              best = f;
            }
          }
          dsee.exploit_band = best;
          dsee.phase_len = std::lround(config.dsee_exploit_base *
                                       std::pow(config.dsee_growth, dsee.epoch));
          if (dsee.phase_len < 1) dsee.phase_len = 1;
        } else {
          ++dsee.epoch;
          dsee.exploring = true;
          dsee.phase_len = static_cast<long>(config.dsee_explore_len) * nf;
        }
      }
    }

    run.slots.push_back(out);
  }
  return run;
}

}  // namespace cr::band
