#pragma once
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cr::band {

// Three-state PU traffic chain for one band: state 0 means both PUs are
// silent, state 1 that PU-1 transmits to PU-2, state 2 the reverse link.
// Rows of `transition` are from-states.
struct TrafficChain {
  Eigen::Matrix3d transition = Eigen::Matrix3d::Identity();
  Eigen::Vector3d stationary = Eigen::Vector3d::Zero();
  double alpha = 1.0;  // per-slot fading correlation J0(2 pi f_d T_slot)
  int id = -1;         // built-in config index, -1 for custom chains
};

// Validates row-stochasticity and solves pi = pi T.
TrafficChain chain_from_matrix(const Eigen::Matrix3d& transition, double alpha,
                               int id = -1);

// Built-in PU traffic configurations 0..6. Transition probabilities are exact
// ratios; their common two-decimal renderings are rounded presentations.
TrafficChain builtin_config(int id, double alpha = 0.9938);

// Link-reversal age distribution. In a slot where one PU transmits, tau is
// the number of slots since the complementary PU last transmitted, i.e. the
// age of the newest null space that protects the current receiver.
//
// `table[k-1]` is the conditional pmf Pr(tau = k * stride | a PU is active),
// normalized to sum to 1. `expected_tau` is the mean of the unnormalized
// masses (idle slots contribute zero), whose total is pi1 + pi2; that is the
// convention under which the built-in configs reproduce their reference
// values. A slot simulation estimates it as (sum of tau over active slots) /
// (total slots).
struct ReversalDistribution {
  std::vector<double> table;
  double expected_tau = 0.0;
  double active_mass = 0.0;  // pi1 + pi2
  int stride = 1;
};

// Taboo-probability expansion of the reversal ages, truncated once the
// remaining tail mass falls below `tail_tol` (relative to pi1 + pi2).
// stride > 1 observes the chain only every `stride` slots, the view of a
// band that a hopping policy revisits with that period; ages are then
// multiples of the stride. Chains in which either PU never transmits have no
// reversals and raise a domain error.
ReversalDistribution expected_link_reversal(const TrafficChain& chain,
                                            double tail_tol = 1e-9,
                                            int stride = 1);

// E[1 - alpha^(2 tau)] under the conditional reversal distribution.
double reversal_weight(const ReversalDistribution& dist, double alpha);

// Largest fixed transmit power whose expected interference at the protected
// PU receiver stays within icap: min(icap / (M_p E[1 - alpha^(2 tau)]), pmax).
double fixed_power(const TrafficChain& chain, double alpha, int pu_antennas,
                   double icap, double pmax);

// Power for a known null-space age: min(icap / (M_p (1 - alpha^(2 tau))), pmax).
double dynamic_power(double alpha, int tau, int pu_antennas, double icap,
                     double pmax);

// One Gauss-Markov fading step x <- alpha x + sqrt(1 - alpha^2) d with d iid
// CN(0,1); preserves unit per-entry variance.
void gauss_markov_step(Eigen::MatrixXcd& x, double alpha, std::mt19937_64& rng);

struct NullSpaceEstimate {
  Eigen::MatrixXcd basis;        // M_s x (M_s - M_p), orthonormal columns
  bool ill_conditioned = false;  // fewer samples than receive antennas
};

// Null space of the transmitting PU's channel from `samples` (one received
// vector per column): eigenvectors of the sample covariance belonging to its
// M_s - M_p smallest eigenvalues.
NullSpaceEstimate estimate_null_space(const Eigen::MatrixXcd& samples,
                                      int pu_antennas);

// Orthogonal complement of span(g); the noise-free sensing limit.
Eigen::MatrixXcd exact_null_space(const Eigen::MatrixXcd& g);

struct StateEstimate {
  int state = 0;          // 0 idle; 1 the PU the null space belongs to; 2 the other
  double p_null = 0.0;    // received energy inside the aged null-space directions
  bool resolved = false;  // false when no prior null space was available
};

// Two-stage detector on one sensing block: an energy test (false-alarm target
// p_fa) decides idle vs active; if active, the energy P_null left inside the
// aged null space is compared against Q^{-1}(p_miss) sigma_P + mu_P, with
// mu_P and sigma_P formed from tr(Qhat) and the age. States are labeled
// relative to the supplied null space. Without one, an active PU is reported
// as state 1 with resolved = false.
StateEstimate estimate_pu_state(const Eigen::MatrixXcd& samples,
                                const Eigen::MatrixXcd* aged_null, int age,
                                double alpha, double p_miss, double p_fa = 1e-4);

enum class Policy {
  FixedBandFixedPower,
  FixedBandDynamicPower,
  RoundRobin,
  RandomHop,
  Dsee,
  Clairvoyant,
};

const char* policy_name(Policy policy);
Policy policy_from_name(const std::string& name);

// All powers are in units of the SU receiver noise variance.
struct RunConfig {
  double icap = 0.1;    // average interference limit at the PU receiver
  double pmax = 100.0;  // transmit power limit
  double duty = 0.8;    // data fraction of each slot
  int sense_samples = 200;       // vectors per sensing interval
  bool noisy_sensing = false;    // false: null spaces are exact
  bool estimate_state = false;   // false: genie PU states
  double sensing_snr_db = 10.0;  // PU power seen by the detector
  double p_miss = 1e-4;          // reversal-test miss target
  double p_fa = 1e-4;            // idle-test false-alarm target
  // Deterministic sequencing-and-elimination schedule: exploration sweeps of
  // `dsee_explore_len` slots per band alternate with exploitation phases of
  // dsee_exploit_base * dsee_growth^epoch slots on the empirically best band.
  int dsee_explore_len = 100;
  int dsee_exploit_base = 200;
  double dsee_growth = 4.0;
};

struct SlotOutcome {
  int slot = 0;
  int band = 0;
  int state = 0;      // true PU state on the visited band
  int state_est = 0;  // state the transmitter acted on
  int age = 0;        // age of the stale null space used, 0 when none
  double power = 0.0;
  double gain = 0.0;          // post-combining channel power
  double rate = 0.0;          // bits/s/Hz, duty factor included
  double interference = 0.0;  // at the active PU receiver, true channels
  bool deferred = false;      // PU active but no usable stale null space yet
};

struct PolicyRun {
  std::vector<SlotOutcome> slots;
  std::vector<signed char> band_states;  // slots x bands, row-major true states
  int bands = 0;

  double mean_rate() const;
  // Mean over slots in which the SU transmitted while a PU was active.
  double mean_interference() const;
};

// Simulates one SU pair over `bands.size()` bands for `slots` slots. Every
// band's chain and fading advance every slot whether visited or not. The
// caller's generator only seeds internal per-band substreams, so two policies
// started from generators in the same state face identical band trajectories
// and support paired comparisons. Bands whose chain never goes active get
// pmax as their fixed power; a band where only one PU ever transmits leaves
// the fixed power undefined and is rejected for policies that rank by it.
PolicyRun run_policy(Policy policy, const std::vector<TrafficChain>& bands,
                     int su_antennas, int pu_antennas, int slots,
                     const RunConfig& config, std::mt19937_64& rng);

}  // namespace cr::band
