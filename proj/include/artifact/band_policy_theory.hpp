#pragma once
#include <vector>

#include "artifact/band_policy.hpp"

namespace cr::band_theory {

// Expected rate of the fixed-band fixed-power policy: the idle fraction
// transmits pmax over the full-rank link (Gamma(M_s, 1) effective gain), the
// active fraction transmits the chain's fixed power over the nulled link
// (Gamma(M_s - M_p, 1)).
double fbfp_rate(const cr::band::TrafficChain& chain, double alpha,
                 int su_antennas, int pu_antennas, double icap, double pmax,
                 double duty);

// Same band, but the active-slot power adapts to the realized null-space age,
// averaged over the link-reversal distribution.
double fbdp_rate(const cr::band::TrafficChain& chain, double alpha,
                 int su_antennas, int pu_antennas, double icap, double pmax,
                 double duty);

// Expected rate of a uniform band-hopping policy with per-band fixed powers:
// the average of the per-band fixed-band rates.
double dbfp_rate(const std::vector<cr::band::TrafficChain>& bands,
                 int su_antennas, int pu_antennas, double icap, double pmax,
                 double duty);

// Per-band ratio of the average interference a hopping SU causes to the
// average a resident SU was budgeted for: E[1 - alpha^(2 tau')] with ages
// restricted to multiples of the hop period, over E[1 - alpha^(2 tau)].
// Exceeds 1 whenever the band reverses between visits.
std::vector<double> dbfp_interference_ratio(
    const std::vector<cr::band::TrafficChain>& bands, int hop_period);

// Upper bound on the per-slot rate gain of a genie that senses every band
// over the best fixed band: counts the slots where the best band is busy but
// some alternative idles, and bounds the idle-link rate by Jensen at its mean
// gain su_antennas.
double clairvoyant_gain_bound(const std::vector<cr::band::TrafficChain>& bands,
                              int su_antennas, int pu_antennas, double icap,
                              double pmax, double duty);

// Probability that the two-stage detector labels the active PU wrongly, for
// a null space of the stated age: the designed miss rate under the same-PU
// hypothesis plus the Gamma-approximated reversal-hypothesis mass below the
// threshold,
// weighted by the chain's stationary state probabilities.
double state_error_probability(const cr::band::TrafficChain& chain, double alpha,
                               int age, double snr_db, int su_antennas,
                               int pu_antennas, int sense_samples, double p_miss);

}  // namespace cr::band_theory
