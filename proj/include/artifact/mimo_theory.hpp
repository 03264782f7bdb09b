#pragma once
#include <vector>

#include "artifact/mimo_downlink.hpp"
#include "artifact/numkit.hpp"

namespace cr::mimo_theory {

// Gamma law of one SU's QoS power for a selected set of given size; the
// effective ZF gain is replaced by its large-array mean. Without primary
// transmitters the law collapses to a point mass and is flagged.
struct PowerLaw {
  num::GammaParams law{1.0, 0.0};
  bool degenerate = false;
  double point_mass = 0.0;
  double mean() const { return degenerate ? point_mass : law.mean(); }
};

PowerLaw power_distribution(const mimo::DownlinkScenario& sc, int su, int set_size,
                            bool update_vectors = true);

// Moment-matched Gamma for a sum of independent Gamma variables.
num::GammaParams sum_power_distribution(const std::vector<num::GammaParams>& laws);

// Pr(realized rate of `su` >= y) given the selected set, over fast fading and
// estimation errors at fixed slow fading.
double rate_ccdf(const mimo::DownlinkScenario& sc, int su, const std::vector<int>& set,
                 double y, bool update_vectors = true);

struct SelectionStats {
  double mean_selected = 0.0;      // E[K*]
  double mean_achieving = 0.0;     // E[K**]
  double mean_interference = 0.0;  // E[I_l], identical across PRs
};

// Exhaustive drop-path recursion over subsets; refused above `cap` SUs.
SelectionStats expected_selection_stats(const mimo::DownlinkScenario& sc,
                                        bool update_vectors = true, int cap = 10);

}  // namespace cr::mimo_theory
