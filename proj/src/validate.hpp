#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace duelbench {

struct check_result {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Each check re-derives its expected answers with a deliberately naive
// independent implementation (explicit inverses, per-pair loops, finite
// differences, histogram counts) and compares the library against it.

check_result check_link_identities(int samples, std::uint64_t seed);

// chi-square goodness of fit of sampled duels against preference_probability;
// one test per random reward pair, each compared to the 1-dof quantile at
// the given significance
check_result check_btl_sampling(int pairs, long draws, double chi2_threshold,
                                std::uint64_t seed);

// exact rewrite of per-round regret in posterior-sample terms
check_result check_regret_decomposition(int trials, int d, int k,
                                        double tolerance, std::uint64_t seed);

// central finite differences against potential_gradient; stencil points that
// straddle an argmax tie of the feel-good term are skipped and counted
check_result check_potential_gradient(int points, double tolerance,
                                      std::uint64_t seed);

// maxinp / maxpairucb / colstim against naive per-pair enumeration with an
// explicit matrix inverse
check_result check_selector_oracles(int states, std::uint64_t seed);

// finite-model posterior against the grid oracle on the same support
check_result check_finite_posterior_grid(double tolerance,
                                         std::uint64_t seed);

// total variation between Langevin samples (default schedule) and the grid
// posterior, in one and two dimensions
check_result check_sgld_grid_1d(long samples, double tv_bound,
                                std::uint64_t seed);
check_result check_sgld_grid_2d(long samples, double tv_bound,
                                std::uint64_t seed);

// quick = reduced counts for interactive use; the full set matches the
// acceptance gate
std::vector<check_result> run_validation(bool quick);

}  // namespace duelbench
