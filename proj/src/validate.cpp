#include "validate.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "agents.hpp"
#include "core.hpp"
#include "env.hpp"
#include "model_classes.hpp"
#include "posterior.hpp"
#include "rng.hpp"

namespace duelbench {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0,
                double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

}  // namespace

check_result check_link_identities(int samples, std::uint64_t seed) {
  rng_stream rng(seed);
  double worst = 0.0;
  bool shape_ok = true;
  for (int i = 0; i < samples; ++i) {
    double z = (rng.uniform() - 0.5) * 60.0;
    // sigma(z) - sigma(-z) = -z
    worst = std::max(worst,
                     std::abs(link_sigma(z) - link_sigma(-z) + z) /
                         std::max(1.0, std::abs(z)));
    // convexity along random secants
    double w = (rng.uniform() - 0.5) * 60.0;
    double mid = link_sigma(0.5 * (z + w));
    if (mid > 0.5 * (link_sigma(z) + link_sigma(w)) + 1e-12) shape_ok = false;
    // win probabilities of the two orderings are complementary; exp(-sigma)
    // legitimately rounds to 1.0 once the gap is wide enough
    double p = preference_probability(z, w);
    double q = preference_probability(w, z);
    worst = std::max(worst, std::abs(p + q - 1.0));
    if (!(p > 0.0 && p <= 1.0)) shape_ok = false;
    // derivative bounds
    double s1 = link_sigma_deriv(z);
    if (!(s1 > -1.0 && s1 < 0.0)) shape_ok = false;
    double s2 = link_sigma_curv(z);
    if (!(s2 > 0.0 && s2 <= 0.25)) shape_ok = false;
  }
  worst = std::max(worst, std::abs(link_sigma(0.0) - std::log(2.0)));
  check_result res;
  res.name = "link_identities";
  res.pass = shape_ok && worst < 1e-12;
  res.detail = fmt("max identity error %.3g over %g samples", worst,
                   static_cast<double>(samples));
  return res;
}

check_result check_btl_sampling(int pairs, long draws, double chi2_threshold,
                                std::uint64_t seed) {
  rng_stream pick(seed);
  double worst = 0.0;
  bool pass = true;
  for (int p = 0; p < pairs; ++p) {
    double r1 = (pick.uniform() - 0.5) * 4.0;
    double r2 = (pick.uniform() - 0.5) * 4.0;
    // arms (r1, 0) and (r2, 0) in a 1-d linear model reproduce the pair
    param_vector theta(1);
    theta << 1.0;
    Eigen::MatrixXd pair_arms(2, 1);
    pair_arms << r1, r2;
    rng_stream rng(pick.bits());
    long wins = 0;
    for (long i = 0; i < draws; ++i)
      if (sample_preference(rng, theta, pair_arms, 0, 1) == 1) ++wins;
    double prob = preference_probability(r1, r2);
    double e1 = prob * static_cast<double>(draws);
    double e2 = (1.0 - prob) * static_cast<double>(draws);
    double o1 = static_cast<double>(wins);
    double o2 = static_cast<double>(draws - wins);
    double chi2 = (o1 - e1) * (o1 - e1) / e1 + (o2 - e2) * (o2 - e2) / e2;
    worst = std::max(worst, chi2);
    if (chi2 >= chi2_threshold) pass = false;
  }
  check_result res;
  res.name = "btl_sampling";
  res.pass = pass;
  res.detail = fmt("max chi2 %.4g against threshold %.6g over %g pairs",
                   worst, chi2_threshold, static_cast<double>(pairs));
  return res;
}

check_result check_regret_decomposition(int trials, int d, int k,
                                        double tolerance,
                                        std::uint64_t seed) {
  rng_stream rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    bandit_instance inst = generate_instance(rng.bits(), d, k,
                                             feature_convention::raw_pm1);
    param_vector theta1(d), theta2(d);
    double scale1 = 0.25 + 2.0 * rng.uniform();
    double scale2 = 0.25 + 2.0 * rng.uniform();
    for (int j = 0; j < d; ++j) {
      theta1[j] = scale1 * rng.normal();
      theta2[j] = scale2 * rng.normal();
    }
    worst = std::max(worst,
                     regret_decomposition_residual(inst, theta1, theta2));
  }
  check_result res;
  res.name = "regret_decomposition";
  res.pass = worst < tolerance;
  res.detail = fmt("max residual %.3g against bound %.3g over %g trials",
                   worst, tolerance, static_cast<double>(trials));
  return res;
}

check_result check_potential_gradient(int points, double tolerance,
                                      std::uint64_t seed) {
  rng_stream rng(seed);
  const double h = 1e-6;
  double worst = 0.0;
  int checked = 0, skipped = 0, attempts = 0;
  while (checked < points && attempts < points * 4) {
    ++attempts;
    int d = 2 + static_cast<int>(rng.below(5));
    int kmax = d < 5 ? (1 << d) : 16;
    int k = 2 + static_cast<int>(rng.below(
                    static_cast<std::uint64_t>(kmax - 1)));
    bandit_instance inst = generate_instance(rng.bits(), d, k,
                                             feature_convention::raw_pm1);
    history hist;
    int m = 1 + static_cast<int>(rng.below(8));
    for (int i = 0; i < m; ++i) {
      dueling_record rec;
      rec.round = i + 1;
      rec.arm1 = static_cast<int>(rng.below(k));
      rec.arm2 = static_cast<int>(rng.below(k));
      rec.preference = rng.uniform() < 0.5 ? 1 : -1;
      hist.append(rec);
    }
    likelihood_config lik;
    lik.eta = 0.5 + 1.5 * rng.uniform();
    lik.mu = rng.uniform();
    lik.chain = 1 + static_cast<int>(rng.below(2));
    prior_spec prior;
    prior.scale = 0.5 + rng.uniform();
    param_vector theta(d);
    for (int j = 0; j < d; ++j) theta[j] = rng.normal();

    // skip stencils that straddle an argmax tie of the feel-good term
    int anchor = best_arm(theta, inst.space.base());
    bool tied = false;
    param_vector fd(d);
    for (int j = 0; j < d && !tied; ++j) {
      param_vector hi = theta, lo = theta;
      hi[j] += h;
      lo[j] -= h;
      if (best_arm(hi, inst.space.base()) != anchor ||
          best_arm(lo, inst.space.base()) != anchor) {
        tied = true;
        break;
      }
      fd[j] = (potential(hi, hist, inst.space, lik, prior) -
               potential(lo, hist, inst.space, lik, prior)) /
              (2.0 * h);
    }
    if (tied) {
      ++skipped;
      continue;
    }
    param_vector g = potential_gradient(theta, hist, inst.space, lik, prior);
    double rel = (fd - g).norm() / std::max(1.0, g.norm());
    worst = std::max(worst, rel);
    ++checked;
  }
  check_result res;
  res.name = "potential_gradient_fd";
  res.pass = checked >= points && worst <= tolerance;
  res.detail = fmt("max rel error %.3g over %g points", worst,
                   static_cast<double>(checked)) +
               fmt(" (%g tie-skipped)", static_cast<double>(skipped));
  return res;
}

// ---------------------------------------------------------------------------

namespace {

// deliberately naive: explicit inverse, per-pair quadratic forms
double brute_width(const Eigen::MatrixXd& cov_inverse,
                   const Eigen::MatrixXd& arms, int x, int y) {
  Eigen::VectorXd diff = (arms.row(x) - arms.row(y)).transpose();
  double sq = diff.dot(cov_inverse * diff);
  return std::sqrt(std::max(0.0, sq));
}

std::pair<int, int> brute_maxinp(const param_vector& theta,
                                 const Eigen::MatrixXd& cov,
                                 const Eigen::MatrixXd& arms, double beta) {
  Eigen::MatrixXd inv = cov.inverse();
  const long k = arms.rows();
  std::vector<int> active;
  for (long a = 0; a < k; ++a) {
    bool keep = true;
    for (long b = 0; b < k; ++b) {
      double margin = arms.row(a).dot(theta) - arms.row(b).dot(theta) +
                      beta * brute_width(inv, arms, static_cast<int>(a),
                                         static_cast<int>(b));
      if (margin < 0.0) {
        keep = false;
        break;
      }
    }
    if (keep) active.push_back(static_cast<int>(a));
  }
  int bx = -1, by = -1;
  double best = -1.0;
  for (int x : active)
    for (int y : active) {
      double w = brute_width(inv, arms, x, y);
      if (w > best) {
        best = w;
        bx = x;
        by = y;
      }
    }
  return {bx, by};
}

std::pair<int, int> brute_maxpairucb(const param_vector& theta,
                                     const Eigen::MatrixXd& cov,
                                     const Eigen::MatrixXd& arms,
                                     double beta) {
  Eigen::MatrixXd inv = cov.inverse();
  const long k = arms.rows();
  int bx = 0, by = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (long x = 0; x < k; ++x)
    for (long y = 0; y < k; ++y) {
      double s = arms.row(x).dot(theta) + arms.row(y).dot(theta) +
                 beta * brute_width(inv, arms, static_cast<int>(x),
                                    static_cast<int>(y));
      if (s > best) {
        best = s;
        bx = static_cast<int>(x);
        by = static_cast<int>(y);
      }
    }
  return {bx, by};
}

int brute_colstim_first(const param_vector& theta, const Eigen::MatrixXd& arms,
                        const Eigen::VectorXd& eps, double c) {
  int best = 0;
  double top = -std::numeric_limits<double>::infinity();
  for (long a = 0; a < arms.rows(); ++a) {
    double s = arms.row(a).dot(theta) + c * eps[a];
    if (s > top) {
      top = s;
      best = static_cast<int>(a);
    }
  }
  return best;
}

int brute_colstim_second(const param_vector& theta, const Eigen::MatrixXd& cov,
                         const Eigen::MatrixXd& arms, double beta, int first) {
  Eigen::MatrixXd inv = cov.inverse();
  int best = 0;
  double top = -std::numeric_limits<double>::infinity();
  for (long b = 0; b < arms.rows(); ++b) {
    double s = arms.row(b).dot(theta) +
               beta * brute_width(inv, arms, static_cast<int>(b), first);
    if (s > top) {
      top = s;
      best = static_cast<int>(b);
    }
  }
  return best;
}

}  // namespace

check_result check_selector_oracles(int states, std::uint64_t seed) {
  rng_stream rng(seed);
  const double betas[] = {0.01, 0.1, 1.0, 10.0};
  const double lambdas[] = {0.001, 0.1, 1.0};
  int mismatches = 0;
  for (int s = 0; s < states; ++s) {
    int d = 2 + static_cast<int>(rng.below(7));
    int k = 2 + static_cast<int>(rng.below(15));
    Eigen::MatrixXd arms(k, d);
    for (int a = 0; a < k; ++a)
      for (int j = 0; j < d; ++j) arms(a, j) = rng.normal();
    param_vector theta(d);
    for (int j = 0; j < d; ++j) theta[j] = rng.normal();
    double lambda = lambdas[rng.below(3)];
    Eigen::MatrixXd cov = lambda * Eigen::MatrixXd::Identity(d, d);
    int updates = static_cast<int>(rng.below(2 * d + 1));
    for (int u = 0; u < updates; ++u) {
      Eigen::VectorXd v(d);
      for (int j = 0; j < d; ++j) v[j] = rng.normal();
      cov += v * v.transpose();
    }
    double beta = betas[rng.below(4)];
    double c = 0.5 + rng.uniform();

    if (maxinp_select(theta, cov, arms, beta) !=
        brute_maxinp(theta, cov, arms, beta))
      ++mismatches;
    if (maxpairucb_select(theta, cov, arms, beta) !=
        brute_maxpairucb(theta, cov, arms, beta))
      ++mismatches;
    Eigen::VectorXd eps(k);
    for (int a = 0; a < k; ++a) eps[a] = rng.gumbel();
    int first = colstim_first_arm(theta, arms, eps, c);
    if (first != brute_colstim_first(theta, arms, eps, c)) ++mismatches;
    if (colstim_second_arm(theta, cov, arms, beta, first) !=
        brute_colstim_second(theta, cov, arms, beta, first))
      ++mismatches;
  }
  check_result res;
  res.name = "selector_oracles";
  res.pass = mismatches == 0;
  res.detail = fmt("%g mismatches over %g random states",
                   static_cast<double>(mismatches),
                   static_cast<double>(states));
  return res;
}

check_result check_finite_posterior_grid(double tolerance,
                                         std::uint64_t seed) {
  rng_stream rng(seed);
  bandit_instance inst =
      generate_instance(rng.bits(), 2, 4, feature_convention::raw_pm1);
  history hist;
  for (int i = 0; i < 5; ++i) {
    dueling_record rec;
    rec.round = i + 1;
    rec.arm1 = static_cast<int>(rng.below(4));
    rec.arm2 = static_cast<int>(rng.below(4));
    rec.preference = rng.uniform() < 0.5 ? 1 : -1;
    hist.append(rec);
  }
  std::vector<param_vector> grid;
  for (int i = 0; i < 25; ++i) {
    param_vector p(2);
    p << 3.0 * (rng.uniform() - 0.5), 3.0 * (rng.uniform() - 0.5);
    grid.push_back(p);
  }
  finite_model_set set;
  set.models = grid;
  set.prior.assign(grid.size(), 1.0 / static_cast<double>(grid.size()));
  linear_reward_class linear;
  prior_spec flat;
  flat.kind = prior_spec::kind_t::uniform_ball;
  flat.scale = 1e6;  // constant density over the grid, like the model prior

  double worst = 0.0;
  for (int chain = 1; chain <= 2; ++chain) {
    likelihood_config lik;
    lik.eta = 0.7;
    lik.mu = 0.3;
    lik.chain = chain;
    std::vector<double> fine =
        finite_posterior(hist, inst.space, linear, set, lik);
    std::vector<double> exact =
        exact_posterior_grid(hist, inst.space, lik, flat, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      worst = std::max(worst, std::abs(fine[i] - exact[i]));
  }
  check_result res;
  res.name = "finite_posterior_grid";
  res.pass = worst < tolerance;
  res.detail = fmt("max weight difference %.3g against bound %.3g", worst,
                   tolerance);
  return res;
}

// ---------------------------------------------------------------------------

namespace {

struct tv_setup {
  action_space space;
  history hist;
  likelihood_config lik;
  prior_spec prior;
};

double sgld_tv(const tv_setup& setup, const std::vector<param_vector>& grid,
               const std::vector<double>& exact, long samples,
               std::uint64_t seed,
               const std::function<long(const param_vector&)>& bin_of) {
  rng_stream rng(seed);
  sgld_config cfg;  // deliberately the default schedule
  std::vector<double> counts(grid.size(), 0.0);
  param_vector theta = param_vector::Zero(setup.space.dim());
  for (long s = 0; s < samples; ++s) {
    theta = sgld_sample(rng, theta, setup.hist, setup.space, setup.lik,
                        setup.prior, cfg, 1);
    long b = bin_of(theta);
    if (b >= 0) counts[static_cast<std::size_t>(b)] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    tv += std::abs(counts[i] / static_cast<double>(samples) - exact[i]);
  return 0.5 * tv;
}

}  // namespace

check_result check_sgld_grid_1d(long samples, double tv_bound,
                                std::uint64_t seed) {
  Eigen::MatrixXd arms(2, 1);
  arms << 1.0, -1.0;
  tv_setup setup{action_space(arms, feature_convention::raw_pm1, 0, false),
                 history{}, likelihood_config{1.0, 0.5, 1}, prior_spec{}};
  const int prefs[5] = {1, -1, 1, 1, -1};
  for (int i = 0; i < 5; ++i)
    setup.hist.append(dueling_record{i + 1, 0, 1, prefs[i]});

  const double lo = -4.0, step = 0.2;
  const int cells = 41;
  std::vector<param_vector> grid;
  for (int i = 0; i < cells; ++i) {
    param_vector p(1);
    p << lo + step * i;
    grid.push_back(p);
  }
  std::vector<double> exact =
      exact_posterior_grid(setup.hist, setup.space, setup.lik, setup.prior,
                           grid);
  auto bin_of = [&](const param_vector& t) -> long {
    long i = std::lround((t[0] - lo) / step);
    return std::min<long>(cells - 1, std::max<long>(0, i));
  };
  double tv = sgld_tv(setup, grid, exact, samples, seed, bin_of);
  check_result res;
  res.name = "sgld_grid_1d";
  res.pass = tv < tv_bound;
  res.detail = fmt("total variation %.4g against bound %.3g (%g samples)",
                   tv, tv_bound, static_cast<double>(samples));
  return res;
}

check_result check_sgld_grid_2d(long samples, double tv_bound,
                                std::uint64_t seed) {
  Eigen::MatrixXd arms(4, 2);
  arms << 1, 1, 1, -1, -1, 1, -1, -1;
  tv_setup setup{action_space(arms, feature_convention::raw_pm1, 0, false),
                 history{}, likelihood_config{1.0, 0.5, 2}, prior_spec{}};
  const int a1s[5] = {0, 1, 0, 3, 0};
  const int a2s[5] = {3, 2, 2, 1, 1};
  const int prefs[5] = {1, 1, -1, 1, -1};
  for (int i = 0; i < 5; ++i)
    setup.hist.append(dueling_record{i + 1, a1s[i], a2s[i], prefs[i]});

  const double lo = -3.0, step = 0.6;
  const int side = 11;
  std::vector<param_vector> grid;
  for (int ix = 0; ix < side; ++ix)
    for (int iy = 0; iy < side; ++iy) {
      param_vector p(2);
      p << lo + step * ix, lo + step * iy;
      grid.push_back(p);
    }
  std::vector<double> exact =
      exact_posterior_grid(setup.hist, setup.space, setup.lik, setup.prior,
                           grid);
  auto clampi = [&](double v) -> long {
    long i = std::lround((v - lo) / step);
    return std::min<long>(side - 1, std::max<long>(0, i));
  };
  auto bin_of = [&](const param_vector& t) -> long {
    return clampi(t[0]) * side + clampi(t[1]);
  };
  double tv = sgld_tv(setup, grid, exact, samples, seed, bin_of);
  check_result res;
  res.name = "sgld_grid_2d";
  res.pass = tv < tv_bound;
  res.detail = fmt("total variation %.4g against bound %.3g (%g samples)",
                   tv, tv_bound, static_cast<double>(samples));
  return res;
}

std::vector<check_result> run_validation(bool quick) {
  // 1-dof chi-square quantile at significance 1e-3
  const double chi2_999 = 10.827566170662733;
  std::vector<check_result> results;
  results.push_back(check_link_identities(quick ? 50 : 200, 0xA11CE));
  results.push_back(check_btl_sampling(quick ? 5 : 20,
                                       quick ? 20000 : 100000, chi2_999,
                                       0xB71));
  results.push_back(check_regret_decomposition(quick ? 100 : 1000, 5, 32,
                                               1e-9, 0xDEC0));
  results.push_back(
      check_potential_gradient(quick ? 20 : 100, 1e-5, 0x96AD));
  results.push_back(check_selector_oracles(quick ? 20 : 100, 0x5E1EC7));
  results.push_back(check_finite_posterior_grid(1e-12, 0xF197E));
  results.push_back(
      check_sgld_grid_1d(quick ? 2000 : 10000, 0.1, 0x56D1));
  if (!quick)
    results.push_back(check_sgld_grid_2d(10000, 0.1, 0x56D2));
  return results;
}

}  // namespace duelbench
