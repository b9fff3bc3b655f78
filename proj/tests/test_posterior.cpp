#include <cmath>
#include <vector>

#include "doctest.h"
#include "env.hpp"
#include "errors.hpp"
#include "posterior.hpp"
#include "rng.hpp"

using namespace duelbench;

namespace {

action_space two_point_space() {
  Eigen::MatrixXd arms(2, 1);
  arms << 1.0, -1.0;
  return action_space(arms, feature_convention::raw_pm1, 0, false);
}

param_vector vec1(double x) {
  param_vector v(1);
  v << x;
  return v;
}

}  // namespace

TEST_CASE("config validation rejects bad knobs") {
  likelihood_config lik;
  lik.eta = 0.0;
  CHECK_THROWS_AS(lik.validate(), invalid_config_error);
  lik = {};
  lik.mu = -0.1;
  CHECK_THROWS_AS(lik.validate(), invalid_config_error);
  lik = {};
  lik.chain = 3;
  CHECK_THROWS_AS(lik.validate(), invalid_config_error);

  dueling_record rec{1, 4, 9, +1};
  likelihood_config c1{1.0, 0.0, 1};
  likelihood_config c2{1.0, 0.0, 2};
  CHECK(c1.adversary_of(rec) == 9);
  CHECK(c2.adversary_of(rec) == 4);

  sgld_config s;
  s.step0 = 0.0;
  CHECK_THROWS_AS(s.validate(), invalid_config_error);
  s = {};
  s.decay = 1.5;
  CHECK_THROWS_AS(s.validate(), invalid_config_error);
  s = {};
  s.inner_steps = 0;
  CHECK_THROWS_AS(s.validate(), invalid_config_error);
  s = {};
  CHECK(s.step_at(1) == doctest::Approx(s.step0).epsilon(1e-15));
  CHECK(s.step_at(3) ==
        doctest::Approx(s.step0 * s.decay * s.decay).epsilon(1e-15));
  CHECK_THROWS_AS(s.step_at(0), invalid_config_error);

  prior_spec p;
  p.scale = 0.0;
  CHECK_THROWS_AS(p.validate(), invalid_config_error);
}

TEST_CASE("prior densities and gradients") {
  prior_spec g;  // gaussian, scale 1
  param_vector t(2);
  t << 3.0, -4.0;
  CHECK(g.neg_log_density(t) == doctest::Approx(12.5).epsilon(1e-14));
  CHECK((g.neg_log_density_grad(t) - t).norm() == doctest::Approx(0.0));
  g.scale = 2.0;
  CHECK(g.neg_log_density(t) == doctest::Approx(25.0 / 8.0).epsilon(1e-14));

  prior_spec ball;
  ball.kind = prior_spec::kind_t::uniform_ball;
  ball.scale = 5.0;
  CHECK(ball.neg_log_density(t) == 0.0);  // |t| = 5 is on the boundary
  CHECK(ball.neg_log_density_grad(t).norm() == 0.0);
  param_vector big(2);
  big << 5.0, 1.0;
  CHECK(std::isinf(ball.neg_log_density(big)));
}

TEST_CASE("feel_good_likelihood matches the hand-computed pieces") {
  action_space space = two_point_space();
  dueling_record rec{1, 0, 1, +1};

  // mu = 0: exactly the tempered logistic loss
  rng_stream rng(8);
  for (int i = 0; i < 50; ++i) {
    param_vector theta = vec1(2.0 * rng.normal());
    double eta = 0.1 + rng.uniform();
    likelihood_config lik{eta, 0.0, 1};
    double z = theta[0] * 2.0;  // y <theta, phi0 - phi1>
    CHECK(feel_good_likelihood(theta, rec, space, lik) ==
          doctest::Approx(eta * link_sigma(z)).epsilon(1e-14));
  }

  // theta = 0: eta ln 2, no exploration bonus
  likelihood_config lik{1.0, 0.7, 1};
  CHECK(feel_good_likelihood(vec1(0.0), rec, space, lik) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));

  // the bonus vanishes when the argmax arm is the adversary itself
  likelihood_config chain2{1.0, 0.7, 2};  // adversary = arm1 = arm index 0
  param_vector likes_arm0 = vec1(1.5);    // argmax is arm 0
  double with_mu = feel_good_likelihood(likes_arm0, rec, space, chain2);
  likelihood_config no_mu{1.0, 0.0, 2};
  CHECK(with_mu ==
        doctest::Approx(feel_good_likelihood(likes_arm0, rec, space, no_mu))
            .epsilon(1e-14));

  // matrix overload agrees with the action_space overload
  CHECK(feel_good_likelihood(likes_arm0, rec, space.base(), chain2) ==
        doctest::Approx(with_mu).epsilon(1e-15));
}

TEST_CASE("chain swap, arm swap and label flip leave the likelihood alone") {
  rng_stream rng(4711);
  bandit_instance inst = generate_instance(77, 3, 6,
                                           feature_convention::raw_pm1);
  for (int trial = 0; trial < 100; ++trial) {
    param_vector theta(3);
    for (int i = 0; i < 3; ++i) theta[i] = 2.0 * rng.normal();
    int a1 = int(rng.below(6)), a2 = int(rng.below(6));
    int y = rng.uniform() < 0.5 ? 1 : -1;
    dueling_record rec{1, a1, a2, y};
    dueling_record mirrored{1, a2, a1, -y};
    likelihood_config lik{0.8, 0.3, 1};
    likelihood_config other{0.8, 0.3, 2};
    CHECK(feel_good_likelihood(theta, rec, inst.space, lik) ==
          doctest::Approx(feel_good_likelihood(theta, mirrored, inst.space,
                                               other))
              .epsilon(1e-12));
  }
}

TEST_CASE("potential equals the frozen two-point computation") {
  action_space space = two_point_space();
  history hist;
  hist.append({1, 0, 1, +1});
  likelihood_config lik{1.0, 0.5, 1};
  prior_spec prior;  // gaussian, scale 1

  CHECK(potential(vec1(0.5), hist, space, lik, prior) ==
        doctest::Approx(-0.06173831248177716595).epsilon(1e-12));
  CHECK(potential(vec1(-0.25), hist, space, lik, prior) ==
        doctest::Approx(1.00532698418010668087).epsilon(1e-12));

  std::vector<param_vector> grid = {vec1(0.5), vec1(-0.25)};
  std::vector<double> w = exact_posterior_grid(hist, space, lik, prior, grid);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == doctest::Approx(0.74403841589949423426).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.25596158410050576574).epsilon(1e-12));
  CHECK(w[0] + w[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("potential is the prior plus one term per record") {
  bandit_instance inst = generate_instance(5, 3, 8,
                                           feature_convention::raw_pm1);
  likelihood_config lik{1.0, 0.25, 2};
  prior_spec prior;
  param_vector theta(3);
  theta << 0.3, -1.1, 0.7;

  history empty;
  CHECK(potential(theta, empty, inst.space, lik, prior) ==
        doctest::Approx(theta.squaredNorm() / 2.0).epsilon(1e-13));

  history one;
  one.append({1, 2, 5, -1});
  double delta = potential(theta, one, inst.space, lik, prior) -
                 potential(theta, empty, inst.space, lik, prior);
  CHECK(delta ==
        doctest::Approx(
            feel_good_likelihood(theta, one.records()[0], inst.space, lik))
            .epsilon(1e-12));
}

TEST_CASE("potential_gradient: prior part and symmetric-data zero") {
  bandit_instance inst = generate_instance(15, 4, 8,
                                           feature_convention::raw_pm1);
  likelihood_config lik{1.0, 0.0, 1};
  prior_spec prior;
  history empty;
  param_vector e1 = param_vector::Zero(4);
  e1[0] = 1.0;
  CHECK((potential_gradient(e1, empty, inst.space, lik, prior) - e1).norm() ==
        doctest::Approx(0.0).epsilon(1e-15));

  // the same duel observed with both labels: the logistic terms have
  // slopes sigma'(0) and -sigma'(0) at theta = 0, so they cancel there.
  // (an arm-swapped label-flipped pair would NOT cancel: thats the same
  // observation written twice, and the terms add.)
  history sym;
  sym.append({1, 2, 6, +1});
  sym.append({2, 2, 6, -1});
  param_vector zero = param_vector::Zero(4);
  CHECK(potential_gradient(zero, sym, inst.space, lik, prior).norm() ==
        doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("potential_gradient agrees with central finite differences") {
  rng_stream rng(321);
  bandit_instance inst = generate_instance(90, 3, 6,
                                           feature_convention::raw_pm1);
  likelihood_config lik{0.9, 0.2, 1};
  prior_spec prior;
  history hist;
  rng_stream pref(17);
  for (long t = 1; t <= 6; ++t) {
    int a1 = int(pref.below(6)), a2 = int(pref.below(6));
    hist.append({t, a1, a2, sample_preference(pref, inst, a1, a2)});
  }
  const double h = 1e-6;
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    param_vector theta(3);
    for (int i = 0; i < 3; ++i) theta[i] = 1.5 * rng.normal();
    // skip points whose argmax arm is unstable inside the stencil
    bool tie = false;
    for (int i = 0; i < 3 && !tie; ++i) {
      param_vector lo = theta, hi = theta;
      lo[i] -= h;
      hi[i] += h;
      if (best_arm(lo, inst.space.base()) != best_arm(hi, inst.space.base()))
        tie = true;
    }
    if (tie) continue;
    ++checked;
    param_vector g = potential_gradient(theta, hist, inst.space, lik, prior);
    param_vector fd(3);
    for (int i = 0; i < 3; ++i) {
      param_vector lo = theta, hi = theta;
      lo[i] -= h;
      hi[i] += h;
      fd[i] = (potential(hi, hist, inst.space, lik, prior) -
               potential(lo, hist, inst.space, lik, prior)) /
              (2.0 * h);
    }
    CHECK((fd - g).norm() / std::max(1.0, g.norm()) < 1e-5);
  }
  CHECK(checked >= 20);
}

TEST_CASE("likelihood_data reproduces the naive sum and gradient") {
  rng_stream rng(606);
  bandit_instance inst = generate_instance(41, 3, 6,
                                           feature_convention::raw_pm1);
  history hist;
  rng_stream pref(3);
  for (long t = 1; t <= 12; ++t) {
    int a1 = int(pref.below(6)), a2 = int(pref.below(6));
    hist.append({t, a1, a2, sample_preference(pref, inst, a1, a2)});
  }
  for (int chain = 1; chain <= 2; ++chain) {
    likelihood_data data(hist, inst.space, chain);
    CHECK(data.count() == 12);
    likelihood_config lik{0.7, 0.15, chain};
    prior_spec prior;
    for (int trial = 0; trial < 30; ++trial) {
      param_vector theta(3);
      for (int i = 0; i < 3; ++i) theta[i] = 2.0 * rng.normal();

      double naive = 0.0;
      for (const auto& rec : hist.records())
        naive += feel_good_likelihood(theta, rec, inst.space, lik);
      CHECK(data.value(theta, lik.eta, lik.mu) ==
            doctest::Approx(naive).epsilon(1e-11));

      param_vector g = param_vector::Zero(3);
      data.add_gradient(theta, lik.eta, lik.mu, g);
      param_vector full =
          potential_gradient(theta, hist, inst.space, lik, prior);
      param_vector prior_part = prior.neg_log_density_grad(theta);
      CHECK((g + prior_part - full).norm() <
            1e-11 * std::max(1.0, full.norm()));
    }
  }
}

TEST_CASE("sgld with zero gradient is a pure random walk") {
  Eigen::MatrixXd arms(2, 2);
  arms << 1, 1, 1, -1;
  action_space space(arms, feature_convention::raw_pm1, 0, false);
  history empty;
  likelihood_config lik{1.0, 0.0, 1};
  prior_spec prior;
  prior.kind = prior_spec::kind_t::uniform_ball;
  prior.scale = 1e9;  // gradient-free, never projected in practice
  sgld_config cfg;
  cfg.step0 = 0.02;
  cfg.decay = 1.0;
  cfg.inner_steps = 1;

  rng_stream rng(2024);
  param_vector x = param_vector::Zero(2);
  double sq = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    param_vector next = sgld_sample(rng, x, empty, space, lik, prior, cfg, 1);
    sq += (next - x).squaredNorm();
    x = next;
  }
  double per_coord = sq / (2.0 * n);
  CHECK(per_coord ==
        doctest::Approx(2.0 * cfg.step0).epsilon(0.05));  // variance 2 delta
}

TEST_CASE("sgld with a gaussian prior reaches the Langevin stationary law") {
  Eigen::MatrixXd arms(2, 1);
  arms << 1, -1;
  action_space space(arms, feature_convention::raw_pm1, 0, false);
  history empty;
  likelihood_config lik{1.0, 0.0, 1};
  prior_spec prior;  // exp(-theta^2/2)
  sgld_config cfg;
  cfg.step0 = 0.01;
  cfg.decay = 1.0;
  cfg.inner_steps = 20;

  rng_stream rng(7);
  param_vector x = vec1(0.0);
  for (int i = 0; i < 200; ++i)
    x = sgld_sample(rng, x, empty, space, lik, prior, cfg, 1);  // burn-in
  double sum = 0.0, sq = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    x = sgld_sample(rng, x, empty, space, lik, prior, cfg, 1);
    sum += x[0];
    sq += x[0] * x[0];
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.05);
  // discretized Langevin on a unit gaussian has variance 1/(1 - delta/2)
  CHECK(std::abs(var - 1.0) < 0.1);
}

TEST_CASE("sgld histogram matches the grid posterior in total variation") {
  action_space space = two_point_space();
  history hist;
  hist.append({1, 0, 1, +1});
  hist.append({2, 0, 1, -1});
  hist.append({3, 1, 0, +1});
  likelihood_config lik{1.0, 0.5, 1};
  prior_spec prior;
  sgld_config cfg;  // default experiment schedule

  const int bins = 41;
  const double lo = -4.0, width = 0.2;
  std::vector<param_vector> grid;
  for (int i = 0; i < bins; ++i) grid.push_back(vec1(lo + width * (i + 0.5)));
  std::vector<double> exact = exact_posterior_grid(hist, space, lik, prior,
                                                   grid);

  rng_stream rng(99);
  param_vector x = vec1(0.0);
  std::vector<double> counts(bins, 0.0);
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    x = sgld_sample(rng, x, hist, space, lik, prior, cfg, 1);
    int b = int(std::floor((x[0] - lo) / width));
    b = std::max(0, std::min(bins - 1, b));
    counts[b] += 1.0 / n;
  }
  double tv = 0.0;
  for (int i = 0; i < bins; ++i) tv += std::abs(counts[i] - exact[i]);
  CHECK(tv / 2.0 < 0.1);
}

TEST_CASE("ball prior keeps iterates inside and the grid respects the wall") {
  action_space space = two_point_space();
  history hist;
  hist.append({1, 0, 1, +1});
  likelihood_config lik{1.0, 0.5, 1};
  prior_spec ball;
  ball.kind = prior_spec::kind_t::uniform_ball;
  ball.scale = 0.8;
  sgld_config cfg;
  cfg.step0 = 0.05;
  cfg.decay = 1.0;
  cfg.inner_steps = 5;

  rng_stream rng(12);
  param_vector x = vec1(0.0);
  for (int i = 0; i < 2000; ++i) {
    x = sgld_sample(rng, x, hist, space, lik, ball, cfg, 1);
    REQUIRE(x.norm() <= 0.8 + 1e-12);
  }

  std::vector<param_vector> grid = {vec1(-1.0), vec1(0.0), vec1(1.0)};
  std::vector<double> w = exact_posterior_grid(hist, space, lik, ball, grid);
  CHECK(w[0] == 0.0);  // outside the ball
  CHECK(w[2] == 0.0);
  CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sgld reports divergence with the offending round") {
  Eigen::MatrixXd arms(2, 1);
  arms << 1, -1;
  action_space space(arms, feature_convention::raw_pm1, 0, false);
  history empty;
  likelihood_config lik{1.0, 0.0, 1};
  prior_spec prior;
  prior.scale = 1e-3;  // gradient 1e6 theta
  sgld_config cfg;
  cfg.step0 = 1.0;
  cfg.decay = 1.0;
  cfg.inner_steps = 80;

  rng_stream rng(5);
  try {
    sgld_sample(rng, vec1(1.0), empty, space, lik, prior, cfg, 5);
    FAIL("expected divergence_error");
  } catch (const divergence_error& e) {
    CHECK(e.round == 5);
  }
}

TEST_CASE("exact_posterior_grid normalizes huge potentials and rejects junk") {
  action_space space = two_point_space();
  history hist;
  hist.append({1, 0, 1, +1});
  likelihood_config steep{5000.0, 0.0, 1};  // potentials in the thousands
  prior_spec prior;
  std::vector<param_vector> grid = {vec1(-2.0), vec1(-1.0), vec1(0.0),
                                    vec1(1.0), vec1(2.0)};
  std::vector<double> w = exact_posterior_grid(hist, space, steep, prior,
                                               grid);
  double sum = 0.0;
  for (double v : w) {
    CHECK(std::isfinite(v));
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  history empty;
  likelihood_config lik{1.0, 0.0, 1};
  prior_spec ball;
  ball.kind = prior_spec::kind_t::uniform_ball;
  ball.scale = 1e6;
  std::vector<double> uniform =
      exact_posterior_grid(empty, space, lik, ball, grid);
  for (double v : uniform)
    CHECK(v == doctest::Approx(0.2).epsilon(1e-12));

  CHECK_THROWS_AS(
      exact_posterior_grid(empty, space, lik, prior, {}),
      invalid_config_error);

  prior_spec tiny_ball;
  tiny_ball.kind = prior_spec::kind_t::uniform_ball;
  tiny_ball.scale = 0.1;  // every grid point outside: no mass anywhere
  std::vector<param_vector> away = {vec1(-2.0), vec1(-1.0), vec1(1.0),
                                    vec1(2.0)};
  CHECK_THROWS_AS(exact_posterior_grid(empty, space, lik, tiny_ball, away),
                  invalid_config_error);
}
