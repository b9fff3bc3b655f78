#include <cmath>
#include <vector>

#include "doctest.h"
#include "env.hpp"
#include "errors.hpp"
#include "model_classes.hpp"
#include "rng.hpp"

using namespace duelbench;

namespace {

action_space cross_space() {
  Eigen::MatrixXd arms(2, 2);
  arms << 1, -1, -1, 1;
  return action_space(arms, feature_convention::raw_pm1, 0, false);
}

param_vector vec2(double a, double b) {
  param_vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("linear_reward_class is the inner product with a bound") {
  linear_reward_class cls(2.5);
  CHECK(cls.bound() == doctest::Approx(2.5));
  param_vector theta = vec2(0.5, -1.0);
  feature_vector phi = vec2(2.0, 3.0);
  CHECK(cls.evaluate(theta, phi) == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("generalized_likelihood reduces to the linear feel-good term") {
  rng_stream rng(1001);
  bandit_instance inst = generate_instance(3, 3, 6,
                                           feature_convention::raw_pm1);
  linear_reward_class cls;
  for (int trial = 0; trial < 60; ++trial) {
    param_vector theta(3);
    for (int i = 0; i < 3; ++i) theta[i] = 2.0 * rng.normal();
    dueling_record rec{1, int(rng.below(6)), int(rng.below(6)),
                       rng.uniform() < 0.5 ? 1 : -1};
    likelihood_config lik{0.6, 0.3, trial % 2 + 1};
    CHECK(generalized_likelihood(theta, rec, inst.space.base(), cls, lik) ==
          doctest::Approx(
              feel_good_likelihood(theta, rec, inst.space.base(), lik))
              .epsilon(1e-13));
  }
}

TEST_CASE("finite_model_set validation") {
  finite_model_set set;
  CHECK_THROWS_AS(set.validate(), invalid_config_error);  // no models

  set.models = {vec2(1, 0), vec2(0, 1)};
  set.prior = {0.5};
  CHECK_THROWS_AS(set.validate(), invalid_config_error);  // size mismatch

  set.prior = {0.6, 0.6};
  CHECK_THROWS_AS(set.validate(), invalid_config_error);  // sums to 1.2

  set.prior = {1.2, -0.2};
  CHECK_THROWS_AS(set.validate(), invalid_config_error);  // negative mass

  set.prior = {0.3, 0.7};
  CHECK_NOTHROW(set.validate());

  set.models = {vec2(1, 0), param_vector::Ones(3)};
  CHECK_THROWS_AS(set.validate(), dimension_error);
}

TEST_CASE("finite_posterior matches the frozen two-model computation") {
  action_space space = cross_space();
  history hist;
  hist.append({1, 0, 1, -1});
  likelihood_config lik{0.5, 0.25, 2};
  linear_reward_class cls;
  finite_model_set set;
  set.models = {vec2(1, 0), vec2(0, 1)};
  set.prior = {0.3, 0.7};

  // per-model likelihood values behind the weights
  CHECK(generalized_likelihood(set.models[0], hist.records()[0], space.base(),
                               cls, lik) ==
        doctest::Approx(1.06346400552148624822).epsilon(1e-12));
  CHECK(generalized_likelihood(set.models[1], hist.records()[0], space.base(),
                               cls, lik) ==
        doctest::Approx(-0.43653599447851375178).epsilon(1e-12));

  std::vector<double> w = finite_posterior(hist, space, cls, set, lik);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == doctest::Approx(0.08728079267212174434).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.91271920732787825566).epsilon(1e-12));
  CHECK(w[0] + w[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("zero prior mass stays zero through the posterior") {
  action_space space = cross_space();
  history hist;
  hist.append({1, 0, 1, +1});
  likelihood_config lik{1.0, 0.0, 1};
  linear_reward_class cls;
  finite_model_set set;
  set.models = {vec2(1, 0), vec2(0, 1), vec2(0.5, 0.5)};
  set.prior = {0.0, 0.4, 0.6};
  std::vector<double> w = finite_posterior(hist, space, cls, set, lik);
  CHECK(w[0] == 0.0);
  CHECK(w[1] + w[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("finite_posterior agrees with the grid oracle on a shared grid") {
  bandit_instance inst = generate_instance(8, 2, 4,
                                           feature_convention::raw_pm1);
  history hist;
  rng_stream pref(5);
  for (long t = 1; t <= 5; ++t) {
    int a1 = int(pref.below(4)), a2 = int(pref.below(4));
    hist.append({t, a1, a2, sample_preference(pref, inst, a1, a2)});
  }
  std::vector<param_vector> grid;
  rng_stream g(44);
  for (int i = 0; i < 15; ++i) grid.push_back(vec2(g.normal(), g.normal()));

  for (int chain = 1; chain <= 2; ++chain) {
    likelihood_config lik{1.0, 0.3, chain};
    finite_model_set set;
    set.models = grid;
    set.prior.assign(grid.size(), 1.0 / grid.size());
    linear_reward_class cls;
    std::vector<double> fin = finite_posterior(hist, inst.space, cls, set,
                                               lik);
    prior_spec flat;
    flat.kind = prior_spec::kind_t::uniform_ball;
    flat.scale = 1e6;
    std::vector<double> ref =
        exact_posterior_grid(hist, inst.space, lik, flat, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(std::abs(fin[i] - ref[i]) < 1e-12);
  }
}

TEST_CASE("sample_index follows the weights") {
  rng_stream rng(321);
  CHECK_THROWS_AS(sample_index(rng, {}), invalid_config_error);

  // point mass
  for (int i = 0; i < 50; ++i)
    CHECK(sample_index(rng, {0.0, 1.0, 0.0}) == 1);

  std::vector<double> w = {0.2, 0.5, 0.3};
  std::vector<long> counts(3, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[sample_index(rng, w)];
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(counts[i] / double(n) - w[i]) < 0.02);
}

TEST_CASE("best_arm_under and the two-draw selector") {
  action_space space = cross_space();
  linear_reward_class cls;
  CHECK(best_arm_under(cls, vec2(1, 0), space.base()) == 0);
  CHECK(best_arm_under(cls, vec2(0, 1), space.base()) == 1);
  CHECK(best_arm_under(cls, vec2(0, 0), space.base()) == 0);  // tie: low index

  finite_model_set set;
  set.models = {vec2(1, 0), vec2(0, 1)};
  set.prior = {0.5, 0.5};
  rng_stream rng(9);
  // degenerate weights make the selection deterministic
  std::pair<int, int> sel = finite_fgts_select(
      rng, set, {1.0, 0.0}, {0.0, 1.0}, cls, space.base());
  CHECK(sel.first == 0);
  CHECK(sel.second == 1);
  sel = finite_fgts_select(rng, set, {0.0, 1.0}, {0.0, 1.0}, cls,
                           space.base());
  CHECK(sel.first == 1);
  CHECK(sel.second == 1);
}

TEST_CASE("the two chains draw independently") {
  finite_model_set set;
  set.models = {vec2(1, 0), vec2(0, 1)};
  set.prior = {0.5, 0.5};
  linear_reward_class cls;
  action_space space = cross_space();
  // chain 1 degenerate, chain 2 uniform: the first arm never moves while the
  // second takes both values
  rng_stream rng(77);
  bool saw0 = false, saw1 = false;
  for (int i = 0; i < 200; ++i) {
    std::pair<int, int> sel = finite_fgts_select(
        rng, set, {1.0, 0.0}, {0.5, 0.5}, cls, space.base());
    CHECK(sel.first == 0);
    if (sel.second == 0) saw0 = true;
    if (sel.second == 1) saw1 = true;
  }
  CHECK(saw0);
  CHECK(saw1);
}
