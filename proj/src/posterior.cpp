#include "posterior.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace duelbench {

void likelihood_config::validate() const {
  if (!(eta > 0.0))
    throw invalid_config_error("likelihood_config: eta must be > 0");
  if (!(mu >= 0.0))
    throw invalid_config_error("likelihood_config: mu must be >= 0");
  if (chain != 1 && chain != 2)
    throw invalid_config_error("likelihood_config: chain must be 1 or 2");
}

void sgld_config::validate() const {
  if (!(step0 > 0.0))
    throw invalid_config_error("sgld_config: step0 must be > 0");
  if (!(decay > 0.0) || decay > 1.0)
    throw invalid_config_error("sgld_config: decay must be in (0, 1]");
  if (inner_steps < 1)
    throw invalid_config_error("sgld_config: inner_steps must be >= 1");
}

double sgld_config::step_at(long round) const {
  if (round < 1)
    throw invalid_config_error("sgld_config::step_at: round must be >= 1");
  return step0 * std::pow(decay, static_cast<double>(round - 1));
}

void prior_spec::validate() const {
  if (!(scale > 0.0))
    throw invalid_config_error("prior_spec: scale must be > 0");
}

double prior_spec::neg_log_density(const param_vector& theta) const {
  if (kind == kind_t::gaussian)
    return theta.squaredNorm() / (2.0 * scale * scale);
  return theta.norm() <= scale ? 0.0
                               : std::numeric_limits<double>::infinity();
}

param_vector prior_spec::neg_log_density_grad(const param_vector& theta) const {
  if (kind == kind_t::gaussian) return theta / (scale * scale);
  return param_vector::Zero(theta.size());
}

namespace {

void check_record_arms(const dueling_record& rec, const Eigen::MatrixXd& arms) {
  if (rec.arm1 < 0 || rec.arm1 >= arms.rows() || rec.arm2 < 0 ||
      rec.arm2 >= arms.rows())
    throw invalid_config_error(
        "feel_good_likelihood: record arm index out of range at round " +
        std::to_string(rec.round));
}

}  // namespace

double feel_good_likelihood(const param_vector& theta,
                            const dueling_record& rec,
                            const Eigen::MatrixXd& arms,
                            const likelihood_config& lik) {
  check_record_arms(rec, arms);
  if (theta.size() != arms.cols())
    throw dimension_error("feel_good_likelihood: theta/arm dimension mismatch");
  double gap = reward_gap(theta, arms.row(rec.arm1).transpose(),
                          arms.row(rec.arm2).transpose());
  double z = rec.preference * gap;
  Eigen::VectorXd scores = arms * theta;
  double fg = scores.maxCoeff() - scores[lik.adversary_of(rec)];
  return lik.eta * link_sigma(z) - lik.mu * fg;
}

double feel_good_likelihood(const param_vector& theta,
                            const dueling_record& rec,
                            const action_space& space,
                            const likelihood_config& lik) {
  if (space.per_round())
    return feel_good_likelihood(theta, rec, space.at(rec.round), lik);
  return feel_good_likelihood(theta, rec, space.base(), lik);
}

double potential(const param_vector& theta, const history& hist,
                 const action_space& space, const likelihood_config& lik,
                 const prior_spec& prior) {
  lik.validate();
  prior.validate();
  double total = prior.neg_log_density(theta);
  for (const dueling_record& rec : hist.records())
    total += feel_good_likelihood(theta, rec, space, lik);
  return total;
}

param_vector potential_gradient(const param_vector& theta,
                                const history& hist,
                                const action_space& space,
                                const likelihood_config& lik,
                                const prior_spec& prior) {
  lik.validate();
  prior.validate();
  param_vector g = prior.neg_log_density_grad(theta);
  for (const dueling_record& rec : hist.records()) {
    Eigen::MatrixXd arms =
        space.per_round() ? space.at(rec.round) : space.base();
    check_record_arms(rec, arms);
    feature_vector diff =
        (arms.row(rec.arm1) - arms.row(rec.arm2)).transpose();
    double z = rec.preference * theta.dot(diff);
    g += lik.eta * link_sigma_deriv(z) * rec.preference * diff;
    int top = best_arm(theta, arms);
    g -= lik.mu *
         (arms.row(top) - arms.row(lik.adversary_of(rec))).transpose();
  }
  return g;
}

likelihood_data::likelihood_data(const history& hist,
                                 const action_space& space, int chain) {
  if (chain != 1 && chain != 2)
    throw invalid_config_error("likelihood_data: chain must be 1 or 2");
  n_ = static_cast<long>(hist.size());
  long d = space.dim();
  signed_diffs_.resize(n_, d);
  adversary_sum_ = Eigen::VectorXd::Zero(d);
  likelihood_config who;
  who.chain = chain;
  if (space.per_round()) round_arms_.reserve(hist.size());
  else shared_arms_ = space.base();

  long i = 0;
  for (const dueling_record& rec : hist.records()) {
    const Eigen::MatrixXd& arms =
        space.per_round()
            ? round_arms_.emplace_back(space.at(rec.round))
            : shared_arms_;
    check_record_arms(rec, arms);
    signed_diffs_.row(i) =
        rec.preference * (arms.row(rec.arm1) - arms.row(rec.arm2));
    adversary_sum_ += arms.row(who.adversary_of(rec)).transpose();
    ++i;
  }
}

double likelihood_data::value(const param_vector& theta, double eta,
                              double mu) const {
  if (n_ == 0) return 0.0;
  Eigen::VectorXd z = signed_diffs_ * theta;
  double logistic = 0.0;
  for (long i = 0; i < n_; ++i) logistic += link_sigma(z[i]);
  double fg_max = 0.0;
  if (round_arms_.empty()) {
    fg_max = static_cast<double>(n_) * (shared_arms_ * theta).maxCoeff();
  } else {
    for (const Eigen::MatrixXd& arms : round_arms_)
      fg_max += (arms * theta).maxCoeff();
  }
  return eta * logistic - mu * (fg_max - adversary_sum_.dot(theta));
}

void likelihood_data::add_gradient(const param_vector& theta, double eta,
                                   double mu, param_vector& out) const {
  if (n_ == 0) return;
  Eigen::VectorXd z = signed_diffs_ * theta;
  for (long i = 0; i < n_; ++i) z[i] = link_sigma_deriv(z[i]);
  out.noalias() += eta * (signed_diffs_.transpose() * z);
  if (mu == 0.0) return;
  if (round_arms_.empty()) {
    int top = best_arm(theta, shared_arms_);
    out -= mu * (static_cast<double>(n_) *
                     shared_arms_.row(top).transpose() -
                 adversary_sum_);
  } else {
    Eigen::VectorXd tops = Eigen::VectorXd::Zero(theta.size());
    for (const Eigen::MatrixXd& arms : round_arms_)
      tops += arms.row(best_arm(theta, arms)).transpose();
    out -= mu * (tops - adversary_sum_);
  }
}

param_vector sgld_sample(rng_stream& rng, const param_vector& init,
                         const history& hist, const action_space& space,
                         const likelihood_config& lik,
                         const prior_spec& prior, const sgld_config& cfg,
                         long round) {
  lik.validate();
  prior.validate();
  cfg.validate();
  if (init.size() != space.dim())
    throw dimension_error("sgld_sample: init/arm dimension mismatch");

  likelihood_data data(hist, space, lik.chain);
  const double step = cfg.step_at(round);
  const double noise = std::sqrt(2.0 * step);
  param_vector theta = init;
  param_vector g(theta.size());

  for (int k = 0; k < cfg.inner_steps; ++k) {
    g = prior.neg_log_density_grad(theta);
    data.add_gradient(theta, lik.eta, lik.mu, g);
    theta -= step * g;
    for (long j = 0; j < theta.size(); ++j) theta[j] += noise * rng.normal();
    if (prior.kind == prior_spec::kind_t::uniform_ball) {
      double norm = theta.norm();
      if (norm > prior.scale) theta *= prior.scale / norm;
    }
    if (!theta.allFinite())
      throw divergence_error(
          "sgld_sample: non-finite iterate at round " + std::to_string(round),
          round);
  }
  return theta;
}

std::vector<double> exact_posterior_grid(
    const history& hist, const action_space& space,
    const likelihood_config& lik, const prior_spec& prior,
    const std::vector<param_vector>& grid) {
  if (grid.empty())
    throw invalid_config_error("exact_posterior_grid: empty grid");
  std::vector<double> neg_log(grid.size());
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    neg_log[g] = potential(grid[g], hist, space, lik, prior);
    lo = std::min(lo, neg_log[g]);
  }
  if (!std::isfinite(lo))
    throw invalid_config_error(
        "exact_posterior_grid: every grid point has zero prior mass");
  std::vector<double> weights(grid.size());
  double total = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    weights[g] = std::exp(lo - neg_log[g]);
    total += weights[g];
  }
  for (double& w : weights) w /= total;
  return weights;
}

}  // namespace duelbench
