#include "agents.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <string>

namespace duelbench {

const Eigen::MatrixXd& agent::arms_for(long round) {
  if (!space_->per_round()) return space_->base();
  if (round_arms_round_ != round) {
    round_arms_ = space_->at(round);
    round_arms_round_ = round;
  }
  return round_arms_;
}

std::pair<int, int> agent::select(long round) {
  if (round != updated_round_ + 1)
    throw sequencing_error("agent::select: expected round " +
                           std::to_string(updated_round_ + 1) + ", got " +
                           std::to_string(round));
  if (selected_round_ == round)
    throw sequencing_error("agent::select: round " + std::to_string(round) +
                           " already selected and awaiting its update");
  std::pair<int, int> picked = do_select(round, arms_for(round));
  selected_round_ = round;
  return picked;
}

void agent::update(const dueling_record& rec) {
  if (rec.round != selected_round_)
    throw sequencing_error("agent::update: round " + std::to_string(rec.round) +
                           " was never selected");
  if (rec.round != updated_round_ + 1)
    throw sequencing_error("agent::update: expected round " +
                           std::to_string(updated_round_ + 1) + ", got " +
                           std::to_string(rec.round));
  const Eigen::MatrixXd& arms = arms_for(rec.round);
  if (rec.arm1 < 0 || rec.arm1 >= arms.rows() || rec.arm2 < 0 ||
      rec.arm2 >= arms.rows())
    throw invalid_config_error("agent::update: arm index out of range");
  do_update(rec, arms);
  updated_round_ = rec.round;
}

// ---------------------------------------------------------------------------

fgts_agent::fgts_agent(const action_space& space, const fgts_config& cfg,
                       std::uint64_t seed_chain1, std::uint64_t seed_chain2)
    : agent(space),
      cfg_(cfg),
      rng_{rng_stream(seed_chain1), rng_stream(seed_chain2)} {
  if (!cfg_.sampler_override) {
    likelihood_config lik{cfg_.eta, cfg_.mu, 1};
    lik.validate();
    cfg_.sgld.validate();
    cfg_.prior.validate();
  }
  warm_[0] = param_vector::Zero(space.dim());
  warm_[1] = param_vector::Zero(space.dim());
}

const param_vector& fgts_agent::last_sample(int chain) const {
  if (chain != 1 && chain != 2)
    throw invalid_config_error("fgts_agent::last_sample: chain must be 1 or 2");
  return warm_[chain - 1];
}

std::pair<int, int> fgts_agent::do_select(long round,
                                          const Eigen::MatrixXd& arms) {
  int picked[2];
  for (int j = 0; j < 2; ++j) {
    param_vector theta;
    if (cfg_.sampler_override) {
      theta = cfg_.sampler_override(j + 1, round);
    } else {
      likelihood_config lik{cfg_.eta, cfg_.mu, j + 1};
      const param_vector& init = cfg_.sgld.warm_start
                                     ? warm_[j]
                                     : param_vector::Zero(space().dim());
      theta = sgld_sample(rng_[j], init, hist_, space(), lik, cfg_.prior,
                          cfg_.sgld, round);
    }
    warm_[j] = theta;
    picked[j] = best_arm(theta, arms);
  }
  return {picked[0], picked[1]};
}

void fgts_agent::do_update(const dueling_record& rec, const Eigen::MatrixXd&) {
  hist_.append(rec);
}

// ---------------------------------------------------------------------------

namespace {

double logistic_objective(const Eigen::MatrixXd& m, const param_vector& theta,
                          double lambda) {
  Eigen::VectorXd z = m * theta;
  double f = 0.5 * lambda * theta.squaredNorm();
  for (long i = 0; i < z.size(); ++i) f += link_sigma(z[i]);
  return f;
}

}  // namespace

mle_result mle_fit(const Eigen::MatrixXd& signed_diffs, double lambda,
                   const param_vector* warm, int max_iter, double tol) {
  if (!(lambda > 0.0))
    throw invalid_config_error("mle_fit: lambda must be > 0");
  if (max_iter < 1) throw invalid_config_error("mle_fit: max_iter must be >= 1");
  const long d = signed_diffs.cols();
  const long n = signed_diffs.rows();

  mle_result res;
  res.theta = (warm != nullptr && warm->size() == d)
                  ? *warm
                  : param_vector::Zero(d);

  for (int it = 0; it <= max_iter; ++it) {
    Eigen::VectorXd z = signed_diffs * res.theta;
    double f = 0.5 * lambda * res.theta.squaredNorm();
    Eigen::VectorXd w(n);
    param_vector g = lambda * res.theta;
    for (long i = 0; i < n; ++i) {
      f += link_sigma(z[i]);
      double s1 = link_sigma_deriv(z[i]);
      w[i] = link_sigma_curv(z[i]);
      g.noalias() += s1 * signed_diffs.row(i).transpose();
    }
    res.objective_path.push_back(f);
    res.grad_norm = g.norm();
    res.iterations = it;
    if (res.grad_norm < tol) return res;
    if (it == max_iter) break;

    Eigen::MatrixXd hess =
        lambda * Eigen::MatrixXd::Identity(d, d) +
        signed_diffs.transpose() * w.asDiagonal() * signed_diffs;
    param_vector step = hess.llt().solve(-g);
    double slope = g.dot(step);
    // the required decrease shrinks below the roundoff of a long objective
    // sum near convergence, so the Armijo test tolerates that noise
    double noise = 1e-12 * (1.0 + std::abs(f));
    double t = 1.0;
    bool moved = false;
    while (t > 1e-12) {
      param_vector cand = res.theta + t * step;
      double fc = logistic_objective(signed_diffs, cand, lambda);
      if (fc <= f + 1e-4 * t * slope + noise) {
        res.theta = cand;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  throw estimation_error(
      "mle_fit: gradient norm " + std::to_string(res.grad_norm) +
          " did not reach tolerance within " + std::to_string(max_iter) +
          " iterations",
      res.grad_norm);
}

mle_result mle_estimate(const history& hist, const action_space& space,
                        double lambda, const param_vector* warm, int max_iter,
                        double tol) {
  const long d = space.dim();
  Eigen::MatrixXd m(static_cast<long>(hist.size()), d);
  long i = 0;
  for (const dueling_record& rec : hist.records()) {
    Eigen::MatrixXd arms =
        space.per_round() ? space.at(rec.round) : space.base();
    m.row(i++) = rec.preference * (arms.row(rec.arm1) - arms.row(rec.arm2));
  }
  return mle_fit(m, lambda, warm, max_iter, tol);
}

Eigen::MatrixXd covariance_update(const Eigen::MatrixXd& sigma,
                                  const feature_vector& phi1,
                                  const feature_vector& phi2) {
  if (sigma.rows() != sigma.cols() || sigma.rows() != phi1.size() ||
      phi1.size() != phi2.size())
    throw dimension_error("covariance_update: dimension mismatch");
  feature_vector diff = phi1 - phi2;
  return sigma + diff * diff.transpose();
}

Eigen::MatrixXd uncertainty_gram(const Eigen::MatrixXd& cov,
                                 const Eigen::MatrixXd& arms) {
  if (cov.rows() != cov.cols() || cov.rows() != arms.cols())
    throw dimension_error("uncertainty_gram: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw estimation_error("uncertainty_gram: covariance not positive definite",
                           0.0);
  Eigen::MatrixXd gram = arms * llt.solve(arms.transpose());
  // exact symmetry, so mirrored pairs tie exactly and break lexicographically
  return 0.5 * (gram + gram.transpose());
}

double pair_width(const Eigen::MatrixXd& gram, int x, int y) {
  double sq = gram(x, x) + gram(y, y) - 2.0 * gram(x, y);
  return std::sqrt(std::max(0.0, sq));
}

std::pair<int, int> maxinp_select(const param_vector& theta_hat,
                                  const Eigen::MatrixXd& cov,
                                  const Eigen::MatrixXd& arms, double beta) {
  const long k = arms.rows();
  Eigen::VectorXd r = arms * theta_hat;
  Eigen::MatrixXd gram = uncertainty_gram(cov, arms);
  std::vector<char> active(static_cast<std::size_t>(k), 1);
  for (long a = 0; a < k; ++a)
    for (long b = 0; b < k; ++b)
      if (r[a] - r[b] + beta * pair_width(gram, static_cast<int>(a),
                                          static_cast<int>(b)) <
          0.0) {
        active[a] = 0;
        break;
      }
  int bx = -1, by = -1;
  double best = -1.0;
  for (long x = 0; x < k; ++x) {
    if (!active[x]) continue;
    for (long y = 0; y < k; ++y) {
      if (!active[y]) continue;
      double w = pair_width(gram, static_cast<int>(x), static_cast<int>(y));
      if (w > best) {
        best = w;
        bx = static_cast<int>(x);
        by = static_cast<int>(y);
      }
    }
  }
  return {bx, by};  // the empirical best arm is always active
}

std::pair<int, int> maxpairucb_select(const param_vector& theta_hat,
                                      const Eigen::MatrixXd& cov,
                                      const Eigen::MatrixXd& arms,
                                      double beta) {
  const long k = arms.rows();
  Eigen::VectorXd r = arms * theta_hat;
  Eigen::MatrixXd gram = uncertainty_gram(cov, arms);
  int bx = 0, by = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (long x = 0; x < k; ++x)
    for (long y = 0; y < k; ++y) {
      double s = r[x] + r[y] +
                 beta * pair_width(gram, static_cast<int>(x),
                                   static_cast<int>(y));
      if (s > best) {
        best = s;
        bx = static_cast<int>(x);
        by = static_cast<int>(y);
      }
    }
  return {bx, by};
}

int colstim_first_arm(const param_vector& theta_hat,
                      const Eigen::MatrixXd& arms,
                      const Eigen::VectorXd& perturbations, double c) {
  if (perturbations.size() != arms.rows())
    throw dimension_error("colstim_first_arm: one perturbation per arm");
  Eigen::VectorXd s = arms * theta_hat + c * perturbations;
  int best = 0;
  for (long a = 1; a < s.size(); ++a)
    if (s[a] > s[best]) best = static_cast<int>(a);
  return best;
}

int colstim_second_arm(const param_vector& theta_hat,
                       const Eigen::MatrixXd& cov,
                       const Eigen::MatrixXd& arms, double beta, int first) {
  if (first < 0 || first >= arms.rows())
    throw invalid_config_error("colstim_second_arm: first arm out of range");
  Eigen::VectorXd r = arms * theta_hat;
  Eigen::MatrixXd gram = uncertainty_gram(cov, arms);
  int best = 0;
  double top = -std::numeric_limits<double>::infinity();
  for (long b = 0; b < arms.rows(); ++b) {
    double s = r[b] + beta * pair_width(gram, static_cast<int>(b), first);
    if (s > top) {
      top = s;
      best = static_cast<int>(b);
    }
  }
  return best;
}

std::pair<int, int> colstim_select(rng_stream& rng,
                                   const param_vector& theta_hat,
                                   const Eigen::MatrixXd& cov,
                                   const Eigen::MatrixXd& arms, double beta,
                                   double c) {
  Eigen::VectorXd eps(arms.rows());
  for (long a = 0; a < eps.size(); ++a) eps[a] = rng.gumbel();
  int first = colstim_first_arm(theta_hat, arms, eps, c);
  return {first, colstim_second_arm(theta_hat, cov, arms, beta, first)};
}

// ---------------------------------------------------------------------------

ridge_logistic_agent::ridge_logistic_agent(const action_space& space,
                                           const baseline_config& cfg)
    : agent(space), cfg_(cfg) {
  if (!(cfg_.lambda > 0.0))
    throw invalid_config_error("baseline_config: lambda must be > 0");
  if (!(cfg_.beta >= 0.0))
    throw invalid_config_error("baseline_config: beta must be >= 0");
  cov_ = cfg_.lambda * Eigen::MatrixXd::Identity(space.dim(), space.dim());
  theta_hat_ = param_vector::Zero(space.dim());
  signed_diffs_.resize(64, space.dim());
}

void ridge_logistic_agent::do_update(const dueling_record& rec,
                                     const Eigen::MatrixXd& arms) {
  feature_vector diff =
      (arms.row(rec.arm1) - arms.row(rec.arm2)).transpose();
  cov_.noalias() += diff * diff.transpose();
  if (filled_ == signed_diffs_.rows())
    signed_diffs_.conservativeResize(2 * filled_, Eigen::NoChange);
  signed_diffs_.row(filled_++) = rec.preference * diff.transpose();
  theta_hat_ =
      mle_fit(signed_diffs_.topRows(filled_), cfg_.lambda, &theta_hat_).theta;
}

// ---------------------------------------------------------------------------

vacdb_agent::vacdb_agent(const action_space& space, const baseline_config& cfg)
    : agent(space), cfg_(cfg) {
  if (cfg_.layers < 1)
    throw invalid_config_error("vacdb_agent: need at least one layer");
  if (!(cfg_.lambda > 0.0))
    throw invalid_config_error("vacdb_agent: lambda must be > 0");
  layers_.resize(static_cast<std::size_t>(cfg_.layers));
  for (layer& ly : layers_) {
    ly.cov = cfg_.lambda * Eigen::MatrixXd::Identity(space.dim(), space.dim());
    ly.theta_hat = param_vector::Zero(space.dim());
    ly.alive.assign(static_cast<std::size_t>(space.num_arms()), 1);
  }
}

const std::vector<char>& vacdb_agent::survivors(int layer_index) const {
  if (layer_index < 0 ||
      layer_index >= static_cast<int>(layers_.size()))
    throw invalid_config_error("vacdb_agent::survivors: layer out of range");
  return layers_[static_cast<std::size_t>(layer_index)].alive;
}

std::pair<int, int> vacdb_agent::do_select(long, const Eigen::MatrixXd& arms) {
  const long k = arms.rows();
  std::vector<int> cands(static_cast<std::size_t>(k));
  for (long a = 0; a < k; ++a) cands[static_cast<std::size_t>(a)] =
      static_cast<int>(a);

  auto pick_in = [&](const layer& ly, const std::vector<int>& c)
      -> std::pair<int, int> {
    Eigen::VectorXd r = arms * ly.theta_hat;
    Eigen::MatrixXd gram = uncertainty_gram(ly.cov, arms);
    int bx = c[0], by = c[0];
    double best = -std::numeric_limits<double>::infinity();
    for (int x : c)
      for (int y : c) {
        double s = r[x] + r[y] + cfg_.beta * pair_width(gram, x, y);
        if (s > best) {
          best = s;
          bx = x;
          by = y;
        }
      }
    return {bx, by};
  };

  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layer& ly = layers_[l];
    std::vector<int> survivors;
    for (int a : cands)
      if (ly.alive[static_cast<std::size_t>(a)]) survivors.push_back(a);
    if (!survivors.empty()) cands.swap(survivors);

    double resolution = std::ldexp(1.0, -static_cast<int>(l) - 1);
    Eigen::MatrixXd gram = uncertainty_gram(ly.cov, arms);
    double widest = 0.0;
    for (std::size_t i = 0; i < cands.size(); ++i)
      for (std::size_t j = i + 1; j < cands.size(); ++j)
        widest = std::max(widest, pair_width(gram, cands[i], cands[j]));

    if (cfg_.beta * widest > resolution) {
      pending_layer_ = static_cast<int>(l);
      return pick_in(ly, cands);
    }

    // layer resolved at this resolution: drop clearly beaten arms
    Eigen::VectorXd r = arms * ly.theta_hat;
    double top = -std::numeric_limits<double>::infinity();
    for (int a : cands) top = std::max(top, r[a]);
    std::vector<int> kept;
    for (int a : cands) {
      if (top - r[a] > 2.0 * resolution)
        ly.alive[static_cast<std::size_t>(a)] = 0;
      else
        kept.push_back(a);
    }
    if (!kept.empty()) cands.swap(kept);
  }

  pending_layer_ = static_cast<int>(layers_.size()) - 1;
  return pick_in(layers_.back(), cands);
}

void vacdb_agent::do_update(const dueling_record& rec,
                            const Eigen::MatrixXd& arms) {
  layer& ly = layers_[static_cast<std::size_t>(
      pending_layer_ < 0 ? 0 : pending_layer_)];
  ly.hist.append(rec);
  feature_vector diff =
      (arms.row(rec.arm1) - arms.row(rec.arm2)).transpose();
  ly.cov.noalias() += diff * diff.transpose();
  ly.theta_hat =
      mle_estimate(ly.hist, space(), cfg_.lambda, &ly.theta_hat).theta;
  pending_layer_ = -1;
}

}  // namespace duelbench
