#include "decdens/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "decdens/numerics.hpp"

namespace decdens {

void ClusterState::validate(const SampleData& data) const {
  const std::size_t n = assignments.size();
  if (n != data.size())
    throw std::invalid_argument("ClusterState: assignment count differs from sample size");
  const int k = n_clusters();
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const int z = assignments[i];
    if (z < 1 || z > k) throw std::invalid_argument("ClusterState: label out of range");
    ++counts[static_cast<std::size_t>(z - 1)];
    if (!(theta_of(z) >= data[i]))
      throw std::invalid_argument("ClusterState: support constraint theta >= x violated");
  }
  for (int c : counts)
    if (c == 0) throw std::invalid_argument("ClusterState: empty cluster retained");
  for (double th : thetas)
    if (!(th > 0.0) || !std::isfinite(th))
      throw std::invalid_argument("ClusterState: thetas must be finite and positive");
}

void SamplerConfig::validate() const {
  base.validate();
  if (!(alpha > 0.0)) throw std::invalid_argument("SamplerConfig: alpha must be positive");
  if (iterations < 1) throw std::invalid_argument("SamplerConfig: iterations must be >= 1");
  if (burn_in < 0 || burn_in >= iterations)
    throw std::invalid_argument("SamplerConfig: need 0 <= burn_in < iterations");
  if (!(mh_step > 0.0)) throw std::invalid_argument("SamplerConfig: mh_step must be positive");
  if (!(mh_target > 0.0 && mh_target < 1.0))
    throw std::invalid_argument("SamplerConfig: mh_target must lie in (0,1)");
  if (thin < 1) throw std::invalid_argument("SamplerConfig: thin must be >= 1");
}

std::vector<int> crp_sample(std::size_t n, double alpha, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("crp_sample: n must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("crp_sample: alpha must be positive");
  std::vector<int> z(n);
  std::vector<int> counts;
  z[0] = 1;
  counts.push_back(1);
  for (std::size_t i = 1; i < n; ++i) {
    double u = rng.uniform01() * (static_cast<double>(i) + alpha);
    if (u < alpha) {
      counts.push_back(1);
      z[i] = static_cast<int>(counts.size());
    } else {
      u -= alpha;
      std::size_t k = 0;
      double cum = 0.0;
      for (; k + 1 < counts.size(); ++k) {
        cum += counts[k];
        if (u < cum) break;
      }
      ++counts[k];
      z[i] = static_cast<int>(k) + 1;
    }
  }
  return z;
}

namespace {

constexpr long kAdaptBatchSweeps = 50;

struct ThetaDraw {
  double theta = 0.0;
  bool mh_proposed = false;
  bool mh_accepted = false;
};

// log of the unnormalized cluster posterior g0(theta) * theta^{-m} for A/B.
double mh_log_target(BaseVariant v, double theta, int m) {
  if (v == BaseVariant::A) return -theta - 1.0 / theta - m * std::log(theta);
  return (1.0 - m) * std::log(theta) - theta;  // variant B
}

ThetaDraw draw_cluster_theta(double current, int m, double cluster_max,
                             const BaseMeasureSpec& base, double mh_step, RngStream& rng,
                             double tau_d) {
  ThetaDraw out;
  switch (base.variant) {
    case BaseVariant::C:
      out.theta = pareto_inverse_cdf(base.alpha_bar + m, std::max(base.tau, cluster_max),
                                     rng.uniform01());
      return out;
    case BaseVariant::D:
      out.theta = pareto_inverse_cdf(base.alpha_bar + m, std::max(tau_d, cluster_max),
                                     rng.uniform01());
      return out;
    case BaseVariant::A:
    case BaseVariant::B:
      if (m == 1) {
        // Singleton posterior is the single-observation posterior; exact draw.
        out.theta = sample_theta_new(cluster_max, base, rng, tau_d);
        return out;
      }
      out.mh_proposed = true;
      out.theta = current;
      {
        const double proposal = current + mh_step * rng.normal();
        if (proposal >= cluster_max) {
          const double log_ratio = mh_log_target(base.variant, proposal, m) -
                                   mh_log_target(base.variant, current, m);
          if (std::log(rng.uniform01()) <= log_ratio) {
            out.theta = proposal;
            out.mh_accepted = true;
          }
        }
      }
      return out;
  }
  throw std::logic_error("draw_cluster_theta: unreachable");
}

std::vector<int> tally_counts(const ClusterState& state) {
  std::vector<int> counts(static_cast<std::size_t>(state.n_clusters()), 0);
  for (int z : state.assignments) ++counts[static_cast<std::size_t>(z - 1)];
  return counts;
}

// Detaches observation i; if its cluster empties, the last cluster is swapped
// into the freed label and the vectors shrink. Z_i becomes stale and must be
// overwritten by the caller.
void detach_observation(ClusterState& state, std::vector<int>& counts, int i) {
  const int label = state.assignments[static_cast<std::size_t>(i)];
  int& c = counts[static_cast<std::size_t>(label - 1)];
  --c;
  if (c == 0) {
    const int last = state.n_clusters();
    if (label != last) {
      state.thetas[static_cast<std::size_t>(label - 1)] =
          state.thetas[static_cast<std::size_t>(last - 1)];
      counts[static_cast<std::size_t>(label - 1)] = counts[static_cast<std::size_t>(last - 1)];
      for (int& z : state.assignments)
        if (z == last) z = label;
    }
    state.thetas.pop_back();
    counts.pop_back();
  }
}

// Unnormalized rebinding weights after i has been detached: one entry per
// surviving cluster, then the new-cluster entry alpha * marginal(x_i).
void rebind_weights(const ClusterState& state, const std::vector<int>& counts, double x,
                    double alpha, double marginal_xi, bool prior_only,
                    std::vector<double>& weights) {
  const std::size_t k = state.thetas.size();
  weights.resize(k + 1);
  if (prior_only) {
    for (std::size_t j = 0; j < k; ++j) weights[j] = counts[j];
    weights[k] = alpha;
    return;
  }
  for (std::size_t j = 0; j < k; ++j) {
    const double th = state.thetas[j];
    weights[j] = th >= x ? static_cast<double>(counts[j]) / th : 0.0;
  }
  weights[k] = alpha * marginal_xi;
}

std::size_t categorical(const std::vector<double>& weights, RngStream& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = rng.uniform01() * total;
  double cum = 0.0;
  for (std::size_t j = 0; j + 1 < weights.size(); ++j) {
    cum += weights[j];
    if (u < cum) return j;
  }
  return weights.size() - 1;
}

}  // namespace

double update_theta_cluster(int label, ClusterState& state, const SampleData& data,
                            const BaseMeasureSpec& base, double mh_step, RngStream& rng,
                            double tau_d) {
  int m = 0;
  double cluster_max = 0.0;
  for (std::size_t i = 0; i < state.assignments.size(); ++i) {
    if (state.assignments[i] == label) {
      ++m;
      cluster_max = std::max(cluster_max, data[i]);
    }
  }
  if (m == 0) throw std::invalid_argument("update_theta_cluster: empty cluster");
  const ThetaDraw d = draw_cluster_theta(state.theta_of(label), m, cluster_max, base, mh_step,
                                         rng, tau_d);
  state.thetas[static_cast<std::size_t>(label - 1)] = d.theta;
  return d.theta;
}

std::vector<double> assignment_probabilities(int i, const ClusterState& state,
                                             const SampleData& data, const BaseMeasureSpec& base,
                                             double alpha, double marginal_xi) {
  ClusterState scratch = state;
  std::vector<int> counts = tally_counts(scratch);
  detach_observation(scratch, counts, i);
  std::vector<double> weights;
  rebind_weights(scratch, counts, data[static_cast<std::size_t>(i)], alpha, marginal_xi, false,
                 weights);
  (void)base;
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;
  return weights;
}

void update_assignment(int i, ClusterState& state, const SampleData& data,
                       const BaseMeasureSpec& base, double alpha, RngStream& rng,
                       double marginal_xi, double tau_d) {
  std::vector<int> counts = tally_counts(state);
  detach_observation(state, counts, i);
  std::vector<double> weights;
  const double x = data[static_cast<std::size_t>(i)];
  rebind_weights(state, counts, x, alpha, marginal_xi, false, weights);
  const std::size_t pick = categorical(weights, rng);
  if (pick == state.thetas.size()) {
    state.thetas.push_back(sample_theta_new(x, base, rng, tau_d));
    state.assignments[static_cast<std::size_t>(i)] = state.n_clusters();
  } else {
    state.assignments[static_cast<std::size_t>(i)] = static_cast<int>(pick) + 1;
  }
}

GibbsSampler::GibbsSampler(const SampleData& data, const SamplerConfig& config)
    : data_(data), config_(config), rng_(config.seed), mh_step_(config.mh_step) {
  config_.validate();
  init_state();
  marginals_.resize(data_.size());
  if (config_.base.variant != BaseVariant::D) {
    // Needed once per observation; variant A evaluates quadrature here.
    for (std::size_t i = 0; i < data_.size(); ++i)
      marginals_[i] = marginal_likelihood(data_[i], config_.base);
  }
}

GibbsSampler::GibbsSampler(const SampleData& data, const SamplerConfig& config, PriorOnlyTag)
    : data_(data), config_(config), rng_(config.seed), mh_step_(config.mh_step),
      prior_only_(true) {
  config_.validate();
  init_state();
  marginals_.assign(data_.size(), 1.0);
}

void GibbsSampler::init_state() {
  state_.assignments.assign(data_.size(), 1);
  state_.thetas.assign(1, data_.max() * 1.05);
  counts_.assign(1, static_cast<int>(data_.size()));
  tau_ = config_.base.variant == BaseVariant::D ? state_.thetas[0] / 2.0 : 0.0;
}

void GibbsSampler::refresh_counts() { counts_ = tally_counts(state_); }

void GibbsSampler::warm_start(const ClusterState& s) {
  if (s.assignments.size() != data_.size())
    throw std::invalid_argument("warm_start: state size differs from sample size");
  state_ = s;
  refresh_counts();
  const std::size_t k = state_.thetas.size();
  std::vector<double> cluster_max(k, 0.0);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    auto& m = cluster_max[static_cast<std::size_t>(state_.assignments[i] - 1)];
    m = std::max(m, data_[i]);
  }
  for (std::size_t j = 0; j < k; ++j)
    if (state_.thetas[j] < cluster_max[j]) state_.thetas[j] = cluster_max[j] * 1.05;
  if (config_.base.variant == BaseVariant::D)
    tau_ = std::min(tau_ > 0.0 ? tau_ : state_.thetas[0] / 2.0,
                    *std::min_element(state_.thetas.begin(), state_.thetas.end()) / 2.0);
}

void GibbsSampler::update_thetas() {
  const std::size_t k = state_.thetas.size();
  std::vector<double> cluster_max(k, 0.0);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    auto& m = cluster_max[static_cast<std::size_t>(state_.assignments[i] - 1)];
    m = std::max(m, data_[i]);
  }
  for (std::size_t j = 0; j < k; ++j) {
    const ThetaDraw d = draw_cluster_theta(state_.thetas[j], counts_[j], cluster_max[j],
                                           config_.base, mh_step_, rng_, tau_);
    state_.thetas[j] = d.theta;
    if (d.mh_proposed) {
      if (adapting_) {
        ++batch_proposed_;
        batch_accepted_ += d.mh_accepted ? 1 : 0;
      } else {
        ++post_proposed_;
        post_accepted_ += d.mh_accepted ? 1 : 0;
      }
    }
  }
}

void GibbsSampler::update_assignments() {
  std::vector<double> weights;
  const int n = static_cast<int>(data_.size());
  for (int i = 0; i < n; ++i) {
    detach_observation(state_, counts_, i);
    const double x = data_[static_cast<std::size_t>(i)];
    const double marg = config_.base.variant == BaseVariant::D
                            ? marginal_likelihood_given_tau(x, config_.base, tau_)
                            : marginals_[static_cast<std::size_t>(i)];
    rebind_weights(state_, counts_, x, config_.alpha, marg, prior_only_, weights);
    const std::size_t pick = categorical(weights, rng_);
    if (pick == state_.thetas.size()) {
      state_.thetas.push_back(prior_only_ ? 1.0 : sample_theta_new(x, config_.base, rng_, tau_));
      counts_.push_back(1);
      state_.assignments[static_cast<std::size_t>(i)] = state_.n_clusters();
    } else {
      ++counts_[pick];
      state_.assignments[static_cast<std::size_t>(i)] = static_cast<int>(pick) + 1;
    }
  }
}

void GibbsSampler::sweep() {
  if (!prior_only_) {
    update_thetas();
    if (config_.base.variant == BaseVariant::D)
      tau_ = update_tau_variant_d(state_.thetas, config_.base, rng_);
  }
  update_assignments();
  ++sweeps_done_;
}

void GibbsSampler::finish_burn_in_batch() {
  if (batch_proposed_ > 0) {
    const double rate =
        static_cast<double>(batch_accepted_) / static_cast<double>(batch_proposed_);
    ++batches_done_;
    mh_step_ *= std::exp((rate - config_.mh_target) / std::sqrt(static_cast<double>(batches_done_)));
    mh_step_ = std::clamp(mh_step_, 1e-8, 1e8);
  }
  batch_proposed_ = batch_accepted_ = 0;
}

PosteriorDraw GibbsSampler::current_draw() const {
  MixtureMeasure g;
  g.atoms = state_.thetas;
  g.weights.resize(counts_.size());
  const double n = static_cast<double>(data_.size());
  for (std::size_t j = 0; j < counts_.size(); ++j)
    g.weights[j] = static_cast<double>(counts_[j]) / n;
  PosteriorDraw d;
  d.density = mixture_to_step(g);
  d.n_clusters = state_.n_clusters();
  if (config_.base.variant == BaseVariant::D) d.tau_draw = tau_;
  return d;
}

RunResult GibbsSampler::run() {
  RunResult out;
  const long keep = (config_.iterations - config_.burn_in) / config_.thin;
  out.draws.reserve(static_cast<std::size_t>(std::max(keep, 0L)));
  adapting_ = config_.adapt_mh && config_.burn_in > 0 && !prior_only_;
  batch_proposed_ = batch_accepted_ = 0;
  batches_done_ = 0;
  post_proposed_ = post_accepted_ = 0;
  for (long s = 1; s <= config_.iterations; ++s) {
    sweep();
    if (adapting_ && s % kAdaptBatchSweeps == 0) finish_burn_in_batch();
    if (s == config_.burn_in) {
      adapting_ = false;
      post_proposed_ = post_accepted_ = 0;
    }
    if (s > config_.burn_in && (s - config_.burn_in) % config_.thin == 0)
      out.draws.push_back(current_draw());
  }
  out.acceptance_rate = post_proposed_ > 0
                            ? static_cast<double>(post_accepted_) /
                                  static_cast<double>(post_proposed_)
                            : 1.0;
  return out;
}

std::vector<double> draw_values_at_zero(const std::vector<PosteriorDraw>& draws) {
  std::vector<double> v(draws.size());
  for (std::size_t j = 0; j < draws.size(); ++j) v[j] = draws[j].density.at_zero();
  return v;
}

ChainSummary summarize_chain(const std::vector<PosteriorDraw>& draws, const EvalGrid& grid,
                             double level) {
  if (draws.size() < 2) throw std::invalid_argument("summarize_chain: need at least 2 draws");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("summarize_chain: level must lie in (0,1)");
  grid.validate();

  const std::size_t m = grid.size();
  const std::size_t j_count = draws.size();
  std::vector<std::vector<double>> values(m, std::vector<double>(j_count));
  for (std::size_t j = 0; j < j_count; ++j) {
    const StepDensity& f = draws[j].density;
    if (!(f.at_zero() > 0.0)) throw NumericError("summarize_chain: degenerate draw with f(0) = 0");
    std::size_t p = 0;
    const std::size_t k = f.breakpoints.size();
    for (std::size_t g = 0; g < m; ++g) {
      const double x = grid.points[g];
      while (p < k && f.breakpoints[p] < x) ++p;
      values[g][j] = p < k ? f.heights[p] : 0.0;
    }
  }

  const double p_lo = (1.0 - level) / 2.0;
  const double p_hi = 1.0 - p_lo;
  ChainSummary s;
  s.grid = grid;
  s.level = level;
  s.mean.resize(m);
  s.median.resize(m);
  s.lo.resize(m);
  s.hi.resize(m);
  s.h0_mean.resize(m);
  s.h0_median.resize(m);
  s.h0_lo.resize(m);
  s.h0_hi.resize(m);

  std::vector<double> buf(j_count), h0(j_count);
  for (std::size_t g = 0; g < m; ++g) {
    double sum = 0.0, h0_sum = 0.0;
    for (std::size_t j = 0; j < j_count; ++j) {
      const double v = values[g][j];
      sum += v;
      h0[j] = 1.0 - v / values[0][j];
      h0_sum += h0[j];
      buf[j] = v;
    }
    s.mean[g] = sum / static_cast<double>(j_count);
    s.h0_mean[g] = h0_sum / static_cast<double>(j_count);
    std::sort(buf.begin(), buf.end());
    s.median[g] = quantile_sorted(buf, 0.5);
    s.lo[g] = quantile_sorted(buf, p_lo);
    s.hi[g] = quantile_sorted(buf, p_hi);
    std::sort(h0.begin(), h0.end());
    s.h0_median[g] = quantile_sorted(h0, 0.5);
    s.h0_lo[g] = quantile_sorted(h0, p_lo);
    s.h0_hi[g] = quantile_sorted(h0, p_hi);
  }
  return s;
}

}  // namespace decdens
