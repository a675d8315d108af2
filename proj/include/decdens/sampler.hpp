#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "decdens/base_measure.hpp"
#include "decdens/core.hpp"
#include "decdens/rng.hpp"

namespace decdens {

/// CRP partition plus per-cluster uniform scales: the Gibbs sampler's state.
/// Labels are contiguous 1..K and thetas[k-1] is the scale of cluster k.
struct ClusterState {
  std::vector<int> assignments;
  std::vector<double> thetas;

  int n_clusters() const { return static_cast<int>(thetas.size()); }
  double theta_of(int label) const { return thetas[static_cast<std::size_t>(label - 1)]; }

  /// Checks label contiguity, no empty clusters, and the support constraint
  /// thetas[Z_i] >= X_i. Throws std::invalid_argument on violation.
  void validate(const SampleData& data) const;
};

struct SamplerConfig {
  double alpha = 1.0;  // DP concentration
  BaseMeasureSpec base;
  long iterations = 50000;
  long burn_in = 25000;
  std::uint64_t seed = 1;
  double mh_step = 0.5;      // random-walk scale for variants A/B
  double mh_target = 0.3;    // acceptance target for burn-in adaptation
  bool adapt_mh = true;      // tune mh_step during burn-in, frozen afterwards
  long thin = 1;

  void validate() const;
};

/// One retained iterate: the plug-in density (1/n) sum_i psi_x(Theta_{Z_i}).
struct PosteriorDraw {
  StepDensity density;
  int n_clusters = 0;
  std::optional<double> tau_draw;  // variant D only
};

struct RunResult {
  std::vector<PosteriorDraw> draws;
  double acceptance_rate = 1.0;  // post-burn-in MH acceptance; 1 when no MH steps ran
};

/// Pointwise posterior summaries over a grid, for f and for the transformed
/// H0(x) = 1 - f(x)/f(0).
struct ChainSummary {
  EvalGrid grid;
  std::vector<double> mean, median, lo, hi;
  std::vector<double> h0_mean, h0_median, h0_lo, h0_hi;
  double acceptance_rate = 1.0;
  double level = 0.95;
};

/// Draws a CRP(alpha) partition of {1..n}: contiguous labels, Z_1 = 1.
std::vector<int> crp_sample(std::size_t n, double alpha, RngStream& rng);

/// Resamples the scale of cluster `label` from its conditional posterior
/// g0(theta) * theta^{-m_k} * 1{theta >= M_k}. Conjugate Pareto draw for C/D;
/// exact single-observation draw for singleton clusters under A/B; otherwise
/// one random-walk Metropolis-Hastings step. Returns the new theta.
double update_theta_cluster(int label, ClusterState& state, const SampleData& data,
                            const BaseMeasureSpec& base, double mh_step, RngStream& rng,
                            double tau_d = 0.0);

/// Rebinding probabilities for observation i given everything else: one entry
/// per cluster surviving the removal of i (label order), then the new-cluster
/// entry. `marginal_xi` is the precomputed marginal likelihood of X_i.
std::vector<double> assignment_probabilities(int i, const ClusterState& state,
                                             const SampleData& data, const BaseMeasureSpec& base,
                                             double alpha, double marginal_xi);

/// Resamples Z_i in place, removing the old cluster if it empties and drawing
/// a fresh theta when a new cluster is created.
void update_assignment(int i, ClusterState& state, const SampleData& data,
                       const BaseMeasureSpec& base, double alpha, RngStream& rng,
                       double marginal_xi, double tau_d = 0.0);

class GibbsSampler;
GibbsSampler make_prior_only_sampler(const SampleData& data, const SamplerConfig& config);

/// CRP-based Gibbs sampler for the Dirichlet process mixture of uniforms.
/// One sweep updates every cluster scale, then (variant D) the latent tau,
/// then every assignment in index order.
class GibbsSampler {
 public:
  GibbsSampler(const SampleData& data, const SamplerConfig& config);

  void sweep();
  RunResult run();

  const ClusterState& state() const { return state_; }
  const SampleData& data() const { return data_; }
  PosteriorDraw current_draw() const;
  double current_tau() const { return tau_; }
  double current_mh_step() const { return mh_step_; }

  /// Adopts a previous chain's final state for a (possibly new) dataset of
  /// the same size. Scales violating the support constraint are raised to
  /// 1.05 times the cluster maximum.
  void warm_start(const ClusterState& s);

  friend GibbsSampler make_prior_only_sampler(const SampleData& data, const SamplerConfig& config);

 private:
  struct PriorOnlyTag {};
  GibbsSampler(const SampleData& data, const SamplerConfig& config, PriorOnlyTag);

  void init_state();
  void refresh_counts();
  void update_thetas();
  void update_assignments();
  void remove_observation(int i);
  void finish_burn_in_batch();

  SampleData data_;
  SamplerConfig config_;
  RngStream rng_;
  ClusterState state_;
  std::vector<int> counts_;        // cluster sizes, index label-1
  std::vector<double> marginals_;  // per observation (A/B/C); D derives from tau_
  double tau_ = 0.0;
  double mh_step_;
  bool prior_only_ = false;
  bool adapting_ = false;
  long sweeps_done_ = 0;
  long batch_proposed_ = 0, batch_accepted_ = 0;
  int batches_done_ = 0;
  long post_proposed_ = 0, post_accepted_ = 0;
};

#ifdef DECDENS_PRIOR_HOOK
/// Test hook: a sampler whose assignment updates use the CRP prior weights
/// only (likelihood term disabled). Available only in builds defining
/// DECDENS_PRIOR_HOOK.
inline GibbsSampler make_prior_only_sampler(const SampleData& data, const SamplerConfig& config) {
  return GibbsSampler(data, config, GibbsSampler::PriorOnlyTag{});
}
#endif

/// Pointwise mean/median/quantile summaries of the retained draws.
/// `level` is the credible level (0.95 gives the 2.5% and 97.5% quantiles).
ChainSummary summarize_chain(const std::vector<PosteriorDraw>& draws, const EvalGrid& grid,
                             double level);

std::vector<double> draw_values_at_zero(const std::vector<PosteriorDraw>& draws);

}  // namespace decdens
