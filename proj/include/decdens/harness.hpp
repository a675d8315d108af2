#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "decdens/core.hpp"
#include "decdens/estimators.hpp"
#include "decdens/rng.hpp"
#include "decdens/sampler.hpp"

namespace decdens {

enum class TrueDist { Exponential, HalfNormal };

std::string to_string(TrueDist d);
double true_f0_at_zero(TrueDist d);

/// Exponential via inverse CDF, half-normal as |Z|.
SampleData generate_sample(TrueDist dist, std::size_t n, RngStream& rng);

struct StudyConfig {
  TrueDist distribution = TrueDist::Exponential;
  std::vector<std::size_t> sample_sizes;
  int replicates = 50;
  std::string estimators = "PSAH";  // subset of PSAHB, canonical order
  SamplerConfig sampler;
  std::uint64_t master_seed = 1;
  EvalGrid grid;                 // empty: derived from the data where needed
  double level = 0.95;
  long rate_warmup = 5000;       // warm-up chain length per sample size
  int threads = 0;               // 0: hardware concurrency

  void validate() const;
};

struct ComparisonRow {
  std::size_t n = 0;
  char estimator = '?';
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;

  const ComparisonRow& row(std::size_t n, char estimator) const;
  std::string to_csv() const;
  std::string to_text() const;
};

/// Bias/variance/MSE of the requested zero estimators over fresh replicates
/// (population variance, so mse = bias^2 + variance holds exactly).
ComparisonTable run_comparison(const StudyConfig& config);

struct RateRow {
  BaseVariant variant = BaseVariant::A;
  std::size_t n = 0;
  double rmse = 0.0;
};

struct RateSlopes {
  BaseVariant variant = BaseVariant::A;
  double full = 0.0;  // least-squares slope over every sample size
  double tail = 0.0;  // slope over the final (up to) 4 sample sizes
};

struct RateStudyResult {
  std::vector<RateRow> rows;
  std::vector<RateSlopes> slopes;

  std::string to_csv() const;
  std::string slopes_json() const;
};

/// Empirical contraction-rate study: per variant and sample size, a warm-up
/// chain is run once and its final state (and tuned step) seeds every
/// replicate chain; the RMSE of the per-replicate posterior median at zero is
/// regressed on log n.
RateStudyResult run_rate_study(const StudyConfig& config,
                               const std::vector<BaseVariant>& variants);

struct MarginalZeroCell {
  std::size_t n = 0;
  std::vector<double> draws;  // posterior draws of f(0)
  double mean = 0.0;
  double median = 0.0;
};

struct MarginalZeroResult {
  std::vector<MarginalZeroCell> cells;
};

/// Marginal posterior of f(0): one simulated dataset and one chain per n.
MarginalZeroResult run_marginal_zero_study(const StudyConfig& config);

struct DataAnalysisResult {
  ChainSummary summary;
  double acceptance_rate = 1.0;
  std::size_t n_used = 0;
  std::size_t n_draws = 0;
  double mean_clusters = 0.0;
  int min_clusters = 0;
  int max_clusters = 0;
  double mean_tau = 0.0;  // variant D; 0 otherwise
};

/// Fits one chain to a data file (optionally truncating at a cutoff) and
/// summarizes f and H0 bands on the grid.
DataAnalysisResult run_data_analysis(const std::string& path, const StudyConfig& config,
                                     std::optional<double> truncate_at = std::nullopt);

/// Same, starting from an in-memory sample.
DataAnalysisResult analyze_sample(const SampleData& data, const StudyConfig& config);

/// Runs fn(0..count-1) across `threads` workers (0 = hardware concurrency).
/// The first exception, if any, is rethrown after all workers finish.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

/// CSV serializations (17 significant digits).
std::string summary_csv(const ChainSummary& s, bool h0);
std::string draws_csv(const std::vector<double>& draws);

}  // namespace decdens
