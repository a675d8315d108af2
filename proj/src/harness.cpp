#include "decdens/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "decdens/io.hpp"
#include "decdens/numerics.hpp"

namespace decdens {

namespace {
constexpr std::uint64_t kCompareTag = 0xC0;
constexpr std::uint64_t kRateTag = 0xA7E;
constexpr std::uint64_t kZeroTag = 0x2E90;
}  // namespace

std::string to_string(TrueDist d) {
  return d == TrueDist::Exponential ? "exponential" : "half_normal";
}

double true_f0_at_zero(TrueDist d) {
  return d == TrueDist::Exponential ? 1.0 : std::sqrt(2.0 / std::numbers::pi);
}

SampleData generate_sample(TrueDist dist, std::size_t n, RngStream& rng) {
  std::vector<double> v(n);
  if (dist == TrueDist::Exponential) {
    for (auto& x : v) x = rng.exponential();
  } else {
    for (auto& x : v) x = std::abs(rng.normal());
  }
  return SampleData(std::move(v));
}

void StudyConfig::validate() const {
  if (sample_sizes.empty()) throw std::invalid_argument("StudyConfig: sample_sizes empty");
  if (replicates < 1) throw std::invalid_argument("StudyConfig: replicates must be >= 1");
  if (estimators.empty()) throw std::invalid_argument("StudyConfig: estimators empty");
  for (char c : estimators)
    if (std::string("PSAHB").find(c) == std::string::npos)
      throw std::invalid_argument(std::string("StudyConfig: unknown estimator '") + c + "'");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("StudyConfig: level in (0,1)");
  if (rate_warmup < 1) throw std::invalid_argument("StudyConfig: rate_warmup must be >= 1");
  sampler.validate();
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  unsigned n_threads = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(count));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

const ComparisonRow& ComparisonTable::row(std::size_t n, char estimator) const {
  for (const auto& r : rows)
    if (r.n == n && r.estimator == estimator) return r;
  throw std::invalid_argument("ComparisonTable: no such row");
}

std::string ComparisonTable::to_csv() const {
  std::string out = "n,estimator,bias,variance,mse\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n);
    out += ',';
    out += r.estimator;
    out += ',' + format_double(r.bias) + ',' + format_double(r.variance) + ',' +
           format_double(r.mse) + '\n';
  }
  return out;
}

std::string ComparisonTable::to_text() const {
  std::ostringstream os;
  char buf[64];
  os << "     n  est        bias    variance         mse\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%6zu    %c  %10.4f  %10.4f  %10.4f\n", r.n, r.estimator,
                  r.bias, r.variance, r.mse);
    os << buf;
  }
  return os.str();
}

ComparisonTable run_comparison(const StudyConfig& config) {
  config.validate();
  const double truth = true_f0_at_zero(config.distribution);
  const std::size_t reps = static_cast<std::size_t>(config.replicates);
  const bool want_bayes = config.estimators.find('B') != std::string::npos;

  ComparisonTable table;
  for (std::size_t n : config.sample_sizes) {
    // slot per replicate, written independently, aggregated in index order
    std::vector<ZeroEstimates> results(reps);
    parallel_for(reps, config.threads, [&](std::size_t r) {
      const std::uint64_t seed =
          derive_seed(config.master_seed, {kCompareTag, static_cast<std::uint64_t>(n), r});
      RngStream rng(seed);
      try {
        const SampleData data = generate_sample(config.distribution, n, rng);
        std::optional<SamplerConfig> bayes;
        if (want_bayes) {
          bayes = config.sampler;
          bayes->seed = derive_seed(config.master_seed,
                                    {kCompareTag + 1, static_cast<std::uint64_t>(n), r});
        }
        results[r] = estimate_all_zero(data, bayes);
      } catch (const std::exception& e) {
        throw NumericError("replicate failed (n=" + std::to_string(n) +
                           ", replicate=" + std::to_string(r) +
                           ", seed=" + std::to_string(seed) + "): " + e.what());
      }
    });

    for (char est : std::string("PSAHB")) {
      if (config.estimators.find(est) == std::string::npos) continue;
      std::vector<double> values(reps);
      for (std::size_t r = 0; r < reps; ++r) {
        const ZeroEstimates& z = results[r];
        switch (est) {
          case 'P': values[r] = z.penalized0; break;
          case 'S': values[r] = z.simple0; break;
          case 'A': values[r] = z.adaptive0; break;
          case 'H': values[r] = z.histogram0; break;
          case 'B': values[r] = z.bayes0.value(); break;
        }
      }
      ComparisonRow row;
      row.n = n;
      row.estimator = est;
      row.bias = mean_of(values) - truth;
      row.variance = variance_of(values);
      double mse = 0.0;
      for (double v : values) mse += (v - truth) * (v - truth);
      row.mse = mse / static_cast<double>(reps);
      table.rows.push_back(row);
    }
  }
  return table;
}

std::string RateStudyResult::to_csv() const {
  std::string out = "variant,n,rmse\n";
  for (const auto& r : rows)
    out += to_string(r.variant) + "," + std::to_string(r.n) + "," + format_double(r.rmse) + "\n";
  return out;
}

std::string RateStudyResult::slopes_json() const {
  std::string out = "{\n";
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    out += "  \"" + to_string(slopes[i].variant) + "\": {\"full\": " + format_double(slopes[i].full) +
           ", \"tail\": " + format_double(slopes[i].tail) + "}";
    out += i + 1 < slopes.size() ? ",\n" : "\n";
  }
  out += "}\n";
  return out;
}

RateStudyResult run_rate_study(const StudyConfig& config,
                               const std::vector<BaseVariant>& variants) {
  config.validate();
  if (config.sample_sizes.size() < 3)
    throw std::invalid_argument("run_rate_study: need at least 3 sample sizes");
  const double truth = true_f0_at_zero(config.distribution);
  const std::size_t reps = static_cast<std::size_t>(config.replicates);

  RateStudyResult out;
  for (BaseVariant variant : variants) {
    const std::uint64_t vtag = static_cast<std::uint64_t>(variant);
    std::vector<double> rmses;
    for (std::size_t n : config.sample_sizes) {
      // Warm-up chain: tunes the MH step and provides the initial state
      // shared by every replicate chain at this sample size.
      SamplerConfig warm_cfg = config.sampler;
      warm_cfg.base.variant = variant;
      warm_cfg.iterations = config.rate_warmup;
      warm_cfg.burn_in = std::max(config.rate_warmup - 1, 0L);
      warm_cfg.thin = 1;
      warm_cfg.seed = derive_seed(config.master_seed, {kRateTag, vtag, n, 0});
      RngStream warm_rng(derive_seed(config.master_seed, {kRateTag + 1, vtag, n, 0}));
      const SampleData warm_data = generate_sample(config.distribution, n, warm_rng);
      GibbsSampler warm(warm_data, warm_cfg);
      warm.run();
      const ClusterState warm_state = warm.state();
      const double tuned_step = warm.current_mh_step();

      std::vector<double> medians(reps);
      parallel_for(reps, config.threads, [&](std::size_t r) {
        const std::uint64_t seed =
            derive_seed(config.master_seed, {kRateTag, vtag, n, r + 1});
        try {
          RngStream rng(derive_seed(config.master_seed, {kRateTag + 1, vtag, n, r + 1}));
          const SampleData data = generate_sample(config.distribution, n, rng);
          SamplerConfig cfg = warm_cfg;
          cfg.iterations = config.sampler.iterations;
          cfg.burn_in = 0;
          cfg.adapt_mh = false;
          cfg.mh_step = tuned_step;
          cfg.seed = seed;
          GibbsSampler sampler(data, cfg);
          sampler.warm_start(warm_state);
          const RunResult run = sampler.run();
          std::vector<double> at_zero = draw_values_at_zero(run.draws);
          std::sort(at_zero.begin(), at_zero.end());
          medians[r] = quantile_sorted(at_zero, 0.5);
        } catch (const std::exception& e) {
          throw NumericError("rate replicate failed (variant=" + to_string(variant) +
                             ", n=" + std::to_string(n) + ", replicate=" + std::to_string(r) +
                             ", seed=" + std::to_string(seed) + "): " + e.what());
        }
      });

      double sq = 0.0;
      for (double m : medians) sq += (m - truth) * (m - truth);
      const double rmse = std::sqrt(sq / static_cast<double>(reps));
      out.rows.push_back({variant, n, rmse});
      rmses.push_back(rmse);
    }

    std::vector<double> ns(config.sample_sizes.size());
    for (std::size_t i = 0; i < ns.size(); ++i)
      ns[i] = static_cast<double>(config.sample_sizes[i]);
    RateSlopes s;
    s.variant = variant;
    s.full = fit_loglog_slope(ns, rmses);
    const std::size_t tail = std::min<std::size_t>(4, ns.size());
    s.tail = fit_loglog_slope(std::span(ns).last(tail), std::span(rmses).last(tail));
    out.slopes.push_back(s);
  }
  return out;
}

MarginalZeroResult run_marginal_zero_study(const StudyConfig& config) {
  config.validate();
  MarginalZeroResult out;
  out.cells.resize(config.sample_sizes.size());
  parallel_for(config.sample_sizes.size(), config.threads, [&](std::size_t i) {
    const std::size_t n = config.sample_sizes[i];
    RngStream rng(derive_seed(config.master_seed, {kZeroTag, n, 0}));
    const SampleData data = generate_sample(config.distribution, n, rng);
    SamplerConfig cfg = config.sampler;
    cfg.seed = derive_seed(config.master_seed, {kZeroTag, n, 1});
    GibbsSampler sampler(data, cfg);
    const RunResult run = sampler.run();
    MarginalZeroCell cell;
    cell.n = n;
    cell.draws = draw_values_at_zero(run.draws);
    cell.mean = mean_of(cell.draws);
    std::vector<double> sorted = cell.draws;
    std::sort(sorted.begin(), sorted.end());
    cell.median = quantile_sorted(sorted, 0.5);
    out.cells[i] = std::move(cell);
  });
  return out;
}

DataAnalysisResult analyze_sample(const SampleData& data, const StudyConfig& config) {
  config.sampler.validate();
  GibbsSampler sampler(data, config.sampler);
  const RunResult run = sampler.run();

  EvalGrid grid = config.grid;
  if (grid.points.empty()) grid = EvalGrid::regular(data.quantile(0.999), 200);

  DataAnalysisResult out;
  out.summary = summarize_chain(run.draws, grid, config.level);
  out.summary.acceptance_rate = run.acceptance_rate;
  out.acceptance_rate = run.acceptance_rate;
  out.n_used = data.size();
  out.n_draws = run.draws.size();
  int lo = std::numeric_limits<int>::max(), hi = 0;
  double sum = 0.0, tau_sum = 0.0;
  for (const auto& d : run.draws) {
    lo = std::min(lo, d.n_clusters);
    hi = std::max(hi, d.n_clusters);
    sum += d.n_clusters;
    if (d.tau_draw) tau_sum += *d.tau_draw;
  }
  out.min_clusters = lo;
  out.max_clusters = hi;
  out.mean_clusters = sum / static_cast<double>(run.draws.size());
  if (config.sampler.base.variant == BaseVariant::D)
    out.mean_tau = tau_sum / static_cast<double>(run.draws.size());
  return out;
}

DataAnalysisResult run_data_analysis(const std::string& path, const StudyConfig& config,
                                     std::optional<double> truncate_at) {
  SampleData data = read_sample_file(path);
  if (truncate_at) {
    std::vector<double> kept;
    for (double v : data.values())
      if (v <= *truncate_at) kept.push_back(v);
    if (kept.empty())
      throw DataError(path + ": no observations at or below the truncation cutoff " +
                      format_double(*truncate_at));
    data = SampleData(std::move(kept));
  }
  return analyze_sample(data, config);
}

std::string summary_csv(const ChainSummary& s, bool h0) {
  std::string out = "x,mean,median,lo,hi\n";
  for (std::size_t g = 0; g < s.grid.size(); ++g) {
    out += format_double(s.grid.points[g]) + ',';
    if (h0) {
      out += format_double(s.h0_mean[g]) + ',' + format_double(s.h0_median[g]) + ',' +
             format_double(s.h0_lo[g]) + ',' + format_double(s.h0_hi[g]) + '\n';
    } else {
      out += format_double(s.mean[g]) + ',' + format_double(s.median[g]) + ',' +
             format_double(s.lo[g]) + ',' + format_double(s.hi[g]) + '\n';
    }
  }
  return out;
}

std::string draws_csv(const std::vector<double>& draws) {
  std::string out = "draw\n";
  for (double d : draws) out += format_double(d) + '\n';
  return out;
}

}  // namespace decdens
