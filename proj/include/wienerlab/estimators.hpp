#pragma once

// Monte Carlo estimators with batch-means error bars. Every sample index owns
// its own counter-based stream, so results do not depend on the thread count.

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "wienerlab/functionals.hpp"
#include "wienerlab/paths.hpp"

namespace wlab {

struct McConfig {
  std::size_t n_samples = 100000;
  std::size_t n_batches = 20;
  std::uint64_t seed = 1;
  std::size_t n_inner = 0;
  unsigned threads = 1;

  void validate() const;
  std::size_t batch_size() const { return n_samples / n_batches; }
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

// Purpose tags mixed into the base seed.
enum class StreamTag : std::uint64_t {
  coupled = 1,
  nested = 2,
  plain = 3,
  malliavin = 4,
  bsde_paths = 5,
};

RngStream sample_stream(const McConfig& cfg, StreamTag tag, std::uint64_t index);

// Batch means of several statistics, rows = batches.
class BatchMeans {
 public:
  BatchMeans(std::size_t batches, std::size_t stats, std::size_t n_per_batch)
      : batches_(batches), stats_(stats), n_per_batch_(n_per_batch),
        data_(batches * stats, 0.0) {}

  std::size_t batches() const noexcept { return batches_; }
  std::size_t stats() const noexcept { return stats_; }
  std::size_t n_used() const noexcept { return batches_ * n_per_batch_; }

  double& at(std::size_t batch, std::size_t stat) { return data_[batch * stats_ + stat]; }
  double at(std::size_t batch, std::size_t stat) const { return data_[batch * stats_ + stat]; }
  std::vector<double> column(std::size_t stat) const;

  // Mean of the batch means with standard error sd / sqrt(B).
  Estimate mean(std::size_t stat) const;
  // (mean)^(1/p), error propagated by the delta method.
  Estimate root(std::size_t stat, double p) const;

 private:
  std::size_t batches_, stats_, n_per_batch_;
  std::vector<double> data_;
};

Estimate power_root(const Estimate& moment, double p);

// Runs `make_worker()` once per thread; the worker is called as
// worker(sample_index, accum) and adds its statistics into accum. Batches are
// folded in index order.
template <class MakeWorker>
BatchMeans run_batches(const McConfig& cfg, std::size_t n_stats, MakeWorker make_worker) {
  cfg.validate();
  const std::size_t per = cfg.batch_size();
  BatchMeans result(cfg.n_batches, n_stats, per);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto body = [&]() {
    try {
      auto worker = make_worker();
      std::vector<double> accum(n_stats);
      for (;;) {
        const std::size_t b = next.fetch_add(1);
        if (b >= cfg.n_batches) break;
        std::fill(accum.begin(), accum.end(), 0.0);
        const std::uint64_t first = static_cast<std::uint64_t>(b) * per;
        for (std::size_t i = 0; i < per; ++i) worker(first + i, std::span<double>(accum));
        for (std::size_t s = 0; s < n_stats; ++s) {
          const double v = accum[s] / static_cast<double>(per);
          if (!std::isfinite(v))
            fail(ErrorCode::non_finite,
                 "non-finite batch statistic " + std::to_string(s) + " in batch " +
                     std::to_string(b));
          result.at(b, s) = v;
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(cfg.n_batches);
    }
  };

  const unsigned threads =
      std::max(1u, std::min<unsigned>(cfg.threads == 0 ? std::thread::hardware_concurrency()
                                                       : cfg.threads,
                                      static_cast<unsigned>(cfg.n_batches)));
  if (threads == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return result;
}

// --- estimators --------------------------------------------------------------

// ||xi - xi^phi||_p
Estimate p_norm_diff(const WienerFunctional& xi, const RotationProfile& phi, double p,
                     const McConfig& cfg);

// Table of E|xi - xi^phi_j|^{p_i} on one shared sample set. Statistic index is
// j * ps.size() + i.
BatchMeans diff_moments(const WienerFunctional& xi, std::span<const RotationProfile> profiles,
                        std::span<const double> ps, const McConfig& cfg);

// ||xi^phi - xi^psi||_p on coupled samples.
Estimate p_norm_between(const WienerFunctional& xi, const RotationProfile& phi,
                        const RotationProfile& psi, double p, const McConfig& cfg);

std::vector<Estimate> p_norm_diff_curve(const WienerFunctional& xi,
                                        std::span<const RotationProfile> profiles, double p,
                                        const McConfig& cfg);

// ||xi||_p and E xi, Var xi from plain sampling of W.
Estimate lp_norm(const WienerFunctional& xi, double p, const McConfig& cfg);
struct MomentSummary {
  Estimate mean;
  Estimate second;
  Estimate variance;
};
MomentSummary moments(const WienerFunctional& xi, const McConfig& cfg);
MomentSummary decoupled_moments(const WienerFunctional& xi, const RotationProfile& phi,
                                const McConfig& cfg);

// ||xi - E(xi | G_a^b)||_p by nested sampling of the increments on (a,b].
// For p = 2 the estimate is unbiased: mean_j xi_j^2 - I_1 I_2 with two
// independent inner means. For other p the bias is controlled by requiring
// n_inner >= sqrt(n_samples).
Estimate cond_exp_residual(const WienerFunctional& xi, double a, double b, double p,
                           const McConfig& cfg);

struct SandwichReport {
  Estimate residual;
  Estimate decoupled;
  Estimate ratio;
  bool within_bounds = false;  // ratio in [1/2, 1] up to 3 combined errors
};

SandwichReport sandwich_check(const WienerFunctional& xi, double a, double b, double p,
                              const McConfig& cfg);

// inf{lambda > 0 : sum_i w_i exp(|F_i| / lambda) <= 2}; empty weights mean
// uniform weights. Returns +inf when no lambda below the cap works.
// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

double orlicz_exp_norm(std::span<const double> samples, std::span<const double> weights = {},
                       double lambda_cap = 1e300);

}  // namespace wlab
