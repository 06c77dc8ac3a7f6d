#pragma once

// Time grids, counter-based random streams, coupled Brownian pairs and the
// decoupling rotation W -> W^phi.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "wienerlab/error.hpp"

namespace wlab {

class TimeGrid {
 public:
  // nodes must start at 0 and be strictly increasing; the last node is T.
  explicit TimeGrid(std::vector<double> nodes);

  static TimeGrid uniform(double horizon, std::size_t cells);

  double horizon() const noexcept { return nodes_.back(); }
  std::size_t cells() const noexcept { return nodes_.size() - 1; }
  double node(std::size_t k) const { return nodes_[k]; }
  double width(std::size_t k) const { return nodes_[k + 1] - nodes_[k]; }
  std::span<const double> nodes() const noexcept { return nodes_; }

  // Index of the node equal to t (relative tolerance 1e-12 of T).
  std::optional<std::size_t> find_node(double t) const noexcept;
  std::size_t require_node(double t) const;

  bool operator==(const TimeGrid& other) const noexcept {
    return nodes_ == other.nodes_;
  }

 private:
  std::vector<double> nodes_;
};

using GridPtr = std::shared_ptr<const TimeGrid>;

GridPtr make_grid(TimeGrid grid);
GridPtr make_uniform_grid(double horizon, std::size_t cells);

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* where);

// Philox4x32-10 keyed by the seed, with (stream_id, draw_index) as the
// 128-bit counter. Draws depend only on (seed, stream_id, draw_index).
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

// Mixes a base seed with a purpose tag so that different estimators draw from
// unrelated streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) noexcept;

// Sequential standard-normal source over one RngStream. Each Philox block
// yields two normals (Box-Muller on two 53-bit uniforms).
class NormalStream {
 public:
  explicit NormalStream(RngStream stream) noexcept : stream_(stream) {}

  double next() noexcept;
  void fill(std::span<double> out) noexcept;
  std::uint64_t blocks_used() const noexcept { return block_; }

 private:
  RngStream stream_;
  std::uint64_t block_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Read-only view of an M x d increment array stored row-major by cell.
struct Increments {
  std::span<const double> data;
  std::size_t cells = 0;
  std::size_t dim = 0;

  double at(std::size_t k, std::size_t i) const { return data[k * dim + i]; }
};

struct BrownianPair {
  GridPtr grid;
  std::size_t dim = 1;
  std::vector<double> dW;
  std::vector<double> dW_prime;

  Increments w() const { return {dW, grid->cells(), dim}; }
  Increments w_prime() const { return {dW_prime, grid->cells(), dim}; }
};

// Piecewise constant phi on the grid cells with values in [0,1].
class RotationProfile {
 public:
  static RotationProfile indicator(GridPtr grid, double a, double b);
  static RotationProfile constant(GridPtr grid, double r);
  static RotationProfile custom(GridPtr grid, std::vector<double> values);

  const GridPtr& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return phi_; }
  // sqrt(1 - phi_k^2), cached.
  std::span<const double> complements() const noexcept { return keep_; }
  double value(std::size_t k) const { return phi_[k]; }
  bool is_zero() const noexcept { return first_active_ == phi_.size(); }
  // Cells outside [first_active, last_active) carry phi = 0.
  std::size_t first_active() const noexcept { return first_active_; }
  std::size_t last_active() const noexcept { return last_active_; }

 private:
  RotationProfile(GridPtr grid, std::vector<double> values);

  GridPtr grid_;
  std::vector<double> phi_;
  std::vector<double> keep_;
  std::size_t first_active_ = 0;
  std::size_t last_active_ = 0;
};

void sample_pair(const GridPtr& grid, std::size_t dim, RngStream stream,
                 BrownianPair& out);
BrownianPair sample_pair(const GridPtr& grid, std::size_t dim, RngStream stream);

// dW^phi_k = sqrt(1 - phi_k^2) dW_k + phi_k dW'_k. Cells with phi_k = 0 are
// copied, so rotate(pair, constant(0)) is bitwise equal to pair.dW.
void rotate(const BrownianPair& pair, const RotationProfile& phi,
            std::vector<double>& out);
std::vector<double> rotate(const BrownianPair& pair, const RotationProfile& phi);

// (sum_k (phi_k - psi_k)^2 dt_k)^(1/2)
double delta_distance(const RotationProfile& phi, const RotationProfile& psi);

// W at the grid nodes (cumulative sums of one coordinate).
std::vector<double> cumulative_path(const Increments& incr, std::size_t coord = 0);

}  // namespace wlab
