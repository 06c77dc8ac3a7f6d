#include "wienerlab/paths.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace wlab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::grid_mismatch: return "grid_mismatch";
    case ErrorCode::domain: return "domain";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::no_malliavin: return "no_malliavin";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
    case ErrorCode::contract_failed: return "contract_failed";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// TimeGrid

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  require(nodes_.size() >= 2, ErrorCode::invalid_argument,
          "time grid needs at least two nodes");
  require(nodes_.front() == 0.0, ErrorCode::invalid_argument,
          "time grid must start at 0");
  for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
    require(std::isfinite(nodes_[k + 1]) && nodes_[k + 1] > nodes_[k],
            ErrorCode::invalid_argument,
            "time grid nodes must be strictly increasing (node " +
                std::to_string(k + 1) + ")");
  }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t cells) {
  require(horizon > 0.0 && std::isfinite(horizon), ErrorCode::invalid_argument,
          "horizon T must be positive");
  require(cells >= 1, ErrorCode::invalid_argument, "grid needs at least one cell");
  std::vector<double> nodes(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k)
    nodes[k] = horizon * static_cast<double>(k) / static_cast<double>(cells);
  nodes.back() = horizon;
  return TimeGrid(std::move(nodes));
}

std::optional<std::size_t> TimeGrid::find_node(double t) const noexcept {
  const double tol = 1e-12 * horizon();
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t - tol);
  if (it != nodes_.end() && std::abs(*it - t) <= tol)
    return static_cast<std::size_t>(it - nodes_.begin());
  return std::nullopt;
}

std::size_t TimeGrid::require_node(double t) const {
  auto k = find_node(t);
  if (!k)
    fail(ErrorCode::invalid_argument,
         "time " + std::to_string(t) + " is not a grid node");
  return *k;
}

GridPtr make_grid(TimeGrid grid) {
  return std::make_shared<const TimeGrid>(std::move(grid));
}

GridPtr make_uniform_grid(double horizon, std::size_t cells) {
  return make_grid(TimeGrid::uniform(horizon, cells));
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* where) {
  if (&a == &b) return;
  if (!(a == b))
    fail(ErrorCode::grid_mismatch, std::string(where) + ": time grids differ");
}

// ---------------------------------------------------------------------------
// Philox4x32-10

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) noexcept {
  return splitmix64(splitmix64(base) ^ (tag * 0xD6E8FEB86659FD93ull));
}

double NormalStream::next() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_.stream_id),
      static_cast<std::uint32_t>(stream_.stream_id >> 32)};
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(stream_.seed),
      static_cast<std::uint32_t>(stream_.seed >> 32)};
  ++block_;
  const auto r = philox4x32(ctr, key);
  const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = (static_cast<double>(a >> 11) + 0.5) * kScale;
  const double u2 = static_cast<double>(b >> 11) * kScale;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

void NormalStream::fill(std::span<double> out) noexcept {
  for (double& x : out) x = next();
}

// ---------------------------------------------------------------------------
// RotationProfile

RotationProfile::RotationProfile(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), phi_(std::move(values)) {
  require(grid_ != nullptr, ErrorCode::invalid_argument, "profile needs a grid");
  require(phi_.size() == grid_->cells(), ErrorCode::grid_mismatch,
          "profile has " + std::to_string(phi_.size()) + " values for " +
              std::to_string(grid_->cells()) + " cells");
  keep_.resize(phi_.size());
  first_active_ = phi_.size();
  last_active_ = 0;
  for (std::size_t k = 0; k < phi_.size(); ++k) {
    const double v = phi_[k];
    require(v >= 0.0 && v <= 1.0, ErrorCode::domain,
            "profile value outside [0,1] at cell " + std::to_string(k));
    keep_[k] = std::sqrt(1.0 - v * v);
    if (v != 0.0) {
      first_active_ = std::min(first_active_, k);
      last_active_ = k + 1;
    }
  }
  if (first_active_ == phi_.size()) last_active_ = phi_.size();
}

RotationProfile RotationProfile::indicator(GridPtr grid, double a, double b) {
  require(grid != nullptr, ErrorCode::invalid_argument, "profile needs a grid");
  require(a < b, ErrorCode::invalid_argument, "indicator needs a < b");
  const std::size_t ka = grid->require_node(a);
  const std::size_t kb = grid->require_node(b);
  std::vector<double> v(grid->cells(), 0.0);
  for (std::size_t k = ka; k < kb; ++k) v[k] = 1.0;
  return RotationProfile(std::move(grid), std::move(v));
}

RotationProfile RotationProfile::constant(GridPtr grid, double r) {
  require(grid != nullptr, ErrorCode::invalid_argument, "profile needs a grid");
  std::vector<double> v(grid->cells(), r);
  return RotationProfile(std::move(grid), std::move(v));
}

RotationProfile RotationProfile::custom(GridPtr grid, std::vector<double> values) {
  return RotationProfile(std::move(grid), std::move(values));
}

// ---------------------------------------------------------------------------
// Sampling and rotation

void sample_pair(const GridPtr& grid, std::size_t dim, RngStream stream,
                 BrownianPair& out) {
  require(grid != nullptr, ErrorCode::invalid_argument, "sample_pair needs a grid");
  require(dim >= 1, ErrorCode::invalid_argument, "dimension must be >= 1");
  const std::size_t cells = grid->cells();
  const std::size_t n = cells * dim;
  out.grid = grid;
  out.dim = dim;
  out.dW.resize(n);
  out.dW_prime.resize(n);
  NormalStream normals(stream);
  normals.fill(out.dW);
  normals.fill(out.dW_prime);
  for (std::size_t k = 0; k < cells; ++k) {
    const double s = std::sqrt(grid->width(k));
    for (std::size_t i = 0; i < dim; ++i) {
      out.dW[k * dim + i] *= s;
      out.dW_prime[k * dim + i] *= s;
    }
  }
}

BrownianPair sample_pair(const GridPtr& grid, std::size_t dim, RngStream stream) {
  BrownianPair pair;
  sample_pair(grid, dim, stream, pair);
  return pair;
}

void rotate(const BrownianPair& pair, const RotationProfile& phi,
            std::vector<double>& out) {
  require_same_grid(*pair.grid, *phi.grid(), "rotate");
  const std::size_t d = pair.dim;
  out.assign(pair.dW.begin(), pair.dW.end());
  const auto values = phi.values();
  const auto keep = phi.complements();
  for (std::size_t k = phi.first_active(); k < phi.last_active(); ++k) {
    if (values[k] == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t j = k * d + i;
      out[j] = keep[k] * pair.dW[j] + values[k] * pair.dW_prime[j];
    }
  }
}

std::vector<double> rotate(const BrownianPair& pair, const RotationProfile& phi) {
  std::vector<double> out;
  rotate(pair, phi, out);
  return out;
}

double delta_distance(const RotationProfile& phi, const RotationProfile& psi) {
  require_same_grid(*phi.grid(), *psi.grid(), "delta_distance");
  const TimeGrid& grid = *phi.grid();
  double acc = 0.0;
  for (std::size_t k = 0; k < grid.cells(); ++k) {
    const double diff = phi.value(k) - psi.value(k);
    acc += diff * diff * grid.width(k);
  }
  return std::sqrt(acc);
}

std::vector<double> cumulative_path(const Increments& incr, std::size_t coord) {
  std::vector<double> w(incr.cells + 1, 0.0);
  for (std::size_t k = 0; k < incr.cells; ++k) w[k + 1] = w[k] + incr.at(k, coord);
  return w;
}

}  // namespace wlab
