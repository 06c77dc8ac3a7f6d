#include "wienerlab/functionals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace wlab {

unsigned PolynomialForm::degree() const {
  unsigned best = 0;
  for (const auto& m : monomials)
    best = std::max(best, std::accumulate(m.powers.begin(), m.powers.end(), 0u));
  return best;
}

WienerFunctional::WienerFunctional(GridPtr grid, std::size_t dim)
    : grid_(std::move(grid)), dim_(dim) {
  require(grid_ != nullptr, ErrorCode::invalid_argument, "functional needs a grid");
  require(dim_ >= 1, ErrorCode::invalid_argument, "dimension must be >= 1");
}

void WienerFunctional::malliavin(const Increments&, std::span<double>) const {
  fail(ErrorCode::no_malliavin, name() + ": no Malliavin derivative");
}

void WienerFunctional::check(const Increments& incr) const {
  if (incr.cells != grid_->cells() || incr.dim != dim_ ||
      incr.data.size() != incr.cells * incr.dim)
    fail(ErrorCode::grid_mismatch,
         name() + ": increments are " + std::to_string(incr.cells) + "x" +
             std::to_string(incr.dim) + ", expected " +
             std::to_string(grid_->cells()) + "x" + std::to_string(dim_));
}

namespace {

inline double block_sum(const Increments& incr, const IncrementBlock& b) {
  double s = 0.0;
  for (std::size_t k = b.first_cell; k < b.last_cell; ++k) s += incr.at(k, b.coord);
  return s;
}

inline double ipow(double x, unsigned n) {
  double r = 1.0;
  for (unsigned i = 0; i < n; ++i) r *= x;
  return r;
}

class PolyIncrements final : public WienerFunctional {
 public:
  PolyIncrements(GridPtr grid, std::size_t dim, PolynomialForm form, std::string name)
      : WienerFunctional(std::move(grid), dim), form_(std::move(form)), name_(std::move(name)) {
    for (const auto& m : form_.monomials)
      require(m.powers.size() == form_.blocks.size(), ErrorCode::invalid_argument,
              name_ + ": monomial exponent count must match block count");
    for (std::size_t i = 0; i < form_.blocks.size(); ++i) {
      const auto& bi = form_.blocks[i];
      require(bi.coord < this->dim(), ErrorCode::invalid_argument,
              name_ + ": block coordinate out of range");
      require(bi.first_cell < bi.last_cell && bi.last_cell <= this->grid()->cells(),
              ErrorCode::invalid_argument, name_ + ": empty or out-of-range block");
      for (std::size_t j = 0; j < i; ++j) {
        const auto& bj = form_.blocks[j];
        const bool overlap = bi.coord == bj.coord && bi.first_cell < bj.last_cell &&
                             bj.first_cell < bi.last_cell;
        require(!overlap, ErrorCode::invalid_argument, name_ + ": blocks overlap");
      }
    }
  }

  std::string name() const override { return name_; }

  double evaluate(const Increments& incr) const override {
    check(incr);
    std::array<double, 16> stack{};
    std::vector<double> heap;
    double* x = stack.data();
    if (form_.blocks.size() > stack.size()) {
      heap.resize(form_.blocks.size());
      x = heap.data();
    }
    for (std::size_t b = 0; b < form_.blocks.size(); ++b) x[b] = block_sum(incr, form_.blocks[b]);
    double value = 0.0;
    for (const auto& m : form_.monomials) {
      double term = m.coef;
      for (std::size_t b = 0; b < m.powers.size(); ++b) term *= ipow(x[b], m.powers[b]);
      value += term;
    }
    return value;
  }

  bool has_malliavin() const override { return true; }

  void malliavin(const Increments& incr, std::span<double> out) const override {
    check(incr);
    require(out.size() == incr.cells * incr.dim, ErrorCode::invalid_argument,
            name_ + ": derivative buffer has wrong size");
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t nb = form_.blocks.size();
    std::vector<double> x(nb), grad(nb, 0.0);
    for (std::size_t b = 0; b < nb; ++b) x[b] = block_sum(incr, form_.blocks[b]);
    for (const auto& m : form_.monomials) {
      for (std::size_t b = 0; b < nb; ++b) {
        if (m.powers[b] == 0) continue;
        double term = m.coef * m.powers[b] * ipow(x[b], m.powers[b] - 1);
        for (std::size_t c = 0; c < nb; ++c)
          if (c != b) term *= ipow(x[c], m.powers[c]);
        grad[b] += term;
      }
    }
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& blk = form_.blocks[b];
      for (std::size_t k = blk.first_cell; k < blk.last_cell; ++k)
        out[k * incr.dim + blk.coord] += grad[b];
    }
  }

  const PolynomialForm* polynomial() const override { return &form_; }

 private:
  PolynomialForm form_;
  std::string name_;
};

class ConstantFunctional final : public WienerFunctional {
 public:
  ConstantFunctional(GridPtr grid, std::size_t dim, double value)
      : WienerFunctional(std::move(grid), dim), value_(value), form_{{}, {{value, {}}}} {}

  std::string name() const override { return "constant"; }
  double evaluate(const Increments& incr) const override {
    check(incr);
    return value_;
  }
  bool has_malliavin() const override { return true; }
  void malliavin(const Increments& incr, std::span<double> out) const override {
    check(incr);
    std::fill(out.begin(), out.end(), 0.0);
  }
  const PolynomialForm* polynomial() const override { return &form_; }

 private:
  double value_;
  PolynomialForm form_;
};

class DiffusionTerminal final : public WienerFunctional {
 public:
  DiffusionTerminal(GridPtr grid, std::size_t dim, DiffusionSpec spec)
      : WienerFunctional(std::move(grid), dim), spec_(std::move(spec)) {
    require(spec_.drift && spec_.diffusion && spec_.terminal, ErrorCode::invalid_argument,
            "diffusion-terminal needs drift, diffusion and terminal map");
    smooth_ = spec_.drift_dx && spec_.diffusion_dx && spec_.terminal_dx;
  }

  std::string name() const override { return spec_.label; }

  double evaluate(const Increments& incr) const override {
    check(incr);
    const TimeGrid& g = *grid();
    double x = spec_.x0;
    for (std::size_t k = 0; k < incr.cells; ++k) {
      const double t = g.node(k);
      x += spec_.drift(t, x) * g.width(k) + spec_.diffusion(t, x) * incr.at(k, 0);
    }
    return spec_.terminal(x);
  }

  bool has_malliavin() const override { return smooth_; }

  // D_{s} g(X_M) for s in cell j equals g'(X_M) sigma(t_j, X_j) J_M / J_{j+1},
  // where J is the tangent (first variation) of the Euler recursion.
  void malliavin(const Increments& incr, std::span<double> out) const override {
    if (!smooth_) WienerFunctional::malliavin(incr, out);
    check(incr);
    const TimeGrid& g = *grid();
    const std::size_t m = incr.cells;
    std::vector<double> x(m + 1), sig(m), tangent_tail(m + 1);
    x[0] = spec_.x0;
    std::vector<double> factor(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double t = g.node(k);
      const double dt = g.width(k);
      const double dw = incr.at(k, 0);
      sig[k] = spec_.diffusion(t, x[k]);
      factor[k] = 1.0 + spec_.drift_dx(t, x[k]) * dt + spec_.diffusion_dx(t, x[k]) * dw;
      x[k + 1] = x[k] + spec_.drift(t, x[k]) * dt + sig[k] * dw;
    }
    // tangent_tail[j] = prod_{k >= j} factor[k]
    tangent_tail[m] = 1.0;
    for (std::size_t k = m; k-- > 0;) tangent_tail[k] = tangent_tail[k + 1] * factor[k];
    const double gp = spec_.terminal_dx(x[m]);
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) out[j * incr.dim] = gp * sig[j] * tangent_tail[j + 1];
  }

 private:
  DiffusionSpec spec_;
  bool smooth_ = false;
};

class BvIndicator final : public WienerFunctional {
 public:
  BvIndicator(FunctionalPtr base, double threshold)
      : WienerFunctional(base->grid(), base->dim()), base_(std::move(base)), k_(threshold) {}

  std::string name() const override { return "bv-indicator(" + base_->name() + ")"; }
  double evaluate(const Increments& incr) const override {
    return base_->evaluate(incr) >= k_ ? 1.0 : 0.0;
  }

 private:
  FunctionalPtr base_;
  double k_;
};

class CounterexampleSeries final : public WienerFunctional {
 public:
  CounterexampleSeries(GridPtr grid, unsigned terms, unsigned l_max)
      : WienerFunctional(std::move(grid), 1), terms_(terms) {
    require(terms >= 1 && terms <= l_max, ErrorCode::invalid_argument,
            "counterexample-series needs 1 <= L <= L_max");
    const auto layout = counterexample_layout(*this->grid(), l_max);
    for (unsigned l = 0; l < terms; ++l) {
      start_.push_back(this->grid()->require_node(layout[l].s));
      end_.push_back(this->grid()->require_node(layout[l].t));
    }
  }

  std::string name() const override { return "counterexample-series"; }

  double evaluate(const Increments& incr) const override {
    check(incr);
    double w = 0.0, value = 0.0;
    std::size_t k = 0;
    for (unsigned l = 0; l < terms_; ++l) {
      for (; k < start_[l]; ++k) w += incr.at(k, 0);
      double inc = 0.0;
      for (; k < end_[l]; ++k) inc += incr.at(k, 0);
      value += (l + 1) * std::cos(w) * inc;
      w += inc;
    }
    return value;
  }

  bool has_malliavin() const override { return true; }

  void malliavin(const Increments& incr, std::span<double> out) const override {
    check(incr);
    std::fill(out.begin(), out.end(), 0.0);
    double w = 0.0;
    std::size_t k = 0;
    for (unsigned l = 0; l < terms_; ++l) {
      for (; k < start_[l]; ++k) w += incr.at(k, 0);
      double inc = 0.0;
      for (std::size_t j = start_[l]; j < end_[l]; ++j) inc += incr.at(j, 0);
      const double c = (l + 1) * std::cos(w);
      const double s = -(l + 1.0) * std::sin(w) * inc;
      for (std::size_t j = 0; j < start_[l]; ++j) out[j] += s;
      for (std::size_t j = start_[l]; j < end_[l]; ++j) out[j] += c;
      k = end_[l];
      w += inc;
    }
  }

 private:
  unsigned terms_;
  std::vector<std::size_t> start_, end_;
};

class LinearCombination final : public WienerFunctional {
 public:
  LinearCombination(std::vector<std::pair<double, FunctionalPtr>> terms, double shift)
      : WienerFunctional(terms.at(0).second->grid(), terms.at(0).second->dim()),
        terms_(std::move(terms)),
        shift_(shift) {
    for (const auto& [w, f] : terms_) {
      require(f != nullptr, ErrorCode::invalid_argument, "null functional in combination");
      require_same_grid(*grid(), *f->grid(), "linear_combination");
      require(f->dim() == dim(), ErrorCode::grid_mismatch, "combination dimension mismatch");
    }
  }

  std::string name() const override {
    std::string s = "combination(";
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i) s += ",";
      s += terms_[i].second->name();
    }
    return s + ")";
  }

  double evaluate(const Increments& incr) const override {
    double v = shift_;
    for (const auto& [w, f] : terms_) v += w * f->evaluate(incr);
    return v;
  }

  bool has_malliavin() const override {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const auto& t) { return t.second->has_malliavin(); });
  }

  void malliavin(const Increments& incr, std::span<double> out) const override {
    if (!has_malliavin()) WienerFunctional::malliavin(incr, out);
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> part(out.size());
    for (const auto& [w, f] : terms_) {
      f->malliavin(incr, part);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * part[i];
    }
  }

 private:
  std::vector<std::pair<double, FunctionalPtr>> terms_;
  double shift_;
};

IncrementBlock terminal_block(const TimeGrid& grid) { return {0, grid.cells(), 0}; }

}  // namespace

FunctionalPtr linear_terminal(GridPtr grid, std::size_t dim) {
  require(grid != nullptr, ErrorCode::invalid_argument, "functional needs a grid");
  PolynomialForm form{{terminal_block(*grid)}, {{1.0, {1}}}};
  return std::make_shared<PolyIncrements>(std::move(grid), dim, std::move(form),
                                          "linear-terminal");
}

FunctionalPtr square_terminal(GridPtr grid, std::size_t dim) {
  require(grid != nullptr, ErrorCode::invalid_argument, "functional needs a grid");
  PolynomialForm form{{terminal_block(*grid)}, {{1.0, {2}}}};
  return std::make_shared<PolyIncrements>(std::move(grid), dim, std::move(form),
                                          "square-terminal");
}

FunctionalPtr constant_functional(GridPtr grid, double value, std::size_t dim) {
  return std::make_shared<ConstantFunctional>(std::move(grid), dim, value);
}

FunctionalPtr poly_increments(GridPtr grid, std::vector<BlockSpec> blocks,
                              std::vector<Monomial> monomials, std::size_t dim,
                              std::string name) {
  require(grid != nullptr, ErrorCode::invalid_argument, "functional needs a grid");
  PolynomialForm form;
  for (const auto& b : blocks) {
    require(b.a < b.b, ErrorCode::invalid_argument, "block needs a < b");
    form.blocks.push_back({grid->require_node(b.a), grid->require_node(b.b), b.coord});
  }
  form.monomials = std::move(monomials);
  return std::make_shared<PolyIncrements>(std::move(grid), dim, std::move(form),
                                          std::move(name));
}

FunctionalPtr diffusion_terminal(GridPtr grid, DiffusionSpec spec, std::size_t dim) {
  return std::make_shared<DiffusionTerminal>(std::move(grid), dim, std::move(spec));
}

DiffusionSpec ou_spec(double kappa, double sigma, double x0, ScalarMap g, ScalarMap dg) {
  DiffusionSpec spec;
  spec.drift = [kappa](double, double x) { return -kappa * x; };
  spec.drift_dx = [kappa](double, double) { return -kappa; };
  spec.diffusion = [sigma](double, double) { return sigma; };
  spec.diffusion_dx = [](double, double) { return 0.0; };
  spec.x0 = x0;
  spec.terminal = std::move(g);
  spec.terminal_dx = std::move(dg);
  spec.label = "ou-terminal";
  return spec;
}

FunctionalPtr bv_indicator(FunctionalPtr base, double threshold) {
  require(base != nullptr, ErrorCode::invalid_argument, "bv-indicator needs a base functional");
  return std::make_shared<BvIndicator>(std::move(base), threshold);
}

std::vector<SeriesInterval> counterexample_intervals(double horizon, unsigned l_max) {
  require(horizon > 0.0, ErrorCode::invalid_argument, "horizon must be positive");
  require(l_max >= 1 && l_max <= 24, ErrorCode::invalid_argument,
          "counterexample needs 1 <= L_max <= 24");
  double total = 0.0;
  for (unsigned l = 1; l <= l_max; ++l) total += horizon * std::pow(4.0, -double(l));
  const double gap = (horizon - total) / (l_max + 1);
  std::vector<SeriesInterval> out;
  double s = gap;
  for (unsigned l = 1; l <= l_max; ++l) {
    const double t = s + horizon * std::pow(4.0, -double(l));
    out.push_back({s, t});
    s = t + gap;
  }
  return out;
}

GridPtr counterexample_grid(double horizon, unsigned l_max) {
  const auto iv = counterexample_intervals(horizon, l_max);
  std::vector<double> nodes{0.0};
  for (const auto& i : iv) {
    nodes.push_back(i.s);
    nodes.push_back(i.t);
  }
  nodes.push_back(horizon);
  return make_grid(TimeGrid(std::move(nodes)));
}

std::vector<SeriesInterval> counterexample_layout(const TimeGrid& grid, unsigned l_max) {
  const double T = grid.horizon();
  auto equal_gap = counterexample_intervals(T, l_max);
  const bool aligned = std::all_of(equal_gap.begin(), equal_gap.end(), [&](const auto& i) {
    return grid.find_node(i.s) && grid.find_node(i.t);
  });
  if (aligned) return equal_gap;

  // One-cell gaps on a uniform grid; every length T 4^{-l} must be a whole
  // number of cells.
  const double cell = grid.width(0);
  const double smallest = T * std::pow(4.0, -double(l_max));
  if (smallest < cell * (1.0 - 1e-9))
    fail(ErrorCode::invalid_argument,
         "L_max too large for grid resolution: T*4^-L = " + std::to_string(smallest) +
             " is below one cell (" + std::to_string(cell) + ")");
  std::vector<SeriesInterval> out;
  double s = cell;
  for (unsigned l = 1; l <= l_max; ++l) {
    const double t = s + T * std::pow(4.0, -double(l));
    if (!grid.find_node(s) || !grid.find_node(t))
      fail(ErrorCode::invalid_argument,
           "counterexample interval " + std::to_string(l) + " does not fall on grid nodes");
    out.push_back({s, t});
    s = t + cell;
  }
  return out;
}

FunctionalPtr counterexample_series(GridPtr grid, unsigned terms, unsigned l_max) {
  require(grid != nullptr, ErrorCode::invalid_argument, "functional needs a grid");
  return std::make_shared<CounterexampleSeries>(std::move(grid), terms, l_max);
}

FunctionalPtr linear_combination(std::vector<std::pair<double, FunctionalPtr>> terms,
                                 double shift) {
  require(!terms.empty(), ErrorCode::invalid_argument, "empty linear combination");
  return std::make_shared<LinearCombination>(std::move(terms), shift);
}

double evaluate(const WienerFunctional& xi, const Increments& incr) {
  return xi.evaluate(incr);
}

double Decoupler::operator()(const WienerFunctional& xi, const BrownianPair& pair,
                             const RotationProfile& phi) {
  rotate(pair, phi, buffer_);
  return xi.evaluate({buffer_, pair.grid->cells(), pair.dim});
}

double decoupled_evaluate(const WienerFunctional& xi, const BrownianPair& pair,
                          const RotationProfile& phi) {
  Decoupler d;
  return d(xi, pair, phi);
}

std::vector<double> malliavin_path(const WienerFunctional& xi, const Increments& incr) {
  if (!xi.has_malliavin())
    fail(ErrorCode::no_malliavin, xi.name() + ": no Malliavin derivative");
  std::vector<double> out(incr.cells * incr.dim);
  xi.malliavin(incr, out);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

class BrownianStepProcess final : public StepProcessFunctional {
 public:
  BrownianStepProcess(GridPtr grid, std::size_t freeze_cell)
      : StepProcessFunctional(std::move(grid)), freeze_(freeze_cell) {}

  std::string name() const override {
    return freeze_ >= grid()->cells() ? "brownian-path" : "frozen-brownian";
  }

  void evaluate(const Increments& incr, std::span<double> values) const override {
    double w = 0.0;
    for (std::size_t k = 0; k < incr.cells; ++k) {
      values[k] = w;
      if (k < freeze_) w += incr.at(k, 0);
    }
  }

 private:
  std::size_t freeze_;
};

class DeterministicProcess final : public StepProcessFunctional {
 public:
  DeterministicProcess(GridPtr grid, std::vector<double> v)
      : StepProcessFunctional(std::move(grid)), values_(std::move(v)) {
    require(values_.size() == this->grid()->cells(), ErrorCode::grid_mismatch,
            "deterministic process needs one value per cell");
  }
  std::string name() const override { return "deterministic"; }
  void evaluate(const Increments&, std::span<double> values) const override {
    std::copy(values_.begin(), values_.end(), values.begin());
  }

 private:
  std::vector<double> values_;
};

}  // namespace

StepProcessPtr brownian_step_process(GridPtr grid) {
  require(grid != nullptr, ErrorCode::invalid_argument, "process needs a grid");
  const std::size_t m = grid->cells();
  return std::make_shared<BrownianStepProcess>(std::move(grid), m);
}

StepProcessPtr frozen_brownian_process(GridPtr grid, double freeze_at) {
  require(grid != nullptr, ErrorCode::invalid_argument, "process needs a grid");
  const std::size_t k = grid->require_node(freeze_at);
  return std::make_shared<BrownianStepProcess>(std::move(grid), k);
}

StepProcessPtr deterministic_process(GridPtr grid, std::vector<double> values) {
  return std::make_shared<DeterministicProcess>(std::move(grid), std::move(values));
}

}  // namespace wlab
