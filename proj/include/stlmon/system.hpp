#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stlmon/errors.hpp"
#include "stlmon/grid.hpp"
#include "stlmon/util.hpp"

namespace stlmon {

using DynamicsFn =
    std::function<void(std::span<const double> x, std::span<const double> u, std::span<double> out)>;

/// Discrete abstraction of x' = f(x, u): a state grid, a finite input list,
/// and a precomputed transition table (cell, input) -> cell. A successor that
/// leaves the state box is marked out-of-domain; such an input is treated as
/// unavailable from that cell.
class SystemModel {
 public:
  static constexpr int kOutOfDomain = -1;

  SystemModel(GridSpec grid, std::vector<std::vector<double>> inputs, DynamicsFn f,
              std::string description)
      : grid_(std::move(grid)),
        inputs_(std::move(inputs)),
        dynamics_(std::move(f)),
        description_(std::move(description)) {
    if (inputs_.empty()) throw ConfigError("model needs at least one input vector");
    const size_t udim = inputs_.front().size();
    for (const auto& u : inputs_)
      if (u.size() != udim) throw ConfigError("input vectors must share one dimension");

    table_.assign(static_cast<size_t>(grid_.cell_count()) * inputs_.size(), kOutOfDomain);
    std::vector<double> x(static_cast<size_t>(grid_.dim()));
    std::vector<double> y(static_cast<size_t>(grid_.dim()));
    for (int c = 0; c < grid_.cell_count(); ++c) {
      grid_.center_into(c, x);
      for (size_t ui = 0; ui < inputs_.size(); ++ui) {
        dynamics_(x, inputs_[ui], y);
        auto succ = grid_.cell_of(y);
        if (succ) table_[static_cast<size_t>(c) * inputs_.size() + ui] = *succ;
      }
    }
  }

  const GridSpec& grid() const { return grid_; }
  int input_count() const { return static_cast<int>(inputs_.size()); }
  const std::vector<double>& input(int i) const { return inputs_[static_cast<size_t>(i)]; }
  const std::vector<std::vector<double>>& inputs() const { return inputs_; }

  int next(int cell, int input) const {
    return table_[static_cast<size_t>(cell) * inputs_.size() + static_cast<size_t>(input)];
  }

  /// Continuous dynamics before snapping, for inspection and tests.
  std::vector<double> apply(std::span<const double> x, std::span<const double> u) const {
    std::vector<double> y(static_cast<size_t>(grid_.dim()));
    dynamics_(x, u, y);
    return y;
  }

  /// A dead cell has no in-domain successor under any input.
  bool has_dead_cells() const {
    for (int c = 0; c < grid_.cell_count(); ++c) {
      bool live = false;
      for (int u = 0; u < input_count() && !live; ++u) live = next(c, u) != kOutOfDomain;
      if (!live) return true;
    }
    return false;
  }

  const std::string& describe() const { return description_; }
  std::uint64_t hash() const { return fnv1a64(description_); }

 private:
  GridSpec grid_;
  std::vector<std::vector<double>> inputs_;
  DynamicsFn dynamics_;
  std::string description_;
  std::vector<std::int32_t> table_;
};

/// One-step feasible set: cells with at least one input leading into target.
inline StateSet one_step_feasible(const SystemModel& m, const StateSet& target) {
  StateSet out(m.grid().cell_count());
  const int nu = m.input_count();
  for (int c = 0; c < m.grid().cell_count(); ++c) {
    for (int u = 0; u < nu; ++u) {
      int s = m.next(c, u);
      if (s != SystemModel::kOutOfDomain && target.test(s)) {
        out.set(c);
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Built-in models
// ---------------------------------------------------------------------------

struct ThermalParams {
  double heater_temp = 55.0;
  double ambient_temp = 0.0;
  double alpha_env = 0.06;
  double alpha_heater = 0.08;
  double tau = 1.0;
};

/// Single-zone temperature: x' = x + tau*(ae*(Te - x) + aH*(Th - x)*u).
inline SystemModel make_thermal(GridSpec grid, std::vector<std::vector<double>> inputs,
                                ThermalParams p = {}) {
  if (grid.dim() != 1) throw ConfigError("thermal1d model needs a 1-D grid");
  std::string desc = "thermal1d Th=" + fmt_double(p.heater_temp) +
                     " Te=" + fmt_double(p.ambient_temp) + " ae=" + fmt_double(p.alpha_env) +
                     " aH=" + fmt_double(p.alpha_heater) + " tau=" + fmt_double(p.tau) + " " +
                     grid.describe();
  for (const auto& u : inputs) desc += " u=" + fmt_double(u.at(0));
  auto f = [p](std::span<const double> x, std::span<const double> u, std::span<double> out) {
    out[0] = x[0] + p.tau * (p.alpha_env * (p.ambient_temp - x[0]) +
                             p.alpha_heater * (p.heater_temp - x[0]) * u[0]);
  };
  return SystemModel(std::move(grid), std::move(inputs), f, std::move(desc));
}

/// Planar integrator: x' = x + tau*u.
inline SystemModel make_robot(GridSpec grid, std::vector<std::vector<double>> inputs,
                              double tau = 1.0) {
  if (grid.dim() != 2) throw ConfigError("robot2d model needs a 2-D grid");
  std::string desc = "robot2d tau=" + fmt_double(tau) + " " + grid.describe();
  for (const auto& u : inputs) desc += " u=(" + fmt_double(u.at(0)) + "," + fmt_double(u.at(1)) + ")";
  auto f = [tau](std::span<const double> x, std::span<const double> u, std::span<double> out) {
    out[0] = x[0] + tau * u[0];
    out[1] = x[1] + tau * u[1];
  };
  return SystemModel(std::move(grid), std::move(inputs), f, std::move(desc));
}

/// x' = A x + tau * B u with dense row-major A (n*n) and B (n*m).
inline SystemModel make_affine(GridSpec grid, std::vector<std::vector<double>> inputs,
                               std::vector<double> A, std::vector<double> B, double tau = 1.0) {
  const size_t n = static_cast<size_t>(grid.dim());
  if (inputs.empty()) throw ConfigError("model needs at least one input vector");
  const size_t m = inputs.front().size();
  if (A.size() != n * n) throw ConfigError("affine model: A must be n*n");
  if (B.size() != n * m) throw ConfigError("affine model: B must be n*m");
  std::string desc = "affine tau=" + fmt_double(tau) + " " + grid.describe() + " A=";
  for (double a : A) desc += fmt_double(a) + ",";
  desc += " B=";
  for (double b : B) desc += fmt_double(b) + ",";
  for (const auto& u : inputs) {
    desc += " u=(";
    for (double v : u) desc += fmt_double(v) + ",";
    desc += ")";
  }
  auto f = [A = std::move(A), B = std::move(B), tau, n, m](std::span<const double> x,
                                                           std::span<const double> u,
                                                           std::span<double> out) {
    for (size_t i = 0; i < n; ++i) {
      double v = 0.0;
      for (size_t j = 0; j < n; ++j) v += A[i * n + j] * x[j];
      for (size_t j = 0; j < m; ++j) v += tau * B[i * m + j] * u[j];
      out[i] = v;
    }
  };
  return SystemModel(std::move(grid), std::move(inputs), f, std::move(desc));
}

}  // namespace stlmon
