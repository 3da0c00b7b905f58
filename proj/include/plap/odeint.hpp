#pragma once

// Adaptive Dormand-Prince 5(4) integrator with the classical fourth-order
// continuous extension, plus level-crossing detection on the dense output.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "plap/errors.hpp"

namespace plap::ode {

class IntegrationError : public NumericalError {
 public:
  enum class Kind { StepLimit, NonFinite, StepUnderflow };

  IntegrationError(Kind kind, double last_r, const std::string& what)
      : NumericalError(what + " (last reached r = " + format_g(last_r) +
                       ")"),
        kind_(kind),
        last_r_(last_r) {}

  Kind kind() const noexcept { return kind_; }
  double last_r() const noexcept { return last_r_; }

 private:
  Kind kind_;
  double last_r_;
};

template <typename Scalar, int Dim>
struct IvpSpec {
  using State = Eigen::Matrix<Scalar, Dim, 1>;
  using Rhs = std::function<State(Scalar, const State&)>;

  Rhs rhs;
  Scalar r_start{0};
  Scalar r_end{1};
  State y0;
  Scalar rel_tol{1e-10};
  Scalar abs_tol{1e-12};
  std::size_t max_steps{1'000'000};

  void validate() const {
    if (!rhs) throw std::invalid_argument("IvpSpec: rhs is empty");
    if (y0.size() < 1) throw std::invalid_argument("IvpSpec: empty state");
    if (!(r_start < r_end))
      throw std::invalid_argument("IvpSpec: r_start must be < r_end");
    auto in_range = [](Scalar t) { return t >= Scalar(1e-14) && t <= Scalar(1e-2); };
    if (!in_range(rel_tol) || !in_range(abs_tol))
      throw std::invalid_argument("IvpSpec: tolerances must lie in [1e-14, 1e-2]");
    if (max_steps == 0) throw std::invalid_argument("IvpSpec: max_steps must be positive");
    if (!y0.allFinite()) throw std::invalid_argument("IvpSpec: non-finite initial state");
  }
};

template <typename Scalar, int Dim>
class DenseSolution {
 public:
  using State = Eigen::Matrix<Scalar, Dim, 1>;

  const std::vector<Scalar>& nodes() const { return nodes_; }
  const std::vector<State>& states() const { return states_; }
  std::size_t size() const { return nodes_.size(); }
  Scalar r_start() const { return nodes_.front(); }
  Scalar r_end() const { return nodes_.back(); }
  const State& back() const { return states_.back(); }

  // Interpolated state; exact stored state at nodes.
  State operator()(Scalar r) const {
    const std::size_t i = segment_of(r);
    if (r == nodes_[i]) return states_[i];
    if (r == nodes_[i + 1]) return states_[i + 1];
    return eval_segment(i, r);
  }

  Scalar component(Scalar r, Eigen::Index c) const { return (*this)(r)(c); }

  // Index i with nodes_[i] <= r <= nodes_[i+1], clamped to the grid.
  std::size_t segment_of(Scalar r) const {
    if (nodes_.size() < 2) return 0;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
    std::size_t i = it == nodes_.begin() ? 0 : std::size_t(it - nodes_.begin()) - 1;
    return std::min(i, nodes_.size() - 2);
  }

  State eval_segment(std::size_t i, Scalar r) const {
    const Segment& s = segments_[i];
    const Scalar h = nodes_[i + 1] - nodes_[i];
    const Scalar t = (r - nodes_[i]) / h;
    const Scalar t1 = Scalar(1) - t;
    return states_[i] + t * (s.c2 + t1 * (s.c3 + t * (s.c4 + t1 * s.c5)));
  }

 private:
  template <typename S, int D>
  friend DenseSolution<S, D> integrate(const IvpSpec<S, D>&);

  struct Segment {
    State c2, c3, c4, c5;
  };

  std::vector<Scalar> nodes_;
  std::vector<State> states_;
  std::vector<Segment> segments_;
};

namespace detail {

template <typename Scalar, typename State>
Scalar weighted_rms(const State& e, const State& y_old, const State& y_new,
                    Scalar rel_tol, Scalar abs_tol) {
  Scalar acc = 0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    const Scalar sk =
        abs_tol + rel_tol * std::max(std::abs(y_old(i)), std::abs(y_new(i)));
    const Scalar q = e(i) / sk;
    acc += q * q;
  }
  return std::sqrt(acc / Scalar(e.size()));
}

}  // namespace detail

template <typename Scalar, int Dim>
DenseSolution<Scalar, Dim> integrate(const IvpSpec<Scalar, Dim>& spec) {
  using State = Eigen::Matrix<Scalar, Dim, 1>;
  spec.validate();

  // Dormand-Prince 5(4) tableau.
  constexpr Scalar c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr Scalar a21 = 1.0 / 5;
  constexpr Scalar a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr Scalar a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr Scalar a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr Scalar a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr Scalar a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                   a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr Scalar e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  // Dense output coefficients (Hairer, Norsett & Wanner).
  constexpr Scalar d1 = -12715105075.0 / 11282082432.0,
                   d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0,
                   d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0,
                   d7 = 69997945.0 / 29380423.0;

  constexpr Scalar safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
  constexpr Scalar fac_min = 0.2, fac_max = 10.0;

  const auto& f = spec.rhs;
  Scalar r = spec.r_start;
  State y = spec.y0;

  auto eval = [&](Scalar rr, const State& yy) {
    State k = f(rr, yy);
    if (!k.allFinite())
      throw IntegrationError(IntegrationError::Kind::NonFinite, double(r),
                             "non-finite right-hand side");
    return k;
  };

  DenseSolution<Scalar, Dim> sol;
  sol.nodes_.push_back(r);
  sol.states_.push_back(y);

  State k1 = eval(r, y);
  const Scalar span = spec.r_end - spec.r_start;

  // Initial step guess.
  Scalar h;
  {
    State ones = State::Ones(y.size());
    State sk = (spec.abs_tol * ones.array() + spec.rel_tol * y.array().abs()).matrix();
    const Scalar d0 = std::sqrt((y.array() / sk.array()).square().mean());
    const Scalar dd1 = std::sqrt((k1.array() / sk.array()).square().mean());
    Scalar h0 = (d0 < 1e-5 || dd1 < 1e-5) ? Scalar(1e-6) * span : Scalar(0.01) * d0 / dd1;
    h0 = std::min(h0, span);
    State k2 = eval(r + h0, (y + h0 * k1).eval());
    const Scalar dd2 = std::sqrt(((k2 - k1).array() / sk.array()).square().mean()) / h0;
    const Scalar dm = std::max(dd1, dd2);
    const Scalar h1 = dm <= 1e-15 ? std::max(Scalar(1e-6) * span, h0 * Scalar(1e-3))
                                  : std::pow(Scalar(0.01) / dm, Scalar(0.2));
    h = std::min({Scalar(100) * h0, h1, span});
  }

  Scalar fac_old = 1e-4;
  bool last_rejected = false;
  std::size_t steps = 0;

  while (r < spec.r_end) {
    if (++steps > spec.max_steps)
      throw IntegrationError(IntegrationError::Kind::StepLimit, double(r),
                             "step count exceeded max_steps");
    bool last = false;
    if (r + h >= spec.r_end || r + Scalar(1.01) * h >= spec.r_end) {
      h = spec.r_end - r;
      last = true;
    }
    if (h <= std::abs(r) * std::numeric_limits<Scalar>::epsilon() * 16 || h <= 0)
      throw IntegrationError(IntegrationError::Kind::StepUnderflow, double(r),
                             "step size underflow");

    const State k2 = eval(r + c2 * h, (y + h * a21 * k1).eval());
    const State k3 = eval(r + c3 * h, (y + h * (a31 * k1 + a32 * k2)).eval());
    const State k4 = eval(r + c4 * h, (y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    const State k5 =
        eval(r + c5 * h, (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    const State k6 = eval(
        r + h, (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    const State y_new =
        y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const Scalar r_new = last ? spec.r_end : r + h;
    const State k7 = eval(r_new, y_new);

    const State err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const Scalar err = detail::weighted_rms(err_vec, y, y_new, spec.rel_tol, spec.abs_tol);

    const Scalar fac11 = std::pow(std::max(err, Scalar(1e-300)), expo1);
    if (err <= 1) {
      typename DenseSolution<Scalar, Dim>::Segment seg;
      seg.c2 = y_new - y;
      seg.c3 = h * k1 - seg.c2;
      seg.c4 = seg.c2 - h * k7 - seg.c3;
      seg.c5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      sol.segments_.push_back(std::move(seg));
      sol.nodes_.push_back(r_new);
      sol.states_.push_back(y_new);

      Scalar fac = fac11 / std::pow(fac_old, beta);
      fac = std::clamp(fac / safe, Scalar(1) / fac_max, Scalar(1) / fac_min);
      Scalar h_new = h / fac;
      if (last_rejected) h_new = std::min(h_new, h);
      fac_old = std::max(err, Scalar(1e-4));
      last_rejected = false;

      r = r_new;
      y = y_new;
      k1 = k7;
      h = h_new;
    } else {
      h = h / std::min(Scalar(1) / fac_min, fac11 / safe);
      last_rejected = true;
    }
  }
  return sol;
}

struct Crossing {
  double r;
  double level;
  int direction;  // +1 upward, -1 downward
};

// All parameter values where component `c` crosses one of `levels`
// (strictly increasing). A crossing is counted in (r_i, r_{i+1}] when the
// node values straddle the level as a < L <= b (upward) or a >= L > b
// (downward); the location is then polished on the dense interpolant.
template <typename Scalar, int Dim>
std::vector<Crossing> crossings(const DenseSolution<Scalar, Dim>& sol, Eigen::Index c,
                                const std::vector<double>& levels,
                                double value_tol = 1e-10) {
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (!(levels[i - 1] < levels[i]))
      throw std::invalid_argument("crossings: levels must be strictly increasing");

  std::vector<Crossing> out;
  const auto& nodes = sol.nodes();
  const auto& states = sol.states();
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = states[i](c);
    const double b = states[i + 1](c);
    if (a == b) continue;
    const double lo = std::min(a, b), hi = std::max(a, b);
    auto first = std::lower_bound(levels.begin(), levels.end(), lo);
    std::vector<Crossing> local;
    for (auto it = first; it != levels.end() && *it <= hi; ++it) {
      const double level = *it;
      const bool up = a < level && level <= b;
      const bool down = a >= level && level > b;
      if (!up && !down) continue;
      double left = nodes[i], right = nodes[i + 1];
      double ga = a - level;
      double root = right;
      for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (left + right);
        if (mid <= left || mid >= right) break;
        const double gm = sol.eval_segment(i, mid)(c) - level;
        root = mid;
        if (std::abs(gm) <= value_tol && right - left < 1e-12 * (1 + std::abs(mid))) break;
        if ((gm < 0) == (ga < 0)) {
          left = mid;
          ga = gm;
        } else {
          right = mid;
        }
      }
      local.push_back({root, level, up ? +1 : -1});
    }
    std::sort(local.begin(), local.end(),
              [](const Crossing& x, const Crossing& y) { return x.r < y.r; });
    out.insert(out.end(), local.begin(), local.end());
  }
  return out;
}

}  // namespace plap::ode
