#include "plap/ptrig.hpp"

#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "plap/errors.hpp"

namespace plap {

namespace {

// Offsets from the two ends of the quarter period below which the truncated
// power series are used instead of the tables.
constexpr double kSeriesCut = 1e-3;

}  // namespace

PExponent::PExponent(double p) : p_(p), pprime_(p / (p - 1.0)) {
  if (!std::isfinite(p) || !(p > 1.0))
    throw std::domain_error("exponent p must satisfy p > 1, got " + format_g(p));
}

double pi_p(double p) {
  if (!std::isfinite(p) || !(p > 1.0))
    throw std::domain_error("pi_p requires p > 1, got " + format_g(p));
  return 2.0 * std::numbers::pi * std::pow(p - 1.0, 1.0 / p) /
         (p * std::sin(std::numbers::pi / p));
}

PTrigContext::PTrigContext(PExponent exponent)
    : exponent_(exponent), pi_p_(plap::pi_p(exponent.p())) {
  const double p = exponent_.p();
  const double pp = exponent_.conjugate();
  s_max_ = std::pow(p - 1.0, -1.0 / pp);
  c_slope_ = std::pow(p - 1.0, -1.0 / p);

  const double quarter_mid = pi_p_ / 4.0;

  // Forward from t0 near the origin: C' = -phi_{p'}(S), S' = phi_p(C).
  {
    ode::IvpSpec<double, 2> spec;
    spec.rhs = [p, pp](double, const Eigen::Vector2d& y) {
      return Eigen::Vector2d(-phi_p(y(1), pp), phi_p(y(0), p));
    };
    const PTrigPair s0 = series_low(kSeriesCut);
    spec.r_start = kSeriesCut;
    spec.r_end = quarter_mid;
    spec.y0 = Eigen::Vector2d(s0.cos_p, s0.sin_p);
    spec.rel_tol = 1e-14;
    spec.abs_tol = 1e-14;
    low_ = ode::integrate(spec);
  }
  // Backward in tau = pi_p/2 - t: dC/dtau = phi_{p'}(S), dS/dtau = -phi_p(C).
  {
    ode::IvpSpec<double, 2> spec;
    spec.rhs = [p, pp](double, const Eigen::Vector2d& y) {
      return Eigen::Vector2d(phi_p(y(1), pp), -phi_p(y(0), p));
    };
    const PTrigPair s0 = series_high(kSeriesCut);
    spec.r_start = kSeriesCut;
    spec.r_end = pi_p_ / 2.0 - quarter_mid;
    spec.y0 = Eigen::Vector2d(s0.cos_p, s0.sin_p);
    spec.rel_tol = 1e-14;
    spec.abs_tol = 1e-14;
    high_ = ode::integrate(spec);
  }

  // Measure the conserved quantity over the quarter, including the seam.
  double worst = std::abs(low_.back()(0) - high_.back()(0)) +
                 std::abs(low_.back()(1) - high_.back()(1));
  const int samples = 4096;
  for (int i = 0; i <= samples; ++i) {
    const double t = 0.5 * pi_p_ * double(i) / samples;
    const PTrigPair cs = quarter(t);
    const double h = (p - 1.0) * std::pow(std::abs(cs.sin_p), pp) +
                     std::pow(std::abs(cs.cos_p), p);
    worst = std::max(worst, std::abs(h - 1.0));
  }
  eval_tol_ = std::max(4.0 * worst, 1e-13);
}

std::shared_ptr<const PTrigContext> PTrigContext::shared(double p) {
  static std::mutex mutex;
  static std::map<double, std::shared_ptr<const PTrigContext>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(p);
  if (it != cache.end()) return it->second;
  auto ctx = std::make_shared<const PTrigContext>(PExponent(p));
  cache.emplace(p, ctx);
  return ctx;
}

// Truncated expansion about t = 0:
//   C = 1 - t^{p'}/p' + t^{2p'} / (2 p'^2 (p'+1))
//   S = t - (p-1) t^{p'+1} / (p'(p'+1)) + K t^{2p'+1} / (2p'+1)
PTrigPair PTrigContext::series_low(double t) const {
  const double p = exponent_.p();
  const double pp = exponent_.conjugate();
  if (t == 0.0) return {1.0, 0.0};
  const double tp = std::pow(t, pp);
  const double k = (p - 1.0) * (p - 2.0) / (2.0 * pp * pp) +
                   (p - 1.0) / (2.0 * pp * pp * (pp + 1.0));
  const double c = 1.0 - tp / pp + tp * tp / (2.0 * pp * pp * (pp + 1.0));
  const double s = t * (1.0 - (p - 1.0) * tp / (pp * (pp + 1.0)) +
                        k * tp * tp / (2.0 * pp + 1.0));
  return {c, s};
}

// Same expansion about t = pi_p/2 in tau = pi_p/2 - t, with the roles of
// p and p' exchanged and the amplitudes s_max, c_slope.
PTrigPair PTrigContext::series_high(double tau) const {
  const double p = exponent_.p();
  const double pp = exponent_.conjugate();
  if (tau == 0.0) return {0.0, s_max_};
  const double tp = std::pow(tau, p);
  const double k = (pp - 1.0) * (pp - 2.0) / (2.0 * p * p) +
                   (pp - 1.0) / (2.0 * p * p * (p + 1.0));
  const double c = c_slope_ * tau *
                   (1.0 - (pp - 1.0) * tp / (p * (p + 1.0)) + k * tp * tp / (2.0 * p + 1.0));
  const double s = s_max_ * (1.0 - tp / p + tp * tp / (2.0 * p * p * (p + 1.0)));
  return {c, s};
}

PTrigPair PTrigContext::quarter(double t) const {
  const double half = 0.5 * pi_p_;
  t = std::clamp(t, 0.0, half);
  const double tau = half - t;
  if (t < kSeriesCut) return series_low(t);
  if (tau < kSeriesCut) return series_high(tau);
  if (t <= low_.r_end()) {
    const Eigen::Vector2d y = low_(t);
    return {y(0), y(1)};
  }
  const Eigen::Vector2d y = high_(std::max(tau, high_.r_start()));
  return {y(0), y(1)};
}

PTrigPair PTrigContext::operator()(double theta) const {
  if (!std::isfinite(theta))
    throw std::domain_error("p-trig evaluation requires a finite phase");
  const double period = 2.0 * pi_p_;
  double t = std::fmod(theta, period);
  if (t < 0) t += period;
  if (t >= period) t -= period;

  double sign = 1.0;
  if (t >= pi_p_) {
    t -= pi_p_;
    sign = -1.0;
  }
  PTrigPair cs;
  if (t <= 0.5 * pi_p_) {
    cs = quarter(t);
  } else {
    const PTrigPair m = quarter(pi_p_ - t);
    cs = {-m.cos_p, m.sin_p};
  }
  // "+ 0.0" folds negative zeros.
  return {sign * cs.cos_p + 0.0, sign * cs.sin_p + 0.0};
}

PTrigPair ptrig_pair(double theta, const PTrigContext& ctx) { return ctx(theta); }

}  // namespace plap
