#include "shiftlab/step_function.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace shiftlab {

PhaseList make_phase_list(std::vector<double> phases, std::string source) {
  for (double& p : phases) {
    p = std::fmod(p, kTwoPi);
    if (p < 0.0) p += kTwoPi;
  }
  std::sort(phases.begin(), phases.end());
  return PhaseList{std::move(phases), std::move(source)};
}

Normalization normalization_from_string(const std::string& s) {
  if (s == "minimal-l1") return Normalization::kMinimalL1;
  if (s == "zero-mean") return Normalization::kZeroMean;
  if (s == "raw") return Normalization::kRaw;
  throw InvalidConfig("unknown normalization mode: " + s);
}

std::string to_string(Normalization n) {
  switch (n) {
    case Normalization::kMinimalL1: return "minimal-l1";
    case Normalization::kZeroMean: return "zero-mean";
    case Normalization::kRaw: return "raw";
  }
  return "raw";
}

double StepFunctionCircle::arc_start(size_t i) const { return breakpoints[i]; }

double StepFunctionCircle::arc_end(size_t i) const {
  return i + 1 < breakpoints.size() ? breakpoints[i + 1] : breakpoints[0] + kTwoPi;
}

double StepFunctionCircle::value_at(double theta) const {
  if (breakpoints.empty()) return constant;
  double th = std::fmod(theta, kTwoPi);
  if (th < 0.0) th += kTwoPi;
  // Last breakpoint <= th wins; below the first breakpoint we are on the
  // wrap arc, whose value is values.back().
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), th);
  if (it == breakpoints.begin()) return values.back();
  return values[static_cast<size_t>(std::distance(breakpoints.begin(), it)) - 1];
}

double StepFunctionCircle::jump_at(size_t i) const {
  const size_t m = breakpoints.size();
  const double before = values[(i + m - 1) % m];
  return values[i] - before;
}

double StepFunctionCircle::wrap_value() const {
  return breakpoints.empty() ? constant : values.back();
}

StepFunctionCircle StepFunctionCircle::shifted(double c) const {
  StepFunctionCircle out = *this;
  if (out.breakpoints.empty()) {
    out.constant += c;
  } else {
    for (double& v : out.values) v += c;
  }
  return out;
}

double StepFunctionCircle::l1_norm() const {
  if (breakpoints.empty()) return std::abs(constant) * kTwoPi;
  double acc = 0.0;
  for (size_t i = 0; i < arc_count(); ++i) acc += std::abs(values[i]) * arc_length(i);
  return acc;
}

double StepFunctionCircle::mean() const {
  if (breakpoints.empty()) return constant;
  double acc = 0.0;
  for (size_t i = 0; i < arc_count(); ++i) acc += values[i] * arc_length(i);
  return acc / kTwoPi;
}

double StepFunctionCircle::weighted_median() const {
  if (breakpoints.empty()) return constant;
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return values[a] < values[b]; });
  double cum = 0.0;
  for (size_t idx : order) {
    cum += arc_length(idx);
    if (cum >= kPi) return values[idx];
  }
  return values[order.back()];
}

StepFunctionCircle normalize(const StepFunctionCircle& f, Normalization mode) {
  StepFunctionCircle out = f;
  switch (mode) {
    case Normalization::kRaw:
      break;
    case Normalization::kZeroMean:
      out = f.shifted(-f.mean());
      break;
    case Normalization::kMinimalL1:
      out = f.shifted(-f.weighted_median());
      break;
  }
  out.normalization = mode;
  return out;
}

StepFunctionCircle step_from_phases(const PhaseList& plus, const PhaseList& minus,
                                    Normalization mode, double merge_tol) {
  struct Event {
    double theta;
    double jump;
  };
  std::vector<Event> events;
  events.reserve(plus.phases.size() + minus.phases.size());
  for (double p : plus.phases) events.push_back({p, 1.0});
  for (double p : minus.phases) events.push_back({p, -1.0});
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.theta < b.theta; });

  StepFunctionCircle f;
  std::vector<double> jumps;
  for (const Event& e : events) {
    if (!f.breakpoints.empty() && e.theta - f.breakpoints.back() < merge_tol) {
      jumps.back() += e.jump;
    } else {
      f.breakpoints.push_back(e.theta);
      jumps.push_back(e.jump);
    }
  }
  // Drop merged-out breakpoints, then accumulate from theta = 0 (the raw
  // convention: the wrap arc carries the count started at zero).
  std::vector<double> bps;
  std::vector<double> kept;
  for (size_t i = 0; i < jumps.size(); ++i) {
    if (jumps[i] != 0.0) {
      bps.push_back(f.breakpoints[i]);
      kept.push_back(jumps[i]);
    }
  }
  f.breakpoints = std::move(bps);
  if (f.breakpoints.empty()) {
    f.constant = 0.0;
    f.values.clear();
  } else {
    f.values.resize(f.breakpoints.size());
    double run = 0.0;
    for (size_t i = 0; i < kept.size(); ++i) {
      run += kept[i];
      f.values[i] = run;
    }
  }
  f.normalization = Normalization::kRaw;
  return normalize(f, mode);
}

Complex integrate_step(const StepFunctionCircle& f, const LaurentPoly& p) {
  if (f.breakpoints.empty()) return Complex(0.0, 0.0);
  Complex acc(0.0, 0.0);
  for (size_t i = 0; i < f.arc_count(); ++i) {
    const Complex za = std::polar(1.0, f.arc_start(i));
    const Complex zb = std::polar(1.0, f.arc_end(i));
    acc += f.values[i] * (p(zb) - p(za));
  }
  return acc;
}

JumpCheck check_integer_jumps(const StepFunctionCircle& f, double tol) {
  JumpCheck c;
  if (f.breakpoints.empty()) return c;
  double total = 0.0;
  for (size_t i = 0; i < f.breakpoints.size(); ++i) {
    const double j = f.jump_at(i);
    total += j;
    const double dev = std::abs(j - std::round(j));
    c.max_deviation = std::max(c.max_deviation, dev);
    if (dev > tol) c.integer_jumps = false;
  }
  c.total_jump = total;
  if (std::abs(total) > tol) c.integer_jumps = false;
  return c;
}

FourierCoeffs fourier_step(const StepFunctionCircle& f, int max_mode) {
  FourierCoeffs fc;
  fc.max_mode = max_mode;
  fc.c.assign(static_cast<size_t>(2 * max_mode + 1), Complex(0.0, 0.0));
  fc.at(0) = f.mean();
  if (f.breakpoints.empty()) return fc;
  for (int k = -max_mode; k <= max_mode; ++k) {
    if (k == 0) continue;
    Complex acc(0.0, 0.0);
    for (size_t i = 0; i < f.arc_count(); ++i) {
      const double a = f.arc_start(i);
      const double b = f.arc_end(i);
      const Complex ea = std::polar(1.0, -k * a);
      const Complex eb = std::polar(1.0, -k * b);
      acc += f.values[i] * (eb - ea);
    }
    fc.at(k) = acc / (Complex(0.0, -k) * kTwoPi);
  }
  return fc;
}

double zygmund_value(const StepFunctionCircle& f) {
  auto piece = [](double x) { return x * std::log1p(x); };
  if (f.breakpoints.empty()) {
    if (f.constant < 0.0) throw NegativeValues();
    return piece(f.constant);
  }
  double acc = 0.0;
  for (size_t i = 0; i < f.arc_count(); ++i) {
    if (f.values[i] < 0.0) throw NegativeValues();
    acc += piece(f.values[i]) * f.arc_length(i) / kTwoPi;
  }
  return acc;
}

// ------------------------------- line functions ----------------------------

double StepFunctionLine::value_at(double t) const {
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  return values[static_cast<size_t>(std::distance(breakpoints.begin(), it))];
}

double line_truncated_l1(const StepFunctionLine& f, double radius) {
  double acc = 0.0;
  double lo = -radius;
  size_t i = 0;
  while (i < f.breakpoints.size() && f.breakpoints[i] <= -radius) ++i;
  for (; i < f.breakpoints.size() && f.breakpoints[i] < radius; ++i) {
    acc += std::abs(f.values[i]) * (f.breakpoints[i] - lo);
    lo = f.breakpoints[i];
  }
  acc += std::abs(f.values[i]) * (radius - lo);
  return acc;
}

Complex integrate_line_against_derivative(const StepFunctionLine& xi, const RationalFn& f) {
  // sum_i v_i (f(b_i) - f(a_i)) with f(+-inf) = 0.
  Complex acc(0.0, 0.0);
  const size_t m = xi.breakpoints.size();
  if (m == 0) return acc;
  acc += xi.values.front() * f(xi.breakpoints.front());  // (-inf, t_1)
  for (size_t i = 1; i < m; ++i)
    acc += xi.values[i] * (f(xi.breakpoints[i]) - f(xi.breakpoints[i - 1]));
  acc += xi.values.back() * (Complex(0.0, 0.0) - f(xi.breakpoints.back()));
  return acc;
}

WeightedNormReport weighted_norm_report(const StepFunctionLine& f,
                                        const std::vector<double>& radii) {
  WeightedNormReport r;
  const size_t m = f.breakpoints.size();
  auto w = [](double t) { return std::atan(t); };
  if (m == 0) {
    r.weighted_norm = std::abs(f.values.front()) * kPi;
    r.tail_constant_estimate = std::abs(f.values.front());
    for (double rad : radii) r.truncated_l1[rad] = std::abs(f.values.front()) * 2.0 * rad;
    return r;
  }
  double acc = std::abs(f.values.front()) * (w(f.breakpoints.front()) + kPi / 2.0);
  for (size_t i = 1; i < m; ++i)
    acc += std::abs(f.values[i]) * (w(f.breakpoints[i]) - w(f.breakpoints[i - 1]));
  acc += std::abs(f.values.back()) * (kPi / 2.0 - w(f.breakpoints.back()));
  r.weighted_norm = acc;
  r.tail_constant_estimate = 0.5 * (std::abs(f.tail_left()) + std::abs(f.tail_right()));
  for (double rad : radii) r.truncated_l1[rad] = line_truncated_l1(f, rad);
  return r;
}

}  // namespace shiftlab
