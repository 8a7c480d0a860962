// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

#include "fragvqe/optimizer.hpp"

#include "fragvqe/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace fragvqe {

std::string to_string(LbfgsStatus s) {
  switch (s) {
    case LbfgsStatus::GradientTolerance: return "gradient_tolerance";
    case LbfgsStatus::FunctionTolerance: return "function_tolerance";
    case LbfgsStatus::MaxEvaluations: return "max_evaluations";
    case LbfgsStatus::LineSearchFailed: return "line_search_failed";
    case LbfgsStatus::NonFinite: return "non_finite";
  }
  return "unknown";
}

namespace {

constexpr double kC1 = 1e-4;
constexpr double kC2 = 0.9;
constexpr double kDelta = 0.1;
constexpr double kApproxEps = 1e-13;

struct Point {
  double alpha = 0.0;
  double f = 0.0;
  double d = 0.0;  // directional derivative
  Eigen::VectorXd x;
  Eigen::VectorXd g;
};

class Problem {
 public:
  Problem(const Objective& f, const LbfgsOptions& o) : f_(f), o_(o) {}

  [[nodiscard]] bool exhausted() const { return evals_ >= o_.max_evals; }
  [[nodiscard]] int evals() const { return evals_; }

  Eigen::VectorXd project(Eigen::VectorXd x) const {
    if (o_.lower) x = x.cwiseMax(*o_.lower);
    if (o_.upper) x = x.cwiseMin(*o_.upper);
    return x;
  }

  /// Gradient with components pushing against an active bound removed.
  Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g) const {
    Eigen::VectorXd pg = g;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (o_.lower && x[i] <= (*o_.lower)[i] && g[i] > 0) pg[i] = 0;
      if (o_.upper && x[i] >= (*o_.upper)[i] && g[i] < 0) pg[i] = 0;
    }
    return pg;
  }

  Point eval(const Eigen::VectorXd& x0, const Eigen::VectorXd& dir, double alpha) {
    Point p;
    p.alpha = alpha;
    p.x = project(x0 + alpha * dir);
    p.f = f_(p.x, p.g);
    ++evals_;
    p.d = p.g.dot(dir);
    return p;
  }

 private:
  const Objective& f_;
  const LbfgsOptions& o_;
  int evals_ = 0;
};

bool wolfe(const Point& p, const Point& p0) {
  return p.f <= p0.f + kC1 * p.alpha * p0.d && std::abs(p.d) <= -kC2 * p0.d;
}

// Hager-Zhang approximate Wolfe conditions; usable when f has hit round-off.
bool approx_wolfe(const Point& p, const Point& p0) {
  return p.f <= p0.f + kApproxEps * std::max(1.0, std::abs(p0.f)) && p.d >= kC2 * p0.d &&
         p.d <= (2 * kDelta - 1) * p0.d;
}

double cubic_min(const Point& a, const Point& b) {
  const double d1 = a.d + b.d - 3 * (a.f - b.f) / (a.alpha - b.alpha);
  const double disc = d1 * d1 - a.d * b.d;
  if (disc < 0) return 0.5 * (a.alpha + b.alpha);
  const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
  const double t = b.alpha - (b.alpha - a.alpha) * (b.d + d2 - d1) / (b.d - a.d + 2 * d2);
  return std::isfinite(t) ? t : 0.5 * (a.alpha + b.alpha);
}

std::optional<Point> zoom(Problem& pb, const Eigen::VectorXd& x0, const Eigen::VectorXd& dir,
                          const Point& p0, Point lo, Point hi) {
  for (int it = 0; it < 40 && !pb.exhausted(); ++it) {
    const double width = hi.alpha - lo.alpha;
    if (std::abs(width) < 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
    double a = cubic_min(lo, hi);
    const double amin = std::min(lo.alpha, hi.alpha) + 0.1 * std::abs(width);
    const double amax = std::max(lo.alpha, hi.alpha) - 0.1 * std::abs(width);
    if (!(a >= amin && a <= amax)) a = 0.5 * (lo.alpha + hi.alpha);
    Point p = pb.eval(x0, dir, a);
    if (!std::isfinite(p.f)) {
      hi = p;
      continue;
    }
    if (wolfe(p, p0) || approx_wolfe(p, p0)) return p;
    if (p.f > p0.f + kC1 * a * p0.d || p.f >= lo.f) {
      hi = p;
    } else {
      if (std::abs(p.d) <= -kC2 * p0.d) return p;
      if (p.d * (hi.alpha - lo.alpha) >= 0) hi = lo;
      lo = p;
    }
  }
  if (lo.alpha > 0 && (lo.f < p0.f || approx_wolfe(lo, p0))) return lo;
  return std::nullopt;
}

std::optional<Point> line_search(Problem& pb, const Eigen::VectorXd& x0, const Eigen::VectorXd& dir,
                                 const Point& p0, double alpha0) {
  Point prev = p0;
  double a = alpha0;
  for (int it = 0; it < 30 && !pb.exhausted(); ++it) {
    Point p = pb.eval(x0, dir, a);
    if (!std::isfinite(p.f)) {
      a *= 0.1;
      continue;
    }
    if (wolfe(p, p0) || approx_wolfe(p, p0)) return p;
    if (p.f > p0.f + kC1 * a * p0.d || (it > 0 && p.f >= prev.f)) return zoom(pb, x0, dir, p0, prev, p);
    if (std::abs(p.d) <= -kC2 * p0.d) return p;
    if (p.d >= 0) return zoom(pb, x0, dir, p0, p, prev);
    prev = p;
    a *= 2.0;
  }
  if (prev.alpha > 0 && prev.f < p0.f) return prev;
  return std::nullopt;
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& f, Eigen::VectorXd x0, const LbfgsOptions& opts) {
  if (opts.gtol <= 0 || opts.ftol < 0 || opts.history < 1 || opts.max_evals < 1)
    throw ValidationError("invalid optimizer tolerances");
  Problem pb(f, opts);
  LbfgsResult res;
  res.x = pb.project(std::move(x0));
  res.f = f(res.x, res.grad);
  res.n_evals = 1;
  if (!std::isfinite(res.f) || !res.grad.allFinite()) {
    res.status = LbfgsStatus::NonFinite;
    return res;
  }
  const Eigen::Index n = res.x.size();
  if (n == 0) {
    res.status = LbfgsStatus::GradientTolerance;
    return res;
  }

  std::deque<Eigen::VectorXd> s_hist;
  std::deque<Eigen::VectorXd> y_hist;
  std::deque<double> rho_hist;
  bool fresh = true;
  int stalls = 0;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    res.n_iters = iter;
    const Eigen::VectorXd pg = pb.projected_gradient(res.x, res.grad);
    if (pg.lpNorm<Eigen::Infinity>() <= opts.gtol) {
      res.status = LbfgsStatus::GradientTolerance;
      break;
    }
    if (pb.evals() + 1 >= opts.max_evals) {
      res.status = LbfgsStatus::MaxEvaluations;
      break;
    }

    // two-loop recursion
    Eigen::VectorXd q = pg;
    const std::size_t m = s_hist.size();
    std::vector<double> alpha(m);
    for (std::size_t i = m; i-- > 0;) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (m > 0) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < m; ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd dir = -q;
    for (Eigen::Index i = 0; i < n; ++i)
      if (pg[i] == 0 && res.grad[i] != 0) dir[i] = 0;

    Point p0;
    p0.f = res.f;
    p0.x = res.x;
    p0.g = res.grad;
    p0.d = res.grad.dot(dir);
    if (!(p0.d < 0)) {
      dir = -pg;
      p0.d = res.grad.dot(dir);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      fresh = true;
    }
    const double a0 = fresh ? std::min(1.0, 1.0 / pg.lpNorm<Eigen::Infinity>()) : 1.0;

    const int before = pb.evals();
    std::optional<Point> step = line_search(pb, res.x, dir, p0, a0);
    res.n_evals += pb.evals() - before;
    if (!step) {
      if (!fresh) {
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        fresh = true;
        continue;
      }
      res.status = pb.exhausted() ? LbfgsStatus::MaxEvaluations : LbfgsStatus::LineSearchFailed;
      break;
    }
    fresh = false;

    const Eigen::VectorXd s = step->x - res.x;
    const Eigen::VectorXd y = step->g - res.grad;
    const double f_prev = res.f;
    res.x = step->x;
    res.f = step->f;
    res.grad = step->g;

    const double sy = s.dot(y);
    if (sy > 1e-12 * y.squaredNorm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opts.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    const double scale = std::max({std::abs(f_prev), std::abs(res.f), 1.0});
    stalls = (f_prev - res.f) <= opts.ftol * scale ? stalls + 1 : 0;
    if (stalls >= opts.max_stalls) {
      res.status = LbfgsStatus::FunctionTolerance;
      break;
    }
    if (pb.exhausted()) {
      res.status = LbfgsStatus::MaxEvaluations;
      break;
    }
  }
  return res;
}

}  // namespace fragvqe
