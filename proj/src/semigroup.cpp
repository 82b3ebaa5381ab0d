#include "ictmc/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ictmc/kernels.hpp"

namespace ictmc {
namespace {

// Below this many safe steps the envelope is stepped directly instead of
// powering the frozen linear piece.
constexpr std::uint64_t kJumpThreshold = 64;
constexpr std::uint64_t kMinDirectSteps = 16;
constexpr std::uint64_t kProbeSeed = 0x1c7c5eedULL;

double certify_threshold(double scale) { return kNumericalViolationThreshold * (1.0 + scale); }

// Matrices in "B-form": M = I + B, stored n x stride with zero padding.
using BForm = std::vector<double>;

BForm bform_from_generator(const DenseMatrix& q, double delta, std::size_t stride) {
  const std::size_t n = q.size();
  BForm b(n * stride, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    double off = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x) continue;
      b[x * stride + y] = delta * q(x, y);
      off += b[x * stride + y];
    }
    b[x * stride + x] = -off;
  }
  return b;
}

// (I + A)^m - I by binary powering.
BForm bform_power(const BForm& a, std::uint64_t m, std::size_t n, std::size_t stride) {
  const auto& k = kernels::active();
  BForm result, scratch(a.size()), base = a;
  bool have = false;
  while (m > 0) {
    if (m & 1) {
      if (!have) {
        result = base;
        have = true;
      } else {
        k.bform_product(result.data(), base.data(), scratch.data(), n, stride);
        result.swap(scratch);
      }
    }
    m >>= 1;
    if (m > 0) {
      k.bform_product(base.data(), base.data(), scratch.data(), n, stride);
      base.swap(scratch);
    }
  }
  if (!have) result.assign(a.size(), 0.0);
  return result;
}

std::string describe(const Gamble& f) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (std::size_t i = 0; i < f.size(); ++i) os << (i ? ", " : "") << f[i];
  os << ")";
  return os.str();
}

double shortfall(const Gamble& lhs, const Gamble& rhs) {
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) worst = std::max(worst, rhs[i] - lhs[i]);
  return worst;
}

}  // namespace

std::vector<Gamble> probe_set(std::size_t n) {
  std::vector<Gamble> probes;
  for (std::size_t x = 0; x < n; ++x) probes.push_back(Gamble::indicator(n, x));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y)
      probes.push_back(Gamble::indicator(n, x) + Gamble::indicator(n, y));
  probes.push_back(Gamble::constant(n, 1.0));
  probes.push_back(Gamble::constant(n, -1.0));
  for (std::uint64_t i = 0; i < 16; ++i) probes.push_back(random_gamble(n, kProbeSeed + i));
  return probes;
}

DiscreteLTO DiscreteLTO::certify(OperatorEvaluation eval, std::optional<DenseMatrix> matrix,
                                 bool semigroup_generated) {
  if (!eval.apply) throw std::invalid_argument("operator has no evaluation");
  if (matrix && matrix->size() != eval.dimension)
    throw DimensionError("matrix size does not match operator dimension");
  const auto probes = probe_set(eval.dimension);
  std::vector<Gamble> images;
  images.reserve(probes.size());
  for (const Gamble& p : probes) images.push_back(eval(p));

  auto fail = [](const std::string& axiom, const std::string& detail, double magnitude) {
    std::ostringstream os;
    os << "not a lower transition operator: " << axiom << " fails on " << detail << " by "
       << magnitude;
    throw std::invalid_argument(os.str());
  };
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const Gamble& p = probes[i];
    const double scale = max_norm(p);
    const double l1 = p.min() - images[i].min();
    if (l1 > certify_threshold(scale)) fail("L1", describe(p), l1);
    const double l3 = max_norm(eval(2.0 * p) - 2.0 * images[i]);
    if (l3 > certify_threshold(2.0 * scale)) fail("L3", describe(p) + " with lambda=2", l3);
    if (i + 1 < probes.size()) {
      const Gamble& q = probes[i + 1];
      const double l2 = shortfall(eval(p + q), images[i] + images[i + 1]);
      if (l2 > certify_threshold(scale + max_norm(q)))
        fail("L2", describe(p) + " and " + describe(q), l2);
    }
  }
  return DiscreteLTO(std::move(eval), std::move(matrix), semigroup_generated);
}

DiscreteLTO DiscreteLTO::identity(std::size_t n) {
  return DiscreteLTO(OperatorEvaluation::identity(n), DenseMatrix::identity(n), true);
}

DiscreteLTO DiscreteLTO::stochastic(const DenseMatrix& matrix) {
  const std::size_t n = matrix.size();
  if (!matrix.all_finite()) throw std::invalid_argument("stochastic matrix has non-finite entries");
  for (std::size_t x = 0; x < n; ++x) {
    double sum = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (matrix(x, y) < 0.0)
        throw std::invalid_argument("stochastic matrix has a negative entry in row " +
                                    std::to_string(x));
      sum += matrix(x, y);
    }
    if (std::fabs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("stochastic matrix row " + std::to_string(x) +
                                  " does not sum to one");
  }
  auto m = std::make_shared<DenseMatrix>(matrix);
  OperatorEvaluation eval{n, [m](const Gamble& f) { return *m * f; }, true};
  return DiscreteLTO(std::move(eval), matrix, false);
}

DiscreteLTO compose(const DiscreteLTO& a, const DiscreteLTO& b) {
  if (a.size() != b.size())
    throw DimensionError("cannot compose operators of dimension " + std::to_string(a.size()) +
                         " and " + std::to_string(b.size()));
  auto outer = a.eval_.apply;
  auto inner = b.eval_.apply;
  OperatorEvaluation eval{a.size(), [outer, inner](const Gamble& f) { return outer(inner(f)); },
                          true};
  std::optional<DenseMatrix> matrix;
  if (a.matrix_ && b.matrix_) matrix = *a.matrix_ * *b.matrix_;
  return DiscreteLTO(std::move(eval), std::move(matrix), false);
}

std::vector<double> unit_segments(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be finite and >= 0");
  std::vector<double> segments;
  const double whole = std::floor(t);
  for (double i = 0; i < whole; ++i) segments.push_back(1.0);
  const double rest = t - whole;
  if (rest > 0.0) segments.push_back(rest);
  return segments;
}

TransitionSolver::TransitionSolver(LowerRateModel model, SolverOptions options)
    : model_(std::make_shared<const LowerRateModel>(std::move(model))),
      options_(options),
      cache_(std::make_shared<PlanCache>()) {
  if (!(options_.tolerance > 0.0) || !std::isfinite(options_.tolerance))
    throw std::invalid_argument("solver tolerance must be positive");
  if (options_.max_doublings < 1) throw std::invalid_argument("max_doublings must be at least 1");
}

std::uint64_t TransitionSolver::initial_steps(double tau) const {
  const double admissible = std::ceil(tau * model_->norm_bound().value);
  return std::max<std::uint64_t>({1, static_cast<std::uint64_t>(admissible), model_->size()});
}

Gamble TransitionSolver::euler_product(const Gamble& f, double t, std::uint64_t steps) const {
  const LowerRateModel& model = *model_;
  const std::size_t n = model.size();
  if (f.size() != n) throw DimensionError("gamble size does not match the model");
  if (steps == 0 || t == 0.0) return f;
  const double delta = t / static_cast<double>(steps);
  if (delta * model.norm_bound().value > 1.0 + 1e-12)
    throw std::invalid_argument("inadmissible Euler step: delta * norm bound > 1");

  const std::size_t stride = kernels::padded_stride(n);
  const auto& k = kernels::active();
  Gamble g = f;
  std::vector<double> scratch(n);
  std::uint64_t remaining = steps;
  while (remaining > 0) {
    const LinearPiece piece = model.linear_piece(g);
    std::uint64_t safe = remaining;
    if (std::isfinite(piece.stable_duration)) {
      const double ratio = piece.stable_duration / delta;
      if (ratio < static_cast<double>(remaining)) safe = static_cast<std::uint64_t>(ratio);
    }
    if (safe >= kJumpThreshold || safe == remaining) {
      const BForm power = bform_power(bform_from_generator(piece.generator, delta, stride), safe,
                                      n, stride);
      k.bform_apply(power.data(), n, stride, g.data(), scratch.data());
      std::copy(scratch.begin(), scratch.end(), g.data());
      remaining -= safe;
    } else {
      const std::uint64_t direct = std::min(remaining, std::max(safe, kMinDirectSteps));
      for (std::uint64_t s = 0; s < direct; ++s) {
        const Gamble q = model.lower_apply(g);
        for (std::size_t x = 0; x < n; ++x) g[x] += delta * q[x];
      }
      remaining -= direct;
    }
  }
  return g;
}

TransitionSolver::Segment TransitionSolver::run_segment(const Gamble& f, double tau) const {
  std::uint64_t steps = initial_steps(tau);
  Gamble coarse = euler_product(f, tau, steps);
  for (std::uint32_t level = 0;; ++level) {
    Gamble fine = euler_product(f, tau, 2 * steps);
    const double diff = max_norm(fine - coarse);
    if (diff <= options_.tolerance || level + 1 >= options_.max_doublings)
      return {std::move(fine), 2 * steps, diff, diff <= options_.tolerance};
    steps *= 2;
    coarse = std::move(fine);
  }
}

SolverResult TransitionSolver::evolve(const Gamble& f, double t) const {
  if (f.size() != model_->size())
    throw DimensionError("gamble of size " + std::to_string(f.size()) + " for a model with " +
                         std::to_string(model_->size()) + " states");
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be finite and >= 0");
  if (t == 0.0) return {f, 1, 0.0, true};
  SolverResult result{f, 0, 0.0, true};
  for (double tau : unit_segments(t)) {
    Segment seg = run_segment(result.value, tau);
    result.value = std::move(seg.value);
    result.steps_used += seg.steps;
    result.est_error += seg.est_error;
    result.converged = result.converged && seg.converged;
  }
  return result;
}

SolverResult TransitionSolver::evolve_upper(const Gamble& f, double t) const {
  SolverResult r = evolve(-f, t);
  r.value = -r.value + 0.0;  // no negative zeros
  return r;
}

std::vector<std::uint64_t> TransitionSolver::step_plan(double t) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    if (auto it = cache_->plans.find(t); it != cache_->plans.end()) return it->second;
  }
  const auto segments = unit_segments(t);
  std::vector<std::uint64_t> plan(segments.size(), 0);
  for (const Gamble& p : probe_set(model_->size())) {
    Gamble g = p;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      Segment seg = run_segment(g, segments[i]);
      plan[i] = std::max(plan[i], seg.steps);
      g = std::move(seg.value);
    }
  }
  std::lock_guard<std::mutex> lock(cache_->mutex);
  return cache_->plans.emplace(t, std::move(plan)).first->second;
}

DiscreteLTO TransitionSolver::evolve_operator(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be finite and >= 0");
  if (t == 0.0) return DiscreteLTO::identity(model_->size());
  const auto segments = unit_segments(t);
  const auto plan = step_plan(t);
  const TransitionSolver self = *this;
  OperatorEvaluation eval{model_->size(),
                          [self, segments, plan](const Gamble& f) {
                            Gamble g = f;
                            for (std::size_t i = 0; i < segments.size(); ++i)
                              g = self.euler_product(g, segments[i], plan[i]);
                            return g;
                          },
                          true};
  std::optional<DenseMatrix> matrix;
  if (model_->kind() == RateModelKind::precise) {
    const std::size_t n = model_->size();
    DenseMatrix m(n);
    for (std::size_t y = 0; y < n; ++y) {
      const Gamble column = eval(Gamble::indicator(n, y));
      for (std::size_t x = 0; x < n; ++x) m(x, y) = column[x];
    }
    matrix = std::move(m);
  }
  return DiscreteLTO::certify(std::move(eval), std::move(matrix), true);
}

double derivative_check(const TransitionSolver& solver, const Gamble& f, double t, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  if (!(t >= 0.0)) throw std::invalid_argument("t must be non-negative");
  const Gamble at = solver.evolve(f, t).value;
  const Gamble slope = solver.model().lower_apply(at);
  Gamble difference;
  if (t >= h) {
    difference = solver.evolve(f, t + h).value - solver.evolve(f, t - h).value;
    difference *= 1.0 / (2.0 * h);
  } else {
    difference = solver.evolve(f, t + h).value - at;
    difference *= 1.0 / h;
  }
  return max_norm(difference - slope);
}

AxiomReport check_lto_axioms(const DiscreteLTO& op, std::size_t trials, std::uint64_t seed) {
  AxiomReport report;
  const std::size_t n = op.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> scale(0.0, 3.0);
  constexpr double kEpsilon = 1e-6;

  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::vector<double> fv(n), gv(n);
    for (auto& v : fv) v = unit(rng);
    for (auto& v : gv) v = unit(rng);
    const Gamble f(fv), g(gv);
    const double lambda = scale(rng);
    const double mu = 2.0 * unit(rng);
    const std::string tag = "trial " + std::to_string(trial) + " f=" + describe(f);

    const Gamble tf = op(f), tg = op(g);
    const Gamble upper_f = op.upper(f);
    report.record("L1", tag, f.min() - tf.min());
    report.record("L2", tag + " g=" + describe(g), shortfall(op(f + g), tf + tg));
    report.record("L3", tag + " lambda=" + std::to_string(lambda), max_norm(op(lambda * f) - lambda * tf));
    report.record("L3", tag + " lambda=2", max_norm(op(2.0 * f) - 2.0 * tf));
    double l4 = 0.0;
    for (std::size_t x = 0; x < n; ++x)
      l4 = std::max({l4, f.min() - tf[x], tf[x] - upper_f[x], upper_f[x] - f.max()});
    report.record("L4", tag, l4);
    report.record("L5", tag + " mu=" + std::to_string(mu), max_norm(op(f + mu) - (tf + mu)));
    const Gamble below = f - abs(g);  // below <= f
    report.record("L6", tag + " g=" + describe(below), shortfall(tf, op(below)));
    report.record("L6", tag + " upper g=" + describe(below), shortfall(upper_f, op.upper(below)));
    report.record("L7", tag + " g=" + describe(g), shortfall(op.upper(abs(f - g)), abs(tf - tg)));
    const Gamble nudged = op(f + kEpsilon * g);
    report.record("L8", tag + " epsilon=1e-6", max_norm(nudged - tf) - kEpsilon * max_norm(g));
    report.record("L10", tag + " g=" + describe(g), max_norm(tf - tg) - max_norm(f - g));
  }
  return report;
}

StateSet above_minimum_pattern(const TransitionSolver& solver, const Gamble& f, double t,
                               Envelope envelope) {
  const Gamble shifted = f - f.min();
  const Gamble image = envelope == Envelope::lower ? solver.evolve(shifted, t).value
                                                   : solver.evolve_upper(shifted, t).value;
  StateSet out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) out[x] = image[x] > 0.0;
  return out;
}

StateSet below_maximum_pattern(const TransitionSolver& solver, const Gamble& f, double t,
                               Envelope envelope) {
  const Gamble gap = -(f - f.max());
  // T f(x) < max f  iff  Tbar(max f - f)(x) > 0, and symmetrically for Tbar.
  Gamble image(std::vector<double>(f.size()));
  if (envelope == Envelope::lower) {
    image = solver.evolve_upper(gap, t).value;
  } else {
    image = solver.evolve(gap, t).value;
  }
  StateSet out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) out[x] = image[x] > 0.0;
  return out;
}

}  // namespace ictmc
