#include "ictmc/rate_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ictmc/kernels.hpp"

namespace ictmc {
namespace {

constexpr double kFloatRowSumTolerance = 1e-12;
// Relative size below which an envelope comparison is treated as a tie.
constexpr double kTieRelative = 1e-13;
// Relative size below which a Krylov projection counts as zero.
constexpr double kKrylovRelative = 1e-11;
// Fraction of the analytic stability horizon actually used.
constexpr double kStabilitySafety = 0.5;

std::string where(std::size_t row, std::size_t col) {
  return "(" + std::to_string(row) + "," + std::to_string(col) + ")";
}

void check_square(const RateMatrix& m, std::size_t n, const char* what) {
  if (m.size() != n) throw ModelError(std::string(what) + " must have one row per state");
  for (std::size_t r = 0; r < n; ++r)
    if (m[r].size() != n)
      throw ModelError(std::string(what) + " row " + std::to_string(r) + " must have " +
                           std::to_string(n) + " entries",
                       r);
}

// Off-diagonal entries non-negative and the row summing to zero: exactly
// when every entry is a text literal, within 1e-12 otherwise.
void check_intensity_row(const std::vector<Rate>& row, std::size_t x,
                         std::optional<std::size_t> candidate) {
  bool all_literal = true;
  Rational exact_sum = 0;
  double float_sum = 0.0;
  for (std::size_t y = 0; y < row.size(); ++y) {
    if (y != x && row[y].sign() < 0)
      throw ModelError("negative off-diagonal rate " + row[y].text() + " at " + where(x, y), x, y,
                       candidate);
    all_literal = all_literal && row[y].is_literal();
    exact_sum += row[y].exact();
    float_sum += row[y].value();
  }
  const bool ok = all_literal ? exact_sum == 0 : std::fabs(float_sum) <= kFloatRowSumTolerance;
  if (!ok) {
    std::ostringstream msg;
    msg << "row " << x << " does not sum to zero (sum ";
    if (all_literal)
      msg << exact_sum.str();
    else
      msg << float_sum;
    msg << ")";
    throw ModelError(msg.str(), x, std::nullopt, candidate);
  }
}

RateMatrix to_rates(const DenseMatrix& m) {
  RateMatrix out(m.size(), std::vector<Rate>(m.size()));
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m.size(); ++c) out[r][c] = Rate(m(r, c));
  return out;
}

double span_of(const std::vector<double>& v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

}  // namespace

const char* to_string(RateModelKind kind) {
  switch (kind) {
    case RateModelKind::precise: return "precise";
    case RateModelKind::interval: return "interval";
    case RateModelKind::rowsets: return "rowsets";
  }
  return "?";
}

LowerRateModel::LowerRateModel(StateSpace states, RateModelKind kind)
    : states_(std::move(states)), kind_(kind) {}

LowerRateModel LowerRateModel::precise(StateSpace states, RateMatrix matrix) {
  const std::size_t n = states.size();
  check_square(matrix, n, "rate matrix");
  for (std::size_t x = 0; x < n; ++x) check_intensity_row(matrix[x], x, std::nullopt);
  LowerRateModel m(std::move(states), RateModelKind::precise);
  m.candidates_.resize(n);
  for (std::size_t x = 0; x < n; ++x) m.candidates_[x].push_back(matrix[x]);
  m.matrix_ = std::move(matrix);
  m.pack();
  return m;
}

LowerRateModel LowerRateModel::precise(StateSpace states, const DenseMatrix& matrix) {
  return precise(std::move(states), to_rates(matrix));
}

LowerRateModel LowerRateModel::interval(StateSpace states, RateMatrix lower, RateMatrix upper) {
  const std::size_t n = states.size();
  check_square(lower, n, "lower bound matrix");
  check_square(upper, n, "upper bound matrix");
  for (std::size_t x = 0; x < n; ++x) {
    if (lower[x][x].sign() != 0 || upper[x][x].sign() != 0)
      throw ModelError("diagonal of interval bounds must be zero at " + where(x, x), x, x);
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x) continue;
      if (lower[x][y].sign() < 0)
        throw ModelError("negative lower rate " + lower[x][y].text() + " at " + where(x, y), x, y);
      if (lower[x][y].exact() > upper[x][y].exact())
        throw ModelError("lower rate " + lower[x][y].text() + " exceeds upper rate " +
                             upper[x][y].text() + " at " + where(x, y),
                         x, y);
    }
  }
  LowerRateModel m(std::move(states), RateModelKind::interval);
  m.lower_ = std::move(lower);
  m.upper_ = std::move(upper);
  m.pack();
  return m;
}

LowerRateModel LowerRateModel::interval(StateSpace states, const DenseMatrix& lower,
                                        const DenseMatrix& upper) {
  return interval(std::move(states), to_rates(lower), to_rates(upper));
}

LowerRateModel LowerRateModel::row_sets(StateSpace states, RowCandidates candidates) {
  const std::size_t n = states.size();
  if (candidates.size() != n) throw ModelError("row sets must list candidates for every state");
  for (std::size_t x = 0; x < n; ++x) {
    if (candidates[x].empty()) throw ModelError("state " + std::to_string(x) + " has no candidate rows", x);
    for (std::size_t c = 0; c < candidates[x].size(); ++c) {
      if (candidates[x][c].size() != n)
        throw ModelError("candidate row must have " + std::to_string(n) + " entries", x,
                         std::nullopt, c);
      check_intensity_row(candidates[x][c], x, c);
    }
  }
  LowerRateModel m(std::move(states), RateModelKind::rowsets);
  m.candidates_ = std::move(candidates);
  m.pack();
  return m;
}

LowerRateModel LowerRateModel::row_sets(
    StateSpace states, const std::vector<std::vector<std::vector<double>>>& candidates) {
  RowCandidates rows(candidates.size());
  for (std::size_t x = 0; x < candidates.size(); ++x)
    for (const auto& row : candidates[x]) {
      std::vector<Rate> r;
      r.reserve(row.size());
      for (double v : row) r.emplace_back(v);
      rows[x].push_back(std::move(r));
    }
  return row_sets(std::move(states), std::move(rows));
}

LowerRateModel LowerRateModel::zero(StateSpace states) {
  const std::size_t n = states.size();
  return precise(std::move(states), DenseMatrix(n));
}

void LowerRateModel::pack() {
  const std::size_t n = size();
  stride_ = kernels::padded_stride(n);
  if (kind_ == RateModelKind::interval) {
    lo_.assign(n * stride_, 0.0);
    hi_.assign(n * stride_, 0.0);
    interval_free_.assign(n * n, false);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) {
        if (x == y) continue;
        lo_[x * stride_ + y] = lower_[x][y].value();
        hi_[x * stride_ + y] = upper_[x][y].value();
        interval_free_[x * n + y] = lo_[x * stride_ + y] < hi_[x * stride_ + y];
      }
  } else {
    row_begin_.assign(n + 1, 0);
    rows_.clear();
    for (std::size_t x = 0; x < n; ++x) {
      row_begin_[x + 1] = row_begin_[x] + static_cast<std::uint32_t>(candidates_[x].size());
      for (const auto& cand : candidates_[x]) {
        std::vector<double> packed(stride_, 0.0);
        for (std::size_t y = 0; y < n; ++y)
          if (y != x) packed[y] = cand[y].value();
        rows_.insert(rows_.end(), packed.begin(), packed.end());
      }
    }
  }
  double worst = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    const Gamble e = Gamble::indicator(n, x);
    worst = std::max(worst, std::fabs(lower_apply(e)[x]));
  }
  bound_.value = 2.0 * worst;
}

void LowerRateModel::apply_into(const double* f, double* out) const {
  const auto& k = kernels::active();
  if (kind_ == RateModelKind::interval)
    k.interval_lower(lo_.data(), hi_.data(), size(), stride_, f, out);
  else
    k.rowset_lower(rows_.data(), row_begin_.data(), size(), stride_, f, out, nullptr);
}

Gamble LowerRateModel::lower_apply(const Gamble& f) const {
  if (f.size() != size())
    throw DimensionError("gamble of size " + std::to_string(f.size()) + " applied to model with " +
                         std::to_string(size()) + " states");
  std::vector<double> out(size());
  apply_into(f.data(), out.data());
  return Gamble(std::move(out));
}

Gamble LowerRateModel::upper_apply(const Gamble& f) const { return -lower_apply(-f); }

bool LowerRateModel::upper_indicator_positive(std::size_t to, std::size_t from) const {
  if (to >= size() || from >= size()) throw std::out_of_range("state index out of range");
  if (to == from) return false;  // Qbar(1_x)(x) <= 0
  if (kind_ == RateModelKind::interval) return upper_[from][to].sign() > 0;
  return std::any_of(candidates_[from].begin(), candidates_[from].end(),
                     [&](const std::vector<Rate>& row) { return row[to].sign() > 0; });
}

bool LowerRateModel::lower_indicator_positive(const StateSet& members, std::size_t y) const {
  if (members.size() != size()) throw DimensionError("state set size mismatch");
  if (y >= size()) throw std::out_of_range("state index out of range");
  if (members[y]) return false;  // Q(1_A)(y) <= 0 for y in A
  auto hits = [&](const std::vector<Rate>& row) {
    for (std::size_t z = 0; z < size(); ++z)
      if (members[z] && row[z].sign() > 0) return true;
    return false;
  };
  if (kind_ == RateModelKind::interval) return hits(lower_[y]);
  return std::all_of(candidates_[y].begin(), candidates_[y].end(), hits);
}

LinearPiece LowerRateModel::linear_piece(const Gamble& g) const {
  const std::size_t n = size();
  if (g.size() != n) throw DimensionError("gamble size mismatch");
  LinearPiece piece{DenseMatrix(n), std::numeric_limits<double>::infinity()};
  DenseMatrix& q = piece.generator;

  // A comparison that decides the envelope at g: its current value (the
  // margin by which the selected choice wins) and how fast it can move per
  // unit of span(Q_S g) and time.
  struct Comparison {
    std::size_t x;
    std::size_t y;             // interval pair (x, y)
    std::uint32_t candidate;   // rowset alternative
    double margin;
    double sensitivity;
  };
  std::vector<Comparison> comparisons;
  const double g_span = g.span();

  if (kind_ == RateModelKind::interval) {
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        if (y == x) continue;
        const double d = g[y] - g[x];
        q(x, y) = d >= 0.0 ? lo_[x * stride_ + y] : hi_[x * stride_ + y];
        if (interval_free_[x * n + y]) comparisons.push_back({x, y, 0, std::fabs(d), 1.0});
      }
    }
  } else {
    std::vector<double> best(n);
    std::vector<std::uint32_t> arg(n);
    kernels::active().rowset_lower(rows_.data(), row_begin_.data(), n, stride_, g.data(),
                                   best.data(), arg.data());
    for (std::size_t x = 0; x < n; ++x) {
      const double* sel = rows_.data() + arg[x] * stride_;
      for (std::size_t y = 0; y < n; ++y)
        if (y != x) q(x, y) = sel[y];
      for (std::uint32_t c = row_begin_[x]; c < row_begin_[x + 1]; ++c) {
        if (c == arg[x]) continue;
        const double* alt = rows_.data() + c * stride_;
        double l1 = 0.0, margin = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
          const double w = alt[y] - sel[y];
          l1 += std::fabs(w);
          margin += w * (g[y] - g[x]);
        }
        if (l1 == 0.0) continue;  // duplicate row
        comparisons.push_back({x, x, c, std::max(margin, 0.0), l1});
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    double off = 0.0;
    for (std::size_t y = 0; y < n; ++y)
      if (y != x) off += q(x, y);
    q(x, x) = -off;
  }
  if (comparisons.empty() || g_span == 0.0) return piece;

  std::vector<double> qg(n);
  for (std::size_t x = 0; x < n; ++x) {
    double acc = 0.0;
    for (std::size_t y = 0; y < n; ++y)
      if (y != x) acc += q(x, y) * (g[y] - g[x]);
    qg[x] = acc;
  }
  const double drift = span_of(qg);

  // Krylov vectors Q_S^k g, k = 1..n-1, built only when a tie shows up.
  std::vector<std::vector<double>> krylov;
  auto functional = [&](const Comparison& c, const std::vector<double>& h) {
    if (kind_ == RateModelKind::interval) return h[c.y] - h[c.x];
    double acc = 0.0;
    const double* alt = rows_.data() + c.candidate * stride_;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == c.x) continue;
      acc += (alt[y] - q(c.x, y)) * (h[y] - h[c.x]);
    }
    return acc;
  };
  auto persistent_tie = [&](const Comparison& c) {
    if (krylov.empty()) {
      std::vector<double> h = qg;
      for (std::size_t k = 1; k < n; ++k) {
        krylov.push_back(h);
        std::vector<double> next(n);
        for (std::size_t x = 0; x < n; ++x) {
          double acc = 0.0;
          for (std::size_t y = 0; y < n; ++y)
            if (y != x) acc += q(x, y) * (h[y] - h[x]);
          next[x] = acc;
        }
        h = std::move(next);
      }
    }
    double scale = g_span * c.sensitivity;
    for (const auto& h : krylov) {
      scale *= std::max(bound_.value, 1.0);
      if (std::fabs(functional(c, h)) > kKrylovRelative * scale) return false;
    }
    return true;
  };

  double horizon = std::numeric_limits<double>::infinity();
  for (const Comparison& c : comparisons) {
    if (c.margin <= kTieRelative * c.sensitivity * g_span) {
      if (persistent_tie(c)) continue;
      horizon = 0.0;
      break;
    }
    if (drift > 0.0) horizon = std::min(horizon, c.margin / (c.sensitivity * drift));
  }
  piece.stable_duration = kStabilitySafety * horizon;
  return piece;
}

std::uint64_t LowerRateModel::extreme_count() const {
  std::uint64_t count = 1;
  const std::uint64_t cap = std::uint64_t{1} << 62;
  for (std::size_t x = 0; x < size(); ++x) {
    std::uint64_t per_row = 1;
    if (kind_ == RateModelKind::interval) {
      for (std::size_t y = 0; y < size(); ++y)
        if (y != x && interval_free_[x * size() + y]) per_row = std::min(cap, per_row * 2);
    } else {
      per_row = candidates_[x].size();
    }
    count = (count > cap / std::max<std::uint64_t>(per_row, 1)) ? cap : count * per_row;
  }
  return count;
}

std::vector<DenseMatrix> LowerRateModel::extreme_matrices(std::uint64_t limit) const {
  const std::size_t n = size();
  if (extreme_count() > limit)
    throw std::length_error("model has " + std::to_string(extreme_count()) +
                            " extreme matrices, more than " + std::to_string(limit));
  // Per-row lists of extreme rows.
  std::vector<std::vector<std::vector<double>>> rows(n);
  for (std::size_t x = 0; x < n; ++x) {
    if (kind_ == RateModelKind::interval) {
      std::vector<std::size_t> free;
      for (std::size_t y = 0; y < n; ++y)
        if (y != x && interval_free_[x * n + y]) free.push_back(y);
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free.size()); ++mask) {
        std::vector<double> r(n, 0.0);
        for (std::size_t y = 0; y < n; ++y)
          if (y != x) r[y] = lo_[x * stride_ + y];
        for (std::size_t b = 0; b < free.size(); ++b)
          if (mask >> b & 1) r[free[b]] = hi_[x * stride_ + free[b]];
        rows[x].push_back(std::move(r));
      }
    } else {
      for (const auto& cand : candidates_[x]) {
        std::vector<double> r(n, 0.0);
        for (std::size_t y = 0; y < n; ++y)
          if (y != x) r[y] = cand[y].value();
        rows[x].push_back(std::move(r));
      }
    }
    for (auto& r : rows[x]) {
      double off = 0.0;
      for (std::size_t y = 0; y < n; ++y)
        if (y != x) off += r[y];
      r[x] = -off;
    }
  }
  std::vector<DenseMatrix> out;
  std::vector<std::size_t> pick(n, 0);
  while (true) {
    DenseMatrix m(n);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) m(x, y) = rows[x][pick[x]][y];
    out.push_back(std::move(m));
    std::size_t x = 0;
    while (x < n && ++pick[x] == rows[x].size()) pick[x++] = 0;
    if (x == n) break;
  }
  return out;
}

OperatorEvaluation LowerRateModel::as_operator() const {
  auto self = std::make_shared<LowerRateModel>(*this);
  return {size(), [self](const Gamble& f) { return self->lower_apply(f); }, true};
}

bool LowerRateModel::operator==(const LowerRateModel& other) const {
  return states_ == other.states_ && kind_ == other.kind_ && matrix_ == other.matrix_ &&
         lower_ == other.lower_ && upper_ == other.upper_ && candidates_ == other.candidates_;
}

OperatorEvaluation induced_transition_step(const LowerRateModel& model, double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("step size must be a finite non-negative number");
  if (delta * model.norm_bound().value > 1.0)
    throw std::invalid_argument("inadmissible step size: delta * norm bound = " +
                                std::to_string(delta * model.norm_bound().value) + " > 1");
  auto self = std::make_shared<LowerRateModel>(model);
  return {model.size(),
          [self, delta](const Gamble& f) {
            Gamble q = self->lower_apply(f);
            Gamble out = f;
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += delta * q[i];
            return out;
          },
          true};
}

OperatorEvaluation rate_from_transition(OperatorEvaluation transition, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("delta must be a finite positive number");
  auto inner = std::move(transition.apply);
  return {transition.dimension,
          [inner, delta](const Gamble& f) {
            Gamble out = inner(f);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = (out[i] - f[i]) / delta;
            return out;
          },
          transition.nonneg_homogeneous};
}

bool AxiomReport::passed() const {
  return std::none_of(violations.begin(), violations.end(),
                      [](const AxiomViolation& v) { return v.structural; });
}

void AxiomReport::record(std::string axiom, std::string witness, double magnitude) {
  ++checks;
  if (!(magnitude > 0.0)) return;
  const bool structural = !(magnitude <= kNumericalViolationThreshold);
  if (!structural) max_numerical = std::max(max_numerical, magnitude);
  violations.push_back({std::move(axiom), std::move(witness), magnitude, structural});
}

namespace {

std::string describe(const Gamble& f) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (std::size_t i = 0; i < f.size(); ++i) os << (i ? ", " : "") << f[i];
  os << ")";
  return os.str();
}

// Largest amount by which lhs >= rhs fails, componentwise.
double shortfall(const Gamble& lhs, const Gamble& rhs) {
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) worst = std::max(worst, rhs[i] - lhs[i]);
  return worst;
}

double distance(const Gamble& a, const Gamble& b) { return max_norm(a - b); }

}  // namespace

AxiomReport check_rate_axioms(const OperatorEvaluation& q, double bound, std::size_t trials,
                              std::uint64_t seed) {
  AxiomReport report;
  const std::size_t n = q.dimension;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> scale(0.0, 3.0);

  std::vector<double> diag(n);
  for (std::size_t x = 0; x < n; ++x) {
    const Gamble e = Gamble::indicator(n, x);
    const Gamble qe = q(e);
    diag[x] = qe[x];
    for (std::size_t y = 0; y < n; ++y)
      if (y != x) report.record("R4", "Q(1_" + std::to_string(x) + ")(" + std::to_string(y) + ")", -qe[y]);
    const double upper_diag = -q(-e)[x];
    report.record("R7", "Qbar(1_" + std::to_string(x) + ")(" + std::to_string(x) + ") = " +
                            std::to_string(upper_diag),
                  upper_diag);
  }

  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::vector<double> fv(n), gv(n);
    for (auto& v : fv) v = unit(rng);
    for (auto& v : gv) v = unit(rng);
    const Gamble f(fv), g(gv);
    const double lambda = scale(rng);
    const double mu = 2.0 * unit(rng);
    const std::string tag = "trial " + std::to_string(trial) + " f=" + describe(f);

    const Gamble qf = q(f), qg = q(g);
    report.record("R1", tag + " mu=" + std::to_string(mu), max_norm(q(Gamble::constant(n, mu))));
    report.record("R2", tag + " g=" + describe(g), shortfall(q(f + g), qf + qg));
    report.record("R3", tag + " lambda=" + std::to_string(lambda), distance(q(lambda * f), lambda * qf));
    report.record("R3", tag + " lambda=2", distance(q(2.0 * f), 2.0 * qf));
    const Gamble qbar = -q(-f);
    report.record("R5", tag, shortfall(qbar, qf));
    report.record("R6", tag + " mu=" + std::to_string(mu), distance(q(f + mu), qf));
    const double fnorm = max_norm(f), fmin = f.min();
    for (std::size_t x = 0; x < n; ++x) {
      const double lower = 2.0 * fnorm * diag[x];
      const double middle = (f[x] - fmin) * diag[x];
      report.record("R8", tag + " x=" + std::to_string(x), std::max(lower - middle, middle - qf[x]));
    }
    report.record("R9", tag + " bound=" + std::to_string(bound), max_norm(qf) - bound * fnorm);
  }
  return report;
}

AxiomReport check_rate_axioms(const LowerRateModel& model, std::size_t trials, std::uint64_t seed) {
  return check_rate_axioms(model.as_operator(), model.norm_bound().value, trials, seed);
}

}  // namespace ictmc
