#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "skewbound/certificate.hpp"
#include "skewbound/delays.hpp"
#include "skewbound/rational.hpp"
#include "skewbound/topology.hpp"

namespace skewbound {

// ---------------------------------------------------------------------------
// A small exact-rational LP layer: named variables, linear inequality
// constraints, one maximization objective. All variables are free; bounds
// are expressed as ordinary constraint rows.
// ---------------------------------------------------------------------------

enum class Relation { LessEq, GreaterEq, Eq };

struct LinearTerm {
  std::size_t var = 0;
  Rat coeff;
};

struct Constraint {
  std::vector<LinearTerm> terms;
  Relation rel = Relation::LessEq;
  Rat rhs;
  std::string label;
};

class LinearProgram {
 public:
  std::size_t add_variable(std::string name) {
    names_.push_back(std::move(name));
    objective_.emplace_back(0);
    return names_.size() - 1;
  }

  void add_constraint(std::vector<LinearTerm> terms, Relation rel, Rat rhs,
                      std::string label = {}) {
    for (const LinearTerm& term : terms) check_var(term.var);
    constraints_.push_back({std::move(terms), rel, std::move(rhs), std::move(label)});
  }

  void set_objective_term(std::size_t var, Rat coeff) {
    check_var(var);
    objective_[var] = std::move(coeff);
  }

  void add_objective_term(std::size_t var, const Rat& coeff) {
    check_var(var);
    objective_[var] += coeff;
  }

  std::size_t variable_count() const { return names_.size(); }
  const std::vector<std::string>& variable_names() const { return names_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<Rat>& objective() const { return objective_; }

 private:
  void check_var(std::size_t var) const {
    if (var >= names_.size()) throw std::invalid_argument("LP variable index out of range");
  }

  std::vector<std::string> names_;
  std::vector<Constraint> constraints_;
  std::vector<Rat> objective_;
};

enum class LpStatus { Optimal, Unbounded, Infeasible };

inline const char* lp_status_name(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Rat objective_value;
  std::vector<Rat> assignment;  // by variable index; meaningful when optimal
};

/// Evaluates a linear expression at an assignment, exactly.
inline Rat evaluate_terms(const std::vector<LinearTerm>& terms, const std::vector<Rat>& values) {
  Rat sum(0);
  for (const LinearTerm& term : terms) sum += term.coeff * values.at(term.var);
  return sum;
}

/// Exact feasibility check of a full assignment against every constraint.
inline bool satisfies(const LinearProgram& lp, const std::vector<Rat>& values) {
  if (values.size() != lp.variable_count()) return false;
  for (const Constraint& c : lp.constraints()) {
    const Rat lhs = evaluate_terms(c.terms, values);
    switch (c.rel) {
      case Relation::LessEq:
        if (lhs > c.rhs) return false;
        break;
      case Relation::GreaterEq:
        if (lhs < c.rhs) return false;
        break;
      case Relation::Eq:
        if (lhs != c.rhs) return false;
        break;
    }
  }
  return true;
}

inline Rat objective_value_at(const LinearProgram& lp, const std::vector<Rat>& values) {
  Rat sum(0);
  for (std::size_t v = 0; v < lp.variable_count(); ++v) sum += lp.objective()[v] * values[v];
  return sum;
}

namespace detail {

// Dense tableau simplex over exact rationals. Free variables are split into
// nonnegative pairs, every constraint becomes a <= row with a slack, and
// rows with negative right-hand sides get phase-one artificials. Bland's
// rule (lowest eligible index) in both phases: deterministic, never cycles.
class SimplexTableau {
 public:
  explicit SimplexTableau(const LinearProgram& lp) : lp_(lp) {
    split_ = 2 * lp.variable_count();
    for (const Constraint& c : lp.constraints()) {
      if (c.rel == Relation::Eq) {
        append_row(c.terms, c.rhs);
        append_row(negate(c.terms), -c.rhs);
      } else if (c.rel == Relation::LessEq) {
        append_row(c.terms, c.rhs);
      } else {
        append_row(negate(c.terms), -c.rhs);
      }
    }
  }

  LpSolution solve() {
    const std::size_t rows = rhs_.size();
    slack_begin_ = split_;
    cols_ = split_ + rows;  // structural splits + one slack per row
    basis_.resize(rows);

    std::vector<std::size_t> artificial_rows;
    for (std::size_t i = 0; i < rows; ++i) {
      if (rhs_[i] < 0) {
        for (Rat& v : matrix_[i]) v = -v;
        rhs_[i] = -rhs_[i];
        slack_sign_.push_back(-1);
        artificial_rows.push_back(i);
      } else {
        slack_sign_.push_back(1);
      }
    }

    // Slack block (diagonal +-1), then artificials for the negated rows.
    for (std::size_t i = 0; i < rows; ++i) {
      matrix_[i].resize(cols_ + artificial_rows.size(), Rat(0));
      matrix_[i][slack_begin_ + i] = Rat(slack_sign_[i]);
      basis_[i] = slack_begin_ + i;
    }
    for (std::size_t a = 0; a < artificial_rows.size(); ++a) {
      const std::size_t row = artificial_rows[a];
      matrix_[row][cols_ + a] = Rat(1);
      basis_[row] = cols_ + a;
    }

    if (!artificial_rows.empty()) {
      cols_ += artificial_rows.size();
      std::vector<Rat> phase1(cols_, Rat(0));
      for (std::size_t a = 0; a < artificial_rows.size(); ++a)
        phase1[cols_ - artificial_rows.size() + a] = Rat(-1);
      run(phase1);
      if (objective_value_ != 0) return {LpStatus::Infeasible, Rat(0), {}};
      purge_artificials(cols_ - artificial_rows.size());
    }

    std::vector<Rat> phase2(cols_, Rat(0));
    for (std::size_t v = 0; v < lp_.variable_count(); ++v) {
      phase2[2 * v] = lp_.objective()[v];
      phase2[2 * v + 1] = -lp_.objective()[v];
    }
    if (!run(phase2)) return {LpStatus::Unbounded, Rat(0), {}};

    std::vector<Rat> split_values(cols_, Rat(0));
    for (std::size_t i = 0; i < basis_.size(); ++i) split_values[basis_[i]] = rhs_[i];
    LpSolution solution;
    solution.status = LpStatus::Optimal;
    solution.objective_value = objective_value_;
    solution.assignment.resize(lp_.variable_count());
    for (std::size_t v = 0; v < lp_.variable_count(); ++v)
      solution.assignment[v] = split_values[2 * v] - split_values[2 * v + 1];
    return solution;
  }

 private:
  static std::vector<LinearTerm> negate(const std::vector<LinearTerm>& terms) {
    std::vector<LinearTerm> out = terms;
    for (LinearTerm& t : out) t.coeff = -t.coeff;
    return out;
  }

  void append_row(const std::vector<LinearTerm>& terms, Rat rhs) {
    std::vector<Rat> row(split_, Rat(0));
    for (const LinearTerm& t : terms) {
      row[2 * t.var] += t.coeff;
      row[2 * t.var + 1] -= t.coeff;
    }
    matrix_.push_back(std::move(row));
    rhs_.push_back(std::move(rhs));
  }

  // Maximizes the given cost vector from the current basis. Returns false on
  // unboundedness. Maintains a reduced-cost row by elimination; the running
  // objective value ends up in objective_value_.
  bool run(const std::vector<Rat>& costs) {
    std::vector<Rat> reduced = costs;
    Rat value(0);
    for (std::size_t i = 0; i < basis_.size(); ++i) eliminate(reduced, value, i);

    for (;;) {
      std::size_t entering = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (reduced[j] > 0) {
          entering = j;
          break;
        }
      }
      if (entering == cols_) break;

      std::size_t leaving = basis_.size();
      Rat best_ratio(0);
      for (std::size_t i = 0; i < basis_.size(); ++i) {
        if (matrix_[i][entering] <= 0) continue;
        const Rat ratio = rhs_[i] / matrix_[i][entering];
        if (leaving == basis_.size() || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leaving])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (leaving == basis_.size()) return false;  // unbounded direction

      pivot(leaving, entering);
      eliminate(reduced, value, leaving);
    }
    objective_value_ = value;
    return true;
  }

  // Zeroes the reduced cost of row i's basic column via a row operation.
  void eliminate(std::vector<Rat>& reduced, Rat& value, std::size_t i) const {
    const Rat factor = reduced[basis_[i]];
    if (factor == 0) return;
    for (std::size_t j = 0; j < cols_; ++j)
      if (matrix_[i][j] != 0) reduced[j] -= factor * matrix_[i][j];
    value += factor * rhs_[i];
  }

  void pivot(std::size_t row, std::size_t col) {
    const Rat inv = Rat(1) / matrix_[row][col];
    for (Rat& v : matrix_[row]) v *= inv;
    rhs_[row] *= inv;
    for (std::size_t i = 0; i < matrix_.size(); ++i) {
      if (i == row) continue;
      const Rat factor = matrix_[i][col];
      if (factor == 0) continue;
      for (std::size_t j = 0; j < cols_; ++j)
        if (matrix_[row][j] != 0) matrix_[i][j] -= factor * matrix_[row][j];
      rhs_[i] -= factor * rhs_[row];
    }
    basis_[row] = col;
  }

  // After a zero-value phase one, drive surviving artificials out of the
  // basis (or drop their rows when redundant) and truncate their columns.
  void purge_artificials(std::size_t artificial_begin) {
    for (std::size_t i = 0; i < basis_.size();) {
      if (basis_[i] < artificial_begin) {
        ++i;
        continue;
      }
      std::size_t col = artificial_begin;
      for (std::size_t j = 0; j < artificial_begin; ++j) {
        if (matrix_[i][j] != 0) {
          col = j;
          break;
        }
      }
      if (col == artificial_begin) {
        matrix_.erase(matrix_.begin() + static_cast<std::ptrdiff_t>(i));
        rhs_.erase(rhs_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        pivot(i, col);
        ++i;
      }
    }
    for (std::vector<Rat>& row : matrix_) row.resize(artificial_begin);
    cols_ = artificial_begin;
  }

  const LinearProgram& lp_;
  std::size_t split_ = 0;
  std::size_t slack_begin_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::vector<Rat>> matrix_;
  std::vector<Rat> rhs_;
  std::vector<int> slack_sign_;
  std::vector<std::size_t> basis_;
  Rat objective_value_;
};

}  // namespace detail

/// Exact optimum via rational simplex with Bland's rule; deterministic for a
/// given program. Unbounded / infeasible programs are reported via status.
inline LpSolution solve_lp(const LinearProgram& lp) {
  detail::SimplexTableau tableau(lp);
  return tableau.solve();
}

// ---------------------------------------------------------------------------
// The certified-bound LP: for a toroid, an uncertainty and a cancelling pair
// cycle of length N, search over per-edge base delays (complementary
// reverses) and N shift matrices for the largest certifiable bound.
// ---------------------------------------------------------------------------

struct BoundLp {
  LinearProgram lp;
  std::vector<DirectedEdge> forward_edges;           // canonical order
  std::vector<std::size_t> delay_vars;               // parallel to forward_edges
  std::vector<std::vector<std::size_t>> shift_vars;  // [execution][process index]
};

/// Variables: one delay per forward edge, one shift per (execution, process).
/// Constraints, per execution i and forward edge (p -> q):
///   0 <= delta_pq + x^i_q - x^i_p <= u, plus box rows 0 <= delta_pq <= u.
/// Reverse edges need no rows: with complementary reverses the shifted
/// reverse delay is u minus the shifted forward delay, so it stays in range
/// exactly when the forward one does. Objective:
///   (1/N) * sum_i (x^i_{b_i} - x^i_{a_i}).
inline BoundLp build_bound_lp(const Toroid& t, const Uncertainty& u, const PairCycle& cycle) {
  if (cycle.empty()) throw std::invalid_argument("pair cycle must be nonempty");
  for (const ProcessPair& pair : cycle) {
    t.index_of(pair.a);
    t.index_of(pair.b);
  }
  if (!cycle_cancels(cycle))
    throw std::invalid_argument("pair cycle does not cancel");

  BoundLp out;
  const std::size_t n = t.process_count();
  const std::size_t executions = cycle.size();

  for (std::size_t idx = 0; idx < n; ++idx) {
    const ProcessId p = t.process_at(idx);
    for (int h = 0; h < t.m(); ++h) {
      DirectedEdge e = t.edge(p, h, true);
      out.delay_vars.push_back(
          out.lp.add_variable("delta[" + process_label(e.from) + "->" + process_label(e.to) + "]"));
      out.forward_edges.push_back(std::move(e));
    }
  }
  out.shift_vars.resize(executions);
  for (std::size_t i = 0; i < executions; ++i) {
    out.shift_vars[i].reserve(n);
    for (std::size_t idx = 0; idx < n; ++idx)
      out.shift_vars[i].push_back(out.lp.add_variable(
          "x[" + std::to_string(i) + "][" + process_label(t.process_at(idx)) + "]"));
  }

  for (std::size_t i = 0; i < executions; ++i) {
    for (std::size_t e = 0; e < out.forward_edges.size(); ++e) {
      const DirectedEdge& edge = out.forward_edges[e];
      const std::size_t from = t.index_of(edge.from);
      const std::size_t to = t.index_of(edge.to);
      std::vector<LinearTerm> terms{{out.delay_vars[e], Rat(1)},
                                    {out.shift_vars[i][to], Rat(1)},
                                    {out.shift_vars[i][from], Rat(-1)}};
      const std::string tag = "exec " + std::to_string(i) + " " + edge_label(edge);
      out.lp.add_constraint(terms, Relation::LessEq, u.value(), "upper " + tag);
      out.lp.add_constraint(std::move(terms), Relation::GreaterEq, Rat(0), "lower " + tag);
    }
  }
  for (std::size_t e = 0; e < out.forward_edges.size(); ++e) {
    out.lp.add_constraint({{out.delay_vars[e], Rat(1)}}, Relation::LessEq, u.value(),
                          "box upper " + edge_label(out.forward_edges[e]));
    out.lp.add_constraint({{out.delay_vars[e], Rat(1)}}, Relation::GreaterEq, Rat(0),
                          "box lower " + edge_label(out.forward_edges[e]));
  }

  const Rat weight = Rat(1) / Rat(executions);
  for (std::size_t i = 0; i < executions; ++i) {
    out.lp.add_objective_term(out.shift_vars[i][t.index_of(cycle[i].b)], weight);
    out.lp.add_objective_term(out.shift_vars[i][t.index_of(cycle[i].a)], -weight);
  }
  return out;
}

/// Packs a certificate's base delays and shift family into the matching
/// bound-LP assignment (for exact feasibility cross-checks).
inline std::vector<Rat> certificate_as_lp_point(const BoundLp& bound_lp, const Certificate& cert) {
  std::vector<Rat> values(bound_lp.lp.variable_count(), Rat(0));
  for (std::size_t e = 0; e < bound_lp.forward_edges.size(); ++e)
    values[bound_lp.delay_vars[e]] = cert.base.delay(bound_lp.forward_edges[e]);
  for (std::size_t i = 0; i < bound_lp.shift_vars.size(); ++i)
    for (std::size_t idx = 0; idx < bound_lp.shift_vars[i].size(); ++idx)
      values[bound_lp.shift_vars[i][idx]] = cert.shifts.at(i).at(idx);
  return values;
}

struct BestCertificate {
  LpSolution solution;
  Certificate certificate;
  BoundReport report;
};

/// Solves the bound LP and converts the optimum back into a certificate,
/// re-verified by the independent checker. The report's bound equals the LP
/// objective exactly.
inline BestCertificate best_certificate(const Toroid& t, const Uncertainty& u,
                                        const PairCycle& cycle) {
  BoundLp bound_lp = build_bound_lp(t, u, cycle);
  LpSolution solution = solve_lp(bound_lp.lp);
  if (solution.status != LpStatus::Optimal)
    throw std::runtime_error(std::string("bound LP not optimal: ") +
                             lp_status_name(solution.status));

  DelayAssignment base(t, u);
  for (std::size_t e = 0; e < bound_lp.forward_edges.size(); ++e) {
    const DirectedEdge& edge = bound_lp.forward_edges[e];
    const Rat& value = solution.assignment[bound_lp.delay_vars[e]];
    base.set_delay(edge, value);
    base.set_delay(t.reverse(edge), u.value() - value);
  }
  std::vector<ShiftMatrix> shifts;
  shifts.reserve(cycle.size());
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    ShiftMatrix x(t);
    for (std::size_t idx = 0; idx < t.process_count(); ++idx)
      x.set(idx, solution.assignment[bound_lp.shift_vars[i][idx]]);
    shifts.push_back(std::move(x));
  }
  Certificate cert{t, u.value(), std::move(base), std::move(shifts), cycle};
  BoundReport report = check_certificate(cert);
  return {std::move(solution), std::move(cert), std::move(report)};
}

/// All pair cycles of the permutation family (v, sigma(v)) over the node
/// set, in lexicographic order of sigma; every such cycle cancels. Only for
/// toroids with at most 5 nodes.
inline std::vector<PairCycle> enumerate_cycles(const Toroid& t) {
  const std::size_t n = t.process_count();
  if (n > 5)
    throw std::invalid_argument("cycle enumeration is limited to toroids with at most 5 nodes");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<PairCycle> cycles;
  do {
    PairCycle cycle;
    cycle.reserve(n);
    for (std::size_t v = 0; v < n; ++v)
      cycle.push_back({t.process_at(v), t.process_at(perm[v])});
    cycles.push_back(std::move(cycle));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return cycles;
}

}  // namespace skewbound
