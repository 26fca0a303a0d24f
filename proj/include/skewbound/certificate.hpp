#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "skewbound/delays.hpp"
#include "skewbound/rational.hpp"
#include "skewbound/topology.hpp"

namespace skewbound {

// ---------------------------------------------------------------------------
// The W table: per-coordinate shift amounts defining the k shift matrices
// x^0 ... x^{k-1} over an odd-ary toroid with radius r = (k-1)/2. The table
// is two-sided in the execution index i.
// ---------------------------------------------------------------------------

/// W^i_c for execution index i and coordinate value c, both in {0,...,k-1}.
inline Rat w_entry(int i, int c, const Toroid& t, const Uncertainty& u) {
  if (!t.odd()) throw std::invalid_argument("W table requires odd k");
  const int k = t.k();
  const int r = t.radius();
  if (i < 0 || i >= k) throw std::invalid_argument("execution index out of range");
  if (c < 0 || c >= k) throw std::invalid_argument("coordinate value out of range");
  if (i < r) {
    if (c <= i) return Rat(0);
    if (c <= r) return Rat(c - i) * u.value();
    if (c <= r + i + 1) return Rat(r - i) * u.value();
    return Rat(2 * r - c + 1) * u.value();
  }
  if (c <= i - r) return Rat(c) * u.value();
  if (c <= r) return Rat(i - r) * u.value();
  if (c <= i) return Rat(i - c) * u.value();
  return Rat(0);
}

/// The i-th shift matrix: x^i_p = sum over dimensions of W^i applied to each
/// coordinate of p. For m = 1 this is the W row itself.
inline ShiftMatrix shift_matrix(int i, const Toroid& t, const Uncertainty& u) {
  std::vector<Rat> row(static_cast<std::size_t>(t.k()));
  for (int c = 0; c < t.k(); ++c) row[static_cast<std::size_t>(c)] = w_entry(i, c, t, u);
  ShiftMatrix x(t);
  for (std::size_t idx = 0; idx < t.process_count(); ++idx) {
    const ProcessId p = t.process_at(idx);
    Rat sum(0);
    for (int h = 0; h < t.m(); ++h) sum += row[static_cast<std::size_t>(p[h])];
    x.set(idx, std::move(sum));
  }
  return x;
}

/// Per-edge delay change induced by shift i on a forward edge whose source
/// coordinate in the differing dimension is c: W^i_{c+1 mod k} - W^i_c.
/// Computed directly from the W table (the printed difference table omits
/// the coordinate c = r+i+1 on the i < r side; the computed value there is
/// -u). Always in {-u, 0, u}.
inline Rat delta(int i, int c, const Toroid& t, const Uncertainty& u) {
  return w_entry(i, (c + 1) % t.k(), t, u) - w_entry(i, c, t, u);
}

// ---------------------------------------------------------------------------
// Pair cycles and certificates
// ---------------------------------------------------------------------------

struct ProcessPair {
  ProcessId a;
  ProcessId b;
  friend bool operator==(const ProcessPair&, const ProcessPair&) = default;
};

// A telescoping pair cycle: when the multiset of a-sides equals the multiset
// of b-sides, summing the per-execution skew inequalities cancels every
// adjusted-clock term.
using PairCycle = std::vector<ProcessPair>;

inline bool cycle_cancels(const PairCycle& cycle) {
  std::vector<ProcessId> lhs, rhs;
  lhs.reserve(cycle.size());
  rhs.reserve(cycle.size());
  for (const ProcessPair& pair : cycle) {
    lhs.push_back(pair.a);
    rhs.push_back(pair.b);
  }
  std::sort(lhs.begin(), lhs.end());
  std::sort(rhs.begin(), rhs.end());
  return lhs == rhs;
}

inline ProcessId diagonal_process(const Toroid& t, int value) {
  return ProcessId(static_cast<std::size_t>(t.m()), value);
}

/// The diagonal pairing: (<i,...,i>, <i+r+1,...,i+r+1>) for i < r and
/// (<i,...,i>, <i-r,...,i-r>) for r <= i < k, indices mod k. Each side
/// enumerates every diagonal process once, so the cycle cancels.
inline PairCycle diagonal_cycle(const Toroid& t) {
  if (!t.odd()) throw std::invalid_argument("diagonal cycle requires odd k");
  const int k = t.k();
  const int r = t.radius();
  PairCycle cycle;
  cycle.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const int partner = i < r ? (i + r + 1) % k : (i - r + k) % k;
    cycle.push_back({diagonal_process(t, i), diagonal_process(t, partner)});
  }
  return cycle;
}

// The full proof object: base delays, one shift matrix per cycle position,
// and the pair cycle itself. check_certificate() trusts nothing about how a
// certificate was built.
struct Certificate {
  Toroid params;
  Rat u;
  DelayAssignment base;
  std::vector<ShiftMatrix> shifts;
  PairCycle cycle;
};

/// The constructed certificate for an odd-ary toroid: base delay pattern,
/// shift matrices x^0..x^{k-1} from the W table, diagonal pair cycle.
inline Certificate paper_certificate(const Toroid& t, const Uncertainty& u) {
  if (!t.odd() || t.k() < 3)
    throw std::invalid_argument("certificate generation requires odd k >= 3");
  std::vector<ShiftMatrix> shifts;
  shifts.reserve(static_cast<std::size_t>(t.k()));
  for (int i = 0; i < t.k(); ++i) shifts.push_back(shift_matrix(i, t, u));
  return Certificate{t, u.value(), base_delays(t, u), std::move(shifts), diagonal_cycle(t)};
}

struct ExecutionContribution {
  int index = 0;
  ProcessId a;
  ProcessId b;
  Rat contribution;  // x^i_{b} - x^i_{a}
};

struct ShiftViolation {
  int shift_index = 0;
  DirectedEdge edge;
  Rat delay;
};

// Outcome of checking a certificate. The certified bound is
// (1/N) * sum_i (x^i_{b_i} - x^i_{a_i}): with AC^i_p = AC_p - x^i_p, each
// admissible shifted execution gives AC_{a_i} - AC_{b_i} <= eps -
// (x^i_{b_i} - x^i_{a_i}), and the cancelling cycle telescopes the
// adjusted-clock terms away.
struct BoundReport {
  Rat bound;
  std::vector<ExecutionContribution> per_execution;
  bool admissibility_ok = false;
  bool cancellation_ok = false;
  std::vector<ShiftViolation> violations;
  std::vector<std::string> problems;

  bool passed() const { return admissibility_ok && cancellation_ok && problems.empty(); }
};

inline const char* kBoundConvention =
    "bound = (1/N) * sum_i (x[i][b_i] - x[i][a_i]); shifting subtracts x from "
    "hardware clocks, so AC^i_p = AC_p - x^i_p";

/// Re-verifies a certificate from scratch: every shifted delay assignment
/// must be admissible and the cycle must cancel; the bound is the average
/// contribution. Structural defects are reported, not thrown.
inline BoundReport check_certificate(const Certificate& cert) {
  BoundReport report;
  report.bound = Rat(0);

  if (!(cert.base.topology() == cert.params))
    report.problems.push_back("base delays are over a different toroid than params");
  if (cert.base.uncertainty() != cert.u)
    report.problems.push_back("base delays carry a different uncertainty than the certificate");
  if (cert.shifts.size() != cert.cycle.size())
    report.problems.push_back("shift family and pair cycle have different lengths");
  for (const ShiftMatrix& x : cert.shifts)
    if (!(x.topology() == cert.params)) {
      report.problems.push_back("shift matrix over a different toroid than params");
      break;
    }
  if (!report.problems.empty()) return report;

  report.admissibility_ok = true;
  for (std::size_t i = 0; i < cert.shifts.size(); ++i) {
    const AdmissibilityReport shifted = is_admissible(apply_shift_to_delays(cert.base, cert.shifts[i]));
    if (!shifted.admissible) {
      report.admissibility_ok = false;
      for (const DelayViolation& v : shifted.violations)
        report.violations.push_back({static_cast<int>(i), v.edge, v.delay});
    }
  }

  report.cancellation_ok = cycle_cancels(cert.cycle);

  Rat sum(0);
  for (std::size_t i = 0; i < cert.cycle.size(); ++i) {
    const ProcessPair& pair = cert.cycle[i];
    Rat contribution = cert.shifts[i].at(pair.b) - cert.shifts[i].at(pair.a);
    sum += contribution;
    report.per_execution.push_back(
        {static_cast<int>(i), pair.a, pair.b, std::move(contribution)});
  }
  if (!cert.cycle.empty()) report.bound = sum / Rat(cert.cycle.size());
  return report;
}

// ---------------------------------------------------------------------------
// Closed-form reference bounds
// ---------------------------------------------------------------------------

enum class BoundVariant { ToroidOdd, ToroidEven, Mesh, Clique };

inline BoundVariant parse_bound_variant(const std::string& name) {
  if (name == "toroid-odd") return BoundVariant::ToroidOdd;
  if (name == "toroid-even") return BoundVariant::ToroidEven;
  if (name == "mesh") return BoundVariant::Mesh;
  if (name == "clique") return BoundVariant::Clique;
  throw std::invalid_argument("unknown bound variant: '" + name + "'");
}

/// Exact reference bounds: um(k^2-1)/(4k) for odd toroids (tight), umk/4 for
/// even toroids, um(k-1)/2 for meshes, u(n-1)/n for the n-clique. For the
/// clique the first parameter is n and m is ignored.
inline Rat closed_form(BoundVariant variant, long k_or_n, long m, const Rat& u) {
  if (u <= 0) throw std::invalid_argument("uncertainty must be positive");
  switch (variant) {
    case BoundVariant::ToroidOdd: {
      const long k = k_or_n;
      if (k < 2 || m < 1) throw std::invalid_argument("toroid requires k >= 2, m >= 1");
      if (k % 2 == 0) throw std::invalid_argument("toroid-odd bound requires odd k");
      return u * Rat(m) * Rat(k * k - 1, 4 * k);
    }
    case BoundVariant::ToroidEven: {
      const long k = k_or_n;
      if (k < 2 || m < 1) throw std::invalid_argument("toroid requires k >= 2, m >= 1");
      if (k % 2 != 0) throw std::invalid_argument("toroid-even bound requires even k");
      return u * Rat(m) * Rat(k, 4);
    }
    case BoundVariant::Mesh: {
      const long k = k_or_n;
      if (k < 2 || m < 1) throw std::invalid_argument("mesh requires k >= 2, m >= 1");
      return u * Rat(m) * Rat(k - 1, 2);
    }
    case BoundVariant::Clique: {
      const long n = k_or_n;
      if (n < 2) throw std::invalid_argument("clique requires n >= 2");
      return u * Rat(n - 1, n);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace skewbound
