#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "skewbound/rational.hpp"
#include "skewbound/topology.hpp"

namespace skewbound {

/// The uniform uncertainty u: every link's admissible delay interval is
/// [0, u]. Strictly positive.
class Uncertainty {
 public:
  explicit Uncertainty(Rat value) : u_(std::move(value)) {
    if (u_ <= 0) throw std::invalid_argument("uncertainty must be positive");
  }
  const Rat& value() const { return u_; }

 private:
  Rat u_;
};

// Fixed per-directed-edge message delays, stored by edge slot. All messages
// on an edge share one delay; per-message variation lives only behind the
// simulator's delay-oracle interface.
class DelayAssignment {
 public:
  DelayAssignment(Toroid topology, Uncertainty u)
      : topo_(std::move(topology)),
        u_(std::move(u)),
        delays_(topo_.directed_edge_count(), Rat(0)) {}

  const Toroid& topology() const { return topo_; }
  const Rat& uncertainty() const { return u_.value(); }

  const Rat& delay(const DirectedEdge& e) const { return delays_[topo_.edge_slot(e)]; }
  const Rat& delay(std::size_t from_index, int dim, bool forward) const {
    return delays_[topo_.edge_slot(from_index, dim, forward)];
  }
  void set_delay(const DirectedEdge& e, Rat value) {
    delays_[topo_.edge_slot(e)] = std::move(value);
  }

  friend bool operator==(const DelayAssignment& a, const DelayAssignment& b) {
    return a.topo_ == b.topo_ && a.u_.value() == b.u_.value() && a.delays_ == b.delays_;
  }

 private:
  Toroid topo_;
  Uncertainty u_;
  std::vector<Rat> delays_;
};

// Per-process real-time shift amounts, indexed like the process enumeration.
class ShiftMatrix {
 public:
  explicit ShiftMatrix(Toroid topology)
      : topo_(std::move(topology)), x_(topo_.process_count(), Rat(0)) {}
  ShiftMatrix(Toroid topology, std::vector<Rat> entries)
      : topo_(std::move(topology)), x_(std::move(entries)) {
    if (x_.size() != topo_.process_count())
      throw std::invalid_argument("shift matrix must have one entry per process");
  }

  const Toroid& topology() const { return topo_; }
  const Rat& at(std::size_t process_index) const { return x_.at(process_index); }
  const Rat& at(const ProcessId& p) const { return x_[topo_.index_of(p)]; }
  void set(const ProcessId& p, Rat value) { x_[topo_.index_of(p)] = std::move(value); }
  void set(std::size_t process_index, Rat value) { x_.at(process_index) = std::move(value); }

  ShiftMatrix operator+(const ShiftMatrix& other) const {
    require_same_topology(other);
    ShiftMatrix sum(topo_);
    for (std::size_t i = 0; i < x_.size(); ++i) sum.x_[i] = x_[i] + other.x_[i];
    return sum;
  }

  ShiftMatrix operator-() const {
    ShiftMatrix neg(topo_);
    for (std::size_t i = 0; i < x_.size(); ++i) neg.x_[i] = -x_[i];
    return neg;
  }

  friend bool operator==(const ShiftMatrix& a, const ShiftMatrix& b) {
    return a.topo_ == b.topo_ && a.x_ == b.x_;
  }

 private:
  void require_same_topology(const ShiftMatrix& other) const {
    if (!(topo_ == other.topo_))
      throw std::invalid_argument("shift matrices over different toroids");
  }

  Toroid topo_;
  std::vector<Rat> x_;
};

/// The base execution's delay pattern: for the forward edge leaving p in
/// dimension h, the delay is 0 when p_h < r and u when p_h >= r; every
/// reverse delay is the complement u - delta. Requires odd k >= 3.
inline DelayAssignment base_delays(const Toroid& t, const Uncertainty& u) {
  if (!t.odd()) throw std::invalid_argument("base delay pattern requires odd k");
  const int r = t.radius();
  DelayAssignment d(t, u);
  for (std::size_t idx = 0; idx < t.process_count(); ++idx) {
    const ProcessId p = t.process_at(idx);
    for (int h = 0; h < t.m(); ++h) {
      const Rat forward = p[h] < r ? Rat(0) : u.value();
      d.set_delay(t.edge(p, h, true), forward);
      d.set_delay(t.reverse(t.edge(p, h, true)), u.value() - forward);
    }
  }
  return d;
}

/// Lemma-style shift action on delays: every entry delta(p->q) becomes
/// delta(p->q) - x_p + x_q. The result need not be admissible.
inline DelayAssignment apply_shift_to_delays(const DelayAssignment& d, const ShiftMatrix& x) {
  if (!(d.topology() == x.topology()))
    throw std::invalid_argument("delay assignment and shift matrix over different toroids");
  const Toroid& t = d.topology();
  DelayAssignment shifted = d;
  for (std::size_t idx = 0; idx < t.process_count(); ++idx) {
    const ProcessId p = t.process_at(idx);
    for (int h = 0; h < t.m(); ++h) {
      for (bool forward : {true, false}) {
        const DirectedEdge e = t.edge(p, h, forward);
        shifted.set_delay(e, d.delay(e) - x.at(idx) + x.at(t.index_of(e.to)));
      }
    }
  }
  return shifted;
}

struct DelayViolation {
  DirectedEdge edge;
  Rat delay;
};

struct AdmissibilityReport {
  bool admissible = true;
  std::vector<DelayViolation> violations;
  explicit operator bool() const { return admissible; }
};

/// True iff every delay lies in [0, u]; on failure lists each violating edge
/// with its delay, in canonical edge order.
inline AdmissibilityReport is_admissible(const DelayAssignment& d) {
  AdmissibilityReport report;
  const Rat& u = d.uncertainty();
  for (const DirectedEdge& e : d.topology().directed_edges()) {
    const Rat& value = d.delay(e);
    if (value < 0 || value > u) {
      report.admissible = false;
      report.violations.push_back({e, value});
    }
  }
  return report;
}

/// Structural check on constructed executions: delay(q->p) = u - delay(p->q)
/// for every edge. Not required for admissibility in general.
inline bool reverse_complement_check(const DelayAssignment& d) {
  const Toroid& t = d.topology();
  const Rat& u = d.uncertainty();
  for (std::size_t idx = 0; idx < t.process_count(); ++idx) {
    for (int h = 0; h < t.m(); ++h) {
      const DirectedEdge e = t.edge(t.process_at(idx), h, true);
      if (d.delay(e) + d.delay(t.reverse(e)) != u) return false;
    }
  }
  return true;
}

}  // namespace skewbound
