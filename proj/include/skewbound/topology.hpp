#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace skewbound {

// A node of the k-ary m-toroid: m coordinates, each in {0,...,k-1}.
using ProcessId = std::vector<int>;

inline std::string process_label(const ProcessId& p) {
  std::string out = "(";
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j) out += ",";
    out += std::to_string(p[j]);
  }
  out += ")";
  return out;
}

// One directed link. `forward` is true iff to = from + e_dim (mod k).
// For k = 2 the +1 and -1 neighbors coincide, so (from, to) alone does not
// identify a link; (from, dim, forward) always does.
struct DirectedEdge {
  ProcessId from;
  ProcessId to;
  int dim = 0;
  bool forward = true;

  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

inline std::string edge_label(const DirectedEdge& e) {
  return process_label(e.from) + "->" + process_label(e.to) + " dim " +
         std::to_string(e.dim) + (e.forward ? " +" : " -");
}

// k-ary m-toroid with lexicographic process enumeration. Immutable; all
// index arithmetic for delay tables and shift matrices lives here.
class Toroid {
 public:
  Toroid(int k, int m) : k_(k), m_(m) {
    if (k < 2) throw std::invalid_argument("toroid requires k >= 2");
    if (m < 1) throw std::invalid_argument("toroid requires m >= 1");
    count_ = 1;
    for (int j = 0; j < m; ++j) {
      if (count_ > (std::size_t{1} << 40) / static_cast<std::size_t>(k))
        throw std::invalid_argument("toroid too large");
      count_ *= static_cast<std::size_t>(k);
    }
  }

  int k() const { return k_; }
  int m() const { return m_; }
  bool odd() const { return k_ % 2 == 1; }

  /// r = (k-1)/2; only defined for odd k.
  int radius() const {
    if (!odd()) throw std::invalid_argument("radius requires odd k");
    return (k_ - 1) / 2;
  }

  std::size_t process_count() const { return count_; }
  std::size_t directed_edge_count() const { return 2 * static_cast<std::size_t>(m_) * count_; }

  /// Lexicographic rank of a process id; validates length and range.
  std::size_t index_of(const ProcessId& p) const {
    if (static_cast<int>(p.size()) != m_)
      throw std::invalid_argument("process id has wrong dimension count");
    std::size_t idx = 0;
    for (int j = 0; j < m_; ++j) {
      if (p[j] < 0 || p[j] >= k_)
        throw std::invalid_argument("process coordinate out of range");
      idx = idx * static_cast<std::size_t>(k_) + static_cast<std::size_t>(p[j]);
    }
    return idx;
  }

  ProcessId process_at(std::size_t index) const {
    if (index >= count_) throw std::invalid_argument("process index out of range");
    ProcessId p(static_cast<std::size_t>(m_));
    for (int j = m_ - 1; j >= 0; --j) {
      p[j] = static_cast<int>(index % static_cast<std::size_t>(k_));
      index /= static_cast<std::size_t>(k_);
    }
    return p;
  }

  ProcessId successor(const ProcessId& p, int dim) const {
    check_dim(dim);
    ProcessId q = p;
    q[dim] = (q[dim] + 1) % k_;
    return q;
  }

  ProcessId predecessor(const ProcessId& p, int dim) const {
    check_dim(dim);
    ProcessId q = p;
    q[dim] = (q[dim] + k_ - 1) % k_;
    return q;
  }

  /// The directed edge leaving `from` in dimension `dim`, toward the
  /// successor (forward) or predecessor (not forward).
  DirectedEdge edge(const ProcessId& from, int dim, bool forward) const {
    DirectedEdge e;
    e.from = from;
    e.to = forward ? successor(from, dim) : predecessor(from, dim);
    e.dim = dim;
    e.forward = forward;
    return e;
  }

  DirectedEdge reverse(const DirectedEdge& e) const {
    return edge(e.to, e.dim, !e.forward);
  }

  /// Storage slot of a directed edge, keyed by (source, dim, direction).
  std::size_t edge_slot(std::size_t from_index, int dim, bool forward) const {
    check_dim(dim);
    if (from_index >= count_) throw std::invalid_argument("process index out of range");
    return (from_index * static_cast<std::size_t>(m_) + static_cast<std::size_t>(dim)) * 2 +
           (forward ? 0 : 1);
  }

  std::size_t edge_slot(const DirectedEdge& e) const {
    return edge_slot(index_of(e.from), e.dim, e.forward);
  }

  /// Canonical enumeration: for each process in lexicographic order and each
  /// dimension, the forward edge followed by its reverse. Stable across
  /// calls; every edge appears exactly once and so does its reverse.
  std::vector<DirectedEdge> directed_edges() const {
    std::vector<DirectedEdge> edges;
    edges.reserve(directed_edge_count());
    for (std::size_t idx = 0; idx < count_; ++idx) {
      const ProcessId p = process_at(idx);
      for (int h = 0; h < m_; ++h) {
        DirectedEdge fwd = edge(p, h, true);
        DirectedEdge rev = reverse(fwd);
        edges.push_back(std::move(fwd));
        edges.push_back(std::move(rev));
      }
    }
    return edges;
  }

  friend bool operator==(const Toroid& a, const Toroid& b) {
    return a.k_ == b.k_ && a.m_ == b.m_;
  }

 private:
  void check_dim(int dim) const {
    if (dim < 0 || dim >= m_) throw std::invalid_argument("dimension index out of range");
  }

  int k_;
  int m_;
  std::size_t count_;
};

}  // namespace skewbound
