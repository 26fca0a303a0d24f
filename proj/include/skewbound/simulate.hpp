#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "skewbound/certificate.hpp"
#include "skewbound/delays.hpp"
#include "skewbound/rational.hpp"
#include "skewbound/topology.hpp"

namespace skewbound {

// Drift-free hardware clocks: HC_p(t) = t + c_p.
class HardwareClockMap {
 public:
  explicit HardwareClockMap(Toroid t)
      : topo_(std::move(t)), c_(topo_.process_count(), Rat(0)) {}
  HardwareClockMap(Toroid t, std::vector<Rat> offsets)
      : topo_(std::move(t)), c_(std::move(offsets)) {
    if (c_.size() != topo_.process_count())
      throw std::invalid_argument("hardware clock map must cover every process");
  }

  const Toroid& topology() const { return topo_; }
  const Rat& at(std::size_t process_index) const { return c_.at(process_index); }
  const Rat& at(const ProcessId& p) const { return c_[topo_.index_of(p)]; }
  void set(const ProcessId& p, Rat value) { c_[topo_.index_of(p)] = std::move(value); }
  void set(std::size_t process_index, Rat value) { c_.at(process_index) = std::move(value); }

  friend bool operator==(const HardwareClockMap& a, const HardwareClockMap& b) {
    return a.topo_ == b.topo_ && a.c_ == b.c_;
  }

 private:
  Toroid topo_;
  std::vector<Rat> c_;
};

enum class EventKind { Start, Receive };

// The incident link a message arrived on, from the receiver's point of view.
struct IncomingLink {
  int dim = 0;
  bool from_successor = false;
  friend bool operator==(const IncomingLink&, const IncomingLink&) = default;
};

struct MessagePayload {
  std::string kind;
  std::vector<Rat> values;
  friend bool operator==(const MessagePayload&, const MessagePayload&) = default;
};

// A send request from a transition: which incident link, what payload.
struct SendAction {
  int dim = 0;
  bool to_successor = true;
  MessagePayload payload;
};

struct StepResult {
  std::vector<SendAction> sends;
  std::optional<Rat> adjustment;  // new value of the local adj variable
};

// One process's state machine. Transitions see only local state, the event
// and the hardware clock reading; real time never reaches them.
class ProcessBehavior {
 public:
  virtual ~ProcessBehavior() = default;
  virtual StepResult on_start(const Rat& clock_reading) = 0;
  virtual StepResult on_receive(const IncomingLink& from, const MessagePayload& message,
                                const Rat& clock_reading) = 0;
};

class Algorithm {
 public:
  virtual ~Algorithm() = default;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<ProcessBehavior> spawn(const Toroid& t, const Uncertainty& u,
                                                 const ProcessId& self) const = 0;
};

struct HistoryEntry {
  EventKind kind = EventKind::Start;
  std::optional<IncomingLink> link;        // receive events only
  std::optional<MessagePayload> payload;   // receive events only
  Rat reading;                             // hardware clock at the event
  Rat real_time;
  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct LoggedMessage {
  DirectedEdge edge;
  Rat send_time;
  Rat receive_time;
  MessagePayload payload;
  friend bool operator==(const LoggedMessage&, const LoggedMessage&) = default;
};

// Per-process timed histories plus final adjustment variables and the full
// message log. `simultaneous_readings` flags any process that recorded two
// events at one clock reading (delivered in the deterministic tie order).
struct ExecutionRecord {
  Toroid topo;
  std::vector<std::vector<HistoryEntry>> histories;
  std::vector<Rat> adj;
  std::vector<LoggedMessage> message_log;
  bool simultaneous_readings = false;
  std::uint64_t event_count = 0;
  friend bool operator==(const ExecutionRecord&, const ExecutionRecord&) = default;
};

class SimulationLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunLimits {
  std::uint64_t max_events = 1'000'000;
};

// Per-message delays. The per-edge sequence number lets an oracle vary
// delays within an edge; the certificate pipeline never does.
using DelayOracle = std::function<Rat(const DirectedEdge&, std::uint64_t seq)>;

namespace detail {

struct PendingEvent {
  Rat time;
  int rank = 0;  // starts before receives at equal times
  std::size_t receiver = 0;
  std::size_t sender = 0;
  int dim = 0;
  bool from_forward = false;
  std::uint64_t seq = 0;
  MessagePayload payload;
};

// Total order: (real time, start-before-receive, receiver, sender, link,
// per-edge sequence). Per-edge sequencing keeps the order of a process's
// own events invariant under shifting.
struct PendingEventOrder {
  bool operator()(const PendingEvent& a, const PendingEvent& b) const {
    if (a.time != b.time) return a.time < b.time;
    if (a.rank != b.rank) return a.rank < b.rank;
    if (a.receiver != b.receiver) return a.receiver < b.receiver;
    if (a.sender != b.sender) return a.sender < b.sender;
    if (a.dim != b.dim) return a.dim < b.dim;
    if (a.from_forward != b.from_forward) return a.from_forward;
    return a.seq < b.seq;
  }
};

}  // namespace detail

/// Event-driven simulation to quiescence: every process gets one start event
/// at local clock 0, messages are delivered per the delay oracle, and the
/// run ends when nothing is in flight. Deterministic for identical inputs.
inline ExecutionRecord run_with_oracle(const Toroid& t, const HardwareClockMap& hc,
                                       const Uncertainty& u, const DelayOracle& oracle,
                                       const Algorithm& algorithm, RunLimits limits = {}) {
  if (!(hc.topology() == t))
    throw std::invalid_argument("hardware clock map over a different toroid");

  const std::size_t n = t.process_count();
  std::vector<std::unique_ptr<ProcessBehavior>> behaviors;
  behaviors.reserve(n);
  std::vector<ProcessId> ids;
  ids.reserve(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    ids.push_back(t.process_at(idx));
    behaviors.push_back(algorithm.spawn(t, u, ids.back()));
  }

  ExecutionRecord record{t, {}, {}, {}, false, 0};
  record.histories.resize(n);
  record.adj.assign(n, Rat(0));

  std::multiset<detail::PendingEvent, detail::PendingEventOrder> queue;
  for (std::size_t idx = 0; idx < n; ++idx) {
    detail::PendingEvent start;
    start.time = -hc.at(idx);  // HC(t) = t + c = 0
    start.rank = 0;
    start.receiver = idx;
    start.sender = idx;
    queue.insert(std::move(start));
  }

  std::vector<std::uint64_t> edge_seq(t.directed_edge_count(), 0);

  while (!queue.empty()) {
    const detail::PendingEvent ev = *queue.begin();
    queue.erase(queue.begin());
    if (++record.event_count > limits.max_events)
      throw SimulationLimitError("event count exceeded the configured limit of " +
                                 std::to_string(limits.max_events));

    const std::size_t self = ev.receiver;
    const Rat reading = ev.time + hc.at(self);
    if (!record.histories[self].empty() && record.histories[self].back().reading == reading)
      record.simultaneous_readings = true;

    StepResult step;
    if (ev.rank == 0) {
      record.histories[self].push_back({EventKind::Start, std::nullopt, std::nullopt, reading, ev.time});
      step = behaviors[self]->on_start(reading);
    } else {
      const IncomingLink link{ev.dim, !ev.from_forward};
      record.histories[self].push_back({EventKind::Receive, link, ev.payload, reading, ev.time});
      step = behaviors[self]->on_receive(link, ev.payload, reading);
    }
    if (step.adjustment) record.adj[self] = *step.adjustment;

    for (SendAction& action : step.sends) {
      const DirectedEdge edge = t.edge(ids[self], action.dim, action.to_successor);
      const std::uint64_t seq = edge_seq[t.edge_slot(edge)]++;
      const Rat delay = oracle(edge, seq);
      if (delay < 0)
        throw std::invalid_argument("delay oracle returned a negative delay on " + edge_label(edge));
      const Rat arrival = ev.time + delay;
      record.message_log.push_back({edge, ev.time, arrival, action.payload});

      detail::PendingEvent delivery;
      delivery.time = arrival;
      delivery.rank = 1;
      delivery.receiver = t.index_of(edge.to);
      delivery.sender = self;
      delivery.dim = edge.dim;
      delivery.from_forward = edge.forward;
      delivery.seq = seq;
      delivery.payload = std::move(action.payload);
      queue.insert(std::move(delivery));
    }
  }
  return record;
}

/// Simulation under a fixed per-edge delay assignment.
inline ExecutionRecord run(const Toroid& t, const HardwareClockMap& hc, const DelayAssignment& d,
                           const Algorithm& algorithm, RunLimits limits = {}) {
  if (!(d.topology() == t))
    throw std::invalid_argument("delay assignment over a different toroid");
  return run_with_oracle(
      t, hc, Uncertainty{d.uncertainty()},
      [&d](const DirectedEdge& e, std::uint64_t) { return d.delay(e); }, algorithm, limits);
}

struct ShiftedExecution {
  ExecutionRecord record;
  HardwareClockMap clocks;
};

/// Retimes every event of process p by +x_p and subtracts x_p from its clock
/// offset, so each event's clock reading is unchanged; every logged delay
/// changes by x_receiver - x_sender.
inline ShiftedExecution shift_execution(const ExecutionRecord& record, const HardwareClockMap& hc,
                                        const ShiftMatrix& x) {
  if (!(record.topo == hc.topology()) || !(record.topo == x.topology()))
    throw std::invalid_argument("record, clocks and shift matrix must share one toroid");

  ShiftedExecution out{record, hc};
  const Toroid& t = record.topo;
  for (std::size_t idx = 0; idx < t.process_count(); ++idx) {
    for (HistoryEntry& entry : out.record.histories[idx]) entry.real_time += x.at(idx);
    out.clocks.set(idx, hc.at(idx) - x.at(idx));
  }
  for (LoggedMessage& message : out.record.message_log) {
    message.send_time += x.at(t.index_of(message.edge.from));
    message.receive_time += x.at(t.index_of(message.edge.to));
  }
  return out;
}

/// True iff the per-process sequences of (event, clock reading) and the adj
/// values coincide; real times are ignored.
inline bool indistinguishable(const ExecutionRecord& r1, const ExecutionRecord& r2) {
  if (!(r1.topo == r2.topo)) return false;
  if (r1.adj != r2.adj) return false;
  for (std::size_t idx = 0; idx < r1.histories.size(); ++idx) {
    const auto& h1 = r1.histories[idx];
    const auto& h2 = r2.histories[idx];
    if (h1.size() != h2.size()) return false;
    for (std::size_t e = 0; e < h1.size(); ++e) {
      if (h1[e].kind != h2[e].kind || h1[e].link != h2[e].link ||
          h1[e].payload != h2[e].payload || h1[e].reading != h2[e].reading)
        return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Built-in algorithms
// ---------------------------------------------------------------------------

/// Does nothing: no messages, adj stays 0.
class SilentAlgorithm : public Algorithm {
 public:
  std::string name() const override { return "silent"; }
  std::unique_ptr<ProcessBehavior> spawn(const Toroid&, const Uncertainty&,
                                         const ProcessId&) const override {
    class Behavior : public ProcessBehavior {
      StepResult on_start(const Rat&) override { return {}; }
      StepResult on_receive(const IncomingLink&, const MessagePayload&, const Rat&) override {
        return {};
      }
    };
    return std::make_unique<Behavior>();
  }
};

struct TreeLink {
  int dim = 0;
  bool to_successor = true;
};

// Breadth-first spanning tree rooted at <0,...,0>, exploring each node's
// links in canonical order (dimension ascending, successor before
// predecessor). Shared by every reference_sync process.
struct SpanningTree {
  std::size_t root = 0;
  std::vector<std::size_t> parent;
  std::vector<IncomingLink> parent_in_link;      // at the child: where the parent's messages arrive
  std::vector<std::vector<TreeLink>> child_links;  // at the parent: out-links to children
};

inline SpanningTree bfs_spanning_tree(const Toroid& t) {
  const std::size_t n = t.process_count();
  SpanningTree tree;
  tree.root = 0;
  tree.parent.assign(n, n);
  tree.parent_in_link.assign(n, IncomingLink{});
  tree.child_links.assign(n, {});
  tree.parent[tree.root] = tree.root;

  std::vector<std::size_t> frontier{tree.root};
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const std::size_t cur = frontier[head];
    const ProcessId cur_id = t.process_at(cur);
    for (int h = 0; h < t.m(); ++h) {
      for (bool to_successor : {true, false}) {
        const DirectedEdge e = t.edge(cur_id, h, to_successor);
        const std::size_t next = t.index_of(e.to);
        if (tree.parent[next] != n) continue;
        tree.parent[next] = cur;
        tree.parent_in_link[next] = IncomingLink{h, !e.forward};
        tree.child_links[cur].push_back(TreeLink{h, to_successor});
        frontier.push_back(next);
      }
    }
  }
  return tree;
}

/// Two-wave offset propagation: every process probes each neighbor with one
/// timestamped message at local clock 0 and estimates that neighbor's offset
/// as (receive reading - send reading - u/2); offsets accumulate down a
/// breadth-first spanning tree in a second wave, and each process sets
/// adj = -(estimated offset from the root).
class ReferenceSync : public Algorithm {
 public:
  std::string name() const override { return "reference_sync"; }

  std::unique_ptr<ProcessBehavior> spawn(const Toroid& t, const Uncertainty& u,
                                         const ProcessId& self) const override {
    return std::make_unique<Behavior>(t, u.value(), t.index_of(self));
  }

 private:
  class Behavior : public ProcessBehavior {
   public:
    Behavior(const Toroid& t, Rat u, std::size_t self)
        : dims_(t.m()), u_(std::move(u)), self_(self) {
      const SpanningTree tree = bfs_spanning_tree(t);
      is_root_ = tree.root == self_;
      parent_link_ = tree.parent_in_link[self_];
      child_links_ = tree.child_links[self_];
      estimates_.assign(static_cast<std::size_t>(2 * dims_), std::nullopt);
    }

    StepResult on_start(const Rat& clock_reading) override {
      StepResult step;
      for (int h = 0; h < dims_; ++h)
        for (bool to_successor : {true, false})
          step.sends.push_back({h, to_successor, {"probe", {clock_reading}}});
      if (is_root_) {
        offset_ = Rat(0);
        step.adjustment = Rat(0);
        append_offset_wave(step);
      }
      return step;
    }

    StepResult on_receive(const IncomingLink& from, const MessagePayload& message,
                          const Rat& clock_reading) override {
      StepResult step;
      if (message.kind == "probe") {
        estimates_[link_slot(from)] = clock_reading - message.values.at(0) - u_ / 2;
      } else if (message.kind == "offset" && !is_root_ && from == parent_link_) {
        parent_offset_ = message.values.at(0);
      }
      if (!offset_ && !is_root_ && parent_offset_ && estimates_[link_slot(parent_link_)]) {
        offset_ = *parent_offset_ + *estimates_[link_slot(parent_link_)];
        step.adjustment = -*offset_;
        append_offset_wave(step);
      }
      return step;
    }

   private:
    std::size_t link_slot(const IncomingLink& link) const {
      return static_cast<std::size_t>(link.dim) * 2 + (link.from_successor ? 0 : 1);
    }

    void append_offset_wave(StepResult& step) const {
      for (const TreeLink& out : child_links_)
        step.sends.push_back({out.dim, out.to_successor, {"offset", {*offset_}}});
    }

    int dims_;
    Rat u_;
    std::size_t self_ = 0;
    bool is_root_ = false;
    IncomingLink parent_link_;
    std::vector<TreeLink> child_links_;
    std::vector<std::optional<Rat>> estimates_;
    std::optional<Rat> parent_offset_;
    std::optional<Rat> offset_;
  };
};

inline std::unique_ptr<Algorithm> make_algorithm(const std::string& name) {
  if (name == "reference_sync") return std::make_unique<ReferenceSync>();
  if (name == "silent") return std::make_unique<SilentAlgorithm>();
  throw std::invalid_argument("unknown algorithm: '" + name + "'");
}

// ---------------------------------------------------------------------------
// Skew witness
// ---------------------------------------------------------------------------

struct SkewRow {
  int index = 0;
  ProcessId a;
  ProcessId b;
  Rat skew;  // AC^i_a - AC^i_b after termination
};

// Adjusted-clock skews of the diagonal pairs across the k shifted
// executions. The sum always telescopes to the pure shift contributions, so
// max_skew >= bound holds for every terminating algorithm.
struct SkewReport {
  Toroid topo;
  Rat u;
  std::string algorithm;
  std::vector<SkewRow> rows;
  Rat sum;
  Rat max_skew;
  Rat bound;
  bool all_indistinguishable = false;
  bool shifts_admissible = false;
  bool witnessed = false;  // max_skew >= bound
};

/// Runs the algorithm once under the base delay pattern with zero clock
/// offsets, derives the k shifted executions, and measures the adjusted
/// clock difference of each diagonal pair in its execution.
inline SkewReport skew_witness(const Toroid& t, const Uncertainty& u, const Algorithm& algorithm,
                               RunLimits limits = {}) {
  if (!t.odd() || t.k() < 3)
    throw std::invalid_argument("skew witness requires odd k >= 3");

  const HardwareClockMap hc(t);
  const DelayAssignment base = base_delays(t, u);
  const ExecutionRecord record = run(t, hc, base, algorithm, limits);
  const PairCycle cycle = diagonal_cycle(t);

  SkewReport report{t,      u.value(), algorithm.name(), {}, Rat(0), Rat(0),
                    Rat(0), true,      true,             false};
  report.bound = closed_form(BoundVariant::ToroidOdd, t.k(), t.m(), u.value());

  for (int i = 0; i < t.k(); ++i) {
    const ShiftMatrix x = shift_matrix(i, t, u);
    const ShiftedExecution shifted = shift_execution(record, hc, x);
    if (!indistinguishable(record, shifted.record)) report.all_indistinguishable = false;
    if (!is_admissible(apply_shift_to_delays(base, x)).admissible)
      report.shifts_admissible = false;

    const ProcessPair& pair = cycle[static_cast<std::size_t>(i)];
    const std::size_t a = t.index_of(pair.a);
    const std::size_t b = t.index_of(pair.b);
    // AC^i_p(t) = t + (c_p - x_p) + adj_p; the t terms cancel in differences.
    Rat skew = (shifted.clocks.at(a) + record.adj[a]) - (shifted.clocks.at(b) + record.adj[b]);
    report.sum += skew;
    if (report.rows.empty() || skew > report.max_skew) report.max_skew = skew;
    report.rows.push_back({i, pair.a, pair.b, std::move(skew)});
  }
  report.witnessed = report.max_skew >= report.bound;
  return report;
}

}  // namespace skewbound
