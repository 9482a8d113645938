#include "ilin/simulator.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>

#include "ilin/error.hpp"

namespace ilin {

namespace {

class Machine {
 public:
  Machine(int n, std::string object)
      : n_(n), object_(std::move(object)), mem_(static_cast<std::size_t>(n)), procs_(static_cast<std::size_t>(n)) {}

  bool finished(ProcessId p) const { return procs_[static_cast<std::size_t>(p)].done; }
  bool all_finished() const {
    return std::all_of(procs_.begin(), procs_.end(), [](const Proc& s) { return s.done; });
  }

  void step(ProcessId p) {
    if (p < 0 || p >= n_) {
      throw Error(ErrorKind::IllegalProcess, "process " + std::to_string(p) + " is outside 0.." + std::to_string(n_ - 1));
    }
    Proc& s = procs_[static_cast<std::size_t>(p)];
    if (s.done) {
      trace_.steps.push_back({p, RegisterOp::Kind::Skip, 0, {}});
      return;
    }
    if (!s.started) {
      s.started = true;
      Value mine = Value::integer(p + 1);
      events_.push_back(Event::invocation(p, object_, "write_snapshot", mine));
      mem_[static_cast<std::size_t>(p)] = mine;
      trace_.steps.push_back({p, RegisterOp::Kind::Write, p, mine});
      return;
    }
    const Value& cell = mem_[static_cast<std::size_t>(s.next)];
    trace_.steps.push_back({p, RegisterOp::Kind::Read, s.next, cell});
    if (!cell.is_none()) s.current.push_back(cell);
    if (++s.next < n_) return;
    Value collect = Value::set(std::move(s.current));
    s.current.clear();
    s.next = 0;
    ++s.collects;
    if (s.previous && *s.previous == collect) {
      s.done = true;
      events_.push_back(Event::response(p, object_, "write_snapshot", collect));
      return;
    }
    s.previous = std::move(collect);
  }

  SimTrace finish() {
    trace_.execution = Execution(events_);
    for (ProcessId p = 0; p < n_; ++p) {
      const Proc& s = procs_[static_cast<std::size_t>(p)];
      if (s.started && !s.done) trace_.unfinished.push_back(p);
      trace_.collects.push_back(s.collects);
    }
    return std::move(trace_);
  }

 private:
  struct Proc {
    bool started = false;
    bool done = false;
    int next = 0;
    int collects = 0;
    std::vector<Value> current;
    std::optional<Value> previous;
  };

  int n_;
  std::string object_;
  std::vector<Value> mem_;
  std::vector<Proc> procs_;
  std::vector<Event> events_;
  SimTrace trace_;
};

void require_n(int n) {
  if (n < 1) throw Error(ErrorKind::BadParams, "n must be at least 1");
}

}  // namespace

SimTrace run_write_snapshot(int n, const Schedule& schedule, const std::string& object) {
  require_n(n);
  Machine m(n, object);
  for (auto p : schedule) m.step(p);
  return m.finish();
}

std::vector<Schedule> enumerate_schedules(int n, std::size_t max_steps) {
  require_n(n);
  std::vector<Schedule> out;
  std::set<std::pair<std::vector<Event>, std::vector<std::vector<Value>>>> seen;
  Schedule prefix;
  auto emit = [&]() {
    SimTrace t = run_write_snapshot(n, prefix);
    std::vector<std::vector<Value>> observed(static_cast<std::size_t>(n));
    for (const auto& op : t.steps) observed[static_cast<std::size_t>(op.process)].push_back(op.value);
    if (seen.emplace(t.execution.events(), std::move(observed)).second) out.push_back(prefix);
  };
  // Replays the prefix at each node; schedules are short at this scale.
  auto rec = [&](auto&& self) -> void {
    Machine m(n, "X");
    for (auto p : prefix) m.step(p);
    if (m.all_finished() || prefix.size() == max_steps) {
      emit();
      return;
    }
    for (ProcessId p = 0; p < n; ++p) {
      if (m.finished(p)) continue;
      prefix.push_back(p);
      self(self);
      prefix.pop_back();
    }
  };
  rec(rec);
  return out;
}

std::vector<SimTrace> fuzz_write_snapshot(int n, std::uint64_t seed, std::size_t count, const std::string& object) {
  require_n(n);
  std::mt19937_64 rng(seed);
  std::vector<SimTrace> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const bool truncate = rng() % 4 == 0;
    Machine m(n, object);
    Schedule s;
    while (!m.all_finished()) {
      std::vector<ProcessId> live;
      for (ProcessId p = 0; p < n; ++p) {
        if (!m.finished(p)) live.push_back(p);
      }
      ProcessId p = live[static_cast<std::size_t>(rng() % live.size())];
      s.push_back(p);
      m.step(p);
    }
    if (truncate) s.resize(static_cast<std::size_t>(rng() % (s.size() + 1)));
    out.push_back(run_write_snapshot(n, s, object));
  }
  return out;
}

bool snapshot_outputs_valid(const Execution& e) {
  std::vector<std::pair<Value, Value>> outs;
  std::map<ProcessId, Value> input;
  for (const auto& ev : e) {
    if (ev.is_invocation()) {
      input[ev.process] = ev.payload;
    } else {
      outs.emplace_back(input[ev.process], ev.payload);
    }
  }
  for (const auto& [mine, set] : outs) {
    if (!set.is_set() || !set.contains(mine)) return false;
  }
  for (const auto& a : outs) {
    for (const auto& b : outs) {
      if (!a.second.subset_of(b.second) && !b.second.subset_of(a.second)) return false;
    }
  }
  return true;
}

DirectWitness write_snapshot_witness(const Execution& e) {
  std::map<Value, std::vector<Event>> answered;  // set -> responses
  std::map<Value, Event> invocation_of;          // written value -> invocation
  std::vector<Event> pending_inv;
  std::set<Value> written;
  for (const auto& call : operation_calls(e)) {
    invocation_of.emplace(call.invocation.payload, call.invocation);
    written.insert(call.invocation.payload);
    if (call.response) {
      answered[call.response->payload].push_back(*call.response);
    } else {
      pending_inv.push_back(call.invocation);
    }
  }
  std::vector<Value> chain;
  for (const auto& [set, rs] : answered) chain.push_back(set);
  std::sort(chain.begin(), chain.end(), [](const Value& a, const Value& b) { return a.size() < b.size(); });
  DirectWitness out;
  std::set<Value> placed;
  for (const auto& set : chain) {
    std::vector<Event> inv;
    for (const auto& v : set.elems()) {
      if (placed.insert(v).second) inv.push_back(invocation_of.at(v));
    }
    if (inv.empty()) throw Error(ErrorKind::NotLinearizable, "two processes returned the same set at different points");
    out.witness.classes.push_back(ConcurrencyClass::make(ClassKind::Invoking, std::move(inv)));
    out.witness.classes.push_back(ConcurrencyClass::make(ClassKind::Responding, answered.at(set)));
  }
  if (!pending_inv.empty()) {
    Value all = Value::set(std::vector<Value>(written.begin(), written.end()));
    std::vector<Event> late;
    std::vector<Event> res;
    for (const auto& inv : pending_inv) {
      if (!placed.count(inv.payload)) late.push_back(inv);
      Event r = Event::response(inv.process, inv.object, inv.operation, all);
      res.push_back(r);
      out.appended.push_back(r);
    }
    if (!late.empty()) {
      out.witness.classes.push_back(ConcurrencyClass::make(ClassKind::Invoking, std::move(late)));
      out.witness.classes.push_back(ConcurrencyClass::make(ClassKind::Responding, std::move(res)));
    } else if (!out.witness.classes.empty()) {
      // Every pending call was already invoked: answer it with the last class.
      auto evs = out.witness.classes.back().events;
      evs.insert(evs.end(), res.begin(), res.end());
      out.witness.classes.back() = ConcurrencyClass::make(ClassKind::Responding, std::move(evs));
    }
  }
  return out;
}

}  // namespace ilin
