#include "ilin/bridges.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "ilin/combinatorics.hpp"
#include "ilin/error.hpp"

namespace ilin {

Value vertex_to_value(const Vertex& v) {
  std::vector<Value> parts{Value::integer(v.process), v.value};
  if (v.has_view) parts.push_back(simplex_to_value(v.view));
  return Value::tuple(std::move(parts));
}

Vertex value_to_vertex(const Value& v) {
  if (v.kind() != Value::Kind::Tuple || v.size() < 2 || v.size() > 3) {
    throw Error(ErrorKind::MalformedEvent, "not an encoded vertex: " + v.to_string());
  }
  auto p = static_cast<ProcessId>(v.at(0).as_int());
  if (v.size() == 3) return Vertex(p, v.at(1), value_to_simplex(v.at(2)));
  return Vertex(p, v.at(1));
}

Value simplex_to_value(const Simplex& s) {
  std::vector<Value> out;
  out.reserve(s.size());
  for (const auto& v : s) out.push_back(vertex_to_value(v));
  return Value::set(std::move(out));
}

Simplex value_to_simplex(const Value& v) {
  std::vector<Vertex> out;
  for (const auto& e : v.elems()) out.push_back(value_to_vertex(e));
  return make_simplex(std::move(out));
}

FaceSequences sequences(const Execution& e) {
  e.require_one_shot();
  FaceSequences out;
  out.sigma.push_back({});
  out.tau.push_back({});
  if (e.empty()) return out;
  Simplex sigma;
  Simplex tau;
  bool fresh_response = false;  // τ_i \ τ_{i-1} ≠ ∅
  for (const auto& ev : e) {
    Vertex v(ev.process, ev.payload);
    if (ev.is_invocation()) {
      if (fresh_response) {
        out.sigma.push_back(sigma);
        out.tau.push_back(tau);
        fresh_response = false;
      }
      sigma = simplex_union(sigma, {v});
    } else {
      tau = simplex_union(tau, {v});
      fresh_response = true;
    }
    out.batch.push_back(out.sigma.size());
  }
  out.sigma.push_back(sigma);
  out.tau.push_back(tau);
  return out;
}

namespace {

void require_valid(const Task& t) {
  auto problems = validate_task(t);
  if (!problems.empty()) throw Error(ErrorKind::InvalidTask, t.name + ": " + problems.front());
}

struct TaskState {
  Simplex sigma;
  Simplex tau;
};

TaskState decode(const SpecState& q) { return {value_to_simplex(q.value.at(0)), value_to_simplex(q.value.at(1))}; }

SpecState encode(const Simplex& sigma, const Simplex& tau) {
  return SpecState{Value::tuple({simplex_to_value(sigma), simplex_to_value(tau)})};
}

IntervalSpec carrier_object(const Task& t, const std::string& op) {
  require_valid(t);
  IntervalSpec spec;
  spec.name = t.name + "-object";
  spec.processes = t.processes;
  spec.operations = {op};
  spec.initial_states = {encode({}, {})};
  spec.flavor = Flavor::Interval;
  spec.one_shot = true;
  for (const auto& v : t.inputs.vertices()) spec.alphabet.push_back(Event::invocation(v.process, "X", op, v.value));
  spec.pending = [](const SpecState& q) {
    TaskState s = decode(q);
    std::set<ProcessId> out = ids(s.sigma);
    for (auto p : ids(s.tau)) out.erase(p);
    return out;
  };
  const bool refined = t.refined;
  spec.delta = [t, op, refined](const SpecState& q, const ConcurrencyClass& inv) {
    std::vector<Transition> out;
    TaskState s = decode(q);
    std::set<ProcessId> done = ids(s.sigma);
    std::vector<Vertex> added;
    for (const auto& ev : inv.events) {
      if (done.count(ev.process)) return out;
      added.emplace_back(ev.process, ev.payload);
    }
    Simplex sigma = simplex_union(s.sigma, make_simplex(added));
    if (!t.inputs.contains(sigma)) return out;
    const Complex* image = t.carrier(sigma);
    if (!image) return out;
    std::set<ProcessId> answered = ids(s.tau);
    std::map<ProcessId, std::vector<Vertex>> choices;
    const std::set<ProcessId> members = ids(sigma);
    for (const auto& v : image->vertices()) {
      if (answered.count(v.process) || !members.count(v.process)) continue;
      if (refined && v.view != sigma) continue;
      choices[v.process].push_back(v);
    }
    std::vector<ProcessId> eligible;
    for (const auto& [p, vs] : choices) eligible.push_back(p);
    const std::string& object = inv.events.front().object;
    for (const auto& group : nonempty_subsets(eligible)) {
      std::vector<std::vector<Vertex>> opts;
      for (auto p : group) opts.push_back(choices[p]);
      for (auto& pick : cartesian(opts)) {
        Simplex tau = simplex_union(s.tau, make_simplex(pick));
        if (!image->contains(tau)) continue;
        std::vector<Event> res;
        for (const auto& v : pick) res.push_back(Event::response(v.process, object, op, v.value));
        out.push_back({ConcurrencyClass::make(ClassKind::Responding, std::move(res)), encode(sigma, tau)});
      }
    }
    return out;
  };
  return spec;
}

}  // namespace

IntervalSpec task_to_object(const Task& t, const std::string& op) { return carrier_object(t, op); }

IntervalSpec refined_task_to_object(const RefinedTask& t, const std::string& op) {
  if (!t.refined) throw Error(ErrorKind::InvalidTask, "task " + t.name + " has no set-views");
  return carrier_object(t, op);
}

IntervalSpec task_to_split_sequential(const Task& t) {
  require_valid(t);
  IntervalSpec spec;
  spec.name = t.name + "-split";
  spec.processes = t.processes;
  spec.operations = {"set", "get"};
  spec.initial_states = {encode({}, {})};
  spec.flavor = Flavor::Sequential;
  spec.one_shot = false;
  for (const auto& v : t.inputs.vertices()) spec.alphabet.push_back(Event::invocation(v.process, "X", "set", v.value));
  for (int p = 0; p < t.processes; ++p) spec.alphabet.push_back(Event::invocation(p, "X", "get", Value::none()));
  spec.pending = [](const SpecState&) { return std::set<ProcessId>{}; };
  spec.delta = [t](const SpecState& q, const ConcurrencyClass& inv) {
    std::vector<Transition> out;
    if (inv.size() != 1) return out;
    const Event& ev = inv.events.front();
    TaskState s = decode(q);
    const bool has_set = ids(s.sigma).count(ev.process) > 0;
    if (ev.operation == "set") {
      if (has_set) return out;
      Simplex sigma = simplex_union(s.sigma, {Vertex(ev.process, ev.payload)});
      if (!t.inputs.contains(sigma)) return out;
      auto r = Event::response(ev.process, ev.object, "set", Value::symbol("ok"));
      out.push_back({ConcurrencyClass::make(ClassKind::Responding, {r}), encode(sigma, s.tau)});
      return out;
    }
    if (!has_set || ids(s.tau).count(ev.process)) return out;
    const Complex* image = t.carrier(s.sigma);
    if (!image) return out;
    for (const auto& v : image->vertices()) {
      if (v.process != ev.process) continue;
      Simplex tau = simplex_union(s.tau, {v});
      if (!image->contains(tau)) continue;
      auto r = Event::response(ev.process, ev.object, "get", v.value);
      out.push_back({ConcurrencyClass::make(ClassKind::Responding, {r}), encode(s.sigma, tau)});
    }
    return out;
  };
  return spec;
}

namespace {

// Response payloads each process can receive, over one-shot runs of the spec.
std::map<ProcessId, std::set<Value>> response_universe(const IntervalSpec& spec, std::size_t cap) {
  std::map<ProcessId, std::set<Value>> out;
  using Config = std::pair<SpecState, std::set<ProcessId>>;
  std::set<Config> seen;
  std::deque<Config> queue;
  for (const auto& q : spec.initial_states) {
    if (seen.insert({q, {}}).second) queue.push_back({q, {}});
  }
  while (!queue.empty()) {
    auto [q, invoked] = queue.front();
    queue.pop_front();
    std::set<ProcessId> pend = spec.pending(q);
    std::vector<Event> ready;
    for (const auto& ev : spec.alphabet) {
      if (!invoked.count(ev.process) && !pend.count(ev.process)) ready.push_back(ev);
    }
    for (const auto& group : nonempty_subsets(ready)) {
      std::set<ProcessId> ps;
      for (const auto& ev : group) ps.insert(ev.process);
      if (ps.size() != group.size()) continue;
      std::vector<Transition> ts;
      try {
        ts = spec.step(q, ConcurrencyClass::make(ClassKind::Invoking, group));
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::IllegalInput) throw;
        continue;
      }
      std::set<ProcessId> next_invoked = invoked;
      next_invoked.insert(ps.begin(), ps.end());
      for (const auto& t : ts) {
        for (const auto& r : t.response.events) out[r.process].insert(r.payload);
        Config c{t.next, next_invoked};
        if (seen.insert(c).second) {
          if (seen.size() > cap) throw Error(ErrorKind::BudgetExceeded, "response universe exceeds " + std::to_string(cap) + " configurations");
          queue.push_back(std::move(c));
        }
      }
    }
  }
  return out;
}

struct Batch {
  std::vector<ProcessId> invoked;
  std::vector<ProcessId> responded;
};

// All batch structures of a pending-free run over `procs`: each batch
// invokes a non-empty set, then answers a non-empty set of open calls.
void batch_structures(std::vector<ProcessId> fresh, std::vector<ProcessId> open, std::vector<Batch>& prefix,
                      const std::function<void(const std::vector<Batch>&)>& emit) {
  if (fresh.empty() && open.empty()) {
    emit(prefix);
    return;
  }
  for (const auto& inv : nonempty_subsets(fresh)) {
    std::vector<ProcessId> rest;
    for (auto p : fresh) {
      if (std::find(inv.begin(), inv.end(), p) == inv.end()) rest.push_back(p);
    }
    std::vector<ProcessId> candidates = open;
    candidates.insert(candidates.end(), inv.begin(), inv.end());
    std::sort(candidates.begin(), candidates.end());
    for (const auto& res : nonempty_subsets(candidates)) {
      std::vector<ProcessId> still;
      for (auto p : candidates) {
        if (std::find(res.begin(), res.end(), p) == res.end()) still.push_back(p);
      }
      prefix.push_back({inv, res});
      batch_structures(rest, still, prefix, emit);
      prefix.pop_back();
    }
  }
}

Task task_from_runs(const IntervalSpec& spec, std::size_t bound, Condition condition, bool refined) {
  auto universe = response_universe(spec, 200'000);
  std::map<Vertex, Event> by_vertex;
  std::map<ProcessId, std::vector<Vertex>> per_process;
  for (const auto& ev : spec.alphabet) {
    Vertex v(ev.process, ev.payload);
    if (by_vertex.emplace(v, ev).second) per_process[ev.process].push_back(v);
  }
  std::vector<std::vector<Vertex>> columns;
  for (auto& [p, vs] : per_process) columns.push_back(vs);
  // Input simplexes: chromatic choices of alphabet vertices, at most bound/2 of them.
  const std::size_t max_size = bound / 2;
  std::vector<Simplex> input_simplexes;
  bool complete = true;
  std::set<Simplex> seen_inputs;
  for (const auto& cols : nonempty_subsets(columns)) {
    if (cols.size() > max_size) {
      complete = false;
      continue;
    }
    for (auto& pick : cartesian(cols)) {
      Simplex s = make_simplex(std::move(pick));
      if (seen_inputs.insert(s).second) input_simplexes.push_back(std::move(s));
    }
  }
  std::vector<Simplex> input_facets;
  for (const auto& s : input_simplexes) {
    bool maximal = std::none_of(input_simplexes.begin(), input_simplexes.end(),
                                [&](const Simplex& o) { return o.size() > s.size() && is_face(s, o); });
    if (maximal) input_facets.push_back(s);
  }
  const SpecMap specs{{"X", spec}};
  std::map<Simplex, std::vector<Simplex>> images;
  for (const auto& sigma : input_simplexes) {
    std::map<ProcessId, Vertex> input_of;
    for (const auto& v : sigma) input_of.emplace(v.process, v);
    const std::set<ProcessId> members = ids(sigma);
    std::vector<ProcessId> procs(members.begin(), members.end());
    std::vector<Batch> prefix;
    std::set<Simplex> facets;
    batch_structures(procs, {}, prefix, [&](const std::vector<Batch>& batches) {
      std::vector<ProcessId> responders;
      for (const auto& b : batches) responders.insert(responders.end(), b.responded.begin(), b.responded.end());
      std::vector<std::vector<Value>> options;
      for (auto p : responders) {
        auto it = universe.find(p);
        if (it == universe.end()) return;
        options.emplace_back(it->second.begin(), it->second.end());
      }
      for (const auto& ys : cartesian(options)) {
        std::vector<Event> events;
        std::vector<Vertex> gamma;
        Simplex seen;
        std::size_t k = 0;
        for (const auto& b : batches) {
          for (auto p : b.invoked) {
            events.push_back(by_vertex.at(input_of.at(p)));
            seen = simplex_union(seen, {input_of.at(p)});
          }
          for (auto p : b.responded) {
            const Event& inv = by_vertex.at(input_of.at(p));
            events.push_back(Event::response(p, "X", inv.operation, ys[k]));
            gamma.push_back(refined ? Vertex(p, ys[k], seen) : Vertex(p, ys[k]));
            ++k;
          }
        }
        if (check(Execution(std::move(events)), specs, condition).yes) facets.insert(make_simplex(std::move(gamma)));
      }
    });
    images[sigma].assign(facets.begin(), facets.end());
  }
  Task t = make_task(spec.name + (refined ? "-refined-task" : "-task"), spec.processes, Complex(input_facets),
                     [&](const Simplex& s) { return Complex(images.at(s)); }, refined);
  t.event_bound = bound;
  t.complete = complete;
  return t;
}

}  // namespace

RefinedTask object_to_refined_task(const IntervalSpec& spec, std::size_t bound) {
  if (spec.operations.size() != 1 || !spec.one_shot) {
    throw Error(ErrorKind::NotOneShot, spec.name + " is not a one-shot single-operation object");
  }
  if (!is_total(spec, 200'000)) throw Error(ErrorKind::NotTotal, spec.name + " is not total");
  return task_from_runs(spec, bound, Condition::IntervalLinearizable, true);
}

Task naive_task_from_object(const IntervalSpec& spec, std::size_t bound, Condition condition) {
  return task_from_runs(spec, bound, condition, false);
}

SpecSummary summarize_spec(const IntervalSpec& spec, std::size_t max_states) {
  SpecSummary out;
  using Config = std::pair<SpecState, std::set<ProcessId>>;
  std::set<SpecState> states;
  std::set<Config> seen;
  std::deque<Config> queue;
  for (const auto& q : spec.initial_states) {
    states.insert(q);
    if (seen.insert({q, {}}).second) queue.push_back({q, {}});
  }
  while (!queue.empty()) {
    auto [q, invoked] = queue.front();
    queue.pop_front();
    std::set<ProcessId> pend = spec.pending(q);
    std::vector<Event> ready;
    for (const auto& ev : spec.alphabet) {
      if (!invoked.count(ev.process) && !pend.count(ev.process)) ready.push_back(ev);
    }
    for (const auto& group : nonempty_subsets(ready)) {
      std::set<ProcessId> ps;
      for (const auto& ev : group) ps.insert(ev.process);
      if (ps.size() != group.size()) continue;
      std::vector<Transition> ts;
      try {
        ts = spec.step(q, ConcurrencyClass::make(ClassKind::Invoking, group));
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::IllegalInput) throw;
        continue;
      }
      std::set<ProcessId> next_invoked = invoked;
      if (spec.one_shot) next_invoked.insert(ps.begin(), ps.end());
      out.transitions += ts.size();
      for (const auto& t : ts) {
        if (states.size() >= max_states && !states.count(t.next)) {
          out.truncated = true;
          continue;
        }
        states.insert(t.next);
        Config c{t.next, next_invoked};
        if (seen.insert(c).second) queue.push_back(std::move(c));
      }
    }
  }
  out.states = states.size();
  return out;
}

}  // namespace ilin
