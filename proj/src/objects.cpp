#include "ilin/objects.hpp"

#include <algorithm>

#include "ilin/combinatorics.hpp"
#include "ilin/error.hpp"

namespace ilin {

namespace {

const Value kAborted = Value::symbol("aborted");
const Value kNotAborted = Value::symbol("notAborted");

Value procs_value(const std::set<ProcessId>& ps) {
  std::vector<Value> out;
  for (auto p : ps) out.push_back(Value::integer(p));
  return Value::set(std::move(out));
}

std::set<ProcessId> value_procs(const Value& v) {
  std::set<ProcessId> out;
  for (const auto& e : v.elems()) out.insert(static_cast<ProcessId>(e.as_int()));
  return out;
}

Value default_universe(int n, const std::optional<Value>& universe) {
  if (universe) return *universe;
  std::vector<Value> out;
  for (int i = 1; i <= n; ++i) out.push_back(Value::integer(i));
  return Value::set(std::move(out));
}

std::vector<Event> alphabet_over(int n, const std::string& op, const Value& universe) {
  std::vector<Event> out;
  for (int p = 0; p < n; ++p) {
    for (const auto& v : universe.elems()) out.push_back(Event::invocation(p, "X", op, v));
  }
  return out;
}

const std::string& object_of(const ConcurrencyClass& inv) { return inv.events.front().object; }

Value vals_of(const ConcurrencyClass& inv) {
  std::vector<Value> out;
  for (const auto& ev : inv.events) {
    if (!ev.payload.is_none()) out.push_back(ev.payload);
  }
  return Value::set(std::move(out));
}

void require_params(int n, int k, bool uses_k) {
  if (n < 1) throw Error(ErrorKind::BadParams, "n must be at least 1");
  if (uses_k && (k < 1 || k > n)) throw Error(ErrorKind::BadParams, "k must lie in [1, n]");
}

// Every non-empty responder subset of `eligible`, each responder drawing its
// payload from `choices(p)`.
template <class Choices, class Next>
std::vector<Transition> enumerate_responses(const std::vector<ProcessId>& eligible, const std::string& object,
                                            const std::map<ProcessId, std::string>& ops, Choices choices, Next next) {
  std::vector<Transition> out;
  for (const auto& subset : nonempty_subsets(eligible)) {
    std::vector<std::vector<Value>> options;
    for (auto p : subset) options.push_back(choices(p));
    for (const auto& picks : cartesian(options)) {
      std::vector<Event> evs;
      for (std::size_t i = 0; i < subset.size(); ++i) {
        evs.push_back(Event::response(subset[i], object, ops.at(subset[i]), picks[i]));
      }
      auto r = ConcurrencyClass::make(ClassKind::Responding, std::move(evs));
      auto q = next(r);
      out.push_back(Transition{std::move(r), std::move(q)});
    }
  }
  return out;
}

std::set<ProcessId> tuple_pending(const SpecState& q) { return value_procs(q.value.at(1)); }

}  // namespace

SpecString parse_spec_string(std::string_view text) {
  SpecString out;
  auto colon = text.find(':');
  out.name = std::string(text.substr(0, colon));
  if (out.name.empty()) throw Error(ErrorKind::BadParams, "empty object name in '" + std::string(text) + "'");
  if (colon == std::string_view::npos) return out;
  std::string_view rest = text.substr(colon + 1);
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= rest.size(); ++i) {
    char c = i < rest.size() ? rest[i] : ',';
    if (c == '{' || c == '(') ++depth;
    if (c == '}' || c == ')') --depth;
    if (c == ',' && depth == 0) {
      std::string_view item = rest.substr(start, i - start);
      auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw Error(ErrorKind::BadParams, "expected key=value, got '" + std::string(item) + "'");
      }
      std::string key(item.substr(0, eq));
      if (!out.params.emplace(key, std::string(item.substr(eq + 1))).second) {
        throw Error(ErrorKind::BadParams, "parameter '" + key + "' given twice");
      }
      start = i + 1;
    }
  }
  if (depth != 0) throw Error(ErrorKind::BadParams, "unbalanced braces in '" + std::string(text) + "'");
  return out;
}

namespace {

int parse_int_param(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::BadParams, "parameter " + key + " expects an integer, got '" + text + "'");
}

}  // namespace

BuiltinObjectId parse_object_id(std::string_view text) {
  SpecString s = parse_spec_string(text);
  static const std::set<std::string> known{"validity",       "validity_abort", "write_snapshot",
                                           "safe_consensus", "ws_sequential",  "restricted_queue"};
  if (!known.count(s.name)) throw Error(ErrorKind::UnknownObject, "no built-in object named '" + s.name + "'");
  BuiltinObjectId id;
  id.name = s.name;
  for (const auto& [key, val] : s.params) {
    if (key == "n") {
      id.n = parse_int_param(key, val);
    } else if (key == "k" && s.name == "validity_abort") {
      id.k = parse_int_param(key, val);
    } else if (key == "U" && (s.name == "validity" || s.name == "validity_abort" || s.name == "safe_consensus" ||
                              s.name == "write_snapshot")) {
      Value u;
      try {
        u = parse_value(val);
      } catch (const Error& err) {
        throw Error(ErrorKind::BadParams, "bad universe: " + err.detail());
      }
      if (!u.is_set() || u.size() == 0) throw Error(ErrorKind::BadParams, "U must be a non-empty set");
      id.universe = u;
    } else if (key == "view" && s.name == "write_snapshot") {
      if (val != "values" && val != "pairs") throw Error(ErrorKind::BadParams, "view must be 'values' or 'pairs'");
      id.view = val;
    } else {
      throw Error(ErrorKind::BadParams, "object " + s.name + " takes no parameter '" + key + "'");
    }
  }
  if (s.name == "restricted_queue" && id.n != 3) throw Error(ErrorKind::BadParams, "restricted_queue has n=3");
  if (s.name == "restricted_queue" && !s.params.count("n")) id.n = 3;
  require_params(id.n, id.k, s.name == "validity_abort");
  return id;
}

IntervalSpec builtin_spec(const BuiltinObjectId& id) {
  if (id.name == "validity") return validity_spec(id.n, id.universe);
  if (id.name == "validity_abort") return validity_abort_spec(id.n, id.k, id.universe);
  if (id.name == "write_snapshot") return write_snapshot_spec(id.n, id.view == "pairs", id.universe);
  if (id.name == "safe_consensus") return safe_consensus_spec(id.n, id.universe);
  if (id.name == "ws_sequential") return ws_sequential_spec(id.n);
  if (id.name == "restricted_queue") return restricted_queue_spec();
  throw Error(ErrorKind::UnknownObject, "no built-in object named '" + id.name + "'");
}

IntervalSpec validity_spec(int n, std::optional<Value> universe, bool one_shot) {
  require_params(n, 1, false);
  Value u = default_universe(n, universe);
  IntervalSpec spec;
  spec.name = "validity";
  spec.processes = n;
  spec.operations = {"validity"};
  spec.initial_states = {SpecState{Value::tuple({Value::set({}), Value::set({})})}};
  spec.pending = tuple_pending;
  spec.one_shot = one_shot;
  spec.alphabet = alphabet_over(n, "validity", u);
  spec.delta = [](const SpecState& q, const ConcurrencyClass& inv) {
    Value vals = q.value.at(0).set_union(vals_of(inv));
    std::set<ProcessId> pend = value_procs(q.value.at(1));
    for (const auto& ev : inv.events) pend.insert(ev.process);
    std::vector<ProcessId> eligible(pend.begin(), pend.end());
    std::map<ProcessId, std::string> ops;
    for (auto p : eligible) ops[p] = "validity";
    return enumerate_responses(
        eligible, object_of(inv), ops, [&](ProcessId) { return vals.elems(); },
        [&](const ConcurrencyClass& r) {
          std::set<ProcessId> left = pend;
          for (const auto& ev : r.events) left.erase(ev.process);
          return SpecState{Value::tuple({vals, procs_value(left)})};
        });
  };
  return spec;
}

IntervalSpec write_snapshot_spec(int n, bool pairs_view, std::optional<Value> universe) {
  require_params(n, 1, false);
  IntervalSpec spec;
  spec.name = "write_snapshot";
  spec.processes = n;
  spec.operations = {"write_snapshot"};
  spec.initial_states = {SpecState{Value::tuple({Value::set({}), Value::set({})})}};
  spec.pending = tuple_pending;
  if (universe) {
    spec.alphabet = alphabet_over(n, "write_snapshot", *universe);
  } else {
    for (int p = 0; p < n; ++p) spec.alphabet.push_back(Event::invocation(p, "X", "write_snapshot", Value::integer(p + 1)));
  }
  spec.delta = [pairs_view](const SpecState& q, const ConcurrencyClass& inv) {
    std::vector<Value> added;
    for (const auto& ev : inv.events) added.push_back(Value::tuple({Value::integer(ev.process), ev.payload}));
    Value vals = q.value.at(0).set_union(Value::set(std::move(added)));
    Value view = vals;
    if (!pairs_view) {
      std::vector<Value> plain;
      for (const auto& pv : vals.elems()) plain.push_back(pv.at(1));
      view = Value::set(std::move(plain));
    }
    std::set<ProcessId> pend = value_procs(q.value.at(1));
    for (const auto& ev : inv.events) pend.insert(ev.process);
    std::vector<ProcessId> eligible(pend.begin(), pend.end());
    std::map<ProcessId, std::string> ops;
    for (auto p : eligible) ops[p] = "write_snapshot";
    return enumerate_responses(
        eligible, object_of(inv), ops, [&](ProcessId) { return std::vector<Value>{view}; },
        [&](const ConcurrencyClass& r) {
          std::set<ProcessId> left = pend;
          for (const auto& ev : r.events) left.erase(ev.process);
          return SpecState{Value::tuple({vals, procs_value(left)})};
        });
  };
  return spec;
}

IntervalSpec validity_abort_spec(int n, int k, std::optional<Value> universe) {
  require_params(n, k, true);
  Value u = default_universe(n, universe);
  IntervalSpec spec;
  spec.name = "validity_abort";
  spec.processes = n;
  spec.operations = {"propose", "abort"};
  // (vals, pend as {(p, op)}, aborts)
  spec.initial_states = {SpecState{Value::tuple({Value::set({}), Value::set({}), Value::set({})})}};
  spec.pending = [](const SpecState& q) {
    std::set<ProcessId> out;
    for (const auto& po : q.value.at(1).elems()) out.insert(static_cast<ProcessId>(po.at(0).as_int()));
    return out;
  };
  spec.one_shot = false;
  spec.alphabet = alphabet_over(n, "propose", u);
  for (int p = 0; p < n; ++p) spec.alphabet.push_back(Event::invocation(p, "X", "abort"));
  spec.delta = [k](const SpecState& q, const ConcurrencyClass& inv) {
    Value vals = q.value.at(0).set_union(vals_of(inv));
    std::map<ProcessId, std::string> ops;
    for (const auto& po : q.value.at(1).elems()) {
      ops[static_cast<ProcessId>(po.at(0).as_int())] = po.at(1).as_symbol();
    }
    std::set<ProcessId> aborts = value_procs(q.value.at(2));
    for (const auto& ev : inv.events) {
      ops[ev.process] = ev.operation;
      if (ev.operation == "abort") aborts.insert(ev.process);
    }
    const bool blocked = static_cast<int>(aborts.size()) >= k;
    std::vector<ProcessId> eligible;
    for (const auto& [p, op] : ops) eligible.push_back(p);
    return enumerate_responses(
        eligible, object_of(inv), ops,
        [&](ProcessId p) {
          if (blocked) return std::vector<Value>{kAborted};
          if (ops.at(p) == "abort") return std::vector<Value>{kNotAborted};
          return vals.elems();
        },
        [&](const ConcurrencyClass& r) {
          auto left = ops;
          auto still = aborts;
          for (const auto& ev : r.events) {
            left.erase(ev.process);
            if (ev.payload == kNotAborted) still.erase(ev.process);
          }
          std::vector<Value> pend;
          for (const auto& [p, op] : left) pend.push_back(Value::tuple({Value::integer(p), Value::symbol(op)}));
          return SpecState{Value::tuple({vals, Value::set(std::move(pend)), procs_value(still)})};
        });
  };
  return spec;
}

IntervalSpec safe_consensus_spec(int n, std::optional<Value> universe) {
  require_params(n, 1, false);
  Value u = default_universe(n, universe);
  IntervalSpec spec;
  spec.name = "safe_consensus";
  spec.processes = n;
  spec.operations = {"scons"};
  // (decided value or none, pend)
  spec.initial_states = {SpecState{Value::tuple({Value::none(), Value::set({})})}};
  spec.pending = tuple_pending;
  spec.one_shot = false;
  spec.alphabet = alphabet_over(n, "scons", u);
  spec.delta = [u](const SpecState& q, const ConcurrencyClass& inv) {
    const Value& decided = q.value.at(0);
    std::set<ProcessId> pend = value_procs(q.value.at(1));
    for (const auto& ev : inv.events) pend.insert(ev.process);
    std::vector<ProcessId> eligible(pend.begin(), pend.end());
    std::map<ProcessId, std::string> ops;
    for (auto p : eligible) ops[p] = "scons";
    auto after = [&](const ConcurrencyClass& r) {
      std::set<ProcessId> left = pend;
      for (const auto& ev : r.events) left.erase(ev.process);
      return SpecState{Value::tuple({r.events.front().payload, procs_value(left)})};
    };
    std::vector<Value> common;
    if (!decided.is_none()) {
      common = {decided};
    } else if (eligible.size() == 1) {
      // The first call runs solo and must return its own input.
      common = {inv.events.front().payload};
    } else {
      common = u.set_union(vals_of(inv)).elems();
    }
    std::vector<Transition> out;
    for (const auto& v : common) {
      auto part = enumerate_responses(
          eligible, object_of(inv), ops, [&](ProcessId) { return std::vector<Value>{v}; }, after);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  };
  return spec;
}

IntervalSpec ws_sequential_spec(int n) {
  require_params(n, 1, false);
  IntervalSpec spec;
  spec.name = "ws_sequential";
  spec.processes = n;
  spec.operations = {"write_snapshot"};
  spec.flavor = Flavor::Sequential;
  // (current state of the automaton, processes that already moved)
  spec.initial_states = {SpecState{Value::tuple({Value::set({}), Value::set({})})}};
  spec.pending = [](const SpecState&) { return std::set<ProcessId>{}; };
  for (int p = 0; p < n; ++p) spec.alphabet.push_back(Event::invocation(p, "X", "write_snapshot", Value::integer(p + 1)));
  spec.delta = [n](const SpecState& q, const ConcurrencyClass& inv) {
    std::vector<Transition> out;
    if (inv.size() != 1) return out;
    const Event& ev = inv.events.front();
    const Value& s = q.value.at(0);
    std::set<ProcessId> moved = value_procs(q.value.at(1));
    if (moved.count(ev.process) || ev.payload != Value::integer(ev.process + 1)) return out;
    Value base = s.with(ev.payload);
    std::vector<Value> rest;
    for (int i = 1; i <= n; ++i) {
      if (!base.contains(Value::integer(i))) rest.push_back(Value::integer(i));
    }
    std::vector<std::vector<Value>> extras = nonempty_subsets(rest);
    extras.insert(extras.begin(), std::vector<Value>{});
    moved.insert(ev.process);
    for (const auto& extra : extras) {
      Value next = base.set_union(Value::set(extra));
      out.push_back(Transition{
          ConcurrencyClass::make(ClassKind::Responding, {Event::response(ev.process, ev.object, ev.operation, next)}),
          SpecState{Value::tuple({next, procs_value(moved)})}});
    }
    return out;
  };
  return spec;
}

IntervalSpec restricted_queue_spec() {
  IntervalSpec spec;
  spec.name = "restricted_queue";
  spec.processes = 3;
  spec.operations = {"enq", "deq"};
  spec.flavor = Flavor::Sequential;
  spec.initial_states = {SpecState{Value::tuple({})}};
  spec.pending = [](const SpecState&) { return std::set<ProcessId>{}; };
  spec.alphabet = {Event::invocation(0, "X", "enq", Value::integer(1)), Event::invocation(1, "X", "enq", Value::integer(2)),
                   Event::invocation(2, "X", "deq")};
  spec.delta = [](const SpecState& q, const ConcurrencyClass& inv) {
    std::vector<Transition> out;
    if (inv.size() != 1) return out;
    const Event& ev = inv.events.front();
    std::vector<Value> queue = q.value.elems();
    Value result;
    if (ev.operation == "enq" && ev.process < 2 && ev.payload == Value::integer(ev.process + 1)) {
      queue.push_back(ev.payload);
      result = Value::symbol("ok");
    } else if (ev.operation == "deq" && ev.process == 2 && ev.payload.is_none()) {
      if (queue.empty()) {
        result = Value::symbol("bot");
      } else {
        result = queue.front();
        queue.erase(queue.begin());
      }
    } else {
      return out;
    }
    out.push_back(Transition{
        ConcurrencyClass::make(ClassKind::Responding, {Event::response(ev.process, ev.object, ev.operation, result)}),
        SpecState{Value::tuple(std::move(queue))}});
    return out;
  };
  return spec;
}

bool safe_consensus_check(const IntervalExecution& h, int n) {
  if (!h.well_formed()) return false;
  std::optional<Value> agreed;
  for (const auto& c : h.classes) {
    for (const auto& ev : c.events) {
      if (ev.process >= n) return false;
      if (!ev.is_response()) continue;
      if (agreed && *agreed != ev.payload) return false;
      agreed = ev.payload;
    }
  }
  if (h.classes.size() >= 2 && h.classes[0].size() == 1) {
    const Event& first = h.classes[0].events.front();
    const Event* answer = h.classes[1].find(first.process);
    if (answer && answer->payload != first.payload) return false;
  }
  return true;
}

}  // namespace ilin
