#include "ilin/checker.hpp"

#include <algorithm>
#include <climits>
#include <cstdint>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "ilin/combinatorics.hpp"
#include "ilin/error.hpp"

namespace ilin {

const char* to_string(Condition c) {
  switch (c) {
    case Condition::Linearizable: return "linearizable";
    case Condition::SetLinearizable: return "set-linearizable";
    case Condition::IntervalLinearizable: return "interval-linearizable";
  }
  return "?";
}

std::size_t default_budget() {
  if (const char* env = std::getenv("ILIN_BUDGET")) {
    try {
      long long v = std::stoll(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::BadParams, std::string("ILIN_BUDGET must be a positive integer, got '") + env + "'");
  }
  return 5'000'000;
}

namespace {

using Mask = std::uint64_t;

Mask bit(std::size_t i) { return Mask{1} << i; }

struct Call {
  Event inv;
  std::optional<Event> res;
  std::size_t object = 0;
  Mask preds = 0;
};

struct Node {
  Mask inv = 0;
  Mask res = 0;
  std::vector<SpecState> states;
  std::vector<Mask> open;
};

// Depth-first search for an interval-sequential execution, one invoking and
// one responding class per level.
class Search {
 public:
  Search(const Execution& e, const SpecMap& specs, Condition cond, std::size_t budget)
      : cond_(cond), budget_(budget) {
    auto ops = operation_calls(e);
    if (ops.size() > 64) throw Error(ErrorKind::BudgetExceeded, "more than 64 operation calls");
    std::map<std::string, std::size_t> obj_index;
    for (const auto& name : e.objects()) {
      auto it = specs.find(name);
      if (it == specs.end()) throw Error(ErrorKind::UnknownObject, "no specification bound to object '" + name + "'");
      obj_index[name] = objects_.size();
      objects_.push_back(name);
      specs_.push_back(&it->second);
    }
    for (std::size_t i = 0; i < ops.size(); ++i) {
      Call c{ops[i].invocation, ops[i].response, obj_index.at(ops[i].invocation.object), 0};
      for (std::size_t j = 0; j < ops.size(); ++j) {
        if (ops[j].res_index && *ops[j].res_index < ops[i].inv_index) c.preds |= bit(j);
      }
      if (c.res) completed_ |= bit(i);
      calls_.push_back(std::move(c));
    }
  }

  // With a sink, every witness found is reported and the search continues
  // until `limit` are collected.
  void collect(std::vector<Verdict>* sink, std::size_t limit) {
    sink_ = sink;
    limit_ = limit;
  }

  bool run(int max_pairs) {
    classes_.clear();
    appended_.clear();
    if (completed_ == 0) return true;
    std::vector<std::vector<SpecState>> inits;
    for (const auto* s : specs_) inits.push_back(s->initial_states);
    for (auto& combo : cartesian(inits)) {
      Node n{0, 0, std::move(combo), std::vector<Mask>(objects_.size(), 0)};
      if (invoke(n, max_pairs)) return true;
    }
    return false;
  }

  std::size_t call_count() const { return calls_.size(); }
  std::size_t nodes() const { return nodes_; }
  IntervalExecution witness() const { return IntervalExecution{classes_}; }
  const std::vector<Event>& appended() const { return appended_; }

 private:
  void tick() {
    if (++nodes_ > budget_) {
      throw Error(ErrorKind::BudgetExceeded, "search exceeded " + std::to_string(budget_) + " nodes");
    }
  }

  std::string key(const Node& n, char phase) const {
    std::string k(1, phase);
    k += std::to_string(n.inv) + "/" + std::to_string(n.res);
    for (std::size_t i = 0; i < objects_.size(); ++i) {
      k += "|" + n.states[i].value.to_string() + "#" + std::to_string(n.open[i]);
    }
    return k;
  }

  bool known_failure(const std::string& k, int remaining) const {
    if (sink_) return false;
    auto it = failed_.find(k);
    return it != failed_.end() && remaining <= it->second;
  }

  void record_failure(const std::string& k, int remaining) {
    auto& slot = failed_.try_emplace(k, INT_MIN).first->second;
    slot = std::max(slot, remaining);
  }

  bool goal(const Node& n) const {
    return (n.res & completed_) == completed_ && (n.inv & ~n.res) == 0;
  }

  bool invoke(const Node& n, int remaining) {
    if (remaining <= 0) return false;
    tick();
    std::string k = key(n, 'I');
    if (known_failure(k, remaining)) return false;
    std::vector<std::size_t> cands;
    for (std::size_t i = 0; i < calls_.size(); ++i) {
      if ((n.inv & bit(i)) || (calls_[i].preds & ~n.res) || n.open[calls_[i].object]) continue;
      cands.push_back(i);
    }
    const std::size_t limit = cands.size() >= 63 ? 0 : (std::size_t{1} << cands.size());
    for (std::size_t mask = 1; mask < limit; ++mask) {
      if (cond_ == Condition::Linearizable && (mask & (mask - 1))) continue;
      Node next = n;
      std::vector<Event> evs;
      for (std::size_t j = 0; j < cands.size(); ++j) {
        if (!(mask & (std::size_t{1} << j))) continue;
        std::size_t c = cands[j];
        next.inv |= bit(c);
        next.open[calls_[c].object] |= bit(c);
        evs.push_back(calls_[c].inv);
      }
      classes_.push_back(ConcurrencyClass::make(ClassKind::Invoking, std::move(evs)));
      if (respond(next, remaining)) return true;
      classes_.pop_back();
    }
    record_failure(k, remaining);
    return false;
  }

  struct Option {
    bool stay = false;
    Mask answered = 0;
    std::vector<Event> events;
    std::vector<Event> appended;
    SpecState next;
  };

  std::vector<Option> options_for(const Node& n, std::size_t obj) {
    std::vector<Option> out;
    if (cond_ == Condition::IntervalLinearizable) out.push_back(Option{true, 0, {}, {}, {}});
    std::vector<Event> inv;
    for (std::size_t i = 0; i < calls_.size(); ++i) {
      if (n.open[obj] & bit(i)) inv.push_back(calls_[i].inv);
    }
    auto inv_class = ConcurrencyClass::make(ClassKind::Invoking, std::move(inv));
    std::vector<Transition> ts;
    try {
      ts = specs_[obj]->step(n.states[obj], inv_class);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::IllegalInput) throw;
      return out;
    }
    for (auto& t : ts) {
      Option o;
      bool ok = true;
      for (const auto& r : t.response.events) {
        std::optional<std::size_t> call;
        for (std::size_t i = 0; i < calls_.size(); ++i) {
          if (calls_[i].object == obj && calls_[i].inv.process == r.process && (n.inv & bit(i)) && !(n.res & bit(i))) {
            call = i;
            break;
          }
        }
        if (!call || r.operation != calls_[*call].inv.operation) {
          ok = false;
          break;
        }
        if (calls_[*call].res) {
          if (calls_[*call].res->payload != r.payload) {
            ok = false;
            break;
          }
        } else {
          o.appended.push_back(r);
        }
        o.answered |= bit(*call);
      }
      if (!ok) continue;
      if (cond_ != Condition::IntervalLinearizable && o.answered != n.open[obj]) continue;
      o.events = t.response.events;
      o.next = std::move(t.next);
      out.push_back(std::move(o));
    }
    return out;
  }

  bool respond(const Node& n, int remaining) {
    tick();
    std::string k = key(n, 'R');
    if (known_failure(k, remaining)) return false;
    std::vector<std::size_t> open_objs;
    std::vector<std::vector<Option>> per_obj;
    for (std::size_t x = 0; x < objects_.size(); ++x) {
      if (!n.open[x]) continue;
      open_objs.push_back(x);
      per_obj.push_back(options_for(n, x));
    }
    std::vector<std::vector<std::size_t>> index_lists;
    for (const auto& opts : per_obj) {
      std::vector<std::size_t> idx(opts.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      index_lists.push_back(std::move(idx));
    }
    for (const auto& pick : cartesian(index_lists)) {
      Node next = n;
      std::vector<Event> evs;
      std::size_t added = 0;
      bool any = false;
      for (std::size_t j = 0; j < open_objs.size(); ++j) {
        const Option& o = per_obj[j][pick[j]];
        if (o.stay) continue;
        any = true;
        std::size_t x = open_objs[j];
        next.res |= o.answered;
        next.states[x] = o.next;
        next.open[x] = 0;
        evs.insert(evs.end(), o.events.begin(), o.events.end());
        appended_.insert(appended_.end(), o.appended.begin(), o.appended.end());
        added += o.appended.size();
      }
      if (any) {
        classes_.push_back(ConcurrencyClass::make(ClassKind::Responding, std::move(evs)));
        bool done = goal(next) && std::all_of(next.open.begin(), next.open.end(), [](Mask m) { return m == 0; });
        if (done && sink_) {
          report();
          if (sink_->size() >= limit_) return true;
        } else if (done || invoke(next, remaining - 1)) {
          return true;
        }
        classes_.pop_back();
      }
      appended_.resize(appended_.size() - added);
    }
    record_failure(k, remaining);
    return false;
  }

  void report() {
    Verdict v;
    v.yes = true;
    v.witness = witness();
    v.appended = appended_;
    for (const auto& seen : *sink_) {
      if (seen.witness->classes == v.witness->classes && seen.appended == v.appended) return;
    }
    sink_->push_back(std::move(v));
  }

  Condition cond_;
  std::size_t budget_;
  std::vector<Verdict>* sink_ = nullptr;
  std::size_t limit_ = 0;
  std::vector<std::string> objects_;
  std::vector<const IntervalSpec*> specs_;
  std::vector<Call> calls_;
  Mask completed_ = 0;
  std::size_t nodes_ = 0;
  std::unordered_map<std::string, int> failed_;
  std::vector<ConcurrencyClass> classes_;
  std::vector<Event> appended_;
};

}  // namespace

Verdict check(const Execution& e, const SpecMap& specs, Condition condition, std::size_t budget) {
  Search search(e, specs, condition, budget);
  Verdict v;
  const int max_pairs = static_cast<int>(search.call_count()) + 1;
  bool found = search.run(max_pairs);
  if (found) {
    // Shortest witness for reproducible output.
    const int pairs = static_cast<int>(search.witness().classes.size() / 2);
    for (int d = 0; d <= pairs; ++d) {
      if (search.run(d)) break;
    }
    v.yes = true;
    v.witness = search.witness();
    v.appended = search.appended();
    if (auto err = verify_witness(e, specs, condition, *v.witness, v.appended)) {
      throw std::logic_error("checker produced an invalid witness: " + *err);
    }
  }
  v.nodes = search.nodes();
  return v;
}

std::vector<Verdict> all_witnesses(const Execution& e, const SpecMap& specs, Condition condition, std::size_t limit,
                                   std::size_t budget) {
  std::vector<Verdict> out;
  Verdict first = check(e, specs, condition, budget);
  if (!first.yes || limit == 0) return out;
  Search search(e, specs, condition, budget);
  const int pairs = static_cast<int>(first.witness->classes.size() / 2);
  search.collect(&out, limit);
  // The empty witness is the only one when nothing has completed.
  if (pairs == 0) return {first};
  search.run(pairs);
  for (auto& v : out) {
    if (auto err = verify_witness(e, specs, condition, *v.witness, v.appended)) {
      throw std::logic_error("checker produced an invalid witness: " + *err);
    }
    v.nodes = search.nodes();
  }
  return out;
}

Verdict check_interval_linearizable(const Execution& e, const SpecMap& specs) {
  return check(e, specs, Condition::IntervalLinearizable);
}

Verdict check_set_linearizable(const Execution& e, const SpecMap& specs) {
  return check(e, specs, Condition::SetLinearizable);
}

Verdict check_linearizable(const Execution& e, const SpecMap& specs) { return check(e, specs, Condition::Linearizable); }

namespace {

// Class index of every event of `c` in the witness, matched per process by
// position. Empty optional when the per-process sequences differ.
std::optional<std::vector<std::size_t>> locate(const Execution& c, const IntervalExecution& w) {
  std::map<ProcessId, std::vector<std::pair<const Event*, std::size_t>>> by_proc;
  for (std::size_t k = 0; k < w.classes.size(); ++k) {
    for (const auto& ev : w.classes[k].events) by_proc[ev.process].emplace_back(&ev, k);
  }
  std::map<ProcessId, std::size_t> seen;
  std::vector<std::size_t> where(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto& list = by_proc[c[i].process];
    std::size_t& pos = seen[c[i].process];
    if (pos >= list.size() || !(*list[pos].first == c[i])) return std::nullopt;
    where[i] = list[pos].second;
    ++pos;
  }
  for (const auto& [p, list] : by_proc) {
    if (seen[p] != list.size()) return std::nullopt;
  }
  return where;
}

}  // namespace

std::optional<std::string> verify_witness(const Execution& e, const SpecMap& specs, Condition condition,
                                          const IntervalExecution& witness, const std::vector<Event>& appended) {
  Execution full;
  try {
    full = extend(e, appended);
  } catch (const Error& err) {
    return std::string("extension is invalid: ") + err.what();
  }
  Execution c = complete(full);
  try {
    witness.validate();
  } catch (const Error& err) {
    return std::string("witness is not an interval-sequential execution: ") + err.what();
  }
  if (witness.classes.size() % 2 != 0) return std::string("witness ends with an invoking class");
  auto where = locate(c, witness);
  if (!where) return std::string("witness does not agree with comp(Ē) on every process");
  std::set<std::string> objects = c.objects();
  for (const auto& c2 : witness.classes) {
    for (const auto& ev : c2.events) objects.insert(ev.object);
  }
  for (const auto& x : objects) {
    auto it = specs.find(x);
    if (it == specs.end()) return "no specification for object " + x;
    if (!accepts(it->second, project_interval(witness, x)).accepted) {
      return "projection on " + x + " is not accepted by " + it->second.name;
    }
  }
  auto calls = operation_calls(c);
  for (const auto& a : calls) {
    for (const auto& b : calls) {
      if (*a.res_index < b.inv_index && (*where)[*a.res_index] >= (*where)[b.inv_index]) {
        return "precedence " + format_event(a.invocation) + " before " + format_event(b.invocation) + " is not respected";
      }
    }
  }
  if (condition != Condition::IntervalLinearizable) {
    for (const auto& a : calls) {
      if ((*where)[*a.res_index] != (*where)[a.inv_index] + 1) {
        return "response to " + format_event(a.invocation) + " is not in the next class";
      }
    }
  }
  if (condition == Condition::Linearizable) {
    for (const auto& cls : witness.classes) {
      if (cls.size() != 1) return std::string("linearization has a class with more than one event");
    }
  }
  return std::nullopt;
}

IntervalExecution compose_witnesses(const Execution& e, const std::vector<Event>& appended,
                                    const std::map<std::string, IntervalExecution>& per_object) {
  struct NodeRef {
    std::string object;
    std::size_t index;
  };
  std::vector<NodeRef> nodes;
  std::vector<const ConcurrencyClass*> cls;
  std::map<std::string, std::size_t> first;
  for (const auto& [x, w] : per_object) {
    first[x] = nodes.size();
    for (std::size_t i = 0; i < w.classes.size(); ++i) {
      nodes.push_back({x, i});
      cls.push_back(&w.classes[i]);
    }
  }
  const std::size_t n = nodes.size();
  std::vector<std::set<std::size_t>> succ(n);
  for (std::size_t v = 0; v + 1 < n; ++v) {
    if (nodes[v].object == nodes[v + 1].object) succ[v].insert(v + 1);
  }
  Execution c = complete(extend(e, appended));
  auto calls = operation_calls(c);
  // Class node of each event of comp(Ē), through the per-object witnesses.
  std::vector<std::size_t> node_of(c.size(), 0);
  for (const auto& [x, w] : per_object) {
    auto where = locate(project_object(c, x), w);
    if (!where) throw Error(ErrorKind::NotLinearizable, "witness for " + x + " does not match the execution");
    std::size_t k = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i].object == x) node_of[i] = first[x] + (*where)[k++];
    }
  }
  for (const auto& a : calls) {
    for (const auto& b : calls) {
      if (a.invocation.object != b.invocation.object && *a.res_index < b.inv_index) {
        succ[node_of[*a.res_index]].insert(node_of[b.inv_index]);
      }
    }
  }
  std::vector<int> indeg(n, 0);
  for (const auto& s : succ) {
    for (auto v : s) ++indeg[v];
  }
  std::vector<std::size_t> order;
  std::vector<bool> done(n, false);
  ClassKind last = ClassKind::Invoking;
  while (order.size() < n) {
    std::optional<std::size_t> pick;
    for (std::size_t v = 0; v < n; ++v) {
      if (done[v] || indeg[v] != 0) continue;
      if (!pick || (cls[v]->kind == last && cls[*pick]->kind != last)) pick = v;
    }
    if (!pick) throw Error(ErrorKind::NotLinearizable, "cross-object precedence has a cycle");
    done[*pick] = true;
    last = cls[*pick]->kind;
    order.push_back(*pick);
    for (auto v : succ[*pick]) --indeg[v];
  }
  IntervalExecution out;
  for (auto v : order) {
    if (!out.classes.empty() && out.classes.back().kind == cls[v]->kind) {
      auto evs = out.classes.back().events;
      evs.insert(evs.end(), cls[v]->events.begin(), cls[v]->events.end());
      out.classes.back() = ConcurrencyClass::make(cls[v]->kind, std::move(evs));
    } else {
      out.classes.push_back(*cls[v]);
    }
  }
  return out;
}

Verdict check_local(const Execution& e, const SpecMap& specs) {
  Verdict v;
  std::map<std::string, IntervalExecution> parts;
  for (const auto& x : e.objects()) {
    Verdict part = check_interval_linearizable(project_object(e, x), specs);
    v.nodes += part.nodes;
    if (!part.yes) {
      v.failing_object = x;
      return v;
    }
    parts.emplace(x, *part.witness);
    v.appended.insert(v.appended.end(), part.appended.begin(), part.appended.end());
  }
  IntervalExecution merged = compose_witnesses(e, v.appended, parts);
  if (auto err = verify_witness(e, specs, Condition::IntervalLinearizable, merged, v.appended)) {
    throw Error(ErrorKind::NotLinearizable, "composed witness fails: " + *err);
  }
  v.yes = true;
  v.witness = std::move(merged);
  return v;
}

Event nonblocking_extension(const Execution& e, const SpecMap& specs, const OperationCall& pending) {
  if (!pending.pending()) throw Error(ErrorKind::BadParams, "call " + format_event(pending.invocation) + " is not pending");
  Verdict v = check_interval_linearizable(e, specs);
  if (!v.yes) throw Error(ErrorKind::NotLinearizable, "execution is not interval-linearizable");
  const Event& inv = pending.invocation;
  auto ok_with = [&](const Event& res, const IntervalExecution& w, const std::vector<Event>& rest) {
    std::vector<Event> ev = e.events();
    ev.push_back(res);
    return !verify_witness(Execution(std::move(ev)), specs, Condition::IntervalLinearizable, w, rest);
  };
  for (std::size_t i = 0; i < v.appended.size(); ++i) {
    if (v.appended[i].process != inv.process) continue;
    auto rest = v.appended;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
    if (ok_with(v.appended[i], *v.witness, rest)) return v.appended[i];
  }
  // The call was dropped from the witness: invoke it alone at the end.
  const IntervalSpec& spec = specs.at(inv.object);
  auto path = accepts(spec, project_interval(*v.witness, inv.object));
  std::vector<SpecState> finals = path.accepted ? std::vector<SpecState>{path.path.back()} : spec.initial_states;
  auto inv_class = ConcurrencyClass::make(ClassKind::Invoking, {inv});
  for (const auto& q : finals) {
    for (const auto& t : spec.step(q, inv_class)) {
      const Event* res = t.response.find(inv.process);
      if (!res || t.response.size() != 1) continue;
      IntervalExecution w = *v.witness;
      w.classes.push_back(inv_class);
      w.classes.push_back(t.response);
      if (ok_with(*res, w, v.appended)) return *res;
    }
  }
  // Fall back to every response the spec can produce for this call.
  std::set<Value> tried;
  for (const auto& q : finals) {
    for (const auto& t : spec.step(q, inv_class)) {
      for (const auto& r : t.response.events) {
        if (r.process != inv.process || !tried.insert(r.payload).second) continue;
        std::vector<Event> ev = e.events();
        ev.push_back(r);
        if (check_interval_linearizable(Execution(std::move(ev)), specs).yes) return r;
      }
    }
  }
  throw Error(ErrorKind::NoResponseFound, "no response to " + format_event(inv) + " keeps the execution interval-linearizable");
}

std::string format_witness_table(const IntervalExecution& witness) {
  std::set<ProcessId> procs;
  std::set<std::string> objects;
  for (const auto& c : witness.classes) {
    for (const auto& ev : c.events) {
      procs.insert(ev.process);
      objects.insert(ev.object);
    }
  }
  const bool qualify = objects.size() > 1;
  auto cell = [&](const Event& ev) {
    std::string prefix = qualify ? ev.object + "." : "";
    if (ev.is_invocation()) return prefix + ev.operation + "(" + ev.payload.to_string() + ")";
    return prefix + "resp(" + ev.payload.to_string() + ")";
  };
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{""};
  for (const auto& c : witness.classes) header.push_back(c.invoking() ? "init" : "term");
  rows.push_back(header);
  for (auto p : procs) {
    std::vector<std::string> row{"P" + std::to_string(p)};
    for (const auto& c : witness.classes) {
      const Event* ev = c.find(p);
      row.push_back(ev ? cell(*ev) : "");
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream os;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += row[i] + std::string(width[i] - row[i].size(), ' ');
      if (i + 1 < row.size()) line += " | ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    os << line << '\n';
  }
  return os.str();
}

}  // namespace ilin
