#include "ilin/demo.hpp"

#include <map>

#include "ilin/bridges.hpp"
#include "ilin/checker.hpp"
#include "ilin/error.hpp"
#include "ilin/objects.hpp"
#include "ilin/simulator.hpp"
#include "ilin/task.hpp"

namespace ilin {

namespace {

const std::map<std::string, std::string, std::less<>>& histories() {
  static const std::map<std::string, std::string, std::less<>> h{
      {"fig3",
       "P0 inv X.write_snapshot(1)\n"
       "P1 inv X.write_snapshot(2)\n"
       "P0 res X.write_snapshot -> {1,2}\n"
       "P1 res X.write_snapshot -> {1,2}\n"
       "P2 inv X.write_snapshot(3)\n"
       "P2 res X.write_snapshot -> {1,2,3}\n"},
      {"fig4",
       "P0 inv X.write_snapshot(1)\n"
       "P1 inv X.write_snapshot(2)\n"
       "P0 res X.write_snapshot -> {1,2}\n"
       "P2 inv X.write_snapshot(3)\n"
       "P1 res X.write_snapshot -> {1,2,3}\n"
       "P2 res X.write_snapshot -> {1,2,3}\n"},
      {"validity",
       "P0 inv X.validity(1)\n"
       "P1 inv X.validity(2)\n"
       "P0 res X.validity -> 2\n"
       "P2 inv X.validity(3)\n"
       "P1 res X.validity -> 3\n"
       "P2 res X.validity -> 1\n"},
      {"validity_bad",
       "P0 inv X.validity(1)\n"
       "P1 inv X.validity(2)\n"
       "P0 res X.validity -> 3\n"
       "P1 res X.validity -> 3\n"
       "P2 inv X.validity(3)\n"
       "P2 res X.validity -> 3\n"},
      {"validity_abort",
       "P0 inv X.propose(1)\n"
       "P1 inv X.propose(2)\n"
       "P0 res X.propose -> 2\n"
       "P2 inv X.propose(3)\n"
       "P1 res X.propose -> 3\n"
       "P0 inv X.abort()\n"
       "P1 inv X.abort()\n"
       "P0 res X.abort -> aborted\n"
       "P1 res X.abort -> aborted\n"
       "P2 res X.propose -> aborted\n"},
      {"alpha1",
       "P0 inv Q.enq(1)\n"
       "P0 res Q.enq -> ok\n"
       "P1 inv Q.enq(2)\n"
       "P1 res Q.enq -> ok\n"
       "P2 inv Q.deq()\n"
       "P2 res Q.deq -> 1\n"},
      {"alpha2",
       "P1 inv Q.enq(2)\n"
       "P1 res Q.enq -> ok\n"
       "P0 inv Q.enq(1)\n"
       "P0 res Q.enq -> ok\n"
       "P2 inv Q.deq()\n"
       "P2 res Q.deq -> 2\n"},
      {"alpha3",
       "P0 inv Q.enq(1)\n"
       "P0 res Q.enq -> ok\n"
       "P1 inv Q.enq(2)\n"
       "P1 res Q.enq -> ok\n"
       "P2 inv Q.deq()\n"
       "P2 res Q.deq -> 2\n"},
      {"scons_alpha1",
       "P0 inv S.scons(1)\n"
       "P0 res S.scons -> 1\n"
       "P1 inv S.scons(2)\n"
       "P2 inv S.scons(3)\n"
       "P1 res S.scons -> 1\n"
       "P0 inv S.scons(1)\n"
       "P2 res S.scons -> 1\n"},
      {"scons_alpha2",
       "P0 inv S.scons(1)\n"
       "P1 inv S.scons(2)\n"
       "P0 res S.scons -> 3\n"
       "P2 inv S.scons(3)\n"
       "P1 res S.scons -> 3\n"
       "P0 inv S.scons(1)\n"
       "P2 res S.scons -> 3\n"},
  };
  return h;
}

const char* yes_no(bool b) { return b ? "Yes" : "No"; }

class Report {
 public:
  explicit Report(std::ostream& out) : out_(out) {}

  void verdict(const std::string& what, bool expected, bool actual) {
    line(what, yes_no(expected), yes_no(actual));
  }

  void line(const std::string& what, const std::string& expected, const std::string& actual) {
    const bool ok = expected == actual;
    all_ &= ok;
    out_ << (ok ? "ok   " : "FAIL ") << what << ": expected " << expected << ", got " << actual << '\n';
  }

  std::ostream& out() { return out_; }
  bool all() const { return all_; }

 private:
  std::ostream& out_;
  bool all_ = true;
};

std::string format_sets(const std::vector<SpecState>& path) {
  std::string s;
  for (const auto& q : path) {
    if (!s.empty()) s += ", ";
    s += q.value.at(0).to_string();
  }
  return s;
}

std::string class_shape(const IntervalExecution& w) {
  std::string s;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < w.classes.size(); ++i) {
    const auto& c = w.classes[i];
    if (!s.empty()) s += " ";
    s += (c.invoking() ? "I" : "R") + std::to_string(pairs) + "{";
    bool first = true;
    for (auto p : c.processes()) {
      if (!first) s += ",";
      s += "P" + std::to_string(p);
      first = false;
    }
    s += "}";
    if (!c.invoking()) ++pairs;
  }
  return s;
}

bool demo_fig3(Report& r) {
  Execution e = demo_history("fig3");
  SpecMap seq{{"X", ws_sequential_spec(3)}};
  Verdict lin = check_linearizable(e, seq);
  r.verdict("fig3 linearizable against ws_sequential(n=3)", true, lin.yes);
  if (lin.yes) {
    auto path = accepts(seq.at("X"), project_interval(*lin.witness, "X")).path;
    r.line("fig3 state path", "{}, {1,2}, {1,2}, {1,2,3}", format_sets(path));
    r.out() << format_witness_table(*lin.witness);
  }
  SpecMap ws{{"X", write_snapshot_spec(3)}};
  r.verdict("fig3 set-linearizable against write_snapshot(n=3)", true, check_set_linearizable(e, ws).yes);
  return r.all();
}

bool demo_fig4(Report& r) {
  Execution e = demo_history("fig4");
  SpecMap ws{{"X", write_snapshot_spec(3)}};
  Verdict il = check_interval_linearizable(e, ws);
  r.verdict("fig4 interval-linearizable against write_snapshot(n=3)", true, il.yes);
  if (il.yes) {
    r.line("fig4 witness classes", "I0{P0,P1} R0{P0} I1{P2} R1{P1,P2}", class_shape(*il.witness));
    r.out() << format_witness_table(*il.witness);
  }
  r.verdict("fig4 set-linearizable against write_snapshot(n=3)", false, check_set_linearizable(e, ws).yes);
  r.verdict("fig4 satisfies write_snapshot task", true,
            satisfies_task(e, write_snapshot_task(3)).ok);
  return r.all();
}

bool demo_validity(Report& r) {
  Execution e = demo_history("validity");
  SpecMap v{{"X", validity_spec(3)}};
  Verdict il = check_interval_linearizable(e, v);
  r.verdict("validity interval-linearizable", true, il.yes);
  if (il.yes) {
    r.line("validity witness classes", "I0{P0,P1} R0{P0} I1{P2} R1{P1,P2}", class_shape(*il.witness));
    r.out() << format_witness_table(*il.witness);
  }
  r.verdict("validity set-linearizable", false, check_set_linearizable(e, v).yes);
  r.verdict("validity linearizable", false, check_linearizable(e, v).yes);
  Task t = validity_task(3, Value::int_set({1, 2, 3}));
  r.verdict("validity satisfies validity task", true, satisfies_task(e, t).ok);

  Execution bad = demo_history("validity_bad");
  TaskVerdict tv = satisfies_task(bad, t);
  r.verdict("validity_bad satisfies validity task", false, tv.ok);
  r.line("validity_bad violating prefix length", "3", tv.violating_prefix ? std::to_string(*tv.violating_prefix) : "-");
  r.verdict("validity_bad interval-linearizable against task object", false,
            check_interval_linearizable(bad, SpecMap{{"X", task_to_object(t, "validity")}}).yes);
  return r.all();
}

bool demo_validity_abort(Report& r) {
  Execution e = demo_history("validity_abort");
  SpecMap k2{{"X", validity_abort_spec(3, 2)}};
  Verdict il = check_interval_linearizable(e, k2);
  r.verdict("validity_abort interval-linearizable (k=2)", true, il.yes);
  if (il.yes) r.out() << format_witness_table(*il.witness);
  r.verdict("validity_abort interval-linearizable (k=3)", false,
            check_interval_linearizable(e, SpecMap{{"X", validity_abort_spec(3, 3)}}).yes);
  return r.all();
}

bool demo_lemma1(Report& r) {
  SpecMap q{{"Q", restricted_queue_spec()}};
  Execution a1 = demo_history("alpha1");
  Execution a2 = demo_history("alpha2");
  Execution a3 = demo_history("alpha3");
  r.verdict("alpha1 linearizable", true, check_linearizable(a1, q).yes);
  r.verdict("alpha2 linearizable", true, check_linearizable(a2, q).yes);
  r.verdict("alpha3 linearizable", false, check_linearizable(a3, q).yes);
  Task naive = naive_task_from_object(restricted_queue_spec(), 6, Condition::Linearizable);
  r.verdict("alpha1 satisfies naive task", true, satisfies_task(a1, naive).ok);
  r.verdict("alpha2 satisfies naive task", true, satisfies_task(a2, naive).ok);
  r.verdict("alpha3 satisfies naive task", true, satisfies_task(a3, naive).ok);
  return r.all();
}

bool demo_theorem1(Report& r) {
  const int n = 2;
  auto schedules = enumerate_schedules(n, 20);
  SpecMap ws{{"X", write_snapshot_spec(n)}};
  std::size_t linearizable = 0;
  std::size_t valid = 0;
  std::size_t agree = 0;
  for (const auto& s : schedules) {
    SimTrace t = run_write_snapshot(n, s);
    bool il = check_interval_linearizable(t.execution, ws).yes;
    linearizable += il;
    valid += snapshot_outputs_valid(t.execution);
    DirectWitness d = write_snapshot_witness(t.execution);
    bool direct = !verify_witness(t.execution, ws, Condition::IntervalLinearizable, d.witness, d.appended);
    agree += direct == il;
  }
  const std::string total = std::to_string(schedules.size());
  r.out() << "n=2 schedule classes: " << total << '\n';
  r.line("traces interval-linearizable", total, std::to_string(linearizable));
  r.line("traces with self-inclusion and containment", total, std::to_string(valid));
  r.line("direct witness agrees with checker", total, std::to_string(agree));
  return r.all();
}

}  // namespace

const std::vector<std::string>& demo_names() {
  static const std::vector<std::string> names{"fig3", "fig4", "validity", "validity_abort", "lemma1", "theorem1"};
  return names;
}

const std::vector<std::string>& demo_history_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, v] : histories()) out.push_back(k);
    return out;
  }();
  return names;
}

Execution demo_history(std::string_view name) {
  auto it = histories().find(name);
  if (it == histories().end()) throw Error(ErrorKind::UnknownDemo, "no demo history named '" + std::string(name) + "'");
  return parse_execution(it->second);
}

bool run_demo(std::string_view name, std::ostream& out) {
  Report r(out);
  if (name == "fig3") return demo_fig3(r);
  if (name == "fig4") return demo_fig4(r);
  if (name == "validity") return demo_validity(r);
  if (name == "validity_abort") return demo_validity_abort(r);
  if (name == "lemma1") return demo_lemma1(r);
  if (name == "theorem1") return demo_theorem1(r);
  throw Error(ErrorKind::UnknownDemo, "unknown demo '" + std::string(name) + "'");
}

}  // namespace ilin
