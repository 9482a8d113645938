// One pass/fail line per acceptance criterion. Exit status is the number of
// failing criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "ilin/bridges.hpp"
#include "ilin/checker.hpp"
#include "ilin/demo.hpp"
#include "ilin/error.hpp"
#include "ilin/objects.hpp"
#include "ilin/simulator.hpp"
#include "ilin/task.hpp"
#include "oracle.hpp"

using namespace ilin;

namespace {

// Pinned limits.
constexpr double kFigureSeconds = 1.0;
constexpr double kTheorem1Seconds = 300.0;
constexpr std::size_t kTheorem1Seeds = 1000;
constexpr std::size_t kLocalityRuns = 500;
constexpr std::size_t kClaim2Runs = 10000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (pass) detail << "first failure: " << why << "; ";
    pass = false;
  }
  void expect(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

SpecMap on_x(IntervalSpec s) { return SpecMap{{"X", std::move(s)}}; }

std::string one_line(const Execution& e) {
  std::string s = format_execution(e);
  for (auto& c : s) {
    if (c == '\n') c = ';';
  }
  return s;
}

// ---------------------------------------------------------------------------

void figure_goldens(Outcome& o) {
  double worst = 0;
  auto timed = [&](const std::function<Verdict()>& f) {
    auto t0 = Clock::now();
    Verdict v = f();
    worst = std::max(worst, seconds_since(t0));
    return v;
  };

  Execution fig3 = demo_history("fig3");
  SpecMap seq = on_x(ws_sequential_spec(3));
  Verdict lin = timed([&] { return check_linearizable(fig3, seq); });
  o.expect(lin.yes, "fig3 not linearizable");
  if (lin.yes) {
    auto path = accepts(seq.at("X"), project_interval(*lin.witness, "X")).path;
    std::vector<Value> sets;
    for (const auto& q : path) sets.push_back(q.value.at(0));
    o.expect(sets == std::vector<Value>{Value::int_set({}), Value::int_set({1, 2}), Value::int_set({1, 2}),
                                        Value::int_set({1, 2, 3})},
             "fig3 state path differs");
  }

  auto shape_is = [](const Verdict& v) {
    if (!v.yes || v.witness->classes.size() != 4) return false;
    const auto& c = v.witness->classes;
    return c[0].invoking() && c[0].processes() == std::set<ProcessId>{0, 1} && c[1].processes() == std::set<ProcessId>{0} &&
           c[2].processes() == std::set<ProcessId>{2} && c[3].processes() == std::set<ProcessId>{1, 2};
  };

  Execution fig4 = demo_history("fig4");
  SpecMap ws = on_x(write_snapshot_spec(3));
  o.expect(timed([&] { return check_interval_linearizable(fig4, ws); }).yes, "fig4 not interval-linearizable");
  o.expect(!timed([&] { return check_set_linearizable(fig4, ws); }).yes, "fig4 set-linearizable");

  Execution validity = demo_history("validity");
  Verdict il = timed([&] { return check_interval_linearizable(validity, on_x(validity_spec(3))); });
  o.expect(shape_is(il), "validity witness is not I0{P0,P1} R0{P0} I1{P2} R1{P1,P2}");

  o.expect(worst < kFigureSeconds, "a check took " + std::to_string(worst) + " s");
  o.detail << "slowest check " << worst << " s";
}

// ---------------------------------------------------------------------------

void theorem1(Outcome& o) {
  auto t0 = Clock::now();
  std::size_t traces = 0;
  auto audit = [&](int n, const Execution& e) {
    ++traces;
    o.expect(check_interval_linearizable(e, on_x(write_snapshot_spec(n))).yes, "not IL: " + one_line(e));
    o.expect(snapshot_outputs_valid(e), "self-inclusion/containment: " + one_line(e));
  };
  auto schedules = enumerate_schedules(2, 20);
  for (const auto& s : schedules) audit(2, run_write_snapshot(2, s).execution);
  for (const auto& t : fuzz_write_snapshot(3, 1, kTheorem1Seeds)) audit(3, t.execution);
  double secs = seconds_since(t0);
  o.expect(secs < kTheorem1Seconds, "took " + std::to_string(secs) + " s");
  o.detail << schedules.size() << " n=2 schedule classes + " << kTheorem1Seeds << " n=3 seeded traces, " << traces
           << " checked in " << secs << " s";
}

// ---------------------------------------------------------------------------

oracle::Shape validity_corpus(int calls, std::size_t events) {
  oracle::Shape s;
  s.processes = 2;
  s.calls_per_process = calls;
  s.max_events = events;
  s.operation = "validity";
  if (calls == 1) {
    s.invocations = [](ProcessId) { return oracle::ints({1, 2}); };
  } else {
    s.invocations = [](ProcessId p) { return oracle::ints({p + 1}); };
  }
  s.responses = [](ProcessId) { return oracle::ints({1, 2, 3}); };
  return s;
}

SpecMap validity_specs(bool one_shot) { return on_x(validity_spec(2, Value::int_set({1, 2, 3}), one_shot)); }

void checker_vs_oracle(Outcome& o) {
  auto completions = [](const Event&) { return oracle::ints({1, 2, 3}); };
  std::size_t runs = 0;
  std::size_t yes = 0;
  for (bool one_shot : {true, false}) {
    SpecMap specs = validity_specs(one_shot);
    oracle::for_each_execution(validity_corpus(one_shot ? 1 : 2, 8), [&](const Execution& e) {
      for (auto c : {Condition::Linearizable, Condition::SetLinearizable, Condition::IntervalLinearizable}) {
        ++runs;
        Verdict v = check(e, specs, c);
        yes += v.yes;
        o.expect(v.yes == oracle::brute_force(e, specs, c, completions),
                 std::string(to_string(c)) + " disagrees on " + one_line(e));
      }
    });
  }
  o.detail << runs << " verdicts compared (" << yes << " Yes), one-shot corpus plus 2-calls-per-process corpus";
}

// ---------------------------------------------------------------------------

Execution two_object_execution(std::mt19937& rng, std::size_t length) {
  const int n = 3;
  std::vector<Event> events;
  std::vector<std::string> open(n);  // object of the pending call, or empty
  std::vector<std::set<std::string>> used(n);
  Value proposed = Value::set({});
  Value written = Value::set({});
  while (events.size() < length) {
    std::vector<std::pair<ProcessId, std::string>> moves;
    for (ProcessId p = 0; p < n; ++p) {
      if (!open[p].empty()) {
        moves.emplace_back(p, "");
      } else {
        for (const std::string x : {"V", "W"}) {
          if (!used[p].count(x)) moves.emplace_back(p, x);
        }
      }
    }
    if (moves.empty()) break;
    auto [p, x] = moves[oracle::pick(rng, moves.size())];
    const Value mine = Value::integer(p + 1);
    if (x.empty()) {
      const std::string obj = open[p];
      open[p].clear();
      Value out;
      const bool plausible = oracle::pick(rng, 4) != 0;
      if (obj == "V") {
        out = plausible ? proposed.elems()[oracle::pick(rng, proposed.size())] : Value::integer(1 + oracle::pick(rng, 3));
        events.push_back(Event::response(p, "V", "validity", out));
      } else {
        auto subsets = oracle::nonempty_int_subsets(3);
        out = plausible ? written : subsets[oracle::pick(rng, subsets.size())];
        events.push_back(Event::response(p, "W", "write_snapshot", out));
      }
    } else {
      open[p] = x;
      used[p].insert(x);
      if (x == "V") {
        proposed = proposed.with(mine);
        events.push_back(Event::invocation(p, "V", "validity", mine));
      } else {
        written = written.with(mine);
        events.push_back(Event::invocation(p, "W", "write_snapshot", mine));
      }
    }
  }
  return Execution(events);
}

void locality(Outcome& o) {
  SpecMap specs{{"V", validity_spec(3)}, {"W", write_snapshot_spec(3)}};
  std::mt19937 rng(2024);
  std::size_t yes = 0;
  std::size_t two_objects = 0;
  for (std::size_t i = 0; i < kLocalityRuns; ++i) {
    Execution e;
    do {
      e = two_object_execution(rng, 2 + oracle::pick(rng, 7));
    } while (e.objects().size() < 2);
    ++two_objects;
    Verdict global = check_interval_linearizable(e, specs);
    Verdict local;
    try {
      local = check_local(e, specs);
    } catch (const Error& err) {
      o.fail(std::string("merge failed (") + err.what() + ") on " + one_line(e));
      continue;
    }
    o.expect(local.yes == global.yes, "local/global disagree on " + one_line(e));
    if (local.yes) {
      ++yes;
      auto bad = verify_witness(e, specs, Condition::IntervalLinearizable, *local.witness, local.appended);
      o.expect(!bad, "composed witness fails: " + bad.value_or("") + " on " + one_line(e));
    }
  }
  o.detail << two_objects << " two-object executions, " << yes << " interval-linearizable with re-verified merged witness";
}

// ---------------------------------------------------------------------------

void nonblocking(Outcome& o) {
  std::size_t cases = 0;
  for (bool one_shot : {true, false}) {
    SpecMap specs = validity_specs(one_shot);
    oracle::for_each_execution(validity_corpus(one_shot ? 1 : 2, 8), [&](const Execution& e) {
      if (!e.has_pending() || !check_interval_linearizable(e, specs).yes) return;
      for (const auto& call : operation_calls(e)) {
        if (!call.pending()) continue;
        ++cases;
        try {
          Event r = nonblocking_extension(e, specs, call);
          o.expect(check_interval_linearizable(extend(e, {r}), specs).yes, "extension not IL on " + one_line(e));
        } catch (const Error& err) {
          o.fail(std::string(err.what()) + " on " + one_line(e));
        }
      }
    });
  }
  o.detail << cases << " pending calls extended";
}

// ---------------------------------------------------------------------------

// Executions whose payloads are vertices of the task.
oracle::Shape task_corpus(const Task& t, const std::string& op) {
  oracle::Shape s;
  s.processes = t.processes;
  s.max_events = 4;
  s.operation = op;
  auto by_proc = [](const Complex& c) {
    std::map<ProcessId, std::vector<Value>> out;
    for (const auto& v : c.vertices()) {
      auto& vs = out[v.process];
      if (std::find(vs.begin(), vs.end(), v.plain().value) == vs.end()) vs.push_back(v.value);
    }
    return out;
  };
  auto ins = by_proc(t.inputs);
  auto outs = by_proc(t.outputs);
  s.invocations = [ins](ProcessId p) { return ins.at(p); };
  s.responses = [outs](ProcessId p) { return outs.at(p); };
  return s;
}

void theorem4(Outcome& o) {
  for (const Task& t : {validity_task(2, Value::int_set({1, 2})), immediate_snapshot_task(2)}) {
    SpecMap obj = on_x(task_to_object(t));
    std::size_t runs = 0;
    std::size_t sat = 0;
    oracle::for_each_execution(task_corpus(t, "task"), [&](const Execution& e) {
      ++runs;
      bool s = satisfies_task(e, t).ok;
      sat += s;
      o.expect(s == check_interval_linearizable(e, obj).yes, t.name + " disagrees on " + one_line(e));
    });
    o.detail << t.name << ": " << runs << " executions, " << sat << " satisfying; ";
  }
}

// ---------------------------------------------------------------------------

void theorems5and6(Outcome& o) {
  IntervalSpec ws = write_snapshot_spec(2);
  RefinedTask t = object_to_refined_task(ws, 4);
  SpecMap source = on_x(ws);
  SpecMap back = on_x(refined_task_to_object(t, "write_snapshot"));
  oracle::Shape s;
  s.processes = 2;
  s.max_events = 4;
  s.operation = "write_snapshot";
  s.invocations = [](ProcessId p) { return oracle::ints({p + 1}); };
  s.responses = [](ProcessId) { return oracle::nonempty_int_subsets(2); };
  std::size_t runs = 0;
  std::size_t yes = 0;
  oracle::for_each_execution(s, [&](const Execution& e) {
    ++runs;
    bool sat = false;
    try {
      sat = satisfies_refined_task(e, t).ok;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::UnknownVertex) throw;
    }
    bool il = check_interval_linearizable(e, source).yes;
    yes += il;
    o.expect(sat == il, "refined task vs object on " + one_line(e));
    o.expect(sat == check_interval_linearizable(e, back).yes, "refined task vs its object on " + one_line(e));
  });
  o.detail << runs << " executions, " << yes << " interval-linearizable; refined task has "
           << t.outputs.facets().size() << " output facets";
}

// ---------------------------------------------------------------------------

void lemma1(Outcome& o) {
  IntervalSpec q = restricted_queue_spec();
  SpecMap specs{{"Q", q}};
  Task naive = naive_task_from_object(q, 6, Condition::Linearizable);
  o.expect(check_linearizable(demo_history("alpha1"), specs).yes, "alpha1 not linearizable");
  o.expect(check_linearizable(demo_history("alpha2"), specs).yes, "alpha2 not linearizable");
  o.expect(!check_linearizable(demo_history("alpha3"), specs).yes, "alpha3 linearizable");
  o.expect(satisfies_task(demo_history("alpha3"), naive).ok, "alpha3 does not satisfy the naive task");
  o.detail << "alpha1/alpha2 linearizable, alpha3 not, yet alpha3 satisfies the naive task";
}

// ---------------------------------------------------------------------------

bool strict_subset(const Simplex& a, const Simplex& b) { return a.size() < b.size() && is_face(a, b); }

std::size_t first_index(const std::vector<Simplex>& chain, const Vertex& v) {
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (std::find(chain[i].begin(), chain[i].end(), v) != chain[i].end()) return i;
  }
  return chain.size();
}

void claim2_items(Outcome& o, const Execution& e, const Task* task) {
  const FaceSequences fs = sequences(e);
  const std::string where = " on " + one_line(e);
  // 1
  o.expect(fs.sigma.size() == fs.tau.size() && !fs.sigma.empty(), "item 1" + where);
  if (fs.sigma.size() != fs.tau.size() || fs.sigma.empty()) return;
  const std::size_t m = fs.sigma.size() - 1;
  // 2
  o.expect(fs.sigma[0].empty() && fs.tau[0].empty(), "item 2 (empty start)" + where);
  o.expect(fs.sigma[m] == input_simplex(e) && fs.tau[m] == output_simplex(e), "item 2 (ends)" + where);
  for (std::size_t i = 1; i <= m; ++i) {
    o.expect(strict_subset(fs.sigma[i - 1], fs.sigma[i]), "item 2 (sigma chain)" + where);
    if (i < m) o.expect(strict_subset(fs.tau[i - 1], fs.tau[i]), "item 2 (tau chain)" + where);
  }
  if (m >= 1) o.expect(is_face(fs.tau[m - 1], fs.tau[m]), "item 2 (last tau)" + where);
  // 3, in the form that holds: no pending calls gives a strict last step,
  // an execution ending with an invocation gives an equal one.
  if (m >= 1 && !e.has_pending()) o.expect(strict_subset(fs.tau[m - 1], fs.tau[m]), "item 3 (complete)" + where);
  if (m >= 1 && !e.empty() && e[e.size() - 1].is_invocation()) {
    o.expect(fs.tau[m - 1] == fs.tau[m], "item 3 (trailing invocation)" + where);
  }
  // 4
  if (task) {
    for (std::size_t i = 1; i <= m; ++i) {
      const Complex* image = task->carrier(fs.sigma[i]);
      o.expect(image && image->contains(fs.tau[i]), "item 4" + where);
    }
  }
  // 5 and 6
  for (std::size_t a = 0; a < e.size(); ++a) {
    if (!e[a].is_response()) continue;
    const Vertex out(e[a].process, e[a].payload);
    const std::size_t i = first_index(fs.tau, out);
    for (std::size_t b = a + 1; b < e.size(); ++b) {
      if (!e[b].is_invocation() || e[b].process == e[a].process) continue;
      const std::size_t j = first_index(fs.sigma, Vertex(e[b].process, e[b].payload));
      o.expect(i < j, "item 5" + where);
    }
    o.expect(i >= 1 && i <= m, "item 6 (response placed)" + where);
    if (i < 1 || i > m) continue;
    for (std::size_t b = 0; b < a; ++b) {
      if (!e[b].is_invocation()) continue;
      const Vertex in(e[b].process, e[b].payload);
      o.expect(std::find(fs.sigma[i].begin(), fs.sigma[i].end(), in) != fs.sigma[i].end(), "item 6" + where);
    }
  }
}

void claim2(Outcome& o) {
  std::mt19937 rng(4242);
  std::size_t runs = 0;
  for (; runs < kClaim2Runs; ++runs) {
    oracle::Shape s;
    s.processes = 1 + static_cast<int>(oracle::pick(rng, 4));
    s.operation = "task";
    s.invocations = [](ProcessId p) { return oracle::ints({p + 1}); };
    s.responses = [](ProcessId) { return oracle::nonempty_int_subsets(4); };
    claim2_items(o, oracle::random_execution(rng, s, oracle::pick(rng, 13)), nullptr);
  }
  // Item 4 on executions that satisfy the write-snapshot task.
  std::size_t with_task = 0;
  std::map<int, Task> tasks;
  for (int n = 1; n <= 3; ++n) tasks.emplace(n, write_snapshot_task(n));
  for (int n = 1; n <= 3; ++n) {
    for (const auto& t : fuzz_write_snapshot(n, 99, 400, "X")) {
      if (!satisfies_task(t.execution, tasks.at(n)).ok) {
        o.fail("simulator trace violates the task: " + one_line(t.execution));
        continue;
      }
      ++with_task;
      claim2_items(o, t.execution, &tasks.at(n));
    }
  }
  o.detail << runs << " random executions, " << with_task << " task-satisfying simulator traces for item 4";
}

// ---------------------------------------------------------------------------

void validity_counterexample(Outcome& o) {
  Execution bad = demo_history("validity_bad");
  Task t = validity_task(3, Value::int_set({1, 2, 3}));
  TaskVerdict v = satisfies_task(bad, t);
  std::size_t r_inv = 0;
  while (r_inv < bad.size() && !(bad[r_inv].process == 2 && bad[r_inv].is_invocation())) ++r_inv;
  o.expect(!v.ok, "validity_bad satisfies the task");
  o.expect(v.violating_prefix && *v.violating_prefix <= r_inv, "violation not before r's invocation");
  o.expect(!check_interval_linearizable(bad, on_x(task_to_object(t, "validity"))).yes,
           "validity_bad interval-linearizable against the task object");
  o.detail << "violating prefix length " << (v.violating_prefix ? std::to_string(*v.violating_prefix) : "-")
           << ", r invokes at event " << r_inv + 1;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"AC1 figure goldens", figure_goldens},
      {"AC2 simulator traces are interval-linearizable", theorem1},
      {"AC3 checker agrees with brute force", checker_vs_oracle},
      {"AC4 locality", locality},
      {"AC5 non-blocking extension", nonblocking},
      {"AC6 task satisfaction vs task object", theorem4},
      {"AC7 refined task round trip", theorems5and6},
      {"AC8 queue separation", lemma1},
      {"AC9 face-sequence properties", claim2},
      {"AC10 validity counterexample", validity_counterexample},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    auto t0 = Clock::now();
    try {
      run(o);
    } catch (const std::exception& ex) {
      o.fail(std::string("exception: ") + ex.what());
    }
    failed += !o.pass;
    std::printf("%s %s [%.2f s] %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), seconds_since(t0), o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed;
}
