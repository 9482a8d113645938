#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "ilin/bridges.hpp"
#include "ilin/checker.hpp"
#include "ilin/demo.hpp"
#include "ilin/error.hpp"
#include "ilin/objects.hpp"
#include "ilin/simulator.hpp"
#include "ilin/task.hpp"

namespace fs = std::filesystem;
using namespace ilin;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

/// `X=spec` binds one object; a bare spec binds every object.
std::pair<std::string, std::string> split_binding(const std::string& arg) {
  auto eq = arg.find('=');
  auto colon = arg.find(':');
  if (eq != std::string::npos && (colon == std::string::npos || eq < colon)) {
    return {arg.substr(0, eq), arg.substr(eq + 1)};
  }
  return {"", arg};
}

/// A builtin task spec or a task file.
Task load_task(const std::string& arg) {
  if (fs::is_regular_file(arg)) return parse_task(read_file(arg));
  return builtin_task(arg);
}

struct Binding {
  std::string object;
  IntervalSpec spec;
};

SpecMap bind_specs(const std::vector<Binding>& bindings, const Execution& e) {
  SpecMap specs;
  for (const auto& b : bindings) {
    if (!b.object.empty()) specs.insert_or_assign(b.object, b.spec);
  }
  for (const auto& b : bindings) {
    if (!b.object.empty()) continue;
    for (const auto& x : e.objects()) specs.try_emplace(x, b.spec);
  }
  return specs;
}

Condition parse_condition(const std::string& s) {
  if (s == "lin") return Condition::Linearizable;
  if (s == "setlin") return Condition::SetLinearizable;
  return Condition::IntervalLinearizable;
}

struct CheckOutcome {
  std::string text;
  int code = 0;
};

CheckOutcome check_one(const std::string& path, const std::vector<Binding>& bindings, const std::string& condition,
                       bool witness, std::size_t budget, std::size_t all) {
  CheckOutcome out;
  std::ostringstream os;
  try {
    Execution e = parse_execution(read_file(path));
    SpecMap specs = bind_specs(bindings, e);
    Verdict v = condition == "local" ? check_local(e, specs) : check(e, specs, parse_condition(condition), budget);
    const char* name = condition == "local" ? "interval-linearizable (per object)" : to_string(parse_condition(condition));
    os << path << ": " << (v.yes ? "Yes" : "No") << " (" << name << ", " << v.nodes << " nodes)\n";
    if (!v.yes && !v.failing_object.empty()) os << "  failing object: " << v.failing_object << '\n';
    if (v.yes && witness) {
      for (const auto& ev : v.appended) os << "  appended: " << format_event(ev) << '\n';
      os << format_witness_table(*v.witness);
    }
    if (v.yes && all > 0) {
      if (condition == "local") throw Error(ErrorKind::BadParams, "--all does not apply to --condition local");
      auto ws = all_witnesses(e, specs, parse_condition(condition), all, budget);
      os << "  " << ws.size() << " shortest witness" << (ws.size() == 1 ? "" : "es") << '\n';
      for (std::size_t i = 0; i < ws.size(); ++i) {
        os << "  witness " << i + 1 << ":\n";
        for (const auto& ev : ws[i].appended) os << "  appended: " << format_event(ev) << '\n';
        os << format_witness_table(*ws[i].witness);
      }
    }
    out.code = v.yes ? 0 : 1;
  } catch (const Error& err) {
    os << path << ": error: " << err.what() << '\n';
    out.code = 2;
  }
  out.text = os.str();
  return out;
}

void print_summary(const IntervalSpec& spec, std::size_t max_states) {
  SpecSummary s = summarize_spec(spec, max_states);
  std::cout << "spec " << spec.name << " (" << to_string(spec.flavor) << ", " << spec.processes << " processes)\n";
  std::cout << "operations:";
  for (const auto& op : spec.operations) std::cout << ' ' << op;
  std::cout << "\nreachable states: " << s.states << (s.truncated ? " (truncated)" : "") << '\n';
  std::cout << "transitions: " << s.transitions << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interval-linearizability checker, task bridges and write-snapshot simulator"};
  app.require_subcommand(1);

  // check
  auto* check_cmd = app.add_subcommand("check", "Decide a consistency condition for history files");
  std::vector<std::string> files;
  std::string condition = "intlin";
  std::vector<std::string> object_args;
  std::vector<std::string> task_object_args;
  bool show_witness = false;
  std::size_t budget = 0;
  unsigned jobs = 1;
  check_cmd->add_option("histories", files, "History files")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--condition", condition, "lin, setlin, intlin or local")
      ->check(CLI::IsMember({"lin", "setlin", "intlin", "local"}));
  check_cmd->add_option("--object", object_args, "[X=]name[:k=v,...], e.g. write_snapshot:n=3")->allow_extra_args(false);
  check_cmd->add_option("--task-object", task_object_args, "[X=]task spec or task file, checked as its object")
      ->allow_extra_args(false);
  check_cmd->add_flag("--witness", show_witness, "Print the witness table");
  std::size_t all_limit = 0;
  check_cmd->add_option("--all", all_limit, "Experimental: print up to N distinct shortest witnesses");
  check_cmd->add_option("--budget", budget, "Search node cap (default ILIN_BUDGET or 5000000)");
  check_cmd->add_option("--jobs", jobs, "Worker threads over history files")->check(CLI::Range(1u, 64u));

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Run the write-snapshot algorithm under generated schedules");
  std::string algorithm;
  int n = 3;
  std::uint64_t seed = 1;
  std::size_t count = 100;
  std::string emit_dir;
  bool enumerate = false;
  std::size_t max_steps = 20;
  bool sim_check = false;
  sim_cmd->add_option("algorithm", algorithm, "Algorithm")->required()->check(CLI::IsMember({"write-snapshot"}));
  sim_cmd->add_option("-n", n, "Processes")->check(CLI::Range(1, 8));
  sim_cmd->add_option("--seed", seed, "Seed for random schedules");
  sim_cmd->add_option("--count", count, "Number of random schedules");
  sim_cmd->add_option("--emit", emit_dir, "Directory for history files");
  sim_cmd->add_flag("--enumerate", enumerate, "Enumerate all schedule classes instead of sampling");
  sim_cmd->add_option("--max-steps", max_steps, "Step bound for --enumerate");
  sim_cmd->add_flag("--check", sim_check, "Check every trace against the write-snapshot spec");

  // convert
  auto* conv_cmd = app.add_subcommand("convert", "Translate between tasks and objects");
  conv_cmd->require_subcommand(1);
  std::string conv_task;
  std::string conv_object;
  std::size_t bound = 4;
  std::size_t max_states = 100000;
  std::string output;
  auto* t2o = conv_cmd->add_subcommand("task-to-object", "Interval-sequential object of a task");
  t2o->add_option("--task", conv_task, "Task spec or task file")->required();
  t2o->add_option("--max-states", max_states, "State cap for the summary");
  auto* o2t = conv_cmd->add_subcommand("object-to-task", "Refined task of a one-shot object");
  o2t->add_option("--object", conv_object, "Object spec")->required();
  o2t->add_option("--bound", bound, "Event bound for the enumeration");
  o2t->add_option("--output", output, "Write the task file here instead of standard output");
  auto* split = conv_cmd->add_subcommand("split", "Sequential set/get object of a task");
  split->add_option("--task", conv_task, "Task spec or task file")->required();
  split->add_option("--max-states", max_states, "State cap for the summary");

  // validate
  auto* val_cmd = app.add_subcommand("validate", "Check a task, a history, or a history against a task");
  std::string val_task;
  std::string val_history;
  val_cmd->add_option("--task", val_task, "Task spec or task file");
  val_cmd->add_option("--history", val_history, "History file")->check(CLI::ExistingFile);

  // demo
  auto* demo_cmd = app.add_subcommand("demo", "Reproduce a worked example");
  std::string demo_name;
  demo_cmd->add_option("name", demo_name, "fig3, fig4, validity, validity_abort, lemma1 or theorem1")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check_cmd) {
      std::vector<Binding> bindings;
      for (const auto& arg : object_args) {
        auto [x, spec] = split_binding(arg);
        bindings.push_back({x, builtin_spec(parse_object_id(spec))});
      }
      for (const auto& arg : task_object_args) {
        auto [x, spec] = split_binding(arg);
        Task t = load_task(spec);
        bindings.push_back({x, t.refined ? refined_task_to_object(t) : task_to_object(t)});
      }
      if (bindings.empty()) throw Error(ErrorKind::BadParams, "give at least one --object or --task-object");
      if (budget == 0) budget = default_budget();
      std::vector<CheckOutcome> results(files.size());
      std::vector<std::thread> workers;
      const unsigned threads = std::min<unsigned>(jobs, static_cast<unsigned>(files.size()));
      for (unsigned w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
          for (std::size_t i = w; i < files.size(); i += threads) {
            results[i] = check_one(files[i], bindings, condition, show_witness, budget, all_limit);
          }
        });
      }
      for (auto& t : workers) t.join();
      int code = 0;
      for (const auto& r : results) {
        (r.code == 2 ? std::cerr : std::cout) << r.text;
        code = std::max(code, r.code);
      }
      return code;
    }

    if (*sim_cmd) {
      std::vector<SimTrace> traces;
      if (enumerate) {
        for (const auto& s : enumerate_schedules(n, max_steps)) traces.push_back(run_write_snapshot(n, s));
      } else {
        traces = fuzz_write_snapshot(n, seed, count);
      }
      if (!emit_dir.empty()) {
        fs::create_directories(emit_dir);
        for (std::size_t i = 0; i < traces.size(); ++i) {
          std::ostringstream name;
          name << "trace_" << std::setw(5) << std::setfill('0') << i << ".hist";
          write_file(fs::path(emit_dir) / name.str(), format_execution(traces[i].execution));
        }
      }
      std::size_t pending = 0;
      for (const auto& t : traces) pending += !t.unfinished.empty();
      std::cout << "traces: " << traces.size() << " (" << pending << " with pending invocations)\n";
      if (!sim_check) return 0;
      SpecMap ws{{"X", write_snapshot_spec(n)}};
      std::size_t pass = 0;
      std::size_t valid = 0;
      for (const auto& t : traces) {
        pass += check_interval_linearizable(t.execution, ws).yes;
        valid += snapshot_outputs_valid(t.execution);
      }
      std::cout << "interval-linearizable: " << pass << "/" << traces.size() << '\n';
      std::cout << "self-inclusion and containment: " << valid << "/" << traces.size() << '\n';
      return pass == traces.size() && valid == traces.size() ? 0 : 1;
    }

    if (*conv_cmd) {
      if (*t2o) {
        Task t = load_task(conv_task);
        print_summary(t.refined ? refined_task_to_object(t) : task_to_object(t), max_states);
      } else if (*split) {
        print_summary(task_to_split_sequential(load_task(conv_task)), max_states);
      } else {
        RefinedTask t = object_to_refined_task(builtin_spec(parse_object_id(conv_object)), bound);
        std::string text = "# event bound " + std::to_string(t.event_bound) + (t.complete ? "" : ", larger inputs omitted") +
                           "\n" + format_task(t);
        if (output.empty()) {
          std::cout << text;
        } else {
          write_file(output, text);
        }
      }
      return 0;
    }

    if (*val_cmd) {
      if (val_task.empty() && val_history.empty()) throw Error(ErrorKind::BadParams, "give --task or --history");
      int code = 0;
      std::optional<Task> task;
      if (!val_task.empty()) {
        task = load_task(val_task);
        auto problems = validate_task(*task);
        for (const auto& p : problems) std::cout << "task: " << p << '\n';
        if (problems.empty()) std::cout << "task: valid\n";
        if (!problems.empty()) code = 1;
      }
      if (!val_history.empty()) {
        std::optional<Execution> e;
        try {
          e = parse_execution(read_file(val_history));
          std::cout << "history: well-formed, " << e->size() << " events"
                    << (e->has_pending() ? ", with pending invocations" : "") << '\n';
        } catch (const Error& err) {
          if (err.kind() != ErrorKind::NotWellFormed && err.kind() != ErrorKind::MalformedEvent) throw;
          std::cout << "history: " << err.what() << '\n';
          code = 1;
        }
        // With both inputs, also decide the prefix condition.
        if (e && task && code == 0) {
          try {
            TaskVerdict v = task->refined ? satisfies_refined_task(*e, *task) : satisfies_task(*e, *task);
            if (v.ok) {
              std::cout << "satisfies task: Yes\n";
            } else {
              std::cout << "satisfies task: No, prefix of " << *v.violating_prefix << " events: " << v.reason << '\n';
              code = 1;
            }
          } catch (const Error& err) {
            if (err.kind() != ErrorKind::UnknownVertex && err.kind() != ErrorKind::NotWellFormed) throw;
            std::cout << "satisfies task: " << err.what() << '\n';
            code = 1;
          }
        }
      }
      return code;
    }

    if (*demo_cmd) return run_demo(demo_name, std::cout) ? 0 : 1;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return 2;
  }
  return 2;
}
