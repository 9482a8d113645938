#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ilin/demo.hpp"
#include "ilin/error.hpp"
#include "ilin/task.hpp"

using namespace ilin;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot open " << p.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct Run {
  int status = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(ILIN_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string hist(const std::string& name) { return (fs::path(ILIN_DATA_DIR) / "histories" / (name + ".hist")).string(); }

}  // namespace

TEST_CASE("demos match their golden reports") {
  for (const auto& name : demo_names()) {
    CAPTURE(name);
    std::ostringstream out;
    CHECK(run_demo(name, out));
    CHECK(out.str() == slurp(fs::path(ILIN_GOLDEN_DIR) / ("demo_" + name + ".txt")));
  }
  std::ostringstream sink;
  try {
    run_demo("fig9", sink);
    FAIL("expected UnknownDemo");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::UnknownDemo);
  }
}

TEST_CASE("shipped histories are the demo histories and print canonically") {
  for (const auto& name : demo_history_names()) {
    CAPTURE(name);
    const std::string text = slurp(hist(name));
    Execution e = parse_execution(text);
    CHECK(e == demo_history(name));
    CHECK(format_execution(e) == text);
    CHECK(parse_execution(format_execution(e)) == e);
  }
}

TEST_CASE("shipped task files round-trip and validate") {
  std::size_t seen = 0;
  for (const auto& entry : fs::directory_iterator(fs::path(ILIN_DATA_DIR) / "tasks")) {
    CAPTURE(entry.path().string());
    // Header comments carry metadata that the task text itself does not.
    std::istringstream lines(slurp(entry.path()));
    std::string text;
    for (std::string line; std::getline(lines, line);) {
      if (line.rfind('#', 0) != 0) text += line + "\n";
    }
    Task t = parse_task(text);
    CHECK(validate_task(t).empty());
    CHECK(format_task(t) == text);
    CHECK(format_task(parse_task(format_task(t))) == text);
    ++seen;
  }
  CHECK(seen >= 3);
}

TEST_CASE("command line exit codes") {
  Run yes = cli("check --condition intlin --object write_snapshot:n=3 --witness " + hist("fig4"));
  CHECK(yes.status == 0);
  CHECK(yes.out.find("init") != std::string::npos);
  CHECK(cli("check --condition setlin --object write_snapshot:n=3 " + hist("fig4")).status == 1);
  CHECK(cli("check --condition lin --object ws_sequential:n=3 " + hist("fig3")).status == 0);
  CHECK(cli("check --condition local --object X=validity:n=3 " + hist("validity")).status == 0);
  CHECK(cli("check --condition intlin --task-object validity:n=3,U='{1,2,3}' " + hist("validity_bad")).status == 1);
  CHECK(cli("validate --task immediate_snapshot:n=3").status == 0);
  CHECK(cli("validate --task validity:n=3,U='{1,2,3}' --history " + hist("validity_bad")).status == 1);
  CHECK(cli("demo lemma1").status == 0);
  CHECK(cli("demo nope").status == 2);
  CHECK(cli("check --frobnicate " + hist("fig4")).status == 2);
  CHECK(cli("check --object no_such_object " + hist("fig4")).status == 2);
  CHECK(cli("").status == 2);
  Run sim = cli("simulate write-snapshot -n 2 --enumerate --max-steps 20 --check");
  CHECK(sim.status == 0);
  Run conv = cli("convert object-to-task --object write_snapshot:n=2 --bound 4");
  CHECK(conv.status == 0);
  CHECK(conv.out.find("# event bound 4") != std::string::npos);
}
