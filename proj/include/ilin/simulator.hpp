#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ilin/histories.hpp"
#include "ilin/interval_spec.hpp"

namespace ilin {

using Schedule = std::vector<ProcessId>;

struct RegisterOp {
  enum class Kind : unsigned char { Write, Read, Skip };
  ProcessId process = 0;
  Kind kind = Kind::Skip;
  /// Register index (0-based); unused for skips.
  int index = 0;
  /// Value written or read; none for ⊥.
  Value value;

  bool operator==(const RegisterOp&) const = default;
};

struct SimTrace {
  Execution execution;
  std::vector<RegisterOp> steps;
  /// Processes still mid-operation when the schedule ran out.
  std::vector<ProcessId> unfinished;
  /// Completed collects per process, counted from its write.
  std::vector<int> collects;
};

/// Runs the double-collect write-snapshot algorithm over registers MEM[0..n-1].
/// Process i writes i+1, then collects MEM in index order until two successive
/// collects agree and returns the last one. One register operation per step.
/// Throws IllegalProcess for ids outside [0, n).
SimTrace run_write_snapshot(int n, const Schedule& schedule, const std::string& object = "X");

/// Schedules of at most `max_steps` steps that never pick a finished process,
/// each either running everyone to completion or using every step.
/// Lexicographic order; schedules yielding the same events and the same
/// per-process observations are kept once.
std::vector<Schedule> enumerate_schedules(int n, std::size_t max_steps);

/// `count` random schedules from `seed`; a quarter of them stop early.
/// Only integer arithmetic on the raw engine output is used, so the stream is
/// identical across platforms.
std::vector<SimTrace> fuzz_write_snapshot(int n, std::uint64_t seed, std::size_t count, const std::string& object = "X");

/// Self-inclusion and containment over the completed outputs.
bool snapshot_outputs_valid(const Execution& e);

struct DirectWitness {
  IntervalExecution witness;
  std::vector<Event> appended;
};

/// Builds the interval-sequential execution from the returned sets: one pair
/// per distinct set in ⊆ order, plus a final pair answering pending calls
/// with every written value.
DirectWitness write_snapshot_witness(const Execution& e);

}  // namespace ilin
