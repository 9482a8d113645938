#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ilin/checker.hpp"
#include "ilin/histories.hpp"
#include "ilin/interval_spec.hpp"
#include "ilin/task.hpp"

namespace ilin {

/// Vertex <-> Value, used for spec states: tuple(p, v) or tuple(p, v, view).
Value vertex_to_value(const Vertex& v);
Vertex value_to_vertex(const Value& v);
Value simplex_to_value(const Simplex& s);
Simplex value_to_simplex(const Value& v);

/// Faces σ0 ⊆ σ1 ⊆ ... and τ0 ⊆ τ1 ⊆ ... of the input and output simplexes.
/// sigma[0] and tau[0] are always empty.
struct FaceSequences {
  std::vector<Simplex> sigma;
  std::vector<Simplex> tau;
  /// For each event of the execution, the index i of the pair it joined.
  std::vector<std::size_t> batch;
};

/// Scans the one-shot execution `e`: an invocation arriving after a new
/// response opens the next pair. The empty execution yields the single pair (∅, ∅).
FaceSequences sequences(const Execution& e);

/// Interval-sequential object with states (σ, τ) and one operation `op`:
/// δ((σ, τ), I) answers any non-empty set R of pending invocations with
/// τ ∪ R ∈ Δ(σ ∪ I). Refined tasks are accepted and handled as by
/// refined_task_to_object. Throws InvalidTask.
IntervalSpec task_to_object(const Task& t, const std::string& op = "task");

/// As task_to_object; a response (p, y, view) may only be emitted in a step
/// whose σ ∪ I equals its view.
IntervalSpec refined_task_to_object(const RefinedTask& t, const std::string& op = "task");

/// Sequential object with operations set(v) -> ok and get() -> y. A process
/// must set before it gets.
IntervalSpec task_to_split_sequential(const Task& t);

/// Δ(σ) collects γ_E over pending-free interval-linearizable executions E
/// with σ_E = σ and at most `bound` events. Throws NotOneShot unless the spec
/// has one operation and is one-shot, NotTotal when it is not total.
RefinedTask object_to_refined_task(const IntervalSpec& spec, std::size_t bound);

/// Plain variant: Δ(σ) collects τ_E over pending-free executions satisfying
/// `condition`. Operations other than the first may appear; input vertices
/// are (process, invocation payload).
Task naive_task_from_object(const IntervalSpec& spec, std::size_t bound, Condition condition);

struct SpecSummary {
  std::size_t states = 0;
  std::size_t transitions = 0;
  /// Exploration stopped at the state cap.
  bool truncated = false;
};

/// Reachable states and transitions over the alphabet, each process invoking
/// once when the spec is one-shot. Explores at most `max_states` states.
SpecSummary summarize_spec(const IntervalSpec& spec, std::size_t max_states);

}  // namespace ilin
