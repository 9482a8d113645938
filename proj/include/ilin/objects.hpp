#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "ilin/interval_spec.hpp"

namespace ilin {

/// Parsed `name[:key=value,...]`. Values may contain braces, e.g. `U={1,2,3}`.
struct SpecString {
  std::string name;
  std::map<std::string, std::string> params;
};

SpecString parse_spec_string(std::string_view text);

struct BuiltinObjectId {
  std::string name;
  int n = 3;
  int k = 1;
  /// Value universe for the validity family; defaults to {1..n}.
  std::optional<Value> universe;
  /// write_snapshot responses: `values` (set of proposed values) or `pairs`
  /// (set of (process, value) tuples).
  std::string view = "values";
};

/// Throws UnknownObject or BadParams.
BuiltinObjectId parse_object_id(std::string_view text);
IntervalSpec builtin_spec(const BuiltinObjectId& id);

/// Single operation `validity(x)`: answers with some value proposed so far.
IntervalSpec validity_spec(int n, std::optional<Value> universe = {}, bool one_shot = true);
/// Operations `propose(v)` and `abort()`; responses a value, `aborted` or `notAborted`.
IntervalSpec validity_abort_spec(int n, int k, std::optional<Value> universe = {});
/// Single operation `write_snapshot(x)`: each response is the set of all
/// values proposed up to and including the current invoking class.
IntervalSpec write_snapshot_spec(int n, bool pairs_view = false, std::optional<Value> universe = {});
/// Operation `scons(x)`: agreement always, validity only for a solo first call.
IntervalSpec safe_consensus_spec(int n, std::optional<Value> universe = {});
/// Sequential write-snapshot automaton. States are sets of written values;
/// process i proposes i+1 and moves to any superset state containing i+1.
IntervalSpec ws_sequential_spec(int n);
/// Three-process queue where P0 only runs enq(1), P1 only enq(2) and P2 only
/// deq(); deq returns the head or `bot`.
IntervalSpec restricted_queue_spec();

/// Agreement over all responses, plus validity when the first invocation
/// was answered before any other invocation occurred.
bool safe_consensus_check(const IntervalExecution& h, int n);

}  // namespace ilin
