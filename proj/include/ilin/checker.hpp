#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ilin/histories.hpp"
#include "ilin/interval_spec.hpp"

namespace ilin {

enum class Condition : unsigned char { Linearizable, SetLinearizable, IntervalLinearizable };
const char* to_string(Condition c);

using SpecMap = std::map<std::string, IntervalSpec>;

struct Verdict {
  bool yes = false;
  /// The interval-sequential execution Ŝ, re-verified before it is reported.
  std::optional<IntervalExecution> witness;
  /// Responses appended to form Ē.
  std::vector<Event> appended;
  std::size_t nodes = 0;
  /// check_local: the first object whose projection fails.
  std::string failing_object;
};

/// Search-node cap: ILIN_BUDGET if set, else 5'000'000.
std::size_t default_budget();

/// Decides the condition. Throws UnknownObject when an object has no spec,
/// BudgetExceeded past `budget` search nodes.
Verdict check(const Execution& e, const SpecMap& specs, Condition condition, std::size_t budget = default_budget());

/// Experimental: distinct witnesses with the fewest class pairs, at most
/// `limit` of them, in search order. Empty when the condition fails.
std::vector<Verdict> all_witnesses(const Execution& e, const SpecMap& specs, Condition condition, std::size_t limit,
                                   std::size_t budget = default_budget());

Verdict check_interval_linearizable(const Execution& e, const SpecMap& specs);
Verdict check_set_linearizable(const Execution& e, const SpecMap& specs);
Verdict check_linearizable(const Execution& e, const SpecMap& specs);

/// Checks every object projection on its own and, when all pass, merges the
/// per-object witnesses into a global one. Throws NotLinearizable if the
/// merge order has a cycle or the merged witness fails re-verification.
Verdict check_local(const Execution& e, const SpecMap& specs);

/// Merges per-object witnesses of `e`: all classes, the per-object orders and
/// response-before-invocation edges across objects, topologically sorted with
/// consecutive classes of the same kind merged.
IntervalExecution compose_witnesses(const Execution& e, const std::vector<Event>& appended,
                                    const std::map<std::string, IntervalExecution>& per_object);

/// Full re-check of a witness: per-process equality with comp(Ē), per-object
/// acceptance, precedence respect, and the class shape the condition
/// demands. Returns the first failure, or nothing when the witness is valid.
std::optional<std::string> verify_witness(const Execution& e, const SpecMap& specs, Condition condition,
                                          const IntervalExecution& witness, const std::vector<Event>& appended);

/// A response to the pending call `pending` that keeps `e` interval-linearizable.
/// Throws NotLinearizable when `e` is not, NoResponseFound when no response works.
Event nonblocking_extension(const Execution& e, const SpecMap& specs, const OperationCall& pending);

/// Table with one row per process and init/term column pairs per class pair.
std::string format_witness_table(const IntervalExecution& witness);

}  // namespace ilin
