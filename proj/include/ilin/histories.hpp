#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ilin/value.hpp"

namespace ilin {

/// Dense process index in [0, n). Printed as `P<i>`.
using ProcessId = int;

enum class EventKind : unsigned char { Invocation, Response };

/// One invocation or response. For invocations `payload` is the input
/// argument, for responses it is the returned value.
struct Event {
  EventKind kind = EventKind::Invocation;
  ProcessId process = 0;
  std::string object;
  std::string operation;
  Value payload;

  static Event invocation(ProcessId p, std::string object, std::string op, Value payload = {});
  static Event response(ProcessId p, std::string object, std::string op, Value payload = {});

  bool is_invocation() const noexcept { return kind == EventKind::Invocation; }
  bool is_response() const noexcept { return kind == EventKind::Response; }
  /// Whether `resp` can answer this invocation (same process, object and operation).
  bool matched_by(const Event& resp) const;

  auto operator<=>(const Event&) const = default;
  bool operator==(const Event&) const = default;
};

/// A well-formed, totally ordered history. Construction validates
/// well-formedness: per process, events alternate Invocation, Response, ...
/// starting with an Invocation, and each response answers the pending call of
/// its process.
class Execution {
 public:
  Execution() = default;
  explicit Execution(std::vector<Event> events);

  const std::vector<Event>& events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  const Event& operator[](std::size_t i) const { return events_[i]; }
  auto begin() const { return events_.begin(); }
  auto end() const { return events_.end(); }

  std::set<ProcessId> processes() const;
  std::set<std::string> objects() const;
  bool has_pending() const;
  /// At most one invocation per process per object.
  bool is_one_shot() const;
  /// Throws NotWellFormed naming the first repeated invocation.
  void require_one_shot() const;

  bool operator==(const Execution&) const = default;

 private:
  std::vector<Event> events_;
};

/// Invocation plus its matching response, if any.
struct OperationCall {
  Event invocation;
  std::optional<Event> response;
  std::size_t inv_index = 0;
  std::optional<std::size_t> res_index;

  bool pending() const noexcept { return !response.has_value(); }
};

/// Calls of `e`, ordered by invocation position.
std::vector<OperationCall> operation_calls(const Execution& e);

/// Real-time order on the completed calls: a precedes b iff a's response
/// occurs before b's invocation.
class PrecedenceOrder {
 public:
  explicit PrecedenceOrder(std::vector<OperationCall> calls);

  const std::vector<OperationCall>& calls() const noexcept { return calls_; }
  bool precedes(std::size_t a, std::size_t b) const { return rel_[a][b]; }
  bool concurrent(std::size_t a, std::size_t b) const { return a != b && !precedes(a, b) && !precedes(b, a); }
  std::size_t related_pairs() const;

 private:
  std::vector<OperationCall> calls_;
  std::vector<std::vector<bool>> rel_;
};

/// Drops pending invocations.
Execution complete(const Execution& e);
/// Appends responses to pending invocations; throws NoPendingMatch.
Execution extend(const Execution& e, const std::vector<Event>& responses);
PrecedenceOrder precedence(const Execution& e);
Execution project_process(const Execution& e, ProcessId p);
Execution project_object(const Execution& e, std::string_view object);
/// All prefixes by event count, from the empty one to `e` itself.
std::vector<Execution> prefixes(const Execution& e);

std::string format_event(const Event& ev);
Event parse_event(std::string_view line);
/// Reads a history document: one event per line, `#` comments.
Execution parse_execution(std::string_view text);
std::string format_execution(const Execution& e);

}  // namespace ilin
