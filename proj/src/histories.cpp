#include "ilin/histories.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "ilin/error.hpp"

namespace ilin {

namespace {

std::string at_event(std::size_t index) { return " at event " + std::to_string(index + 1); }

}  // namespace

Event Event::invocation(ProcessId p, std::string object, std::string op, Value payload) {
  return Event{EventKind::Invocation, p, std::move(object), std::move(op), std::move(payload)};
}

Event Event::response(ProcessId p, std::string object, std::string op, Value payload) {
  return Event{EventKind::Response, p, std::move(object), std::move(op), std::move(payload)};
}

bool Event::matched_by(const Event& resp) const {
  return is_invocation() && resp.is_response() && resp.process == process && resp.object == object &&
         resp.operation == operation;
}

Execution::Execution(std::vector<Event> events) : events_(std::move(events)) {
  std::map<ProcessId, std::size_t> open;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const Event& ev = events_[i];
    if (ev.process < 0) throw Error(ErrorKind::NotWellFormed, "negative process id" + at_event(i), i);
    if (ev.object.empty() || ev.operation.empty()) {
      throw Error(ErrorKind::NotWellFormed, "missing object or operation" + at_event(i), i);
    }
    auto it = open.find(ev.process);
    if (ev.is_invocation()) {
      if (it != open.end()) {
        throw Error(ErrorKind::NotWellFormed,
                    "P" + std::to_string(ev.process) + " invokes while its call at event " +
                        std::to_string(it->second + 1) + " is pending" + at_event(i),
                    i);
      }
      open.emplace(ev.process, i);
    } else {
      if (it == open.end()) {
        throw Error(ErrorKind::NotWellFormed,
                    "response of P" + std::to_string(ev.process) + " without a pending invocation" + at_event(i), i);
      }
      if (!events_[it->second].matched_by(ev)) {
        throw Error(ErrorKind::NotWellFormed,
                    "response " + ev.object + "." + ev.operation + " does not match pending " +
                        events_[it->second].object + "." + events_[it->second].operation + at_event(i),
                    i);
      }
      open.erase(it);
    }
  }
}

std::set<ProcessId> Execution::processes() const {
  std::set<ProcessId> out;
  for (const auto& ev : events_) out.insert(ev.process);
  return out;
}

std::set<std::string> Execution::objects() const {
  std::set<std::string> out;
  for (const auto& ev : events_) out.insert(ev.object);
  return out;
}

bool Execution::has_pending() const {
  for (const auto& c : operation_calls(*this)) {
    if (c.pending()) return true;
  }
  return false;
}

bool Execution::is_one_shot() const {
  try {
    require_one_shot();
    return true;
  } catch (const Error&) {
    return false;
  }
}

void Execution::require_one_shot() const {
  std::set<std::pair<ProcessId, std::string>> seen;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const Event& ev = events_[i];
    if (!ev.is_invocation()) continue;
    if (!seen.emplace(ev.process, ev.object).second) {
      throw Error(ErrorKind::NotWellFormed,
                  "P" + std::to_string(ev.process) + " invokes " + ev.object + " twice in a one-shot history" +
                      at_event(i),
                  i);
    }
  }
}

std::vector<OperationCall> operation_calls(const Execution& e) {
  std::vector<OperationCall> out;
  std::map<ProcessId, std::size_t> open;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const Event& ev = e[i];
    if (ev.is_invocation()) {
      open[ev.process] = out.size();
      out.push_back(OperationCall{ev, std::nullopt, i, std::nullopt});
    } else {
      auto& call = out[open.at(ev.process)];
      call.response = ev;
      call.res_index = i;
      open.erase(ev.process);
    }
  }
  return out;
}

PrecedenceOrder::PrecedenceOrder(std::vector<OperationCall> calls) : calls_(std::move(calls)) {
  const std::size_t n = calls_.size();
  rel_.assign(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a) {
    if (!calls_[a].res_index) continue;
    for (std::size_t b = 0; b < n; ++b) {
      rel_[a][b] = a != b && *calls_[a].res_index < calls_[b].inv_index;
    }
  }
}

std::size_t PrecedenceOrder::related_pairs() const {
  std::size_t count = 0;
  for (const auto& row : rel_) count += static_cast<std::size_t>(std::count(row.begin(), row.end(), true));
  return count;
}

Execution complete(const Execution& e) {
  std::vector<bool> keep(e.size(), true);
  for (const auto& c : operation_calls(e)) {
    if (c.pending()) keep[c.inv_index] = false;
  }
  std::vector<Event> out;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (keep[i]) out.push_back(e[i]);
  }
  return Execution(std::move(out));
}

Execution extend(const Execution& e, const std::vector<Event>& responses) {
  std::map<ProcessId, const Event*> pending;
  for (const auto& c : operation_calls(e)) {
    if (c.pending()) pending.emplace(c.invocation.process, &e[c.inv_index]);
  }
  std::vector<Event> out = e.events();
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const Event& r = responses[i];
    auto it = pending.find(r.process);
    if (!r.is_response() || it == pending.end() || !it->second->matched_by(r)) {
      throw Error(ErrorKind::NoPendingMatch,
                  "appended event " + format_event(r) + " does not answer a pending invocation", i);
    }
    pending.erase(it);
    out.push_back(r);
  }
  return Execution(std::move(out));
}

PrecedenceOrder precedence(const Execution& e) { return PrecedenceOrder(operation_calls(e)); }

Execution project_process(const Execution& e, ProcessId p) {
  std::vector<Event> out;
  for (const auto& ev : e) {
    if (ev.process == p) out.push_back(ev);
  }
  return Execution(std::move(out));
}

Execution project_object(const Execution& e, std::string_view object) {
  std::vector<Event> out;
  for (const auto& ev : e) {
    if (ev.object == object) out.push_back(ev);
  }
  return Execution(std::move(out));
}

std::vector<Execution> prefixes(const Execution& e) {
  std::vector<Execution> out;
  out.reserve(e.size() + 1);
  for (std::size_t k = 0; k <= e.size(); ++k) {
    out.emplace_back(std::vector<Event>(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(k)));
  }
  return out;
}

std::string format_event(const Event& ev) {
  std::ostringstream os;
  os << 'P' << ev.process << ' ' << (ev.is_invocation() ? "inv " : "res ") << ev.object << '.' << ev.operation;
  if (ev.is_invocation()) {
    os << '(' << ev.payload.to_string() << ')';
  } else {
    os << " ->";
    if (!ev.payload.is_none()) os << ' ' << ev.payload.to_string();
  }
  return os.str();
}

Event parse_event(std::string_view line) {
  ValueReader r(line);
  std::string proc = r.read_identifier();
  if (proc.size() < 2 || proc[0] != 'P' ||
      !std::all_of(proc.begin() + 1, proc.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw Error(ErrorKind::MalformedEvent, "expected process id like P0, got '" + proc + "'");
  }
  Event ev;
  try {
    ev.process = std::stoi(proc.substr(1));
  } catch (const std::out_of_range&) {
    throw Error(ErrorKind::MalformedEvent, "process id out of range: " + proc);
  }
  std::string kind = r.read_identifier();
  if (kind == "inv") {
    ev.kind = EventKind::Invocation;
  } else if (kind == "res") {
    ev.kind = EventKind::Response;
  } else {
    throw Error(ErrorKind::MalformedEvent, "expected 'inv' or 'res', got '" + kind + "'");
  }
  ev.object = r.read_identifier();
  r.expect('.');
  ev.operation = r.read_identifier();
  if (ev.is_invocation()) {
    r.expect('(');
    if (!r.consume(')')) {
      ev.payload = r.read();
      r.expect(')');
    }
  } else {
    r.expect('-');
    r.expect('>');
    if (!r.at_end()) ev.payload = r.read();
  }
  if (!r.at_end()) throw Error(ErrorKind::MalformedEvent, "trailing input '" + std::string(r.rest()) + "'");
  return ev;
}

Execution parse_execution(std::string_view text) {
  std::vector<Event> events;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    bool blank = std::all_of(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (!blank) {
      try {
        events.push_back(parse_event(line));
      } catch (const Error& err) {
        throw Error(err.kind(), "line " + std::to_string(line_no) + ": " + err.detail(), events.size());
      }
    }
    start = end + 1;
  }
  return Execution(std::move(events));
}

std::string format_execution(const Execution& e) {
  std::string out;
  for (const auto& ev : e) {
    out += format_event(ev);
    out += '\n';
  }
  return out;
}

}  // namespace ilin
