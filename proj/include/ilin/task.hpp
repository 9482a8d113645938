#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ilin/histories.hpp"
#include "ilin/value.hpp"

namespace ilin {

struct Vertex;
using Simplex = std::vector<Vertex>;

/// Colored vertex (process, value). Output vertices of refined tasks also
/// carry a set-view: the input simplex the process saw.
struct Vertex {
  ProcessId process = 0;
  Value value;
  bool has_view = false;
  std::vector<Vertex> view;

  Vertex() = default;
  Vertex(ProcessId p, Value v) : process(p), value(std::move(v)) {}
  Vertex(ProcessId p, Value v, std::vector<Vertex> set_view)
      : process(p), value(std::move(v)), has_view(true), view(std::move(set_view)) {}

  /// The same vertex with its set-view removed.
  Vertex plain() const { return Vertex(process, value); }
};

bool operator==(const Vertex& a, const Vertex& b);
std::strong_ordering operator<=>(const Vertex& a, const Vertex& b);

/// Sorts and deduplicates.
Simplex make_simplex(std::vector<Vertex> vertices);
bool chromatic(const Simplex& s);
std::set<ProcessId> ids(const Simplex& s);
/// Values of the vertices, as a set.
Value vals(const Simplex& s);
bool is_face(const Simplex& face, const Simplex& of);
Simplex simplex_union(const Simplex& a, const Simplex& b);
/// All non-empty faces, the simplex itself included.
std::vector<Simplex> faces_of(const Simplex& s);

std::string format_vertex(const Vertex& v);
std::string format_simplex(const Simplex& s);
Vertex parse_vertex(ValueReader& r);
Simplex parse_simplex(ValueReader& r);
Simplex parse_simplex(std::string_view text);

/// Simplicial complex stored by its maximal simplexes, with all faces
/// materialized for membership tests.
class Complex {
 public:
  Complex() = default;
  explicit Complex(const std::vector<Simplex>& simplexes);

  const std::vector<Simplex>& facets() const noexcept { return facets_; }
  const std::set<Simplex>& faces() const noexcept { return faces_; }
  std::set<Vertex> vertices() const;
  /// The empty simplex counts as a member.
  bool contains(const Simplex& s) const { return s.empty() || faces_.count(s) > 0; }
  bool empty() const noexcept { return facets_.empty(); }
  int dimension() const;
  bool pure(int dim) const;
  bool chromatic() const;
  bool subcomplex_of(const Complex& other) const;

  bool operator==(const Complex& other) const { return facets_ == other.facets_; }

 private:
  std::vector<Simplex> facets_;
  std::set<Simplex> faces_;
};

/// complex(U, P): every process of P paired with every value of U.
Complex pseudosphere(const Value& universe, const std::set<ProcessId>& processes);

/// Task (I, O, Δ). Δ is stored for every non-empty simplex of I. A refined
/// task has set-views on every output vertex.
struct Task {
  std::string name;
  int processes = 1;
  Complex inputs;
  Complex outputs;
  std::map<Simplex, Complex> delta;
  bool refined = false;
  /// Set when Δ was produced by bounded enumeration.
  std::size_t event_bound = 0;
  bool complete = true;

  /// Δ(s); nullptr when undefined. Δ of the empty simplex is the empty complex.
  const Complex* carrier(const Simplex& s) const;
};

using RefinedTask = Task;

/// Builds Δ for every face of `inputs` from `rule` and sets O to the union.
Task make_task(std::string name, int n, Complex inputs, const std::function<Complex(const Simplex&)>& rule,
               bool refined = false);

/// Empty list iff the task is well-defined.
std::vector<std::string> validate_task(const Task& t);

struct TaskVerdict {
  bool ok = true;
  /// Length of the shortest violating prefix.
  std::optional<std::size_t> violating_prefix;
  std::string reason;
};

/// Prefix condition τ_{E'} ∈ Δ(σ_{E'}) for every prefix E'. Throws
/// NotWellFormed unless `e` is one-shot, UnknownVertex for payloads outside
/// the complexes.
TaskVerdict satisfies_task(const Execution& e, const Task& t);
/// As above, with each response decorated by the inputs invoked before it.
TaskVerdict satisfies_refined_task(const Execution& e, const RefinedTask& t);

/// σ_E and τ_E of an execution (responses undecorated).
Simplex input_simplex(const Execution& e);
Simplex output_simplex(const Execution& e);

Task validity_task(int n, const Value& universe);
/// Process i writes i+1; outputs are sets of written values with
/// self-inclusion and containment.
Task write_snapshot_task(int n);
/// write_snapshot_task plus immediacy.
Task immediate_snapshot_task(int n);
Task k_set_agreement_task(int n, int k, const Value& universe);

/// `validity:n=3,U={1,2,3}`, `write_snapshot:n=2`, `immediate_snapshot:n=3`,
/// `k_set_agreement:n=2,k=1,U={0,1}`. Throws BadParams.
Task builtin_task(std::string_view spec);

/// Reads the INPUTS / OUTPUTS / DELTA text format.
Task parse_task(std::string_view text);
std::string format_task(const Task& t);

}  // namespace ilin
