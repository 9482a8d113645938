#include "ilin/task.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "ilin/combinatorics.hpp"
#include "ilin/error.hpp"
#include "ilin/objects.hpp"

namespace ilin {

bool operator==(const Vertex& a, const Vertex& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Vertex& a, const Vertex& b) {
  if (auto c = a.process <=> b.process; c != 0) return c;
  if (auto c = a.value <=> b.value; c != 0) return c;
  if (auto c = a.has_view <=> b.has_view; c != 0) return c;
  return std::lexicographical_compare_three_way(a.view.begin(), a.view.end(), b.view.begin(), b.view.end());
}

Simplex make_simplex(std::vector<Vertex> vertices) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  return vertices;
}

bool chromatic(const Simplex& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i].process == s[i - 1].process) return false;
  }
  return true;
}

std::set<ProcessId> ids(const Simplex& s) {
  std::set<ProcessId> out;
  for (const auto& v : s) out.insert(v.process);
  return out;
}

Value vals(const Simplex& s) {
  std::vector<Value> out;
  for (const auto& v : s) out.push_back(v.value);
  return Value::set(std::move(out));
}

bool is_face(const Simplex& face, const Simplex& of) { return std::includes(of.begin(), of.end(), face.begin(), face.end()); }

Simplex simplex_union(const Simplex& a, const Simplex& b) {
  Simplex out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Simplex> faces_of(const Simplex& s) { return nonempty_subsets(s); }

std::string format_vertex(const Vertex& v) {
  std::string out = "(" + std::to_string(v.process) + "," + v.value.to_string() + ")";
  if (v.has_view) out += "|" + format_simplex(v.view);
  return out;
}

std::string format_simplex(const Simplex& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += format_vertex(s[i]);
  }
  return out + "}";
}

Vertex parse_vertex(ValueReader& r) {
  r.expect('(');
  auto p = r.read_int();
  r.expect(',');
  Value v = r.read();
  r.expect(')');
  if (p < 0) throw Error(ErrorKind::MalformedEvent, "negative process id in vertex");
  if (r.consume('|')) return Vertex(static_cast<ProcessId>(p), std::move(v), parse_simplex(r));
  return Vertex(static_cast<ProcessId>(p), std::move(v));
}

Simplex parse_simplex(ValueReader& r) {
  r.expect('{');
  std::vector<Vertex> out;
  if (!r.consume('}')) {
    do {
      out.push_back(parse_vertex(r));
    } while (r.consume(','));
    r.expect('}');
  }
  return make_simplex(std::move(out));
}

Simplex parse_simplex(std::string_view text) {
  ValueReader r(text);
  Simplex s = parse_simplex(r);
  if (!r.at_end()) throw Error(ErrorKind::MalformedEvent, "trailing input after simplex in '" + std::string(text) + "'");
  return s;
}

Complex::Complex(const std::vector<Simplex>& simplexes) {
  std::vector<Simplex> sorted;
  for (const auto& s : simplexes) {
    if (!s.empty()) sorted.push_back(make_simplex(s));
  }
  std::sort(sorted.begin(), sorted.end(), [](const Simplex& a, const Simplex& b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  });
  for (const auto& s : sorted) {
    if (faces_.count(s)) continue;
    facets_.push_back(s);
    for (auto& f : faces_of(s)) faces_.insert(std::move(f));
  }
  std::sort(facets_.begin(), facets_.end());
}

std::set<Vertex> Complex::vertices() const {
  std::set<Vertex> out;
  for (const auto& f : facets_) out.insert(f.begin(), f.end());
  return out;
}

int Complex::dimension() const {
  int d = -1;
  for (const auto& f : facets_) d = std::max(d, static_cast<int>(f.size()) - 1);
  return d;
}

bool Complex::pure(int dim) const {
  return std::all_of(facets_.begin(), facets_.end(), [dim](const Simplex& f) { return static_cast<int>(f.size()) - 1 == dim; });
}

bool Complex::chromatic() const {
  return std::all_of(facets_.begin(), facets_.end(), [](const Simplex& f) { return ilin::chromatic(f); });
}

bool Complex::subcomplex_of(const Complex& other) const {
  return std::all_of(facets_.begin(), facets_.end(), [&](const Simplex& f) { return other.contains(f); });
}

Complex pseudosphere(const Value& universe, const std::set<ProcessId>& processes) {
  std::vector<std::vector<Vertex>> options;
  for (auto p : processes) {
    std::vector<Vertex> opts;
    for (const auto& u : universe.elems()) opts.emplace_back(p, u);
    options.push_back(std::move(opts));
  }
  std::vector<Simplex> facets;
  if (processes.empty()) return Complex();
  for (auto& pick : cartesian(options)) facets.push_back(make_simplex(std::move(pick)));
  return Complex(facets);
}

const Complex* Task::carrier(const Simplex& s) const {
  static const Complex kEmpty;
  if (s.empty()) return &kEmpty;
  auto it = delta.find(s);
  return it == delta.end() ? nullptr : &it->second;
}

Task make_task(std::string name, int n, Complex inputs, const std::function<Complex(const Simplex&)>& rule,
               bool refined) {
  Task t;
  t.name = std::move(name);
  t.processes = n;
  t.refined = refined;
  std::vector<Simplex> outs;
  for (const auto& s : inputs.faces()) {
    Complex image = rule(s);
    outs.insert(outs.end(), image.facets().begin(), image.facets().end());
    t.delta.emplace(s, std::move(image));
  }
  t.inputs = std::move(inputs);
  t.outputs = Complex(outs);
  return t;
}

std::vector<std::string> validate_task(const Task& t) {
  std::vector<std::string> out;
  if (!t.inputs.chromatic()) out.push_back("input complex is not chromatic");
  if (!t.outputs.chromatic()) out.push_back("output complex is not chromatic");
  if (!t.inputs.pure(t.inputs.dimension())) out.push_back("input complex is not pure");
  if (!t.outputs.pure(t.outputs.dimension())) out.push_back("output complex is not pure");
  for (const auto& [s, image] : t.delta) {
    if (!t.inputs.contains(s)) out.push_back("Δ defined on " + format_simplex(s) + " which is not an input simplex");
  }
  for (const auto& s : t.inputs.faces()) {
    const Complex* image = t.carrier(s);
    std::string at = " at " + format_simplex(s);
    if (!image) {
      out.push_back("Δ undefined" + at);
      continue;
    }
    const int dim = static_cast<int>(s.size()) - 1;
    if (image->empty() || !image->pure(dim)) out.push_back("Δ(s) is not pure of dimension " + std::to_string(dim) + at);
    if (!image->subcomplex_of(t.outputs)) out.push_back("Δ(s) is not a subcomplex of O" + at);
    for (const auto& f : image->facets()) {
      if (static_cast<int>(f.size()) - 1 == dim && ids(f) != ids(s)) {
        out.push_back("facet " + format_simplex(f) + " of Δ(s) has other ids" + at);
      }
      for (const auto& v : f) {
        if (t.refined != v.has_view) {
          out.push_back("vertex " + format_vertex(v) + (t.refined ? " lacks" : " has") + " a set-view" + at);
        } else if (t.refined) {
          bool owner = std::any_of(v.view.begin(), v.view.end(), [&](const Vertex& w) { return w.process == v.process; });
          if (!is_face(v.view, s) || !owner) {
            out.push_back("set-view of " + format_vertex(v) + " is not a face of s containing its owner" + at);
          }
        }
      }
    }
    for (const auto& sub : faces_of(s)) {
      if (sub.size() == s.size()) continue;
      const Complex* smaller = t.carrier(sub);
      if (smaller && !smaller->subcomplex_of(*image)) {
        out.push_back("Δ is not monotone: Δ" + format_simplex(sub) + " ⊄ Δ" + format_simplex(s));
      }
    }
  }
  return out;
}

Simplex input_simplex(const Execution& e) {
  std::vector<Vertex> out;
  for (const auto& ev : e) {
    if (ev.is_invocation()) out.emplace_back(ev.process, ev.payload);
  }
  return make_simplex(std::move(out));
}

Simplex output_simplex(const Execution& e) {
  std::vector<Vertex> out;
  for (const auto& ev : e) {
    if (ev.is_response()) out.emplace_back(ev.process, ev.payload);
  }
  return make_simplex(std::move(out));
}

namespace {

TaskVerdict check_prefixes(const Execution& e, const Task& t, bool decorate) {
  e.require_one_shot();
  if (e.objects().size() > 1) throw Error(ErrorKind::NotWellFormed, "a task history uses a single object");
  std::set<Vertex> in_vertices = t.inputs.vertices();
  std::set<Vertex> out_plain;
  for (const auto& v : t.outputs.vertices()) out_plain.insert(v.plain());
  for (std::size_t i = 0; i < e.size(); ++i) {
    Vertex v(e[i].process, e[i].payload);
    const auto& known = e[i].is_invocation() ? in_vertices : out_plain;
    if (!known.count(v)) {
      throw Error(ErrorKind::UnknownVertex,
                  "vertex " + format_vertex(v) + " of event " + std::to_string(i + 1) + " is not in the " +
                      (e[i].is_invocation() ? "input" : "output") + " complex",
                  i);
    }
  }
  std::vector<Vertex> sigma;
  std::vector<Vertex> tau;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const Event& ev = e[i];
    if (ev.is_invocation()) {
      sigma.emplace_back(ev.process, ev.payload);
      std::sort(sigma.begin(), sigma.end());
    } else {
      if (decorate) {
        tau.emplace_back(ev.process, ev.payload, sigma);
      } else {
        tau.emplace_back(ev.process, ev.payload);
      }
      std::sort(tau.begin(), tau.end());
    }
    std::size_t len = i + 1;
    if (!t.inputs.contains(sigma)) {
      return {false, len, "input simplex " + format_simplex(sigma) + " is not in I"};
    }
    const Complex* image = t.carrier(sigma);
    if (!image) return {false, len, "Δ undefined on " + format_simplex(sigma)};
    if (!image->contains(tau)) {
      return {false, len, format_simplex(tau) + " is not in Δ" + format_simplex(sigma)};
    }
  }
  return {};
}

}  // namespace

TaskVerdict satisfies_task(const Execution& e, const Task& t) {
  if (t.refined) return check_prefixes(e, t, true);
  return check_prefixes(e, t, false);
}

TaskVerdict satisfies_refined_task(const Execution& e, const RefinedTask& t) {
  if (!t.refined) throw Error(ErrorKind::InvalidTask, "task " + t.name + " has no set-views");
  return check_prefixes(e, t, true);
}

namespace {

Complex single_facet_inputs(int n) {
  Simplex facet;
  for (int p = 0; p < n; ++p) facet.emplace_back(p, Value::integer(p + 1));
  return Complex({make_simplex(std::move(facet))});
}

// Output facets over ids(s): each process picks a set of written values
// containing its own, pairwise ⊆-comparable, optionally immediate.
Complex snapshot_outputs(const Simplex& s, bool immediacy) {
  std::vector<Value> written = vals(s).elems();
  std::vector<std::vector<Vertex>> options;
  for (const auto& v : s) {
    std::vector<Vertex> opts;
    for (const auto& sub : nonempty_subsets(written)) {
      Value view = Value::set(sub);
      if (view.contains(v.value)) opts.emplace_back(v.process, view);
    }
    options.push_back(std::move(opts));
  }
  std::vector<Simplex> facets;
  for (auto& pick : cartesian(options)) {
    bool ok = true;
    for (std::size_t a = 0; ok && a < pick.size(); ++a) {
      for (std::size_t b = 0; ok && b < pick.size(); ++b) {
        const Value& va = pick[a].value;
        const Value& vb = pick[b].value;
        if (!va.subset_of(vb) && !vb.subset_of(va)) ok = false;
        if (immediacy && vb.contains(s[a].value) && !va.subset_of(vb)) ok = false;
      }
    }
    if (ok) facets.push_back(make_simplex(std::move(pick)));
  }
  return Complex(facets);
}

std::set<ProcessId> all_processes(int n) {
  std::set<ProcessId> out;
  for (int p = 0; p < n; ++p) out.insert(p);
  return out;
}

}  // namespace

Task validity_task(int n, const Value& universe) {
  if (n < 1 || !universe.is_set() || universe.size() == 0) throw Error(ErrorKind::BadParams, "validity task needs n ≥ 1 and a non-empty U");
  return make_task("validity", n, pseudosphere(universe, all_processes(n)),
                   [](const Simplex& s) { return pseudosphere(vals(s), ids(s)); });
}

Task write_snapshot_task(int n) {
  if (n < 1) throw Error(ErrorKind::BadParams, "n must be at least 1");
  return make_task("write_snapshot", n, single_facet_inputs(n), [](const Simplex& s) { return snapshot_outputs(s, false); });
}

Task immediate_snapshot_task(int n) {
  if (n < 1) throw Error(ErrorKind::BadParams, "n must be at least 1");
  return make_task("immediate_snapshot", n, single_facet_inputs(n),
                   [](const Simplex& s) { return snapshot_outputs(s, true); });
}

Task k_set_agreement_task(int n, int k, const Value& universe) {
  if (n < 1 || k < 1 || !universe.is_set() || universe.size() == 0) {
    throw Error(ErrorKind::BadParams, "k-set agreement needs n ≥ 1, k ≥ 1 and a non-empty U");
  }
  return make_task("k_set_agreement", n, pseudosphere(universe, all_processes(n)), [k](const Simplex& s) {
    std::vector<std::vector<Vertex>> options;
    const std::vector<Value> written = vals(s).elems();
    for (const auto& v : s) {
      std::vector<Vertex> opts;
      for (const auto& x : written) opts.emplace_back(v.process, x);
      options.push_back(std::move(opts));
    }
    std::vector<Simplex> facets;
    for (auto& pick : cartesian(options)) {
      Simplex f = make_simplex(std::move(pick));
      if (static_cast<int>(vals(f).size()) <= k) facets.push_back(std::move(f));
    }
    return Complex(facets);
  });
}

Task builtin_task(std::string_view spec) {
  SpecString s = parse_spec_string(spec);
  int n = 3;
  int k = 1;
  std::optional<Value> universe;
  for (const auto& [key, val] : s.params) {
    if (key == "n" || key == "k") {
      int parsed = 0;
      try {
        std::size_t used = 0;
        parsed = std::stoi(val, &used);
        if (used != val.size()) throw std::invalid_argument(val);
      } catch (const std::exception&) {
        throw Error(ErrorKind::BadParams, "parameter " + key + " expects an integer, got '" + val + "'");
      }
      (key == "n" ? n : k) = parsed;
    } else if (key == "U" && (s.name == "validity" || s.name == "k_set_agreement")) {
      universe = parse_value(val);
    } else {
      throw Error(ErrorKind::BadParams, "task " + s.name + " takes no parameter '" + key + "'");
    }
  }
  if (n < 1 || n > 4) throw Error(ErrorKind::BadParams, "built-in tasks are materialized for 1 ≤ n ≤ 4");
  auto default_u = [&] {
    std::vector<Value> u;
    for (int i = 1; i <= n; ++i) u.push_back(Value::integer(i));
    return Value::set(std::move(u));
  };
  if (s.name == "validity") return validity_task(n, universe.value_or(default_u()));
  if (s.name == "write_snapshot") return write_snapshot_task(n);
  if (s.name == "immediate_snapshot") return immediate_snapshot_task(n);
  if (s.name == "k_set_agreement") {
    if (k > n) throw Error(ErrorKind::BadParams, "k must lie in [1, n]");
    return k_set_agreement_task(n, k, universe.value_or(default_u()));
  }
  throw Error(ErrorKind::BadParams, "no built-in task named '" + s.name + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Task parse_task(std::string_view text) {
  enum class Section { None, Inputs, Outputs, Delta } section = Section::None;
  Task t;
  t.name = "custom";
  std::vector<Simplex> inputs;
  std::vector<Simplex> outputs;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool any_view = false;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      if (line == "INPUTS") {
        section = Section::Inputs;
      } else if (line == "OUTPUTS") {
        section = Section::Outputs;
      } else if (line == "DELTA") {
        section = Section::Delta;
      } else if (line.substr(0, 5) == "NAME ") {
        t.name = std::string(trim(line.substr(5)));
      } else if (section == Section::Inputs || section == Section::Outputs) {
        Simplex s = parse_simplex(line);
        for (const auto& v : s) any_view = any_view || v.has_view;
        (section == Section::Inputs ? inputs : outputs).push_back(std::move(s));
      } else if (section == Section::Delta) {
        auto arrow = line.find("->");
        if (arrow == std::string_view::npos) throw Error(ErrorKind::MalformedEvent, "DELTA line needs '->'");
        Simplex s = parse_simplex(trim(line.substr(0, arrow)));
        std::vector<Simplex> image;
        std::string_view rest = line.substr(arrow + 2);
        std::size_t pos = 0;
        while (pos <= rest.size()) {
          std::size_t semi = rest.find(';', pos);
          if (semi == std::string_view::npos) semi = rest.size();
          std::string_view item = trim(rest.substr(pos, semi - pos));
          if (!item.empty()) image.push_back(parse_simplex(item));
          pos = semi + 1;
        }
        if (!t.delta.emplace(s, Complex(image)).second) {
          throw Error(ErrorKind::MalformedEvent, "Δ" + format_simplex(s) + " given twice");
        }
      } else {
        throw Error(ErrorKind::MalformedEvent, "content before any INPUTS/OUTPUTS/DELTA header");
      }
    } catch (const Error& err) {
      throw Error(ErrorKind::InvalidTask, "line " + std::to_string(line_no) + ": " + err.detail());
    }
  }
  t.inputs = Complex(inputs);
  t.outputs = Complex(outputs);
  t.refined = any_view;
  int n = 0;
  for (const auto& v : t.inputs.vertices()) n = std::max(n, v.process + 1);
  t.processes = std::max(n, 1);
  return t;
}

std::string format_task(const Task& t) {
  std::ostringstream os;
  os << "NAME " << t.name << "\nINPUTS\n";
  for (const auto& f : t.inputs.facets()) os << format_simplex(f) << '\n';
  os << "OUTPUTS\n";
  for (const auto& f : t.outputs.facets()) os << format_simplex(f) << '\n';
  os << "DELTA\n";
  for (const auto& [s, image] : t.delta) {
    os << format_simplex(s) << " ->";
    for (std::size_t i = 0; i < image.facets().size(); ++i) os << (i ? "; " : " ") << format_simplex(image.facets()[i]);
    os << '\n';
  }
  return os.str();
}

}  // namespace ilin
