#include <doctest.h>

#include <algorithm>
#include <random>

#include "ilin/demo.hpp"
#include "ilin/error.hpp"
#include "ilin/task.hpp"
#include "oracle.hpp"

using namespace ilin;

namespace {

Vertex vx(ProcessId p, Value v) { return Vertex(p, std::move(v)); }
Value V(std::int64_t x) { return Value::integer(x); }

bool mentions(const std::vector<std::string>& errs, const std::string& what) {
  return std::any_of(errs.begin(), errs.end(), [&](const std::string& e) { return e.find(what) != std::string::npos; });
}

// Output simplex of processes 0..n-1 whose value is the set of written values.
Simplex ws_facet(const std::vector<std::vector<std::int64_t>>& views) {
  std::vector<Vertex> out;
  for (std::size_t p = 0; p < views.size(); ++p) {
    std::vector<Value> s;
    for (auto x : views[p]) s.push_back(V(x));
    out.push_back(vx(static_cast<ProcessId>(p), Value::set(std::move(s))));
  }
  return make_simplex(std::move(out));
}

Simplex full_input(int n) {
  std::vector<Vertex> vs;
  for (int p = 0; p < n; ++p) vs.push_back(vx(p, V(p + 1)));
  return make_simplex(std::move(vs));
}

}  // namespace

TEST_CASE("simplex basics") {
  Simplex s = make_simplex({vx(1, V(2)), vx(0, V(1)), vx(1, V(2))});
  CHECK(s.size() == 2);
  CHECK(chromatic(s));
  CHECK_FALSE(chromatic(make_simplex({vx(0, V(1)), vx(0, V(2))})));
  CHECK(ids(s) == std::set<ProcessId>{0, 1});
  CHECK(vals(s) == Value::int_set({1, 2}));
  CHECK(is_face(make_simplex({vx(0, V(1))}), s));
  CHECK(faces_of(s).size() == 3);
  CHECK(parse_simplex(format_simplex(s)) == s);
}

TEST_CASE("pseudospheres") {
  Complex one = pseudosphere(Value::int_set({0, 1}), {0});
  CHECK(one.vertices().size() == 2);
  CHECK(one.facets().size() == 2);
  CHECK(one.dimension() == 0);

  Complex cycle = pseudosphere(Value::int_set({0, 1}), {0, 1});
  CHECK(cycle.vertices().size() == 4);
  CHECK(cycle.facets().size() == 4);
  CHECK(cycle.dimension() == 1);
  for (const auto& v : cycle.vertices()) {
    int degree = 0;
    for (const auto& f : cycle.facets()) degree += std::count(f.begin(), f.end(), v) > 0;
    CHECK(degree == 2);
  }

  Complex big = pseudosphere(Value::int_set({1, 2, 3}), {0, 1, 2});
  CHECK(big.facets().size() == 27);
  CHECK(big.dimension() == 2);
  CHECK(big.pure(2));
}

TEST_CASE("pseudosphere facet count and closure") {
  std::mt19937 rng(47);
  for (int u = 1; u <= 3; ++u) {
    for (int n = 1; n <= 3; ++n) {
      std::vector<Value> us;
      for (int i = 0; i < u; ++i) us.push_back(V(i));
      std::set<ProcessId> ps;
      for (int p = 0; p < n; ++p) ps.insert(p);
      Complex c = pseudosphere(Value::set(us), ps);
      std::size_t expect = 1;
      for (int p = 0; p < n; ++p) expect *= static_cast<std::size_t>(u);
      CHECK(c.facets().size() == expect);
      for (int i = 0; i < 20; ++i) {
        const Simplex& f = c.facets()[oracle::pick(rng, c.facets().size())];
        auto fs = faces_of(f);
        CHECK(c.contains(fs[oracle::pick(rng, fs.size())]));
      }
    }
  }
}

TEST_CASE("validate_task") {
  CHECK(validate_task(immediate_snapshot_task(3)).empty());
  CHECK(validate_task(validity_task(1, Value::int_set({1}))).empty());

  Task t = validity_task(2, Value::int_set({1, 2}));
  // Shrink Δ of the full simplex so that Δ of a vertex is no longer inside it.
  Simplex full = full_input(2);
  t.delta[full] = Complex({make_simplex({vx(0, V(2)), vx(1, V(2))})});
  CHECK(mentions(validate_task(t), "monotone"));
}

TEST_CASE("built-in tasks validate") {
  for (int n = 1; n <= 3; ++n) {
    CHECK(validate_task(validity_task(n, Value::int_set({1, 2, 3}))).empty());
    CHECK(validate_task(write_snapshot_task(n)).empty());
    CHECK(validate_task(immediate_snapshot_task(n)).empty());
    for (int k = 1; k <= n; ++k) CHECK(validate_task(k_set_agreement_task(n, k, Value::int_set({0, 1}))).empty());
  }
  CHECK_THROWS_AS(builtin_task("nope:n=2"), Error);
  CHECK_THROWS_AS(builtin_task("validity:n=2,U=3"), Error);
  CHECK(builtin_task("k_set_agreement:n=2,k=1,U={0,1}").processes == 2);
}

TEST_CASE("snapshot output complexes") {
  Task is = immediate_snapshot_task(3);
  Task ws = write_snapshot_task(3);
  Simplex central = ws_facet({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
  Simplex irregular = ws_facet({{1, 2}, {1, 2, 3}, {1, 2, 3}});
  CHECK(is.outputs.contains(central));
  CHECK(is.outputs.contains(ws_facet({{1}, {1, 2}, {1, 2, 3}})));
  CHECK(is.outputs.contains(ws_facet({{1}, {1, 2, 3}, {1, 2, 3}})));
  CHECK_FALSE(is.outputs.contains(irregular));
  CHECK(ws.outputs.contains(irregular));
  CHECK(is.outputs.subcomplex_of(ws.outputs));
  // Count views by brute force over all triples of subsets of {1,2,3}.
  std::size_t ws_count = 0;
  std::size_t is_count = 0;
  auto has = [](int mask, int p) { return (mask >> p) & 1; };
  for (int a = 1; a < 8; ++a) {
    for (int b = 1; b < 8; ++b) {
      for (int c = 1; c < 8; ++c) {
        const int v[3] = {a, b, c};
        bool ok = true;
        bool immediate = true;
        for (int p = 0; p < 3; ++p) {
          ok = ok && has(v[p], p);
          for (int q = 0; q < 3; ++q) {
            ok = ok && ((v[p] & v[q]) == v[p] || (v[p] & v[q]) == v[q]);
            if (has(v[q], p)) immediate = immediate && (v[p] & v[q]) == v[p];
          }
        }
        ws_count += ok;
        is_count += ok && immediate;
      }
    }
  }
  CHECK(ws.outputs.facets().size() == ws_count);
  CHECK(is.outputs.facets().size() == is_count);
}

TEST_CASE("snapshot facets satisfy their predicates") {
  auto check = [](const Task& t, bool immediacy) {
    for (const auto& f : t.outputs.facets()) {
      for (const auto& a : f) {
        CHECK(a.value.contains(V(a.process + 1)));
        for (const auto& b : f) {
          CHECK((a.value.subset_of(b.value) || b.value.subset_of(a.value)));
          if (immediacy && b.value.contains(V(a.process + 1))) CHECK(a.value.subset_of(b.value));
        }
      }
    }
  };
  for (int n = 1; n <= 3; ++n) {
    check(write_snapshot_task(n), false);
    check(immediate_snapshot_task(n), true);
  }
}

TEST_CASE("consensus-like set agreement") {
  Task t = k_set_agreement_task(2, 1, Value::int_set({0, 1}));
  Simplex mixed = make_simplex({vx(0, V(0)), vx(1, V(1))});
  const Complex* d = t.carrier(mixed);
  REQUIRE(d != nullptr);
  std::set<Value> decided;
  for (const auto& f : d->facets()) {
    CHECK(f.size() == 2);
    CHECK(vals(f).size() == 1);
    decided.insert(vals(f).elems().front());
  }
  CHECK(decided == std::set<Value>{V(0), V(1)});
}

TEST_CASE("satisfies_task") {
  CHECK(satisfies_task(demo_history("fig3"), write_snapshot_task(3)).ok);
  CHECK(satisfies_task(Execution(), validity_task(2, Value::int_set({1, 2}))).ok);
  auto bad = satisfies_task(demo_history("validity_bad"), validity_task(3, Value::int_set({1, 2, 3})));
  CHECK_FALSE(bad.ok);
  REQUIRE(bad.violating_prefix);
  CHECK(*bad.violating_prefix == 3);
  CHECK(demo_history("validity_bad")[*bad.violating_prefix + 1].is_invocation());

  Execution stray = parse_execution("P0 inv X.write_snapshot(1)\nP0 res X.write_snapshot -> {9}\n");
  try {
    satisfies_task(stray, write_snapshot_task(2));
    FAIL("expected UnknownVertex");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::UnknownVertex);
  }
  Execution twice = parse_execution(
      "P0 inv X.write_snapshot(1)\nP0 res X.write_snapshot -> {1}\nP0 inv X.write_snapshot(1)\n");
  CHECK_THROWS_AS(satisfies_task(twice, write_snapshot_task(2)), Error);
}

TEST_CASE("input and output simplexes") {
  Execution e = demo_history("fig4");
  CHECK(input_simplex(e) == full_input(3));
  CHECK(output_simplex(e) == ws_facet({{1, 2}, {1, 2, 3}, {1, 2, 3}}));
}

TEST_CASE("a failing execution keeps failing when extended") {
  std::mt19937 rng(53);
  Task t = validity_task(3, Value::int_set({1, 2, 3}));
  oracle::Shape shape;
  shape.processes = 3;
  shape.operation = "validity";
  shape.invocations = [](ProcessId p) { return oracle::ints({p + 1}); };
  shape.responses = [](ProcessId) { return oracle::ints({1, 2, 3}); };
  int failures = 0;
  for (int i = 0; i < 2000; ++i) {
    Execution e = oracle::random_execution(rng, shape, 6);
    auto ps = prefixes(e);
    bool failed = false;
    for (const auto& p : ps) {
      bool ok = satisfies_task(p, t).ok;
      if (failed) CHECK_FALSE(ok);
      failed = failed || !ok;
    }
    failures += failed;
  }
  CHECK(failures > 0);
}

TEST_CASE("task text round-trips") {
  for (const Task& t : {validity_task(2, Value::int_set({1, 2})), immediate_snapshot_task(2),
                        k_set_agreement_task(2, 1, Value::int_set({0, 1}))}) {
    const std::string text = format_task(t);
    Task back = parse_task(text);
    CHECK(format_task(back) == text);
    CHECK(validate_task(back).empty());
    CHECK(back.inputs == t.inputs);
    CHECK(back.outputs == t.outputs);
    CHECK(back.delta.size() == t.delta.size());
  }
  CHECK_THROWS_AS(parse_task("INPUTS\n{(0,1)\n"), Error);
}
