#include "doctest.h"

#include <algorithm>
#include <queue>
#include <sstream>

#include "nd/drs.hpp"
#include "nd/random_program.hpp"

using namespace nd;

namespace {

// Root = fire(label) of two parallel pairs of strands. Task ids:
// 0 root, 1 left, 2 right, 3..6 strands in order.
class TwoByTwo final : public Program {
 public:
  explicit TwoByTwo(const std::string& rules) : reg_(parse_registry(rules)) {}
  std::string name() const override { return "2x2"; }
  const Registry& registry() const override { return reg_; }
  Task root() const override { return {}; }
  bool is_strand(const Task& t) const override { return t.id >= 3; }
  Split split(const Task& t) const override {
    Split s;
    if (t.id == 0) {
      s.kind = Construct::fire(reg_.id("L"));
      s.left.id = 1;
      s.right.id = 2;
    } else {
      s.kind = Construct::parallel();
      s.left.id = 3 + 2 * (t.id - 1);
      s.right.id = 4 + 2 * (t.id - 1);
    }
    return s;
  }

 private:
  Registry reg_;
};

std::vector<std::pair<std::uint32_t, std::uint32_t>> sorted_edges(const Dag& d) {
  auto e = d.edges;
  std::sort(e.begin(), e.end());
  return e;
}

// Reachability by breadth-first search from every vertex.
std::vector<std::vector<bool>> bfs_closure(const Dag& d) {
  std::vector<std::vector<std::uint32_t>> adj(d.size());
  for (auto [a, b] : d.edges) adj[a].push_back(b);
  std::vector<std::vector<bool>> r(d.size(), std::vector<bool>(d.size(), false));
  for (std::uint32_t s = 0; s < d.size(); ++s) {
    std::queue<std::uint32_t> q;
    q.push(s);
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (auto v : adj[u])
        if (!r[s][v]) {
          r[s][v] = true;
          q.push(v);
        }
    }
  }
  return r;
}

}  // namespace

TEST_SUITE("drs") {

TEST_CASE("single fire rule between leaves") {
  const Expansion e = expand_full(TwoByTwo("L: +1 -> -2 via SERIAL"));
  CHECK(e.dag.size() == 4);
  using E = std::pair<std::uint32_t, std::uint32_t>;
  CHECK(sorted_edges(e.dag) == std::vector<E>{{0, 3}});
}

TEST_CASE("empty label gives no edges") {
  const Expansion e = expand_full(TwoByTwo("L:"));
  CHECK(e.dag.edges.empty());
}

TEST_CASE("rule pointing at a subtree reaches all of its strands") {
  // Source is the whole left half, sink the whole right half, SERIAL below.
  const Expansion e = expand_full(TwoByTwo("L: + -> - via SERIAL"));
  const Closure c(e.dag);
  for (std::uint32_t a : {0u, 1u})
    for (std::uint32_t b : {2u, 3u}) CHECK(c.reaches(a, b));
  CHECK_FALSE(c.reaches(0, 1));
  CHECK_FALSE(c.reaches(2, 3));
}

TEST_CASE("spawn tree pedigrees") {
  const Expansion e = expand_full(TwoByTwo("L:"));
  const auto leaves = e.tree.leaves_in_order();
  REQUIRE(leaves.size() == 4);
  CHECK(e.tree.pedigree(leaves[2]).str() == "2.1");
  CHECK(e.tree.at(e.tree.root, Pedigree{2, 1}) == leaves[2]);
  CHECK(e.tree.at(e.tree.root, Pedigree{2, 1, 1}) == kNoNode);
  CHECK(e.tree.is_ancestor(e.tree.root, leaves[3]));
  CHECK_FALSE(e.tree.is_ancestor(leaves[0], leaves[1]));
}

TEST_CASE("closure agrees with breadth-first reachability") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const RandomTreeProgram p(seed, 5);
    const Expansion e = expand_full(p);
    REQUIRE(is_acyclic(e.dag));
    const Closure c(e.dag);
    const auto r = bfs_closure(e.dag);
    for (std::uint32_t a = 0; a < e.dag.size(); ++a)
      for (std::uint32_t b = 0; b < e.dag.size(); ++b) REQUIRE(c.reaches(a, b) == r[a][b]);
  }
}

TEST_CASE("random rewrite order yields the same DAG") {
  const RandomTreeProgram p(7, 6);
  const Expansion a = expand_full(p);
  for (std::uint64_t seed : {1, 2, 3}) {
    ExpandOptions o;
    o.random_order = true;
    o.seed = seed;
    const Expansion b = expand_full(p, o);
    CHECK(sorted_edges(a.dag) == sorted_edges(b.dag));
  }
}

TEST_CASE("serial construct and fire(SERIAL) agree") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const RandomTreeProgram base(seed, 5);
    const RandomTreeProgram fire(base, RandomTreeProgram::Form::AsFire);
    CHECK(Closure(expand_full(base).dag) == Closure(expand_full(fire).dag));
  }
}

TEST_CASE("rewrite budget") {
  ExpandOptions o;
  o.budget = 3;
  try {
    expand_full(RandomTreeProgram(3, 6), o);
    FAIL("no throw");
  } catch (const Error& err) {
    CHECK(err.kind == Error::Kind::Divergence);
  }
}

TEST_CASE("topological order and ready set") {
  const Expansion e = expand_full(RandomTreeProgram(11, 5));
  const auto order = topo_order(e.dag);
  std::vector<std::size_t> pos(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  for (auto [a, b] : e.dag.edges) CHECK(pos[a] < pos[b]);
  std::vector<bool> done(e.dag.size(), false);
  for (auto v : ready_set(e.dag, done)) CHECK(e.dag.in_degree(v) == 0);
}

TEST_CASE("edge list export") {
  const Expansion e = expand_full(TwoByTwo("L: +1 -> -2 via SERIAL"));
  std::ostringstream os;
  write_edge_list(os, e.dag);
  CHECK(os.str().find("0 3") != std::string::npos);
}

}
