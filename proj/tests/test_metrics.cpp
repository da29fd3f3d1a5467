#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "nd/algorithms.hpp"
#include "nd/metrics.hpp"

using namespace nd;

namespace {

// Distinct words touched by strands [lo, hi), straight from the footprints.
std::uint64_t footprint_size(const Program& p, const Expansion& e, std::uint32_t lo, std::uint32_t hi) {
  std::set<std::uint64_t> words;
  Footprint fp;
  for (std::uint32_t s = lo; s < hi; ++s) {
    fp.clear();
    p.footprint(e.tree[e.dag.strand_node[s]].task, fp);
    words.insert(fp.reads.begin(), fp.reads.end());
    words.insert(fp.writes.begin(), fp.writes.end());
  }
  return words.size();
}

Dag chain_dag(std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
  Dag d;
  d.strand_node.resize(n);
  d.edges = std::move(edges);
  d.build_adjacency();
  return d;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("work and span on small DAGs") {
  const Dag d = chain_dag(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  const WorkSpan ws = work_span(d, {1, 5, 2, 1});
  CHECK(ws.work == 9);
  CHECK(ws.span == 7);
  const WorkSpan none = work_span(chain_dag(3, {}), {2, 3, 4});
  CHECK(none.span == 4);
}

TEST_CASE("tree recursion and DAG agree on NP span") {
  for (Algorithm a : kAllAlgorithms)
    for (int n : {4, 8, 16}) {
      AlgorithmProgram p(a, n, 2, {Model::NP});
      const Expansion e = expand_full(p);
      CAPTURE(p.name());
      CHECK(sp_work_span(p, true).span == work_span(e.dag, unit_costs(e.dag)).span);
      CHECK(sp_work_span(p, false).span == work_span(e.dag, strand_costs(p, e)).span);
      CHECK(sp_work_span(p, false).work == work_span(e.dag, strand_costs(p, e)).work);
    }
}

TEST_CASE("MM work is n cubed") {
  for (int n : {4, 8, 16}) {
    AlgorithmProgram p(Algorithm::MM, n, 2);
    const Expansion e = expand_full(p);
    CHECK(work_span(e.dag, strand_costs(p, e)).work == static_cast<std::int64_t>(n) * n * n);
  }
}

TEST_CASE("subtree sizes match footprint unions") {
  for (Algorithm a : kAllAlgorithms) {
    AlgorithmProgram p(a, 8, 1);
    const Expansion e = expand_full(p);
    const TreeInfo info = annotate(p, e);
    CAPTURE(p.name());
    for (NodeId v = 0; v < e.tree.size(); ++v)
      REQUIRE(info.size[v] == footprint_size(p, e, info.lo[v], info.hi[v]));
  }
  AlgorithmProgram mm(Algorithm::MM, 16, 4);
  const Expansion e = expand_tree(mm);
  CHECK(annotate(mm, e).size[e.tree.root] == 3u * 16 * 16);
}

TEST_CASE("maximal decomposition") {
  AlgorithmProgram p(Algorithm::TRS, 16, 1);
  const Expansion e = expand_tree(p);
  const TreeInfo info = annotate(p, e);
  const double S = static_cast<double>(info.size[info.root]);

  const PccReport whole = maximal_decomposition(e, info, S);
  CHECK(whole.maximal.size() == 1);
  CHECK(whole.glue_count == 0);
  CHECK(whole.qstar == S);

  // Below every strand size, each strand is its own task and every
  // internal node is glue.
  const PccReport tiny = maximal_decomposition(e, info, 1);
  CHECK(tiny.maximal.size() == e.dag.size());
  std::uint64_t internal = 0, strand_sum = 0;
  for (NodeId v = 0; v < e.tree.size(); ++v) {
    if (e.tree.is_leaf(v))
      strand_sum += info.size[v];
    else
      ++internal;
  }
  CHECK(tiny.glue_count == internal);
  CHECK(tiny.qstar == doctest::Approx(static_cast<double>(strand_sum + internal)));

  // Tasks are maximal: fit, and their parent does not.
  for (double M : {16.0, 64.0, 256.0}) {
    const PccReport r = maximal_decomposition(e, info, M);
    std::uint32_t next = 0;
    for (const auto& t : r.maximal) {
      CHECK(t.lo == next);
      next = t.hi;
      CHECK(t.size <= M);
      const NodeId par = e.tree[t.node].parent;
      if (par != kNoNode) CHECK(info.size[par] > M);
    }
    CHECK(next == e.dag.size());
  }
}

TEST_CASE("Q* does not grow with M") {
  for (Algorithm a : kAllAlgorithms) {
    AlgorithmProgram p(a, 32, 1);
    const Expansion e = expand_tree(p);
    const TreeInfo info = annotate(p, e);
    double prev = 1e300;
    for (double M = 4; M <= 4096; M *= 2) {
      const double q = maximal_decomposition(e, info, M).qstar;
      CHECK(q <= prev);
      prev = q;
    }
  }
}

TEST_CASE("combine examples") {
  MaximalDag chain;
  chain.edges = {{0, 1}};
  const Combined c = combine(16, 0.5, {4, 4}, {8, 8}, chain);
  CHECK(c.depth_term == 8);  // 8/2 + 8/2
  CHECK(c.work_term == 4);   // 16/4
  CHECK(c.value == 32);
  CHECK(c.depth_dominated);

  MaximalDag par;
  const Combined d = combine(16, 0.5, {4, 4}, {8, 8}, par);
  CHECK(d.value == 16);
  CHECK_FALSE(d.depth_dominated);

  MaximalDag sp;
  sp.series_parallel = true;
  sp.sp = {0, 1, MaximalDag::kPar, 2, MaximalDag::kSeq};
  const Combined s = combine(16, 0.5, {4, 4, 4}, {8, 16, 8}, sp);
  CHECK(s.depth_term == 12);  // max(4, 8) + 4
}

TEST_CASE("effective cache complexity invariants") {
  for (Algorithm a : kAllAlgorithms) {
    AlgorithmProgram p(a, 16, 1);
    const Expansion e = expand_full(p);
    const TreeInfo info = annotate(p, e);
    for (double M : {32.0, 128.0}) {
      const PccReport pcc = maximal_decomposition(e, info, M);
      CHECK(ecc(e, info, M, 0.0).qhat == doctest::Approx(pcc.maximal_sum()));
      // Not monotone in alpha (ceilings), but never below the plain sum.
      for (double al = 0; al <= 1.0001; al += 0.25) {
        const EccReport r = ecc(e, info, M, al);
        CHECK(r.qhat >= pcc.maximal_sum() * (1 - 1e-12));
        CHECK(r.qhat >= std::pow(static_cast<double>(info.size[info.root]), al) * (1 - 1e-12));
      }
    }
  }
}

TEST_CASE("ND exposes more parallelism than NP for TRS") {
  AlgorithmProgram nd(Algorithm::TRS, 32, 1), np(Algorithm::TRS, 32, 1, {Model::NP});
  const Expansion en = expand_full(nd), ep = expand_tree(np);
  const TreeInfo in = annotate(nd, en), ip = annotate(np, ep);
  CHECK(ecc(en, in, 64, 1.0).qhat < ecc(ep, ip, 64, 1.0).qhat);
}

TEST_CASE("closed forms") {
  const double N = 64.0 * 64.0;
  // alpha = 0 degenerates to the plain cache complexity recurrence, which
  // grows by 2 when M shrinks by 4 for MM.
  const double a = closed_form_mm_ecc(N, 3 * N / 16, 0.0), b = closed_form_mm_ecc(N, 3 * N / 64, 0.0);
  CHECK(b / a == doctest::Approx(2.0).epsilon(0.35));
  CHECK_THROWS_AS(closed_form_mm_ecc(N, 3 * N / 5, 0.5), Error);
  CHECK_THROWS_AS(closed_form_trs_ecc(N, 1000, 0.5), Error);
  CHECK(alpha_max_mm_formula(1 << 20) > alpha_max_trs_formula(N, 1 << 10));
}

TEST_CASE("complexity rows keep full precision") {
  std::ostringstream os;
  os.precision(3);
  ComplexityRow r;
  r.algorithm = "mm";
  r.n = 8;
  r.base = 1;
  r.model = "nd";
  r.M = 123456789.125;
  r.alpha = 0.35;
  r.qstar = 1.0 / 3.0;
  r.qhat = 2e20;
  r.dominant = "work";
  write_complexity_row(os, r);
  CHECK(os.str() == "mm,8,1,nd,123456789.125,0.35,0,0,0.33333333333333331,2e+20,work\n");
  CHECK(os.precision() == 3);
  std::ostringstream h;
  write_complexity_header(h);
  const std::string hs = h.str(), rs = os.str();
  CHECK(std::count(hs.begin(), hs.end(), ',') == std::count(rs.begin(), rs.end(), ','));
}

}
