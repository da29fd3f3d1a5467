#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include "nd/algorithms.hpp"

namespace nd {

State serial_elision(const Program& p, std::uint64_t seed) {
  State s = p.make_state(seed);
  std::vector<Task> stack{p.root()};
  while (!stack.empty()) {
    Task t = stack.back();
    stack.pop_back();
    if (p.is_strand(t)) {
      p.execute(t, s);
      continue;
    }
    Split sp = p.split(t);
    stack.push_back(sp.right);
    stack.push_back(sp.left);
  }
  return s;
}

State execute_order(const Program& p, const Expansion& e, const std::vector<std::uint32_t>& order, std::uint64_t seed) {
  State s = p.make_state(seed);
  for (std::uint32_t v : order) p.execute(e.tree[e.dag.strand_node[v]].task, s);
  return s;
}

std::vector<std::uint32_t> random_topological_order(const Dag& dag, std::mt19937_64& rng) {
  const std::size_t n = dag.size();
  std::vector<std::uint32_t> indeg(n), ready, order;
  order.reserve(n);
  for (std::uint32_t v = 0; v < n; ++v) {
    indeg[v] = static_cast<std::uint32_t>(dag.in_degree(v));
    if (indeg[v] == 0) ready.push_back(v);
  }
  while (!ready.empty()) {
    std::size_t k = std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(rng);
    std::swap(ready[k], ready.back());
    std::uint32_t v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (std::uint32_t k2 = dag.out_off[v]; k2 < dag.out_off[v + 1]; ++k2)
      if (--indeg[dag.out_adj[k2]] == 0) ready.push_back(dag.out_adj[k2]);
  }
  if (order.size() != n) throw Error(Error::Kind::Invariant, "cycle in algorithm DAG");
  return order;
}

double max_relative_error(const State& ref, const State& got) {
  if (ref.f.size() != got.f.size() || ref.i.size() != got.i.size())
    throw Error(Error::Kind::Invariant, "state shapes differ");
  double err = 0.0;
  for (std::size_t a = 0; a < ref.f.size(); ++a) {
    const auto& x = ref.f[a];
    const auto& y = got.f[a];
    if (x.size() != y.size()) throw Error(Error::Kind::Invariant, "state shapes differ");
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double d = std::abs(x[k] - y[k]);
      if (std::isnan(d)) return std::numeric_limits<double>::infinity();
      err = std::max(err, d / scale);
    }
  }
  for (std::size_t a = 0; a < ref.i.size(); ++a)
    if (ref.i[a] != got.i[a]) return std::numeric_limits<double>::infinity();
  return err;
}

bool bit_identical(const State& a, const State& b) {
  if (a.i != b.i || a.f.size() != b.f.size()) return false;
  for (std::size_t k = 0; k < a.f.size(); ++k) {
    if (a.f[k].size() != b.f[k].size()) return false;
    if (!std::equal(a.f[k].begin(), a.f[k].end(), b.f[k].begin(),
                    [](double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; }))
      return false;
  }
  return true;
}

OraclePairs dependency_oracle(const Program& p, const Expansion& e, bool reduced) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  Footprint fp;
  if (reduced) {
    struct Word {
      std::int64_t writer = -1;
      std::vector<std::uint32_t> readers;
    };
    std::unordered_map<std::uint64_t, Word> words;
    for (std::uint32_t b = 0; b < e.dag.size(); ++b) {
      p.footprint(e.tree[e.dag.strand_node[b]].task, fp);
      for (std::uint64_t w : fp.reads) {
        Word& st = words[w];
        if (st.writer >= 0 && static_cast<std::uint32_t>(st.writer) != b)
          out.emplace_back(static_cast<std::uint32_t>(st.writer), b);
      }
      for (std::uint64_t w : fp.writes) {
        Word& st = words[w];
        if (st.writer >= 0 && static_cast<std::uint32_t>(st.writer) != b)
          out.emplace_back(static_cast<std::uint32_t>(st.writer), b);
        for (std::uint32_t r : st.readers)
          if (r != b) out.emplace_back(r, b);
        st.writer = b;
        st.readers.clear();
      }
      for (std::uint64_t w : fp.reads) {
        Word& st = words[w];
        if (static_cast<std::uint32_t>(st.writer) != b) st.readers.push_back(b);
      }
    }
  } else {
    std::unordered_map<std::uint64_t, std::vector<std::pair<std::uint32_t, bool>>> words;
    for (std::uint32_t b = 0; b < e.dag.size(); ++b) {
      p.footprint(e.tree[e.dag.strand_node[b]].task, fp);
      std::vector<std::pair<std::uint64_t, bool>> acc;
      for (std::uint64_t w : fp.reads) acc.emplace_back(w, false);
      for (std::uint64_t w : fp.writes) acc.emplace_back(w, true);
      std::sort(acc.begin(), acc.end());
      for (std::size_t k = 0; k < acc.size(); ++k) {
        if (k + 1 < acc.size() && acc[k + 1].first == acc[k].first) continue;  // keep the write entry
        const std::uint64_t w = acc[k].first;
        const bool bw = acc[k].second;
        auto& list = words[w];
        for (const auto& [a, aw] : list)
          if (a != b && (aw || bw)) out.emplace_back(a, b);
        list.emplace_back(b, bw);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return {std::move(out)};
}

namespace {

std::string relative(const SpawnTree& t, NodeId anc, NodeId n) {
  std::vector<std::uint8_t> steps;
  for (NodeId x = n; x != anc; x = t[x].parent) {
    const NodeId par = t[x].parent;
    steps.push_back(t[par].left == x ? 1 : 2);
  }
  std::reverse(steps.begin(), steps.end());
  Pedigree p;
  p.steps = std::move(steps);
  return p.str();
}

}  // namespace

SoundnessReport check_soundness(const Program& p, const Expansion& e, const Registry& reg, std::size_t max_examples) {
  SoundnessReport rep;
  const OraclePairs op = dependency_oracle(p, e, false);
  rep.oracle_pairs = op.pairs.size();
  const Closure cl(e.dag);
  for (const auto& [a, b] : op.pairs) {
    if (cl.reaches(a, b)) continue;
    ++rep.missing;
    if (rep.examples.size() >= max_examples) continue;
    MissingDependency md;
    md.a = a;
    md.b = b;
    const NodeId na = e.dag.strand_node[a], nb = e.dag.strand_node[b];
    md.a_ped = e.tree.pedigree(na).str();
    md.b_ped = e.tree.pedigree(nb).str();
    const DataflowArrow* best = nullptr;
    std::uint32_t best_depth = 0;
    for (const auto& ar : e.arrow_log) {
      if (ar.solid) continue;
      if (!e.tree.is_ancestor(ar.src, na) || !e.tree.is_ancestor(ar.dst, nb)) continue;
      const std::uint32_t d = e.tree[ar.src].depth + e.tree[ar.dst].depth;
      if (!best || d > best_depth) {
        best = &ar;
        best_depth = d;
      }
    }
    if (best) {
      md.arrow = reg.name(best->label) + " " + e.tree.pedigree(best->src).str() + " => " +
                 e.tree.pedigree(best->dst).str() + " (source +" + relative(e.tree, best->src, na) + ", sink -" +
                 relative(e.tree, best->dst, nb) + ")";
    }
    rep.examples.push_back(std::move(md));
  }
  return rep;
}

std::size_t transitive_reduction_size(const Dag& dag) {
  const Closure cl(dag);
  std::size_t keep = 0;
  for (std::uint32_t u = 0; u < dag.size(); ++u) {
    for (std::uint32_t k = dag.out_off[u]; k < dag.out_off[u + 1]; ++k) {
      const std::uint32_t v = dag.out_adj[k];
      bool implied = false;
      for (std::uint32_t k2 = dag.out_off[u]; k2 < dag.out_off[u + 1] && !implied; ++k2) {
        const std::uint32_t w = dag.out_adj[k2];
        if (w != v && cl.reaches(w, v)) implied = true;
      }
      if (!implied) ++keep;
    }
  }
  return keep;
}

}  // namespace nd
