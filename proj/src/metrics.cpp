#include "nd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <unordered_map>

namespace nd {

namespace {

double ceil_ratio(double x) {
  // Guards against pow() rounding pushing an exact integer just above it.
  return std::ceil(x * (1.0 - 1e-12));
}

NodeId lca(const SpawnTree& t, NodeId a, NodeId b) {
  while (t[a].depth > t[b].depth) a = t[a].parent;
  while (t[b].depth > t[a].depth) b = t[b].parent;
  while (a != b) {
    a = t[a].parent;
    b = t[b].parent;
  }
  return a;
}

WorkSpan sp_rec(const Program& p, const Task& t, bool unit) {
  if (p.is_strand(t)) {
    const std::int64_t w = unit ? 1 : p.work(t);
    return {w, w};
  }
  const Split s = p.split(t);
  if (s.kind.tag == ConstructKind::Tag::Fire)
    throw Error(Error::Kind::Structure, "series-parallel span needs a program without fire constructs");
  const WorkSpan a = sp_rec(p, s.left, unit), b = sp_rec(p, s.right, unit);
  if (s.kind.tag == ConstructKind::Tag::Serial) return {a.work + b.work, a.span + b.span};
  return {a.work + b.work, std::max(a.span, b.span)};
}

}  // namespace

WorkSpan work_span(const Dag& dag, const std::vector<std::int64_t>& cost) {
  if (cost.size() != dag.size()) throw Error(Error::Kind::Invariant, "cost vector does not match DAG size");
  const auto order = topo_order(dag);
  std::vector<std::int64_t> finish(dag.size(), 0);
  WorkSpan ws;
  for (auto v : order) {
    std::int64_t start = 0;
    for (auto k = dag.in_off[v]; k < dag.in_off[v + 1]; ++k) start = std::max(start, finish[dag.in_adj[k]]);
    finish[v] = start + cost[v];
    ws.work += cost[v];
    ws.span = std::max(ws.span, finish[v]);
  }
  return ws;
}

std::vector<std::int64_t> strand_costs(const Program& p, const Expansion& e) {
  std::vector<std::int64_t> c(e.dag.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = p.work(e.tree[e.dag.strand_node[i]].task);
  return c;
}

std::vector<std::int64_t> unit_costs(const Dag& dag) { return std::vector<std::int64_t>(dag.size(), 1); }

WorkSpan sp_work_span(const Program& p, bool unit) { return sp_rec(p, p.root(), unit); }

TreeInfo annotate(const Program& p, const Expansion& e) {
  const SpawnTree& t = e.tree;
  const std::size_t n = t.size();
  TreeInfo info;
  info.root = t.root;
  info.size.assign(n, 0);
  info.work.assign(n, 0);
  info.lo.assign(n, 0);
  info.hi.assign(n, 0);

  // Word occurrences, grouped per word in strand order.
  std::vector<std::pair<std::uint64_t, std::uint32_t>> occ;
  Footprint fp;
  for (std::uint32_t s = 0; s < e.dag.size(); ++s) {
    const NodeId node = e.dag.strand_node[s];
    p.footprint(t[node].task, fp);
    std::vector<std::uint64_t> words;
    words.reserve(fp.reads.size() + fp.writes.size());
    std::set_union(fp.reads.begin(), fp.reads.end(), fp.writes.begin(), fp.writes.end(), std::back_inserter(words));
    for (auto w : words) occ.emplace_back(w, s);
    info.work[node] = p.work(t[node].task);
    info.lo[node] = s;
    info.hi[node] = s + 1;
  }
  std::sort(occ.begin(), occ.end());
  std::vector<std::int64_t> cnt(n, 0);
  for (std::size_t k = 0; k < occ.size(); ++k) {
    const NodeId a = e.dag.strand_node[occ[k].second];
    ++cnt[a];
    if (k + 1 < occ.size() && occ[k + 1].first == occ[k].first)
      --cnt[lca(t, a, e.dag.strand_node[occ[k + 1].second])];
  }

  // Post-order accumulation.
  std::vector<std::pair<NodeId, bool>> stack{{t.root, false}};
  while (!stack.empty()) {
    auto [v, done] = stack.back();
    stack.pop_back();
    const auto& nd = t[v];
    if (nd.state != NodeState::Internal) {
      info.size[v] = static_cast<std::uint64_t>(cnt[v]);
      continue;
    }
    if (!done) {
      stack.push_back({v, true});
      stack.push_back({nd.right, false});
      stack.push_back({nd.left, false});
      continue;
    }
    cnt[v] += cnt[nd.left] + cnt[nd.right];
    info.size[v] = static_cast<std::uint64_t>(cnt[v]);
    info.work[v] = info.work[nd.left] + info.work[nd.right];
    info.lo[v] = info.lo[nd.left];
    info.hi[v] = info.hi[nd.right];
  }
  return info;
}

PccReport maximal_decomposition(const Expansion& e, const TreeInfo& info, double M, double glue_overhead, NodeId at) {
  const SpawnTree& t = e.tree;
  PccReport r;
  r.M = M;
  r.at = at == kNoNode ? t.root : at;
  r.glue_overhead = glue_overhead;
  std::vector<NodeId> stack{at == kNoNode ? t.root : at};
  double sum = 0;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    const double s = static_cast<double>(info.size[v]);
    if (s <= M || t[v].state != NodeState::Internal) {
      r.maximal.push_back({v, info.size[v], info.lo[v], info.hi[v]});
      sum += s;
      continue;
    }
    ++r.glue_count;
    stack.push_back(t[v].right);
    stack.push_back(t[v].left);
  }
  r.qstar = sum + glue_overhead * static_cast<double>(r.glue_count);
  return r;
}

MaximalDag maximal_dag(const Expansion& e, const PccReport& pcc) {
  MaximalDag md;
  if (pcc.maximal.empty()) return md;
  if (!e.edges_built) {
    md.series_parallel = true;
    const SpawnTree& t = e.tree;
    std::unordered_map<NodeId, std::int32_t> index;
    for (std::size_t i = 0; i < pcc.maximal.size(); ++i) index[pcc.maximal[i].node] = static_cast<std::int32_t>(i);
    std::vector<std::pair<NodeId, bool>> stack{{pcc.at, false}};
    while (!stack.empty()) {
      auto [v, done] = stack.back();
      stack.pop_back();
      if (auto it = index.find(v); it != index.end()) {
        md.sp.push_back(it->second);
        continue;
      }
      if (done) {
        const auto tag = t[v].kind.tag;
        if (tag == ConstructKind::Tag::Fire)
          throw Error(Error::Kind::Structure, "tree-only expansion cannot resolve fire constructs; expand the DAG");
        md.sp.push_back(tag == ConstructKind::Tag::Serial ? MaximalDag::kSeq : MaximalDag::kPar);
        continue;
      }
      stack.push_back({v, true});
      stack.push_back({t[v].right, false});
      stack.push_back({t[v].left, false});
    }
    return md;
  }
  const std::uint32_t base = pcc.maximal.front().lo, top = pcc.maximal.back().hi;
  std::vector<std::uint32_t> owner(top - base);
  for (std::uint32_t i = 0; i < pcc.maximal.size(); ++i)
    for (auto s = pcc.maximal[i].lo; s < pcc.maximal[i].hi; ++s) owner[s - base] = i;
  const Dag& d = e.dag;
  for (auto u = base; u < top; ++u)
    for (auto k = d.out_off[u]; k < d.out_off[u + 1]; ++k) {
      const auto v = d.out_adj[k];
      if (v < base || v >= top) continue;
      const auto a = owner[u - base], b = owner[v - base];
      if (a != b) md.edges.emplace_back(a, b);
    }
  std::sort(md.edges.begin(), md.edges.end());
  md.edges.erase(std::unique(md.edges.begin(), md.edges.end()), md.edges.end());
  return md;
}

Combined combine(double S, double alpha, const std::vector<double>& task_size, const std::vector<double>& task_value,
                 const MaximalDag& dag) {
  const std::size_t k = task_size.size();
  std::vector<double> w(k);
  double total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    w[i] = ceil_ratio(task_value[i] / std::pow(task_size[i], alpha));
    total += task_value[i];
  }
  double depth = 0;
  if (dag.series_parallel) {
    std::vector<double> st;
    for (auto op : dag.sp) {
      if (op >= 0) {
        st.push_back(w[static_cast<std::size_t>(op)]);
        continue;
      }
      const double b = st.back();
      st.pop_back();
      st.back() = op == MaximalDag::kSeq ? st.back() + b : std::max(st.back(), b);
    }
    depth = st.empty() ? 0.0 : st.back();
  } else {
    // Edges go forward in serial-elision order, so index order is topological.
    std::vector<std::vector<std::uint32_t>> preds(k);
    for (auto [a, b] : dag.edges) preds[b].push_back(a);
    std::vector<double> best(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      double in = 0;
      for (auto a : preds[i]) in = std::max(in, best[a]);
      best[i] = in + w[i];
      depth = std::max(depth, best[i]);
    }
  }
  Combined c;
  const double sa = std::pow(S, alpha);
  c.depth_term = depth;
  c.work_term = ceil_ratio(total / sa);
  c.depth_dominated = c.depth_term > c.work_term;
  c.value = sa * std::max(c.depth_term, c.work_term);
  return c;
}

EccReport ecc(const TreeInfo& info, const PccReport& pcc, const MaximalDag& dag, double alpha) {
  EccReport r;
  r.M = pcc.M;
  r.alpha = alpha;
  r.qstar = pcc.qstar;
  const NodeId root = info.root;
  const double S = static_cast<double>(info.size[root]);
  if (pcc.maximal.size() == 1 && pcc.maximal[0].node == root) {
    r.qhat = S;
    r.work_term = r.depth_term = ceil_ratio(S / std::pow(S, alpha));
    r.effective_depth = r.work_term;
    return r;
  }
  std::vector<double> sz(pcc.maximal.size());
  for (std::size_t i = 0; i < sz.size(); ++i) sz[i] = static_cast<double>(pcc.maximal[i].size);
  const Combined c = combine(S, alpha, sz, sz, dag);
  r.qhat = c.value;
  r.depth_term = c.depth_term;
  r.work_term = c.work_term;
  r.depth_dominated = c.depth_dominated;
  r.effective_depth = ceil_ratio(r.qhat / std::pow(S, alpha));
  return r;
}

EccReport ecc(const Expansion& e, const TreeInfo& info, double M, double alpha, double glue_overhead) {
  const PccReport pcc = maximal_decomposition(e, info, M, glue_overhead);
  return ecc(info, pcc, maximal_dag(e, pcc), alpha);
}

AlphaGrid AlphaGrid::standard(double max_M, double step) {
  AlphaGrid g;
  for (double m = 2; m <= max_M; m *= 2) g.M.push_back(m);
  const int k = static_cast<int>(std::lround(1.0 / step));
  for (int i = 0; i <= k; ++i) g.alpha.push_back(static_cast<double>(i) / k);
  return g;
}

ParallelizabilityEstimate estimate_alpha_max(const Expansion& e, const TreeInfo& info, const AlphaGrid& grid) {
  ParallelizabilityEstimate est;
  est.c_U = grid.c_U;
  est.M_U = grid.M_U;
  struct Level {
    PccReport pcc;
    MaximalDag dag;
  };
  std::vector<Level> levels;
  for (double M : grid.M) {
    if (M <= grid.M_U) continue;
    Level l;
    l.pcc = maximal_decomposition(e, info, M);
    l.dag = maximal_dag(e, l.pcc);
    levels.push_back(std::move(l));
  }
  est.alpha_max = 0;
  for (double a : grid.alpha) {
    for (const auto& l : levels) {
      const EccReport r = ecc(info, l.pcc, l.dag, a);
      if (r.qhat > grid.c_U * l.pcc.qstar) {
        est.binding_alpha = a;
        est.binding_M = l.pcc.M;
        return est;
      }
    }
    est.alpha_max = a;
  }
  return est;
}

namespace {

bool pow2_ratio(double x) {
  if (!(x > 0)) return false;
  const double l = std::log2(x);
  return std::abs(l - std::round(l)) < 1e-9;
}

double mm_rec(double S, double M, double alpha, double c) {
  if (S <= M) return S;
  return c * std::pow(S, alpha) + std::max(std::pow(4.0, alpha), 8.0) * mm_rec(S / 4, M, alpha, c);
}

double trs_rec(double S, double M, double alpha, double c) {
  if (S <= M) return S;
  return c * std::pow(S, alpha) + 2 * std::max(std::pow(4.0, alpha), 2.0) * trs_rec(S / 4, M, alpha, c) +
         2 * mm_rec(S / 2, M, alpha, c);
}

}  // namespace

double closed_form_mm_ecc(double N, double M, double alpha, double c) {
  if (!pow2_ratio(3 * N / M) || 3 * N < M)
    throw Error(Error::Kind::Config, "closed-form MM needs 3N a power-of-two multiple of M");
  return mm_rec(3 * N, M, alpha, c);
}

double closed_form_trs_ecc(double N, double M, double alpha, double c) {
  if (!pow2_ratio(1.5 * N / M) || 1.5 * N < M)
    throw Error(Error::Kind::Config, "closed-form TRS needs 3N/2 a power-of-two multiple of M");
  return trs_rec(1.5 * N, M, alpha, c);
}

double alpha_max_mm_formula(double M, double c) { return 1.0 - std::log(1.0 + c) / std::log(M); }

double alpha_max_trs_formula(double N, double M, double c) {
  return 1.0 - std::log(1.0 + c) / std::log(std::min(N / M, M));
}

void write_complexity_header(std::ostream& os) {
  os << "algorithm,n,base,model,M,alpha,T1,Tinf,qstar,qhat,dominant\n";
}

void write_complexity_row(std::ostream& os, const ComplexityRow& r) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::defaultfloat << r.algorithm << ',' << r.n << ',' << r.base << ',' << r.model << ','
     << std::setprecision(17) << r.M << ',' << std::setprecision(6) << r.alpha << ',' << r.t1 << ',' << r.tinf
     << ',' << std::setprecision(17) << r.qstar << ',' << r.qhat << ',' << r.dominant << '\n';
  os.flags(flags);
  os.precision(prec);
}

}  // namespace nd
