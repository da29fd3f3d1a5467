#include "nd/drs.hpp"

#include <algorithm>
#include <ostream>

namespace nd {

Pedigree SpawnTree::pedigree(NodeId n) const {
  Pedigree p;
  while (nodes[n].parent != kNoNode) {
    NodeId par = nodes[n].parent;
    p.steps.push_back(nodes[par].left == n ? 1 : 2);
    n = par;
  }
  std::reverse(p.steps.begin(), p.steps.end());
  return p;
}

NodeId SpawnTree::at(NodeId anchor, const Pedigree& p) const {
  NodeId n = anchor;
  for (auto s : p.steps) {
    if (n == kNoNode || nodes[n].state != NodeState::Internal) return kNoNode;
    n = child(n, s);
  }
  return n;
}

std::vector<NodeId> SpawnTree::leaves_in_order() const {
  std::vector<NodeId> out;
  if (root == kNoNode) return out;
  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    if (nodes[n].state != NodeState::Internal) {
      out.push_back(n);
    } else {
      stack.push_back(nodes[n].right);
      stack.push_back(nodes[n].left);
    }
  }
  return out;
}

bool SpawnTree::is_ancestor(NodeId a, NodeId n) const {
  while (n != kNoNode) {
    if (n == a) return true;
    if (nodes[n].depth <= nodes[a].depth) return false;
    n = nodes[n].parent;
  }
  return false;
}

void Dag::build_adjacency() {
  const std::size_t n = size();
  out_off.assign(n + 1, 0);
  in_off.assign(n + 1, 0);
  for (auto [u, v] : edges) {
    ++out_off[u + 1];
    ++in_off[v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    out_off[i + 1] += out_off[i];
    in_off[i + 1] += in_off[i];
  }
  out_adj.assign(edges.size(), 0);
  in_adj.assign(edges.size(), 0);
  std::vector<std::uint32_t> oc(out_off.begin(), out_off.end() - 1), ic(in_off.begin(), in_off.end() - 1);
  for (auto [u, v] : edges) {
    out_adj[oc[u]++] = v;
    in_adj[ic[v]++] = u;
  }
}

std::vector<std::uint32_t> topo_order(const Dag& dag) {
  const std::size_t n = dag.size();
  std::vector<std::uint32_t> indeg(n), order;
  order.reserve(n);
  for (std::size_t v = 0; v < n; ++v) indeg[v] = static_cast<std::uint32_t>(dag.in_degree(static_cast<std::uint32_t>(v)));
  for (std::size_t v = 0; v < n; ++v)
    if (!indeg[v]) order.push_back(static_cast<std::uint32_t>(v));
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto u = order[i];
    for (auto k = dag.out_off[u]; k < dag.out_off[u + 1]; ++k)
      if (--indeg[dag.out_adj[k]] == 0) order.push_back(dag.out_adj[k]);
  }
  if (order.size() != n) throw Error(Error::Kind::Invariant, "algorithm DAG has a cycle");
  return order;
}

bool is_acyclic(const Dag& dag) {
  try {
    topo_order(dag);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::vector<std::uint32_t> ready_set(const Dag& dag, const std::vector<bool>& done) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t v = 0; v < dag.size(); ++v) {
    if (done[v]) continue;
    bool ok = true;
    for (auto k = dag.in_off[v]; k < dag.in_off[v + 1] && ok; ++k) ok = done[dag.in_adj[k]];
    if (ok) out.push_back(v);
  }
  return out;
}

Closure::Closure(const Dag& dag) : n_(dag.size()), words_((dag.size() + 63) / 64) {
  bits_.assign(n_ * words_, 0);
  auto order = topo_order(dag);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto u = *it;
    std::uint64_t* row = &bits_[u * words_];
    for (auto k = dag.out_off[u]; k < dag.out_off[u + 1]; ++k) {
      auto v = dag.out_adj[k];
      const std::uint64_t* vr = &bits_[v * words_];
      for (std::size_t w = 0; w < words_; ++w) row[w] |= vr[w];
      row[v >> 6] |= std::uint64_t{1} << (v & 63);
    }
  }
}

Rewriter::Rewriter(const Registry& reg, ExpandOptions opt) : reg_(reg), opt_(opt), rng_(opt.seed) {
  // Fail early on dangling labels.
  for (LabelId l = 0; l < static_cast<LabelId>(reg_.label_count()); ++l) (void)reg_.rules(l);
}

NodeId Rewriter::new_node(const Task& t, bool strand, NodeId parent) {
  SpawnNode n;
  n.parent = parent;
  n.state = strand ? NodeState::Strand : NodeState::Unspawned;
  n.depth = parent == kNoNode ? 0 : tree_.nodes[parent].depth + 1;
  n.task = t;
  tree_.nodes.push_back(n);
  park_head_.push_back(kNil);
  return static_cast<NodeId>(tree_.nodes.size() - 1);
}

NodeId Rewriter::add_root(const Task& t, bool strand) {
  if (tree_.root != kNoNode) throw Error(Error::Kind::Structure, "tree already has a root");
  tree_.root = new_node(t, strand, kNoNode);
  return tree_.root;
}

void Rewriter::charge() {
  if (++rewrites_ > opt_.budget)
    throw Error(Error::Kind::Divergence, "rewrite budget of " + std::to_string(opt_.budget) + " exhausted");
}

void Rewriter::emit(NodeId s, NodeId d, LabelId label, std::vector<DataflowArrow>* out) {
  DataflowArrow a{s, d, false, label};
  if (!seen_.insert(a).second) return;
  queue_.push_back(a);
  if (opt_.record_arrows) log_.push_back(a);
  if (out) out->push_back(a);
}

void Rewriter::park(NodeId n, const Pending& p) {
  Pending q = p;
  q.next = park_head_[n];
  pend_.push_back(q);
  park_head_[n] = static_cast<std::uint32_t>(pend_.size() - 1);
  ++parked_count_;
}

void Rewriter::unpark(NodeId n) {
  std::uint32_t idx = park_head_[n];
  park_head_[n] = kNil;
  while (idx != kNil) {
    Pending p = pend_[idx];
    idx = p.next;
    --parked_count_;
    if (p.rule == kWhole)
      process({p.s, p.d, false, p.set});
    else
      resolve(p, nullptr);
  }
}

void Rewriter::resolve(Pending p, std::vector<DataflowArrow>* out) {
  const auto& r = reg_.rules(p.set)[p.rule];
  const bool clamp = opt_.below_base == BelowBasePolicy::Clamp || p.set == kSerialId;
  auto walk = [&](NodeId& node, std::uint8_t& pos, const Pedigree& path) -> bool {
    while (pos < path.size()) {
      const auto& nd = tree_.nodes[node];
      if (nd.state == NodeState::Internal) {
        node = tree_.child(node, path[pos]);
        ++pos;
      } else if (nd.state == NodeState::Unspawned) {
        return false;
      } else if (clamp) {
        pos = static_cast<std::uint8_t>(path.size());
      } else {
        throw Error(Error::Kind::BelowBase,
                    "rule addresses below base case: " + reg_.name(p.set) + ": +" + r.src.str() + " -> -" +
                        r.dst.str() + " via " + reg_.name(r.label) + " (at node " + tree_.pedigree(node).str() + ")");
      }
    }
    return true;
  };
  if (!walk(p.s, p.spos, r.src)) {
    park(p.s, p);
    return;
  }
  if (!walk(p.d, p.dpos, r.dst)) {
    park(p.d, p);
    return;
  }
  emit(p.s, p.d, r.label, out);
}

std::optional<DataflowArrow> Rewriter::finalize_leaf_arrow(const DataflowArrow& a) const {
  if (a.label == kSerialId || !reg_.rules(a.label).empty()) return DataflowArrow{a.src, a.dst, true, a.label};
  return std::nullopt;
}

void Rewriter::process(const DataflowArrow& a) {
  charge();
  const auto ss = tree_.nodes[a.src].state;
  const auto ds = tree_.nodes[a.dst].state;
  if (ss == NodeState::Strand && ds == NodeState::Strand) {
    if (auto f = finalize_leaf_arrow(a)) solid_.insert((static_cast<std::uint64_t>(f->src) << 32) | f->dst);
    return;
  }
  if (ss == NodeState::Internal || ds == NodeState::Internal) {
    const auto& rules = reg_.rules(a.label);
    for (std::size_t i = 0; i < rules.size(); ++i)
      resolve({a.src, a.dst, a.label, static_cast<std::uint16_t>(i), 0, 0, kNil}, nullptr);
    return;
  }
  park(ss == NodeState::Unspawned ? a.src : a.dst, {a.src, a.dst, a.label, kWhole, 0, 0, kNil});
}

std::vector<DataflowArrow> Rewriter::refine_arrow(const DataflowArrow& a) {
  if (a.solid) throw Error(Error::Kind::Structure, "refine_arrow needs a dashed arrow");
  if (tree_.nodes[a.src].state != NodeState::Internal && tree_.nodes[a.dst].state != NodeState::Internal)
    throw Error(Error::Kind::Structure, "refine_arrow needs an internal endpoint");
  charge();
  std::vector<DataflowArrow> out;
  const auto& rules = reg_.rules(a.label);
  for (std::size_t i = 0; i < rules.size(); ++i)
    resolve({a.src, a.dst, a.label, static_cast<std::uint16_t>(i), 0, 0, kNil}, &out);
  return out;
}

void Rewriter::spawn(NodeId leaf, Construct kind, const Task& l, bool l_strand, const Task& r, bool r_strand) {
  if (leaf >= tree_.nodes.size() || tree_.nodes[leaf].state != NodeState::Unspawned)
    throw Error(Error::Kind::Structure, "spawn on a node that is not a spawnable leaf");
  if (kind.tag == ConstructKind::Tag::Fire && (kind.label < 0 || kind.label >= static_cast<LabelId>(reg_.label_count())))
    throw Error(Error::Kind::Registry, "fire construct with unknown label");
  NodeId a = new_node(l, l_strand, leaf);
  NodeId b = new_node(r, r_strand, leaf);
  auto& n = tree_.nodes[leaf];
  n.left = a;
  n.right = b;
  n.state = NodeState::Internal;
  n.kind = kind;
  if (kind.tag == ConstructKind::Tag::Serial) emit(a, b, kSerialId, nullptr);
  if (kind.tag == ConstructKind::Tag::Fire) emit(a, b, kind.label, nullptr);
  unpark(leaf);
}

void Rewriter::drain() {
  while (queue_head_ < queue_.size()) {
    DataflowArrow a;
    if (opt_.random_order) {
      std::uniform_int_distribution<std::size_t> pick(queue_head_, queue_.size() - 1);
      auto k = pick(rng_);
      std::swap(queue_[k], queue_[queue_head_]);
    }
    a = queue_[queue_head_++];
    process(a);
    if (queue_head_ > 4096 && queue_head_ * 2 > queue_.size()) {
      queue_.erase(queue_.begin(), queue_.begin() + static_cast<std::ptrdiff_t>(queue_head_));
      queue_head_ = 0;
    }
  }
}

void Rewriter::run(const Program& prog) {
  if (tree_.root == kNoNode) {
    auto t = prog.root();
    add_root(t, prog.is_strand(t));
  }
  std::vector<NodeId> frontier;
  for (NodeId n = 0; n < tree_.nodes.size(); ++n)
    if (tree_.nodes[n].state == NodeState::Unspawned) frontier.push_back(n);
  std::size_t head = 0;
  std::bernoulli_distribution coin(0.5);
  for (;;) {
    const bool arrows = queue_head_ < queue_.size();
    const bool leaves = head < frontier.size();
    if (!arrows && !leaves) break;
    if (arrows && (!leaves || !opt_.random_order || coin(rng_))) {
      if (opt_.random_order) {
        std::uniform_int_distribution<std::size_t> pick(queue_head_, queue_.size() - 1);
        std::swap(queue_[pick(rng_)], queue_[queue_head_]);
      }
      const DataflowArrow a = queue_[queue_head_++];
      process(a);
      if (queue_head_ > 4096 && queue_head_ * 2 > queue_.size()) {
        queue_.erase(queue_.begin(), queue_.begin() + static_cast<std::ptrdiff_t>(queue_head_));
        queue_head_ = 0;
      }
      continue;
    }
    if (opt_.random_order) {
      std::uniform_int_distribution<std::size_t> pick(head, frontier.size() - 1);
      std::swap(frontier[pick(rng_)], frontier[head]);
    }
    NodeId leaf = frontier[head++];
    const Task t = tree_.nodes[leaf].task;
    Split sp = prog.split(t);
    bool ls = prog.is_strand(sp.left), rs = prog.is_strand(sp.right);
    spawn(leaf, sp.kind, sp.left, ls, sp.right, rs);
    const auto& n = tree_.nodes[leaf];
    if (!ls) frontier.push_back(n.left);
    if (!rs) frontier.push_back(n.right);
    if (head > 4096 && head * 2 > frontier.size()) {
      frontier.erase(frontier.begin(), frontier.begin() + static_cast<std::ptrdiff_t>(head));
      head = 0;
    }
  }
  if (parked_count_)
    throw Error(Error::Kind::Divergence, std::to_string(parked_count_) + " rule applications never resolved");
}

Dag Rewriter::build_dag() const {
  Dag dag;
  dag.strand_node = tree_.leaves_in_order();
  dag.node_strand.assign(tree_.nodes.size(), -1);
  for (std::size_t i = 0; i < dag.strand_node.size(); ++i)
    dag.node_strand[dag.strand_node[i]] = static_cast<std::int32_t>(i);
  dag.edges.reserve(solid_.size());
  for (auto key : solid_) {
    auto s = static_cast<NodeId>(key >> 32), d = static_cast<NodeId>(key & 0xffffffffu);
    dag.edges.emplace_back(dag.node_strand[s], dag.node_strand[d]);
  }
  std::sort(dag.edges.begin(), dag.edges.end());
  dag.build_adjacency();
  return dag;
}

Expansion expand_full(const Program& prog, const ExpandOptions& opt) {
  Rewriter rw(prog.registry(), opt);
  rw.run(prog);
  Expansion e;
  e.dag = rw.build_dag();
  e.rewrites = rw.rewrites();
  e.arrow_log = rw.arrow_log();
  e.tree = std::move(rw.tree_mut());
  if (!is_acyclic(e.dag)) throw Error(Error::Kind::Invariant, prog.name() + ": expanded DAG has a cycle");
  return e;
}

Expansion expand_tree(const Program& prog) {
  Expansion e;
  SpawnTree& t = e.tree;
  auto add = [&](const Task& task, NodeId parent) {
    SpawnNode n;
    n.parent = parent;
    n.state = prog.is_strand(task) ? NodeState::Strand : NodeState::Unspawned;
    n.depth = parent == kNoNode ? 0 : t.nodes[parent].depth + 1;
    n.task = task;
    t.nodes.push_back(n);
    return static_cast<NodeId>(t.nodes.size() - 1);
  };
  t.root = add(prog.root(), kNoNode);
  std::vector<NodeId> stack{t.root};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (t.nodes[v].state == NodeState::Strand) continue;
    const Split sp = prog.split(t.nodes[v].task);
    const NodeId a = add(sp.left, v);
    const NodeId b = add(sp.right, v);
    auto& n = t.nodes[v];
    n.left = a;
    n.right = b;
    n.state = NodeState::Internal;
    n.kind = sp.kind;
    stack.push_back(b);
    stack.push_back(a);
  }
  e.dag.strand_node = t.leaves_in_order();
  e.dag.node_strand.assign(t.nodes.size(), -1);
  for (std::size_t i = 0; i < e.dag.strand_node.size(); ++i)
    e.dag.node_strand[e.dag.strand_node[i]] = static_cast<std::int32_t>(i);
  e.dag.build_adjacency();
  e.edges_built = false;
  return e;
}

void write_edge_list(std::ostream& os, const Dag& dag) {
  for (auto [u, v] : dag.edges) os << u << ' ' << v << '\n';
}

void write_manifest(std::ostream& os, const SpawnTree& tree, const Dag& dag) {
  for (std::size_t i = 0; i < dag.size(); ++i) {
    auto p = tree.pedigree(dag.strand_node[i]).str();
    os << i << ' ' << (p.empty() ? "." : p) << '\n';
  }
}

}  // namespace nd
