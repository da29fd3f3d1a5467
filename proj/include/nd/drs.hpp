// Spawn tree and the DAG rewriting system (spawn rule + fire rule).
#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <unordered_set>
#include <vector>

#include "nd/core.hpp"
#include "nd/program.hpp"

namespace nd {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class NodeState : std::uint8_t { Unspawned, Internal, Strand };

struct SpawnNode {
  NodeId parent = kNoNode;
  NodeId left = kNoNode;
  NodeId right = kNoNode;
  NodeState state = NodeState::Unspawned;
  Construct kind;
  std::uint32_t depth = 0;
  Task task;
};

class SpawnTree {
 public:
  std::vector<SpawnNode> nodes;
  NodeId root = kNoNode;

  std::size_t size() const { return nodes.size(); }
  const SpawnNode& operator[](NodeId n) const { return nodes[n]; }
  bool is_leaf(NodeId n) const { return nodes[n].state != NodeState::Internal; }
  NodeId child(NodeId n, int step) const { return step == 1 ? nodes[n].left : nodes[n].right; }
  // Pedigree of n relative to the root.
  Pedigree pedigree(NodeId n) const;
  // Node at pedigree p under anchor, or kNoNode if the path leaves the tree.
  NodeId at(NodeId anchor, const Pedigree& p) const;
  // Leaves in depth-first left-to-right order (the serial elision).
  std::vector<NodeId> leaves_in_order() const;
  bool is_ancestor(NodeId a, NodeId n) const;  // a == n counts
};

struct DataflowArrow {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  bool solid = false;
  LabelId label = kParallelId;  // meaningful when dashed
  friend bool operator==(const DataflowArrow&, const DataflowArrow&) = default;
};

// Leaf-level algorithm DAG. Vertices are dense strand indices in
// serial-elision order.
struct Dag {
  std::vector<NodeId> strand_node;
  std::vector<std::int32_t> node_strand;  // tree node -> strand index or -1
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::uint32_t> out_off, out_adj, in_off, in_adj;

  std::size_t size() const { return strand_node.size(); }
  void build_adjacency();
  std::size_t out_degree(std::uint32_t v) const { return out_off[v + 1] - out_off[v]; }
  std::size_t in_degree(std::uint32_t v) const { return in_off[v + 1] - in_off[v]; }
};

// Throws Error(Invariant) on a cycle.
std::vector<std::uint32_t> topo_order(const Dag& dag);
bool is_acyclic(const Dag& dag);
std::vector<std::uint32_t> ready_set(const Dag& dag, const std::vector<bool>& done);

// Transitive closure as one bitset row per vertex.
class Closure {
 public:
  explicit Closure(const Dag& dag);
  bool reaches(std::uint32_t u, std::uint32_t v) const {
    return (bits_[u * words_ + (v >> 6)] >> (v & 63)) & 1u;
  }
  std::size_t size() const { return n_; }
  bool operator==(const Closure& o) const { return n_ == o.n_ && bits_ == o.bits_; }

 private:
  std::size_t n_ = 0, words_ = 0;
  std::vector<std::uint64_t> bits_;
};

enum class BelowBasePolicy { Strict, Clamp };

struct ExpandOptions {
  bool random_order = false;
  std::uint64_t seed = 0;
  std::uint64_t budget = 10'000'000;
  // SERIAL refinement always clamps at strands; this governs user labels.
  BelowBasePolicy below_base = BelowBasePolicy::Strict;
  bool record_arrows = false;
};

struct ArrowKeyHash {
  std::size_t operator()(const DataflowArrow& a) const noexcept {
    std::uint64_t h = (static_cast<std::uint64_t>(a.src) << 32) ^ a.dst;
    h ^= (static_cast<std::uint64_t>(a.label) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
    return static_cast<std::size_t>(h * 0xff51afd7ed558ccdull);
  }
};

// Incremental rewriting engine. Programs drive it through expand_full; tests
// can also drive spawn / refine by hand.
class Rewriter {
 public:
  Rewriter(const Registry& reg, ExpandOptions opt = {});

  NodeId add_root(const Task& t, bool strand);
  // Spawn rule. The leaf keeps its id, so arrows attached to it now attach
  // to the new internal node.
  void spawn(NodeId leaf, Construct kind, const Task& l, bool l_strand, const Task& r, bool r_strand);
  // Fire rule: consumes a dashed arrow and returns the dashed arrows it
  // produced right away. Rule applications that address a still-unspawned
  // leaf are parked on it and resumed when it spawns.
  std::vector<DataflowArrow> refine_arrow(const DataflowArrow& a);
  // Strand-to-strand case of the fire rule.
  std::optional<DataflowArrow> finalize_leaf_arrow(const DataflowArrow& a) const;

  // Processes queued dashed arrows until none are left.
  void drain();
  bool has_work() const { return !queue_.empty(); }
  std::size_t parked() const { return parked_count_; }

  const SpawnTree& tree() const { return tree_; }
  SpawnTree& tree_mut() { return tree_; }
  const std::unordered_set<std::uint64_t>& solid() const { return solid_; }
  const std::vector<DataflowArrow>& arrow_log() const { return log_; }
  std::uint64_t rewrites() const { return rewrites_; }

  // Expands every spawnable leaf using the program until only strands
  // remain and every arrow is final.
  void run(const Program& prog);
  Dag build_dag() const;

 private:
  struct Pending {
    NodeId s, d;
    LabelId set;
    std::uint16_t rule;  // kWhole: re-process the arrow (s, d, set)
    std::uint8_t spos, dpos;
    std::uint32_t next;
  };
  static constexpr std::uint16_t kWhole = 0xffff;
  static constexpr std::uint32_t kNil = 0xffffffffu;

  NodeId new_node(const Task& t, bool strand, NodeId parent);
  void emit(NodeId s, NodeId d, LabelId label, std::vector<DataflowArrow>* out);
  void resolve(Pending p, std::vector<DataflowArrow>* out);
  void park(NodeId n, const Pending& p);
  void unpark(NodeId n);
  void process(const DataflowArrow& a);
  void charge();

  const Registry& reg_;
  ExpandOptions opt_;
  SpawnTree tree_;
  std::vector<DataflowArrow> queue_;
  std::size_t queue_head_ = 0;
  std::unordered_set<DataflowArrow, ArrowKeyHash> seen_;
  std::unordered_set<std::uint64_t> solid_;
  std::vector<Pending> pend_;
  std::vector<std::uint32_t> park_head_;
  std::size_t parked_count_ = 0;
  std::vector<DataflowArrow> log_;
  std::uint64_t rewrites_ = 0;
  std::mt19937_64 rng_;
};

struct Expansion {
  SpawnTree tree;
  Dag dag;
  std::uint64_t rewrites = 0;
  std::vector<DataflowArrow> arrow_log;
  bool edges_built = true;  // false for expand_tree
};

Expansion expand_full(const Program& prog, const ExpandOptions& opt = {});
// Spawn tree and strand numbering only; the DAG has no edges. Enough for
// sizes and for series-parallel programs whose chains follow the tree.
Expansion expand_tree(const Program& prog);

// Line-oriented exports: "src dst" per edge, "id pedigree" per strand.
void write_edge_list(std::ostream& os, const Dag& dag);
void write_manifest(std::ostream& os, const SpawnTree& tree, const Dag& dag);

}  // namespace nd
