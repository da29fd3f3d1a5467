// Work/span, parallel cache complexity (Q*), effective cache complexity
// (Q-hat), parallelizability estimation and the closed-form recurrences for
// MM and TRS.
#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "nd/drs.hpp"
#include "nd/program.hpp"

namespace nd {

struct WorkSpan {
  std::int64_t work = 0;
  std::int64_t span = 0;
};

// Longest weighted path. cost has one entry per strand index.
WorkSpan work_span(const Dag& dag, const std::vector<std::int64_t>& cost);
std::vector<std::int64_t> strand_costs(const Program& p, const Expansion& e);
std::vector<std::int64_t> unit_costs(const Dag& dag);
// Series-parallel recursion straight over the program's spawn tree; no DAG
// is built. Throws Error(Structure) on a fire construct.
WorkSpan sp_work_span(const Program& p, bool unit = true);

// Per-node annotations of an expanded spawn tree.
struct TreeInfo {
  std::vector<std::uint64_t> size;  // distinct words touched in the subtree
  std::vector<std::int64_t> work;   // summed strand work
  std::vector<std::uint32_t> lo, hi;  // strands of the subtree are [lo, hi)
  NodeId root = kNoNode;
};
TreeInfo annotate(const Program& p, const Expansion& e);

struct MaximalTask {
  NodeId node;
  std::uint64_t size;
  std::uint32_t lo, hi;
};

struct PccReport {
  double M = 0;
  NodeId at = kNoNode;  // subtree root
  std::vector<MaximalTask> maximal;  // in serial-elision order
  std::uint64_t glue_count = 0;
  double glue_overhead = 1.0;
  double qstar = 0;
  double maximal_sum() const { return qstar - glue_overhead * static_cast<double>(glue_count); }
  double glue_fraction() const { return qstar > 0 ? glue_overhead * static_cast<double>(glue_count) / qstar : 0.0; }
};

// M-maximal decomposition of the subtree at `at` (default: the root).
// Leaves larger than M count as maximal tasks.
PccReport maximal_decomposition(const Expansion& e, const TreeInfo& info, double M, double glue_overhead = 1.0,
                                NodeId at = kNoNode);

// Dependencies between the maximal tasks of a decomposition. With a full
// expansion these are the projected strand edges (indices into pcc.maximal);
// with a tree-only expansion of a series-parallel program they are kept as a
// postfix expression: i >= 0 pushes task i, kSeq / kPar combine two operands.
struct MaximalDag {
  static constexpr std::int32_t kSeq = -1, kPar = -2;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::int32_t> sp;
  bool series_parallel = false;
};
MaximalDag maximal_dag(const Expansion& e, const PccReport& pcc);

struct EccReport {
  double M = 0;
  double alpha = 0;
  double qhat = 0;
  double qstar = 0;
  double depth_term = 0;  // longest chain of effective depths
  double work_term = 0;   // ceil(sum / S^alpha)
  bool depth_dominated = false;
  double effective_depth = 0;  // ceil(qhat / S^alpha)
};

// Combines per-task values the way both Q-hat and the latency-added work do:
// S^a * max(longest chain of ceil(v_i / S_i^a), ceil(sum v_i / S^a)).
struct Combined {
  double value = 0, depth_term = 0, work_term = 0;
  bool depth_dominated = false;
};
Combined combine(double S, double alpha, const std::vector<double>& task_size, const std::vector<double>& task_value,
                 const MaximalDag& dag);

EccReport ecc(const Expansion& e, const TreeInfo& info, double M, double alpha, double glue_overhead = 1.0);
// Same, reusing a decomposition and its edges (for grid sweeps).
EccReport ecc(const TreeInfo& info, const PccReport& pcc, const MaximalDag& dag, double alpha);

struct AlphaGrid {
  std::vector<double> M;      // cache sizes to test (only those > M_U count)
  std::vector<double> alpha;  // ascending
  double c_U = 4.0;
  double M_U = 64.0;
  static AlphaGrid standard(double max_M, double step = 0.05);
};

struct ParallelizabilityEstimate {
  double alpha_max = 0;
  double binding_alpha = -1;  // first grid alpha that fails, -1 if none fails
  double binding_M = 0;
  double c_U = 4, M_U = 64;
};
ParallelizabilityEstimate estimate_alpha_max(const Expansion& e, const TreeInfo& info, const AlphaGrid& grid);

// Closed-form recurrences. N = n*n words per matrix. c is the constant of
// the per-level term; 3N/M (MM) or 3N/(2M) (TRS) must be a power of two
// (>= 1/4), otherwise Error(Config).
double closed_form_mm_ecc(double N, double M, double alpha, double c = 1.0);
double closed_form_trs_ecc(double N, double M, double alpha, double c = 1.0);
double alpha_max_mm_formula(double M, double c = 1.0);
double alpha_max_trs_formula(double N, double M, double c = 1.0);

struct ComplexityRow {
  std::string algorithm;
  int n = 0, base = 0;
  std::string model;
  double M = 0, alpha = 0;
  std::int64_t t1 = 0, tinf = 0;
  double qstar = 0, qhat = 0;
  std::string dominant;
};
void write_complexity_header(std::ostream& os);
void write_complexity_row(std::ostream& os, const ComplexityRow& r);

}  // namespace nd
