// Parallel memory hierarchy machine model, space-bounded scheduler and a
// discrete-event simulation of it.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nd/drs.hpp"
#include "nd/metrics.hpp"
#include "nd/program.hpp"

namespace nd {

struct CacheLevel {
  double M = 0;     // words
  int f = 1;        // number of level i-1 subclusters below one cache
  double C = 0;     // cost of a miss at this level
};

// levels[0] is the register level (M_0, C_0; f unused). levels[1..h-1] are
// caches. Memory sits above level h-1 with fanout memory_f.
struct MachineConfig {
  std::vector<CacheLevel> levels;
  int memory_f = 1;
  double sigma = 1.0 / 3.0;
  double k = 0.5;
  std::vector<std::string> warnings;

  int h() const { return static_cast<int>(levels.size()); }
  int processors() const;
  // Number of caches at level i (1 <= i <= h-1); level h is memory.
  int caches_at(int i) const;
  // Processors below one level-i cache (level 0: 1).
  int span_of(int i) const;
  double beta() const;
  void validate();  // throws Error(Config)
};

// Format: `level i: M=<words> f=<fanout> C=<cost>`, `memory: f=<fanout>`,
// `sigma=<x>`, `k=<x>`; `#` starts a comment. Level 0 takes M and C only.
MachineConfig parse_machine(std::istream& in);
MachineConfig load_machine(const std::string& path);
std::string describe(const MachineConfig& m);

// g_i(S) = min{f_i, max{1, floor(f_i (3S/M_i)^a)}}.
int allocate(double S, int level, const MachineConfig& m, double alpha_prime);
double overhead_v(const MachineConfig& m, double alpha_prime, double k);
// sum_i Q*(sigma M_i) C_i / p.
double lb_time(const Expansion& e, const TreeInfo& info, const MachineConfig& m);

struct TraceEvent {
  enum class Kind : std::uint8_t { Anchor, Unroll, Start, Finish, Release };
  double time = 0;
  int proc = 0;
  Kind kind = Kind::Start;
  NodeId node = kNoNode;
  int level = 0;
};
void write_trace(std::ostream& os, const std::vector<TraceEvent>& trace);

struct SimOptions {
  double alpha_prime = 1.0;
  std::uint64_t seed = 0;
  bool trace = false;
  bool check_numeric = true;  // compare with serial elision
};

struct SimMetrics {
  std::vector<std::uint64_t> misses;  // per level 0..h-1, word loads
  std::vector<std::uint64_t> glue;    // per level, glue-node charges
  double makespan = 0;
  std::vector<double> busy;           // per processor
  std::vector<double> idle;
  double total_busy = 0;
  double lb = 0;
  std::uint64_t anchors = 0, unrolls = 0;
  std::vector<double> max_occupancy;  // per level, largest fraction of sigma*M reserved
  bool numeric_ok = true;
  double numeric_error = 0;
  // Per strand and level cost assignment, used for latency-added work.
  // rho[j][s]: j = 0 carries W(s) plus the level-0 charges.
  std::vector<std::vector<double>> rho;
  std::vector<std::uint32_t> order;  // strands in start order
  std::vector<TraceEvent> trace;
};

// Throws Error(Invariant) on a boundedness, anchoring or readiness
// violation and on deadlock (the message carries a dump of the scheduler
// state). The expansion must carry its DAG edges.
SimMetrics simulate(const Program& p, const Expansion& e, const TreeInfo& info, const MachineConfig& m,
                    const SimOptions& opt = {});

struct LatencyAddedWork {
  double total = 0;              // W-hat from rho = sum of rho_j
  std::vector<double> per_level;  // W-hat^(j)
  double S = 0, alpha = 0;
};
LatencyAddedWork latency_added_effective_work(const Expansion& e, const TreeInfo& info, const MachineConfig& m,
                                              const SimMetrics& sim, double alpha);

}  // namespace nd
