#include "doctest.h"

#include <cmath>
#include <numeric>
#include <sstream>

#include "nd/algorithms.hpp"
#include "nd/random_program.hpp"
#include "nd/sched.hpp"

using namespace nd;

namespace {

const char* kBinary = R"(# 32 processors
level 0: M=4 C=1
level 1: M=64 f=2 C=2
level 2: M=512 f=2 C=8
level 3: M=2048 f=2 C=32
memory: f=4
sigma=0.3333333333333333
k=0.5
)";

MachineConfig machine(const std::string& text) {
  std::istringstream in(text);
  return parse_machine(in);
}

bool config_error(const std::string& text) {
  try {
    machine(text);
  } catch (const Error& e) {
    return e.kind == Error::Kind::Config;
  }
  return false;
}

}  // namespace

TEST_SUITE("sched") {

TEST_CASE("machine shape") {
  const MachineConfig m = machine(kBinary);
  CHECK(m.h() == 4);
  CHECK(m.processors() == 32);
  CHECK(m.caches_at(3) == 4);
  CHECK(m.caches_at(1) == 16);
  CHECK(m.span_of(0) == 1);
  CHECK(m.span_of(1) == 2);
  CHECK(m.span_of(3) == 8);
  CHECK(m.warnings.empty());
}

TEST_CASE("machine config errors") {
  CHECK(config_error("level 0: M=x C=1\nlevel 1: M=8 f=2 C=1\nmemory: f=1\n"));
  CHECK(config_error("level 0: M=4 C=1\nlevel 1: M=8 f=2 C=1 Q=3\nmemory: f=1\n"));
  CHECK(config_error("level 0: M=4 C=1\nlevel 0: M=4 C=1\nmemory: f=1\n"));
  CHECK(config_error("level 0: M=4 C=1\nlevel 2: M=8 f=2 C=1\nmemory: f=1\n"));
  CHECK(config_error("level 0: M=4 C=1\nlevel 1: M=4 f=2 C=1\nmemory: f=1\n"));
  CHECK(config_error("level 0: M=4 C=1\nlevel 1: M=8 f=0 C=1\nmemory: f=1\n"));
  CHECK(config_error("level 0: M=4 C=1\nlevel 1: M=8 f=2 C=1\nmemory: f=1\nsigma=1.5\n"));
  CHECK(config_error("level 0: M=4 C=1\nlevel 1: M=8 f=2 C=1\nmemory: f=1\nk=0\n"));
  CHECK(config_error("bogus line\n"));
  const MachineConfig w = machine("level 0: M=4 C=1\nlevel 1: M=8 f=2 C=1\nmemory: f=1\nsigma=0.25\n");
  CHECK_FALSE(w.warnings.empty());
}

TEST_CASE("allocation examples") {
  const MachineConfig m = machine("level 0: M=4 C=1\nlevel 1: M=64 f=4 C=1\nmemory: f=1\n");
  CHECK(allocate(8, 1, m, 1.0) == 1);      // floor(4 * 24/64) = 1
  CHECK(allocate(16, 1, m, 1.0) == 3);     // floor(4 * 48/64) = 3
  CHECK(allocate(64.0 / 3, 1, m, 1.0) == 4);
  CHECK(allocate(1000, 1, m, 1.0) == 4);
  CHECK(allocate(1e-9, 1, m, 1.0) == 1);
  CHECK(allocate(16, 1, m, 0.5) == 3);     // floor(4 * sqrt(0.75)) = 3
}

TEST_CASE("overhead factor") {
  const MachineConfig one = machine("level 0: M=4 C=1\nmemory: f=1\n");
  CHECK(overhead_v(one, 1.0, 0.5) == 2);
  // f_j = (M_j / M_{j-1})^a and k = 1/2 make every factor 4.
  const MachineConfig m = machine(
      "level 0: M=4 C=1\nlevel 1: M=16 f=4 C=1\nlevel 2: M=64 f=4 C=1\nlevel 3: M=256 f=4 C=1\nmemory: f=1\n");
  CHECK(overhead_v(m, 1.0, 0.5) == doctest::Approx(2 * std::pow(4.0, 3)));
}

TEST_CASE("one processor runs the serial elision") {
  const MachineConfig m = load_machine(ND_MACHINE_DIR_DEFAULT "/serial.cfg");
  REQUIRE(m.processors() == 1);
  for (Algorithm a : kAllAlgorithms) {
    AlgorithmProgram p(a, 16, 1);
    const Expansion e = expand_full(p);
    const TreeInfo info = annotate(p, e);
    const SimMetrics s = simulate(p, e, info, m);
    std::vector<std::uint32_t> serial(e.dag.size());
    std::iota(serial.begin(), serial.end(), 0u);
    CHECK(s.order == serial);
    CHECK(s.numeric_ok);
    CHECK(s.idle[0] == 0);
  }
}

TEST_CASE("simulation is seed deterministic and numerically exact") {
  const MachineConfig m = machine(kBinary);
  AlgorithmProgram p(Algorithm::CHOLESKY, 16, 1);
  const Expansion e = expand_full(p);
  const TreeInfo info = annotate(p, e);
  SimOptions o;
  o.seed = 4;
  const SimMetrics a = simulate(p, e, info, m, o), b = simulate(p, e, info, m, o);
  CHECK(a.order == b.order);
  CHECK(a.makespan == b.makespan);
  CHECK(a.misses == b.misses);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    o.seed = seed;
    const SimMetrics s = simulate(p, e, info, m, o);
    CHECK(s.numeric_ok);
    CHECK(s.makespan >= s.lb);
  }
}

TEST_CASE("a program that fits loads each word once") {
  AlgorithmProgram p(Algorithm::TRS, 8, 1);
  const Expansion e = expand_full(p);
  const TreeInfo info = annotate(p, e);
  const auto S = info.size[info.root];
  std::ostringstream cfg;
  cfg << "level 0: M=4 C=1\nlevel 1: M=" << 4 * S << " f=2 C=4\nlevel 2: M=" << 16 * S << " f=2 C=16\nmemory: f=1\n";
  const SimMetrics s = simulate(p, e, info, machine(cfg.str()));
  CHECK(s.misses[1] == S);
  CHECK(s.misses[2] == S);
}

TEST_CASE("misses stay below Q*") {
  const MachineConfig m = machine(kBinary);
  for (Algorithm a : kAllAlgorithms) {
    AlgorithmProgram p(a, 16, 1);
    const Expansion e = expand_full(p);
    const TreeInfo info = annotate(p, e);
    const SimMetrics s = simulate(p, e, info, m);
    for (int j = 0; j < m.h(); ++j)
      CHECK(static_cast<double>(s.misses[j]) <= maximal_decomposition(e, info, m.sigma * m.levels[j].M).qstar);
  }
}

TEST_CASE("trace covers every strand") {
  const MachineConfig m = machine(kBinary);
  const RandomTreeProgram p(5, 7);
  const Expansion e = expand_full(p);
  const TreeInfo info = annotate(p, e);
  SimOptions o;
  o.trace = true;
  const SimMetrics s = simulate(p, e, info, m, o);
  std::size_t starts = 0, finishes = 0;
  for (const auto& ev : s.trace) {
    starts += ev.kind == TraceEvent::Kind::Start;
    finishes += ev.kind == TraceEvent::Kind::Finish;
  }
  CHECK(starts == e.dag.size());
  CHECK(finishes == e.dag.size());
  std::ostringstream os;
  write_trace(os, s.trace);
  CHECK(os.str().find(" start ") != std::string::npos);
}

TEST_CASE("simulation needs DAG edges") {
  AlgorithmProgram p(Algorithm::MM, 8, 1);
  const Expansion e = expand_tree(p);
  CHECK_THROWS_AS(simulate(p, e, annotate(p, e), machine(kBinary)), Error);
}

TEST_CASE("latency-added work splits by level") {
  const MachineConfig m = machine(kBinary);
  AlgorithmProgram p(Algorithm::MM, 16, 1);
  const Expansion e = expand_full(p);
  const TreeInfo info = annotate(p, e);
  const SimMetrics s = simulate(p, e, info, m);
  const LatencyAddedWork w = latency_added_effective_work(e, info, m, s, 0.0);
  // With alpha = 0 every quantity is a plain sum of strand costs.
  double busy = 0, parts = 0;
  for (double b : s.busy) busy += b;
  for (double x : w.per_level) parts += x;
  CHECK(w.total == doctest::Approx(busy));
  CHECK(parts == doctest::Approx(busy));
}

}
