#include "nd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <ostream>
#include <tuple>

#include "nd/metrics.hpp"

namespace nd {

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

const char* yn(bool b) { return b ? "true" : "false"; }

double ceil_ratio(double x) { return std::ceil(x * (1.0 - 1e-12)); }

struct Spans {
  WorkSpan weighted, unit;
};

}  // namespace

std::optional<Check> parse_check(const std::string& s) {
  if (s == "miss-bound") return Check::MissBound;
  if (s == "lb") return Check::LowerBound;
  if (s == "runtime") return Check::Runtime;
  if (s == "separation") return Check::Separation;
  if (s == "latency-work") return Check::LatencyWork;
  if (s == "numeric") return Check::Numeric;
  return std::nullopt;
}

std::string to_string(Check c) {
  switch (c) {
    case Check::MissBound: return "miss-bound";
    case Check::LowerBound: return "lb";
    case Check::Runtime: return "runtime";
    case Check::Separation: return "separation";
    case Check::LatencyWork: return "latency-work";
    case Check::Numeric: return "numeric";
  }
  return "?";
}

void ExperimentSpec::validate() const {
  if (algorithms.empty()) throw Error(Error::Kind::Config, "no algorithm given");
  if (n.empty()) throw Error(Error::Kind::Config, "no problem size given");
  if (models.empty()) throw Error(Error::Kind::Config, "no model given");
  for (int x : n)
    if (x < base || (x & (x - 1)) != 0 || base < 1 || (base & (base - 1)) != 0)
      throw Error(Error::Kind::Config, "n=" + std::to_string(x) + " must be a power of two >= base " +
                                           std::to_string(base));
  if (!checks.empty() && !machine) throw Error(Error::Kind::Config, "bound checks need --machine");
  for (double a : alpha)
    if (!(a >= 0 && a <= 1)) throw Error(Error::Kind::Config, "alpha must lie in [0,1]");
  for (double m : M)
    if (!(m > 0)) throw Error(Error::Kind::Config, "M must be positive");
}

std::string resolve_machine_path(const std::string& name) {
  namespace fs = std::filesystem;
  if (fs::exists(name)) return name;
  if (const char* dir = std::getenv("ND_MACHINE_DIR")) {
    for (const std::string& cand : {name, name + ".cfg"}) {
      const fs::path p = fs::path(dir) / cand;
      if (fs::exists(p)) return p.string();
    }
  }
  throw Error(Error::Kind::Config, "machine config '" + name + "' not found (also searched $ND_MACHINE_DIR)");
}

void write_experiment_header(std::ostream& os) {
  os << "algorithm,n,base,model,machine,M,alpha,T1,Tinf,span_unit,span_ratio_np_nd,qstar,qhat,dominant,level,"
        "misses,glue,makespan,lb_time,rt_bound,beta,alpha_max,miss_ok,lb_ok,rt_ok,sep_ok,latency_ok,numeric_ok\n";
}

ExperimentResult run_experiment(const ExperimentSpec& spec, std::ostream& csv) {
  spec.validate();
  ExperimentResult res;
  write_experiment_header(csv);
  auto wants = [&](Check c) { return std::find(spec.checks.begin(), spec.checks.end(), c) != spec.checks.end(); };

  // Unit spans of both models, for the NP/ND ratio column.
  std::map<std::tuple<int, int, int>, std::int64_t> unit_span_cache;
  auto unit_span = [&](Algorithm a, int n, Model m) {
    const auto key = std::make_tuple(static_cast<int>(a), n, static_cast<int>(m));
    if (auto it = unit_span_cache.find(key); it != unit_span_cache.end()) return it->second;
    AlgorithmProgram p(a, n, spec.base, {m, spec.rules});
    std::int64_t s = 0;
    if (m == Model::NP) {
      s = sp_work_span(p, true).span;
    } else {
      const Expansion e = expand_full(p);
      s = work_span(e.dag, unit_costs(e.dag)).span;
    }
    unit_span_cache[key] = s;
    return s;
  };

  for (Algorithm alg : spec.algorithms)
    for (int n : spec.n)
      for (Model model : spec.models) {
        AlgorithmProgram p(alg, n, spec.base, {model, spec.rules});
        Spans sp;
        Expansion e;
        if (model == Model::ND) {
          e = expand_full(p);
          sp.weighted = work_span(e.dag, strand_costs(p, e));
          sp.unit = work_span(e.dag, unit_costs(e.dag));
        } else {
          sp.weighted = sp_work_span(p, false);
          sp.unit = sp_work_span(p, true);
          bool full = false;
          if (spec.machine) {
            try {
              e = expand_full(p);
              full = true;
            } catch (const Error& err) {
              if (err.kind != Error::Kind::Divergence) throw;
              res.notes.push_back(p.name() + " n=" + std::to_string(n) +
                                  ": NP DAG too large to expand, simulation skipped (" + err.what() + ")");
            }
          }
          if (!full) e = expand_tree(p);
        }
        unit_span_cache[std::make_tuple(static_cast<int>(alg), n, static_cast<int>(model))] = sp.unit.span;
        const double ratio = static_cast<double>(unit_span(alg, n, Model::NP)) /
                             static_cast<double>(unit_span(alg, n, Model::ND));
        const TreeInfo info = annotate(p, e);
        const double S = static_cast<double>(info.size[info.root]);
        const std::string head = to_string(alg) + "," + std::to_string(n) + "," + std::to_string(spec.base) + "," +
                                 to_string(model) + "," + spec.machine_name + ",";
        const std::string spans = std::to_string(sp.weighted.work) + "," + std::to_string(sp.weighted.span) + "," +
                                  std::to_string(sp.unit.span) + "," + num(ratio) + ",";

        if (!spec.machine) {
          std::vector<double> Ms = spec.M;
          if (Ms.empty())
            for (double m = 2; m <= S; m *= 2) Ms.push_back(m);
          for (double M : Ms) {
            const PccReport pcc = maximal_decomposition(e, info, M);
            const MaximalDag dag = maximal_dag(e, pcc);
            for (double a : spec.alpha) {
              const EccReport r = ecc(info, pcc, dag, a);
              csv << head << num(M) << ',' << num(a) << ',' << spans << num(pcc.qstar) << ',' << num(r.qhat) << ','
                  << (r.depth_dominated ? "depth" : "work") << ",,,,,,,,,,,,,,\n";
              ++res.rows;
            }
          }
          continue;
        }

        const MachineConfig& m = *spec.machine;
        AlphaGrid grid = AlphaGrid::standard(S / 4);
        grid.c_U = spec.c_U;
        grid.M_U = spec.M_U;
        const ParallelizabilityEstimate est = estimate_alpha_max(e, info, grid);
        const double ap = std::min(est.alpha_max, 1.0);
        const bool applicable = m.beta() <= est.alpha_max - 0.1 + 1e-12;

        std::optional<SimMetrics> sim;
        std::optional<LatencyAddedWork> law;
        if (e.edges_built) {
          SimOptions so;
          so.alpha_prime = ap;
          so.seed = spec.seed;
          sim = simulate(p, e, info, m, so);
          law = latency_added_effective_work(e, info, m, *sim, ap);
        }
        double sumQ = 0;
        std::vector<EccReport> qh(m.h());
        for (int j = 0; j < m.h(); ++j) {
          qh[j] = ecc(e, info, m.levels[j].M / 3, ap);
          sumQ += qh[j].qhat * m.levels[j].C;
        }
        const double rt_bound = overhead_v(m, ap, m.k) * sumQ / m.processors();

        bool lb_ok = true, rt_ok = true, sep_ok = true, law_ok = true, num_ok = true;
        if (sim) {
          lb_ok = sim->makespan >= sim->lb * (1 - 1e-12);
          rt_ok = sim->makespan <= rt_bound * (1 + 1e-12);
          double sum_levels = 0;
          for (double x : law->per_level) sum_levels += x;
          const double sa = std::pow(S, ap);
          sep_ok = ceil_ratio(law->total / sa) <= ceil_ratio(sum_levels / sa);
          law_ok = law->total <= sumQ * (1 + 1e-12);
          num_ok = sim->numeric_ok;
          if (wants(Check::LowerBound) && !lb_ok) ++res.checks_failed;
          if (wants(Check::Runtime) && applicable && !rt_ok) ++res.checks_failed;
          if (wants(Check::Separation) && !sep_ok) ++res.checks_failed;
          if (wants(Check::LatencyWork) && !law_ok) ++res.checks_failed;
          if (wants(Check::Numeric) && !num_ok) ++res.checks_failed;
        } else if (!spec.checks.empty()) {
          // A requested check that could not run counts as failed.
          ++res.checks_failed;
        }

        for (int j = 0; j < m.h(); ++j) {
          const double M = m.sigma * m.levels[j].M;
          const PccReport pcc = maximal_decomposition(e, info, M);
          csv << head << num(M) << ',' << num(ap) << ',' << spans << num(pcc.qstar) << ',' << num(qh[j].qhat) << ','
              << (qh[j].depth_dominated ? "depth" : "work") << ',' << j << ',';
          if (sim) {
            const bool miss_ok = static_cast<double>(sim->misses[j]) <= pcc.qstar;
            if (wants(Check::MissBound) && !miss_ok) ++res.checks_failed;
            csv << sim->misses[j] << ',' << sim->glue[j] << ',' << num(sim->makespan) << ',' << num(sim->lb) << ','
                << num(rt_bound) << ',' << num(m.beta()) << ',' << num(est.alpha_max) << ',' << yn(miss_ok) << ','
                << yn(lb_ok) << ',' << (applicable ? yn(rt_ok) : "na") << ',' << yn(sep_ok) << ',' << yn(law_ok)
                << ',' << yn(num_ok) << '\n';
          } else {
            csv << ",,,," << num(rt_bound) << ',' << num(m.beta()) << ',' << num(est.alpha_max) << ",na,na,na,na,na,na\n";
          }
          ++res.rows;
        }
      }
  return res;
}

}  // namespace nd
