// ndtool: experiment runner for nested-dataflow programs.
//
// Exit codes: 0 ok, 1 a requested check failed, 2 bad configuration,
// 3 internal invariant violation.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nd/algorithms.hpp"
#include "nd/experiment.hpp"
#include "nd/metrics.hpp"
#include "nd/sched.hpp"

using namespace nd;

namespace {

struct Common {
  std::vector<std::string> alg{"mm"};
  std::vector<int> n{8};
  int base = 1;
  std::vector<std::string> model{"nd"};
  std::string rules = "corrected";
  std::string out;
};

void add_common(CLI::App* c, Common& o) {
  c->add_option("--alg", o.alg, "mm, trs, cholesky, fw1d, lcs (comma list)")->delimiter(',');
  c->add_option("--n", o.n, "problem sizes (comma list of powers of two)")->delimiter(',');
  c->add_option("--base", o.base, "base-case size");
  c->add_option("--model", o.model, "nd, np (comma list)")->delimiter(',');
  c->add_option("--rules", o.rules, "corrected or printed");
  c->add_option("--out", o.out, "output file (default stdout)");
}

std::vector<Algorithm> algorithms(const Common& o) {
  std::vector<Algorithm> v;
  for (const auto& s : o.alg) {
    if (s == "all") return {std::begin(kAllAlgorithms), std::end(kAllAlgorithms)};
    auto a = parse_algorithm(s);
    if (!a) throw Error(Error::Kind::Config, "unknown algorithm '" + s + "'");
    v.push_back(*a);
  }
  return v;
}

std::vector<Model> models(const Common& o) {
  std::vector<Model> v;
  for (const auto& s : o.model) {
    auto m = parse_model(s);
    if (!m) throw Error(Error::Kind::Config, "unknown model '" + s + "'");
    v.push_back(*m);
  }
  return v;
}

RuleVariant rules(const Common& o) {
  if (o.rules == "corrected") return RuleVariant::Corrected;
  if (o.rules == "printed") return RuleVariant::Printed;
  throw Error(Error::Kind::Config, "--rules must be corrected or printed");
}

MachineConfig machine(const std::string& name) {
  MachineConfig m = load_machine(resolve_machine_path(name));
  for (const auto& w : m.warnings) std::cerr << "warning: " << w << "\n";
  return m;
}

// Output stream that is stdout unless --out is given.
struct Out {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Out(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw Error(Error::Kind::Config, "cannot write " + path);
    os = &file;
  }
  std::ostream& operator*() { return *os; }
};

template <class F>
void each_program(const Common& o, F&& f) {
  for (Algorithm a : algorithms(o))
    for (int n : o.n)
      for (Model m : models(o)) {
        const AlgorithmProgram p(a, n, o.base, {m, rules(o)});
        f(p, a, n, m);
      }
}

double pcc_norm(Algorithm a, int n, double M) {
  const double N = static_cast<double>(n) * n;
  if (a == Algorithm::FW1D || a == Algorithm::LCS) return N / M;
  return std::pow(N, 1.5) / std::sqrt(M);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nested dataflow programs: DAG rewriting, cache complexity and PMH scheduling"};
  app.require_subcommand(1);

  // run
  Common run_o;
  std::string run_machine;
  std::vector<double> run_M, run_alpha{1.0};
  std::vector<std::string> run_checks;
  std::uint64_t run_seed = 0;
  double run_cu = 4, run_mu = 64;
  auto* run = app.add_subcommand("run", "CSV report over algorithms, sizes and models");
  add_common(run, run_o);
  run->add_option("--machine", run_machine, "machine config (path, or name under $ND_MACHINE_DIR)");
  run->add_option("--M", run_M, "cache sizes when no machine is given")->delimiter(',');
  run->add_option("--alpha", run_alpha, "alpha values when no machine is given")->delimiter(',');
  run->add_option("--check", run_checks, "miss-bound, lb, runtime, separation, latency-work, numeric, all")
      ->delimiter(',');
  run->add_option("--seed", run_seed, "tie-break seed");
  run->add_option("--c-u", run_cu, "c_U for the alpha_max estimate");
  run->add_option("--m-u", run_mu, "M_U for the alpha_max estimate");

  // validate-rules
  Common val_o;
  std::size_t val_examples = 5;
  auto* val = app.add_subcommand("validate-rules", "compare the DAG closure with the read/write-set oracle");
  add_common(val, val_o);
  val->add_option("--examples", val_examples, "missing pairs to print on stderr");

  // span
  Common span_o;
  auto* span = app.add_subcommand("span", "work and span");
  add_common(span, span_o);

  // pcc
  Common pcc_o;
  std::vector<double> pcc_M;
  double pcc_glue = 1.0;
  auto* pcc = app.add_subcommand("pcc", "parallel cache complexity Q*");
  add_common(pcc, pcc_o);
  pcc->add_option("--M", pcc_M, "cache sizes")->delimiter(',')->required();
  pcc->add_option("--glue", pcc_glue, "cost per glue node");

  // ecc
  Common ecc_o;
  std::vector<double> ecc_M, ecc_alpha{1.0};
  bool ecc_amax = false;
  double ecc_cu = 4, ecc_mu = 64, ecc_step = 0.05;
  auto* eccc = app.add_subcommand("ecc", "effective cache complexity and parallelizability");
  add_common(eccc, ecc_o);
  eccc->add_option("--M", ecc_M, "cache sizes")->delimiter(',');
  eccc->add_option("--alpha", ecc_alpha, "alpha values")->delimiter(',');
  eccc->add_flag("--alpha-max", ecc_amax, "estimate alpha_max on the standard grid instead");
  eccc->add_option("--c-u", ecc_cu, "c_U");
  eccc->add_option("--m-u", ecc_mu, "M_U");
  eccc->add_option("--step", ecc_step, "alpha grid step");

  // simulate
  Common sim_o;
  std::string sim_machine, sim_trace;
  std::uint64_t sim_seed = 0;
  double sim_ap = -1;
  auto* sim = app.add_subcommand("simulate", "space-bounded scheduler on a PMH machine");
  add_common(sim, sim_o);
  sim->add_option("--machine", sim_machine, "machine config")->required();
  sim->add_option("--seed", sim_seed, "tie-break seed");
  sim->add_option("--alpha-prime", sim_ap, "allocation exponent (default: min(alpha_max, 1))");
  sim->add_option("--trace", sim_trace, "write the event trace here");

  // export-dag
  Common exp_o;
  auto* exp = app.add_subcommand("export-dag", "edge list and strand manifest");
  add_common(exp, exp_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) {
      ExperimentSpec spec;
      spec.algorithms = algorithms(run_o);
      spec.n = run_o.n;
      spec.base = run_o.base;
      spec.models = models(run_o);
      spec.rules = rules(run_o);
      if (!run_machine.empty()) {
        spec.machine = machine(run_machine);
        spec.machine_name = run_machine;
      }
      spec.M = run_M;
      spec.alpha = run_alpha;
      for (const auto& c : run_checks) {
        if (c == "all") {
          spec.checks = {Check::MissBound, Check::LowerBound, Check::Runtime,
                         Check::Separation, Check::LatencyWork, Check::Numeric};
          continue;
        }
        auto k = parse_check(c);
        if (!k) throw Error(Error::Kind::Config, "unknown check '" + c + "'");
        spec.checks.push_back(*k);
      }
      spec.seed = run_seed;
      spec.c_U = run_cu;
      spec.M_U = run_mu;
      Out out(run_o.out);
      const ExperimentResult r = run_experiment(spec, *out);
      for (const auto& note : r.notes) std::cerr << "note: " << note << "\n";
      if (r.checks_failed) {
        std::cerr << r.checks_failed << " requested check(s) failed\n";
        return 1;
      }
      return 0;
    }

    if (*val) {
      Out out(val_o.out);
      *out << "algorithm,n,base,rules,strands,edges,oracle_pairs,missing\n";
      std::size_t missing = 0;
      each_program(val_o, [&](const AlgorithmProgram& p, Algorithm a, int n, Model) {
        ExpandOptions eo;
        eo.record_arrows = true;
        if (p.options().rules == RuleVariant::Printed) eo.below_base = BelowBasePolicy::Clamp;
        const Expansion e = expand_full(p, eo);
        const SoundnessReport r = check_soundness(p, e, p.registry(), val_examples);
        *out << to_string(a) << ',' << n << ',' << val_o.base << ',' << val_o.rules << ',' << e.dag.size() << ','
             << e.dag.edges.size() << ',' << r.oracle_pairs << ',' << r.missing << '\n';
        for (const auto& m : r.examples)
          std::cerr << p.name() << " n=" << n << ": missing " << m.a_ped << " -> " << m.b_ped
                    << (m.arrow.empty() ? "" : "  nearest arrow: " + m.arrow) << "\n";
        missing += r.missing;
      });
      return missing ? 1 : 0;
    }

    if (*span) {
      Out out(span_o.out);
      *out << "algorithm,n,base,model,strands,T1,Tinf,span_unit\n";
      each_program(span_o, [&](const AlgorithmProgram& p, Algorithm a, int n, Model m) {
        WorkSpan w, u;
        std::size_t strands = 0;
        if (m == Model::NP) {
          w = sp_work_span(p, false);
          u = sp_work_span(p, true);
          strands = static_cast<std::size_t>(u.work);
        } else {
          const Expansion e = expand_full(p);
          w = work_span(e.dag, strand_costs(p, e));
          u = work_span(e.dag, unit_costs(e.dag));
          strands = e.dag.size();
        }
        *out << to_string(a) << ',' << n << ',' << span_o.base << ',' << to_string(m) << ',' << strands << ','
             << w.work << ',' << w.span << ',' << u.span << '\n';
      });
      return 0;
    }

    if (*pcc) {
      Out out(pcc_o.out);
      *out << "algorithm,n,base,model,M,S,qstar,maximal_tasks,glue_nodes,glue_fraction,normalized\n";
      each_program(pcc_o, [&](const AlgorithmProgram& p, Algorithm a, int n, Model m) {
        const Expansion e = expand_tree(p);
        const TreeInfo info = annotate(p, e);
        for (double M : pcc_M) {
          const PccReport r = maximal_decomposition(e, info, M, pcc_glue);
          char buf[256];
          std::snprintf(buf, sizeof buf, "%.10g,%llu,%.10g,%zu,%llu,%.6g,%.6g", M,
                        static_cast<unsigned long long>(info.size[info.root]), r.qstar, r.maximal.size(),
                        static_cast<unsigned long long>(r.glue_count), r.glue_fraction(), r.qstar / pcc_norm(a, n, M));
          *out << to_string(a) << ',' << n << ',' << pcc_o.base << ',' << to_string(m) << ',' << buf << '\n';
        }
      });
      return 0;
    }

    if (*eccc) {
      Out out(ecc_o.out);
      if (ecc_amax)
        *out << "algorithm,n,base,model,alpha_max,binding_alpha,binding_M,c_U,M_U\n";
      else
        write_complexity_header(*out);
      each_program(ecc_o, [&](const AlgorithmProgram& p, Algorithm a, int n, Model m) {
        const Expansion e = m == Model::ND ? expand_full(p) : expand_tree(p);
        const TreeInfo info = annotate(p, e);
        const double S = static_cast<double>(info.size[info.root]);
        if (ecc_amax) {
          AlphaGrid g = AlphaGrid::standard(S / 4, ecc_step);
          g.c_U = ecc_cu;
          g.M_U = ecc_mu;
          if (!ecc_M.empty()) g.M = ecc_M;
          const auto est = estimate_alpha_max(e, info, g);
          *out << to_string(a) << ',' << n << ',' << ecc_o.base << ',' << to_string(m) << ',' << est.alpha_max << ','
               << est.binding_alpha << ',' << est.binding_M << ',' << est.c_U << ',' << est.M_U << '\n';
          return;
        }
        const WorkSpan w = m == Model::ND ? work_span(e.dag, strand_costs(p, e)) : sp_work_span(p, false);
        std::vector<double> Ms = ecc_M;
        if (Ms.empty())
          for (double x = 2; x <= S; x *= 2) Ms.push_back(x);
        for (double M : Ms) {
          const PccReport pc = maximal_decomposition(e, info, M);
          const MaximalDag d = maximal_dag(e, pc);
          for (double al : ecc_alpha) {
            const EccReport r = ecc(info, pc, d, al);
            ComplexityRow row;
            row.algorithm = to_string(a);
            row.n = n;
            row.base = ecc_o.base;
            row.model = to_string(m);
            row.M = M;
            row.alpha = al;
            row.t1 = w.work;
            row.tinf = w.span;
            row.qstar = r.qstar;
            row.qhat = r.qhat;
            row.dominant = r.depth_dominated ? "depth" : "work";
            write_complexity_row(*out, row);
          }
        }
      });
      return 0;
    }

    if (*sim) {
      const MachineConfig mc = machine(sim_machine);
      Out out(sim_o.out);
      std::ofstream trace;
      if (!sim_trace.empty()) {
        trace.open(sim_trace);
        if (!trace) throw Error(Error::Kind::Config, "cannot write " + sim_trace);
      }
      *out << "algorithm,n,base,model,level,sigmaM,misses,glue,qstar,miss_ok,makespan,lb_time,total_busy,anchors,"
              "alpha_prime,numeric_ok\n";
      bool ok = true;
      each_program(sim_o, [&](const AlgorithmProgram& p, Algorithm a, int n, Model m) {
        const Expansion e = expand_full(p);
        const TreeInfo info = annotate(p, e);
        double ap = sim_ap;
        if (ap < 0) {
          const double S = static_cast<double>(info.size[info.root]);
          ap = std::min(1.0, estimate_alpha_max(e, info, AlphaGrid::standard(S / 4)).alpha_max);
        }
        SimOptions so;
        so.alpha_prime = ap;
        so.seed = sim_seed;
        so.trace = trace.is_open();
        const SimMetrics r = simulate(p, e, info, mc, so);
        if (trace.is_open()) write_trace(trace, r.trace);
        ok = ok && r.numeric_ok;
        for (int j = 0; j < mc.h(); ++j) {
          const double M = mc.sigma * mc.levels[j].M;
          const double q = maximal_decomposition(e, info, M).qstar;
          const bool miss_ok = static_cast<double>(r.misses[j]) <= q;
          ok = ok && miss_ok;
          char buf[256];
          std::snprintf(buf, sizeof buf, "%d,%.10g,%llu,%llu,%.10g,%s,%.10g,%.10g,%.10g,%llu,%.6g,%s", j, M,
                        static_cast<unsigned long long>(r.misses[j]), static_cast<unsigned long long>(r.glue[j]), q,
                        miss_ok ? "true" : "false", r.makespan, r.lb, r.total_busy,
                        static_cast<unsigned long long>(r.anchors), ap, r.numeric_ok ? "true" : "false");
          *out << to_string(a) << ',' << n << ',' << sim_o.base << ',' << to_string(m) << ',' << buf << '\n';
        }
      });
      return ok ? 0 : 1;
    }

    if (*exp) {
      each_program(exp_o, [&](const AlgorithmProgram& p, Algorithm, int n, Model) {
        const Expansion e = expand_full(p);
        if (exp_o.out.empty()) {
          write_edge_list(std::cout, e.dag);
          return;
        }
        const std::string stem = exp_o.out + "." + p.name() + ".n" + std::to_string(n);
        std::ofstream edges(stem + ".edges"), manifest(stem + ".strands");
        if (!edges || !manifest) throw Error(Error::Kind::Config, "cannot write " + stem + ".*");
        write_edge_list(edges, e.dag);
        write_manifest(manifest, e.tree, e.dag);
        std::cerr << "wrote " << stem << ".edges and " << stem << ".strands\n";
      });
      return 0;
    }
  } catch (const Error& e) {
    const bool config = e.kind == Error::Kind::Config || e.kind == Error::Kind::Parse ||
                        e.kind == Error::Kind::Registry;
    std::cerr << (config ? "config error: " : "error: ") << e.what() << "\n";
    return config ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
