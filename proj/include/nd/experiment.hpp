// Experiment runner shared by the command-line tool and the tests.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nd/algorithms.hpp"
#include "nd/sched.hpp"

namespace nd {

enum class Check { MissBound, LowerBound, Runtime, Separation, LatencyWork, Numeric };
std::optional<Check> parse_check(const std::string& s);
std::string to_string(Check c);

struct ExperimentSpec {
  std::vector<Algorithm> algorithms;
  std::vector<int> n;
  int base = 1;
  std::vector<Model> models{Model::ND};
  RuleVariant rules = RuleVariant::Corrected;
  std::optional<MachineConfig> machine;
  std::string machine_name;
  // Used when no machine is given.
  std::vector<double> M;
  std::vector<double> alpha{1.0};
  std::vector<Check> checks;
  std::uint64_t seed = 0;
  double c_U = 4.0, M_U = 64.0;

  void validate() const;  // throws Error(Config)
};

struct ExperimentResult {
  std::size_t rows = 0;
  std::size_t checks_failed = 0;
  std::vector<std::string> notes;  // skipped work, warnings
};

// Writes the CSV (header first) and evaluates the requested checks.
ExperimentResult run_experiment(const ExperimentSpec& spec, std::ostream& csv);
void write_experiment_header(std::ostream& os);

// Looks a machine up as given, then under $ND_MACHINE_DIR.
std::string resolve_machine_path(const std::string& name);

}  // namespace nd
