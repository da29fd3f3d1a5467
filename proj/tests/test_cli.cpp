#include "doctest.h"

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <string>

#include "nd/experiment.hpp"
#include "nd/sched.hpp"

using namespace nd;

namespace {

int ndtool(const std::string& args) {
  const std::string cmd = std::string(ND_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

const std::string kMachines = ND_MACHINE_DIR_DEFAULT;

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes") {
  CHECK(ndtool("span --alg trs --n 8") == 0);
  CHECK(ndtool("validate-rules --alg cholesky --n 8") == 0);
  CHECK(ndtool("validate-rules --alg lcs --n 8 --rules printed") == 1);
  CHECK(ndtool("run --alg mm --n 6") == 2);
  CHECK(ndtool("run --alg mm --n 8 --machine no-such-machine") == 2);
  CHECK(ndtool("run --alg qr --n 8") == 2);
  CHECK(ndtool("--no-such-flag") == 2);
  CHECK(ndtool("run --alg mm --n 8 --machine " + kMachines + "/m3-a.cfg --check miss-bound,lb") == 0);
}

TEST_CASE("machine lookup through ND_MACHINE_DIR") {
  ::setenv("ND_MACHINE_DIR", kMachines.c_str(), 1);
  CHECK(resolve_machine_path("m3-b").find("m3-b.cfg") != std::string::npos);
  CHECK_THROWS_AS(resolve_machine_path("m3-zz"), Error);
  CHECK(ndtool("simulate --alg fw1d --n 8 --machine m3-c") == 0);
}

TEST_CASE("experiment rows") {
  ExperimentSpec s;
  s.algorithms = {Algorithm::TRS};
  s.n = {8};
  s.models = {Model::ND, Model::NP};
  s.M = {16, 64};
  s.alpha = {0.5, 1.0};
  std::ostringstream csv;
  const ExperimentResult r = run_experiment(s, csv);
  CHECK(r.rows == 2 * 2 * 2);
  CHECK(r.checks_failed == 0);

  std::istringstream lines(csv.str());
  std::string header, line;
  std::getline(lines, header);
  const auto cols = std::count(header.begin(), header.end(), ',');
  int n = 0;
  while (std::getline(lines, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == cols);
    ++n;
  }
  CHECK(n == 8);
}

TEST_CASE("experiment with a machine") {
  ExperimentSpec s;
  s.algorithms = {Algorithm::MM};
  s.n = {8};
  s.models = {Model::ND};
  s.machine = load_machine(kMachines + "/m3-a.cfg");
  s.machine_name = "m3-a";
  s.checks = {Check::MissBound, Check::LowerBound, Check::Numeric};
  std::ostringstream csv;
  const ExperimentResult r = run_experiment(s, csv);
  CHECK(r.rows == 4);  // one per level
  CHECK(r.checks_failed == 0);
}

TEST_CASE("experiment option validation") {
  ExperimentSpec s;
  s.algorithms = {Algorithm::MM};
  s.n = {8};
  s.models = {Model::ND};
  s.checks = {Check::Runtime};
  CHECK_THROWS_AS(s.validate(), Error);  // checks without a machine
  s.checks.clear();
  s.alpha = {1.5};
  CHECK_THROWS_AS(s.validate(), Error);
  CHECK(parse_check("separation") == Check::Separation);
  CHECK_FALSE(parse_check("fast"));
}

}
