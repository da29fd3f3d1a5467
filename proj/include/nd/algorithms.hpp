// The five ND algorithms as program generators, plus serial elision, the
// read/write-set dependency oracle and random topological execution.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "nd/drs.hpp"
#include "nd/program.hpp"

namespace nd {

enum class Algorithm { MM, TRS, CHOLESKY, FW1D, LCS };
enum class Model { ND, NP };
// Printed: the rule sets exactly as printed in the original text. Corrected: the minimal
// repairs documented in RULES_ERRATA.md.
enum class RuleVariant { Corrected, Printed };

std::string to_string(Algorithm a);
std::string to_string(Model m);
std::optional<Algorithm> parse_algorithm(std::string_view s);
std::optional<Model> parse_model(std::string_view s);
inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::MM, Algorithm::TRS, Algorithm::CHOLESKY, Algorithm::FW1D,
                                               Algorithm::LCS};

std::string registry_text(Algorithm a, RuleVariant v);

struct ProgramOptions {
  Model model = Model::ND;
  RuleVariant rules = RuleVariant::Corrected;
};

class AlgorithmProgram final : public Program {
 public:
  AlgorithmProgram(Algorithm a, int n, int base, ProgramOptions opt = {});

  std::string name() const override;
  const Registry& registry() const override { return reg_; }
  Task root() const override;
  bool is_strand(const Task& t) const override;
  Split split(const Task& t) const override;
  std::int64_t work(const Task& t) const override;
  void footprint(const Task& t, Footprint& fp) const override;
  State make_state(std::uint64_t seed) const override;
  void execute(const Task& t, State& s) const override;

  Algorithm algorithm() const { return alg_; }
  int n() const { return n_; }
  int base() const { return base_; }
  const ProgramOptions& options() const { return opt_; }
  bool integer_kernels() const { return alg_ == Algorithm::FW1D || alg_ == Algorithm::LCS; }

 private:
  enum Type : std::uint16_t {
    MM_TASK = 1,
    MM_HALF,
    MM_PAIR,
    TRS_TASK,
    TRS_TOP,
    TRS_TMPAIR,
    TRS_BOT,
    CHO_TASK,
    CHO_LEFT,
    CHO_RIGHT,
    FW_A,
    FW_AHALF,
    FW_B,
    FW_BHALF,
    LCS_TASK,
    LCS_UPPER,
    LCS_PAIR,
  };

  Construct fire(LabelId l) const { return opt_.model == Model::ND ? Construct::fire(l) : Construct::serial(); }
  std::size_t idx(const View& v, int i, int j) const;

  Algorithm alg_;
  int n_, base_;
  ProgramOptions opt_;
  Registry reg_;
  LabelId mm_ = kParallelId, tm_ = kParallelId, tmt_ = kParallelId, ct_ = kParallelId, ctmc_ = kParallelId,
          mc_ = kParallelId, ab_ = kParallelId, abab_ = kParallelId, bbbb_ = kParallelId, hv_ = kParallelId,
          vh_ = kParallelId;
};

// Rejects sizes that are not powers of two or base > n.
std::unique_ptr<AlgorithmProgram> make_program(Algorithm a, int n, int base, ProgramOptions opt = {});
std::unique_ptr<AlgorithmProgram> mm_program(int n, int base);
std::unique_ptr<AlgorithmProgram> trs_program(int n, int base);
std::unique_ptr<AlgorithmProgram> cholesky_program(int n, int base);
std::unique_ptr<AlgorithmProgram> fw1d_program(int n, int base);
std::unique_ptr<AlgorithmProgram> lcs_program(int n, int base);
// Same spawn tree with every fire construct made serial.
std::unique_ptr<AlgorithmProgram> np_variant(const AlgorithmProgram& p);

// Depth-first left-to-right execution of every strand (the reference).
State serial_elision(const Program& p, std::uint64_t seed);
// Executes the strands of an expansion in the given order of strand indices.
State execute_order(const Program& p, const Expansion& e, const std::vector<std::uint32_t>& order,
                    std::uint64_t seed);
std::vector<std::uint32_t> random_topological_order(const Dag& dag, std::mt19937_64& rng);

// Result comparison: max relative error over all arrays (floats are
// compared relative to the largest magnitude of the reference array).
double max_relative_error(const State& ref, const State& got);
bool bit_identical(const State& a, const State& b);

struct OraclePairs {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // sorted, unique
};
// Conflict pairs (RAW, WAR, WAW) between strands, ordered by serial elision.
// With reduced=true only a transitively sufficient subset is produced
// (each access against the accesses it must follow directly).
OraclePairs dependency_oracle(const Program& p, const Expansion& e, bool reduced = false);

struct MissingDependency {
  std::uint32_t a, b;                 // strand indices
  std::string a_ped, b_ped;           // pedigrees from the root
  std::string arrow;                  // deepest dashed arrow covering the pair, if recorded
};

struct SoundnessReport {
  std::size_t oracle_pairs = 0;
  std::size_t missing = 0;
  std::vector<MissingDependency> examples;
  bool ok() const { return missing == 0; }
};
// Checks closure(DAG) contains every oracle pair. Needs arrow recording in
// the expansion for the "arrow" diagnostic.
SoundnessReport check_soundness(const Program& p, const Expansion& e, const Registry& reg, std::size_t max_examples = 8);

std::size_t transitive_reduction_size(const Dag& dag);

}  // namespace nd
