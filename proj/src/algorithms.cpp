#include "nd/algorithms.hpp"

#include <algorithm>
#include <cmath>

namespace nd {

namespace {

constexpr std::int64_t kFwMod = 2147483647;  // 2^31 - 1

bool pow2(int x) { return x > 0 && (x & (x - 1)) == 0; }

View sub(const View& v, int bi, int bj, int h) {
  View s = v;
  if (!v.t) {
    s.r = v.r + bi * h;
    s.c = v.c + bj * h;
  } else {
    s.r = v.r + bj * h;
    s.c = v.c + bi * h;
  }
  return s;
}

View transposed(View v) {
  v.t = !v.t;
  return v;
}

Task make_task(std::uint16_t type, int m, View a = {}, View b = {}, View c = {}, std::int16_t aux = 0, int id = 0) {
  Task t;
  t.type = type;
  t.m = m;
  t.v = {a, b, c};
  t.aux = aux;
  t.id = id;
  return t;
}

void sort_unique(std::vector<std::uint64_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::MM: return "mm";
    case Algorithm::TRS: return "trs";
    case Algorithm::CHOLESKY: return "cholesky";
    case Algorithm::FW1D: return "fw1d";
    case Algorithm::LCS: return "lcs";
  }
  return "?";
}

std::string to_string(Model m) { return m == Model::ND ? "nd" : "np"; }

std::optional<Algorithm> parse_algorithm(std::string_view s) {
  std::string l(s);
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (l == "mm") return Algorithm::MM;
  if (l == "trs") return Algorithm::TRS;
  if (l == "cholesky" || l == "cho") return Algorithm::CHOLESKY;
  if (l == "fw1d" || l == "fw") return Algorithm::FW1D;
  if (l == "lcs") return Algorithm::LCS;
  return std::nullopt;
}

std::optional<Model> parse_model(std::string_view s) {
  if (s == "nd" || s == "ND") return Model::ND;
  if (s == "np" || s == "NP") return Model::NP;
  return std::nullopt;
}

AlgorithmProgram::AlgorithmProgram(Algorithm a, int n, int base, ProgramOptions opt)
    : alg_(a), n_(n), base_(base), opt_(opt), reg_(parse_registry(registry_text(a, opt.rules))) {
  if (!pow2(n) || !pow2(base) || base > n)
    throw Error(Error::Kind::Config, "n and base must be powers of two with base <= n (got n=" + std::to_string(n) +
                                         ", base=" + std::to_string(base) + ")");
  auto get = [&](const char* l) { return reg_.contains(l) ? reg_.id(l) : kParallelId; };
  mm_ = get("MM");
  tm_ = get("TM");
  tmt_ = get("2TM2T");
  ct_ = get("CT");
  ctmc_ = get("CTMC");
  mc_ = get("MC");
  ab_ = get("AB");
  abab_ = get("ABAB");
  bbbb_ = get("BBBB");
  hv_ = get("HV");
  vh_ = get("VH");
}

std::string AlgorithmProgram::name() const {
  std::string s = to_string(alg_) + "-" + to_string(opt_.model);
  if (opt_.rules == RuleVariant::Printed) s += "-printed";
  return s;
}

Task AlgorithmProgram::root() const {
  View m0{0, 0, 0, false}, m1{0, 0, 1, false}, m2{0, 0, 2, false};
  switch (alg_) {
    case Algorithm::MM: return make_task(MM_TASK, n_, m0, m1, m2, +1);
    case Algorithm::TRS: return make_task(TRS_TASK, n_, m0, m1);
    case Algorithm::CHOLESKY: return make_task(CHO_TASK, n_, m0);
    case Algorithm::FW1D: return make_task(FW_A, n_, m0);
    case Algorithm::LCS: return make_task(LCS_TASK, n_, m0);
  }
  return {};
}

bool AlgorithmProgram::is_strand(const Task& t) const {
  switch (t.type) {
    case MM_TASK:
    case TRS_TASK:
    case CHO_TASK:
    case FW_A:
    case FW_B:
    case LCS_TASK:
      return t.m <= base_;
    default:
      return false;
  }
}

Split AlgorithmProgram::split(const Task& t) const {
  const int m = t.m, h = m / 2;
  const auto& v = t.v;
  switch (t.type) {
    case MM_TASK:
      return {fire(mm_), make_task(MM_HALF, m, v[0], v[1], v[2], t.aux, 0),
              make_task(MM_HALF, m, v[0], v[1], v[2], t.aux, 1)};
    case MM_HALF:
      return {Construct::parallel(), make_task(MM_PAIR, m, v[0], v[1], v[2], t.aux, t.id * 2),
              make_task(MM_PAIR, m, v[0], v[1], v[2], t.aux, t.id * 2 + 1)};
    case MM_PAIR: {
      const int k = t.id / 2, i = t.id % 2;
      return {Construct::parallel(),
              make_task(MM_TASK, h, sub(v[0], i, k, h), sub(v[1], k, 0, h), sub(v[2], i, 0, h), t.aux),
              make_task(MM_TASK, h, sub(v[0], i, k, h), sub(v[1], k, 1, h), sub(v[2], i, 1, h), t.aux)};
    }
    case TRS_TASK:
      return {fire(tmt_), make_task(TRS_TOP, m, v[0], v[1]), make_task(TRS_BOT, m, v[0], v[1])};
    case TRS_TOP:
      return {Construct::parallel(), make_task(TRS_TMPAIR, m, v[0], v[1], {}, 0, 0),
              make_task(TRS_TMPAIR, m, v[0], v[1], {}, 0, 1)};
    case TRS_TMPAIR: {
      const int j = t.id;
      return {fire(tm_), make_task(TRS_TASK, h, sub(v[0], 0, 0, h), sub(v[1], 0, j, h)),
              make_task(MM_TASK, h, sub(v[0], 1, 0, h), sub(v[1], 0, j, h), sub(v[1], 1, j, h), -1)};
    }
    case TRS_BOT:
      return {Construct::parallel(), make_task(TRS_TASK, h, sub(v[0], 1, 1, h), sub(v[1], 1, 0, h)),
              make_task(TRS_TASK, h, sub(v[0], 1, 1, h), sub(v[1], 1, 1, h))};
    case CHO_TASK:
      return {fire(ctmc_), make_task(CHO_LEFT, m, v[0]), make_task(CHO_RIGHT, m, v[0])};
    case CHO_LEFT:
      return {fire(ct_), make_task(CHO_TASK, h, sub(v[0], 0, 0, h)),
              make_task(TRS_TASK, h, sub(v[0], 0, 0, h), transposed(sub(v[0], 1, 0, h)))};
    case CHO_RIGHT: {
      const View l10 = sub(v[0], 1, 0, h);
      return {fire(mc_), make_task(MM_TASK, h, l10, transposed(l10), sub(v[0], 1, 1, h), -1),
              make_task(CHO_TASK, h, sub(v[0], 1, 1, h))};
    }
    case FW_A:
      return {fire(abab_), make_task(FW_AHALF, m, v[0], {}, {}, 0, 0), make_task(FW_AHALF, m, v[0], {}, {}, 0, 1)};
    case FW_AHALF:
      if (t.id == 0)
        return {fire(ab_), make_task(FW_A, h, sub(v[0], 0, 0, h)),
                make_task(FW_B, h, sub(v[0], 0, 1, h), sub(v[0], 0, 0, h))};
      return {fire(ab_), make_task(FW_A, h, sub(v[0], 1, 1, h)),
              make_task(FW_B, h, sub(v[0], 1, 0, h), sub(v[0], 1, 1, h))};
    case FW_B:
      return {fire(bbbb_), make_task(FW_BHALF, m, v[0], v[1], {}, 0, 0), make_task(FW_BHALF, m, v[0], v[1], {}, 0, 1)};
    case FW_BHALF: {
      const int r = t.id;
      return {Construct::parallel(), make_task(FW_B, h, sub(v[0], r, 0, h), sub(v[1], r, r, h)),
              make_task(FW_B, h, sub(v[0], r, 1, h), sub(v[1], r, r, h))};
    }
    case LCS_TASK:
      return {fire(vh_), make_task(LCS_UPPER, m, v[0]), make_task(LCS_TASK, h, sub(v[0], 1, 1, h))};
    case LCS_UPPER:
      return {fire(hv_), make_task(LCS_TASK, h, sub(v[0], 0, 0, h)), make_task(LCS_PAIR, m, v[0])};
    case LCS_PAIR:
      return {Construct::parallel(), make_task(LCS_TASK, h, sub(v[0], 0, 1, h)),
              make_task(LCS_TASK, h, sub(v[0], 1, 0, h))};
    default:
      throw Error(Error::Kind::Structure, "split of unknown task type");
  }
}

std::int64_t AlgorithmProgram::work(const Task& t) const {
  const std::int64_t m = t.m;
  switch (t.type) {
    case MM_TASK: return m * m * m;
    case TRS_TASK: return m * m * (m + 1) / 2;
    case CHO_TASK: return m * (m + 1) * (m + 2) / 6;
    case FW_A:
    case FW_B:
    case LCS_TASK: return m * m;
    default: return 0;
  }
}

std::size_t AlgorithmProgram::idx(const View& v, int i, int j) const {
  const std::size_t n = static_cast<std::size_t>(n_);
  return v.t ? static_cast<std::size_t>(v.r + j) * n + static_cast<std::size_t>(v.c + i)
             : static_cast<std::size_t>(v.r + i) * n + static_cast<std::size_t>(v.c + j);
}

void AlgorithmProgram::footprint(const Task& t, Footprint& fp) const {
  fp.clear();
  const int m = t.m;
  const auto& v = t.v;
  auto w = [&](const View& vw, int i, int j) { return word_addr(vw.mat, idx(vw, i, j)); };
  switch (t.type) {
    case MM_TASK:
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          fp.reads.push_back(w(v[0], i, j));
          fp.reads.push_back(w(v[1], i, j));
          fp.reads.push_back(w(v[2], i, j));
          fp.writes.push_back(w(v[2], i, j));
        }
      break;
    case TRS_TASK:
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          if (j <= i) fp.reads.push_back(w(v[0], i, j));
          fp.reads.push_back(w(v[1], i, j));
          fp.writes.push_back(w(v[1], i, j));
        }
      break;
    case CHO_TASK:
      for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
          fp.reads.push_back(w(v[0], i, j));
          fp.writes.push_back(w(v[0], i, j));
        }
      break;
    case FW_A:
    case FW_B: {
      const std::size_t n = static_cast<std::size_t>(n_);
      for (int i = 0; i < m; ++i) {
        const int r = v[0].r + i;
        for (int j = 0; j < m; ++j) {
          const int c = v[0].c + j;
          fp.writes.push_back(word_addr(0, static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)));
          fp.reads.push_back(r == 0 ? word_addr(1, static_cast<std::size_t>(c) + 1)
                                    : word_addr(0, static_cast<std::size_t>(r - 1) * n + static_cast<std::size_t>(c)));
          fp.reads.push_back(r == 0 ? word_addr(1, 0)
                                    : word_addr(0, static_cast<std::size_t>(r - 1) * n + static_cast<std::size_t>(r - 1)));
        }
      }
      break;
    }
    case LCS_TASK:
      // Cell (r, c) lives in frontier slot c - r + n, overwriting its diagonal
      // predecessor; up and left sit in the neighbouring slots.
      for (int i = 0; i < m; ++i) {
        const int r = v[0].r + i;
        for (int j = 0; j < m; ++j) {
          const int c = v[0].c + j;
          const auto k = static_cast<std::size_t>(c - r + n_);
          fp.writes.push_back(word_addr(0, k));
          fp.reads.push_back(word_addr(0, k - 1));
          fp.reads.push_back(word_addr(0, k));
          fp.reads.push_back(word_addr(0, k + 1));
          fp.reads.push_back(word_addr(1, static_cast<std::size_t>(r)));
          fp.reads.push_back(word_addr(2, static_cast<std::size_t>(c)));
        }
      }
      break;
    default:
      break;
  }
  sort_unique(fp.reads);
  sort_unique(fp.writes);
}

State AlgorithmProgram::make_state(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  const std::size_t n = static_cast<std::size_t>(n_), nn = n * n;
  State s;
  auto unif = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  switch (alg_) {
    case Algorithm::MM: {
      std::uniform_int_distribution<int> d(-3, 3);
      s.f.assign(3, std::vector<double>(nn, 0.0));
      for (std::size_t k = 0; k < nn; ++k) {
        s.f[0][k] = d(rng);
        s.f[1][k] = d(rng);
      }
      break;
    }
    case Algorithm::TRS: {
      s.f.assign(2, std::vector<double>(nn, 0.0));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) s.f[0][i * n + j] = i == j ? unif(1.0, 2.0) : unif(-1.0, 1.0) / static_cast<double>(n);
      for (auto& x : s.f[1]) x = unif(-1.0, 1.0);
      break;
    }
    case Algorithm::CHOLESKY: {
      std::vector<double> g(nn);
      for (auto& x : g) x = unif(-1.0, 1.0);
      s.f.assign(1, std::vector<double>(nn, 0.0));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double acc = i == j ? static_cast<double>(n) : 0.0;
          for (std::size_t k = 0; k < n; ++k) acc += g[i * n + k] * g[j * n + k];
          s.f[0][i * n + j] = acc;
        }
      break;
    }
    case Algorithm::FW1D: {
      std::uniform_int_distribution<std::int64_t> d(0, kFwMod - 1);
      s.i.assign(2, {});
      s.i[0].assign(nn, 0);
      s.i[1].resize(n + 1);
      for (auto& x : s.i[1]) x = d(rng);
      break;
    }
    case Algorithm::LCS: {
      std::uniform_int_distribution<int> d(0, 3);
      s.i.assign(3, {});
      s.i[0].assign(2 * n + 1, 0);
      s.i[1].resize(n);
      s.i[2].resize(n);
      for (auto& x : s.i[1]) x = d(rng);
      for (auto& x : s.i[2]) x = d(rng);
      break;
    }
  }
  return s;
}

void AlgorithmProgram::execute(const Task& t, State& s) const {
  const int m = t.m;
  const auto& v = t.v;
  switch (t.type) {
    case MM_TASK: {
      auto& A = s.f[v[0].mat];
      auto& B = s.f[v[1].mat];
      auto& C = s.f[v[2].mat];
      const double sign = t.aux < 0 ? -1.0 : 1.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double acc = 0.0;
          for (int k = 0; k < m; ++k) acc += A[idx(v[0], i, k)] * B[idx(v[1], k, j)];
          C[idx(v[2], i, j)] += sign * acc;
        }
      break;
    }
    case TRS_TASK: {
      auto& T = s.f[v[0].mat];
      auto& B = s.f[v[1].mat];
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
          double x = B[idx(v[1], i, j)];
          for (int k = 0; k < i; ++k) x -= T[idx(v[0], i, k)] * B[idx(v[1], k, j)];
          const double d = T[idx(v[0], i, i)];
          if (d == 0.0) throw Error(Error::Kind::Numeric, "singular diagonal block in triangular solve");
          B[idx(v[1], i, j)] = x / d;
        }
      break;
    }
    case CHO_TASK: {
      auto& A = s.f[v[0].mat];
      for (int j = 0; j < m; ++j) {
        double d = A[idx(v[0], j, j)];
        for (int k = 0; k < j; ++k) d -= A[idx(v[0], j, k)] * A[idx(v[0], j, k)];
        if (!(d > 0.0)) throw Error(Error::Kind::Numeric, "matrix block is not positive definite");
        d = std::sqrt(d);
        A[idx(v[0], j, j)] = d;
        for (int i = j + 1; i < m; ++i) {
          double x = A[idx(v[0], i, j)];
          for (int k = 0; k < j; ++k) x -= A[idx(v[0], i, k)] * A[idx(v[0], j, k)];
          A[idx(v[0], i, j)] = x / d;
        }
      }
      break;
    }
    case FW_A:
    case FW_B: {
      auto& D = s.i[0];
      const auto& init = s.i[1];
      const std::size_t n = static_cast<std::size_t>(n_);
      for (int i = 0; i < m; ++i) {
        const std::size_t r = static_cast<std::size_t>(v[0].r + i);
        const std::int64_t piv = r == 0 ? init[0] : D[(r - 1) * n + (r - 1)];
        for (int j = 0; j < m; ++j) {
          const std::size_t c = static_cast<std::size_t>(v[0].c + j);
          const std::int64_t prev = r == 0 ? init[c + 1] : D[(r - 1) * n + c];
          D[r * n + c] = (prev + 3 * piv + static_cast<std::int64_t>(r + 1)) % kFwMod;
        }
      }
      break;
    }
    case LCS_TASK: {
      auto& F = s.i[0];
      const auto& s1 = s.i[1];
      const auto& s2 = s.i[2];
      for (int i = 0; i < m; ++i) {
        const int r = v[0].r + i;
        for (int j = 0; j < m; ++j) {
          const int c = v[0].c + j;
          const auto k = static_cast<std::size_t>(c - r + n_);
          F[k] = s1[static_cast<std::size_t>(r)] == s2[static_cast<std::size_t>(c)] ? F[k] + 1
                                                                                   : std::max(F[k - 1], F[k + 1]);
        }
      }
      break;
    }
    default:
      break;
  }
}

std::unique_ptr<AlgorithmProgram> make_program(Algorithm a, int n, int base, ProgramOptions opt) {
  return std::make_unique<AlgorithmProgram>(a, n, base, opt);
}
std::unique_ptr<AlgorithmProgram> mm_program(int n, int base) { return make_program(Algorithm::MM, n, base); }
std::unique_ptr<AlgorithmProgram> trs_program(int n, int base) { return make_program(Algorithm::TRS, n, base); }
std::unique_ptr<AlgorithmProgram> cholesky_program(int n, int base) { return make_program(Algorithm::CHOLESKY, n, base); }
std::unique_ptr<AlgorithmProgram> fw1d_program(int n, int base) { return make_program(Algorithm::FW1D, n, base); }
std::unique_ptr<AlgorithmProgram> lcs_program(int n, int base) { return make_program(Algorithm::LCS, n, base); }

std::unique_ptr<AlgorithmProgram> np_variant(const AlgorithmProgram& p) {
  ProgramOptions o = p.options();
  o.model = Model::NP;
  return make_program(p.algorithm(), p.n(), p.base(), o);
}

}  // namespace nd
