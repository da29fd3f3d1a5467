#include "nd/sched.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <list>
#include <queue>
#include <random>
#include <regex>
#include <sstream>
#include <unordered_set>

#include "nd/algorithms.hpp"

namespace nd {

// ---------------------------------------------------------------- machine

int MachineConfig::span_of(int i) const {
  int s = 1;
  for (int j = 1; j <= i && j < h(); ++j) s *= levels[j].f;
  if (i >= h()) s *= memory_f;
  return s;
}

int MachineConfig::processors() const { return span_of(h()); }

int MachineConfig::caches_at(int i) const { return processors() / span_of(i); }

double MachineConfig::beta() const {
  double b = 0;
  for (int i = 1; i < h(); ++i)
    b = std::max(b, std::log(static_cast<double>(levels[i].f)) / std::log(levels[i].M / levels[i - 1].M));
  return b;
}

void MachineConfig::validate() {
  if (levels.empty()) throw Error(Error::Kind::Config, "machine needs at least level 0");
  if (!(levels[0].M > 0)) throw Error(Error::Kind::Config, "level 0: M must be positive");
  for (int i = 0; i < h(); ++i) {
    if (levels[i].C < 0) throw Error(Error::Kind::Config, "level " + std::to_string(i) + ": C must be >= 0");
    if (i > 0 && levels[i].f < 1) throw Error(Error::Kind::Config, "level " + std::to_string(i) + ": f must be >= 1");
    if (i > 0 && !(levels[i].M > levels[i - 1].M))
      throw Error(Error::Kind::Config, "level " + std::to_string(i) + ": M must exceed the level below");
  }
  if (memory_f < 1) throw Error(Error::Kind::Config, "memory: f must be >= 1");
  if (!(sigma > 0 && sigma < 1)) throw Error(Error::Kind::Config, "sigma must lie in (0,1)");
  if (!(k > 0 && k < 1)) throw Error(Error::Kind::Config, "k must lie in (0,1)");
  warnings.clear();
  if (std::abs(sigma - 1.0 / 3.0) > 1e-9)
    warnings.push_back("sigma != 1/3: the factor 3 in the allocation rule assumes sigma = 1/3");
}

MachineConfig parse_machine(std::istream& in) {
  MachineConfig m;
  std::vector<bool> seen;
  const std::regex level_re(R"(^level\s+(\d+)\s*:\s*(.*)$)");
  const std::regex memory_re(R"(^memory\s*:\s*(.*)$)");
  const std::regex scalar_re(R"(^(sigma|k)\s*=\s*(\S+)$)");
  const std::regex kv_re(R"(([A-Za-z]+)\s*=\s*(\S+))");
  auto number = [](const std::string& s, int line) {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || !std::isfinite(v))
      throw Error(Error::Kind::Config, "line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
  };
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto c = raw.find('#'); c != std::string::npos) raw.resize(c);
    const auto b = raw.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const std::string s = raw.substr(b, raw.find_last_not_of(" \t\r") + 1 - b);
    std::smatch mt;
    if (std::regex_match(s, mt, level_re)) {
      const int i = std::stoi(mt[1]);
      if (i > 64) throw Error(Error::Kind::Config, "line " + std::to_string(line) + ": level index too large");
      if (static_cast<int>(m.levels.size()) <= i) {
        m.levels.resize(i + 1);
        seen.resize(i + 1, false);
      }
      if (seen[i]) throw Error(Error::Kind::Config, "line " + std::to_string(line) + ": level repeated");
      seen[i] = true;
      bool hasM = false, hasC = false, hasF = false;
      const std::string body = mt[2];
      for (std::sregex_iterator it(body.begin(), body.end(), kv_re), end; it != end; ++it) {
        const std::string key = (*it)[1], val = (*it)[2];
        const double v = number(val, line);
        if (key == "M") {
          m.levels[i].M = v;
          hasM = true;
        } else if (key == "C") {
          m.levels[i].C = v;
          hasC = true;
        } else if (key == "f" && i > 0) {
          if (v != std::floor(v)) throw Error(Error::Kind::Config, "line " + std::to_string(line) + ": f must be an integer");
          m.levels[i].f = static_cast<int>(v);
          hasF = true;
        } else {
          throw Error(Error::Kind::Config, "line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
      }
      if (!hasM || !hasC || (i > 0 && !hasF))
        throw Error(Error::Kind::Config, "line " + std::to_string(line) + ": level needs M, C" + (i > 0 ? " and f" : ""));
    } else if (std::regex_match(s, mt, memory_re)) {
      const std::string body = mt[1];
      bool any = false;
      for (std::sregex_iterator it(body.begin(), body.end(), kv_re), end; it != end; ++it) {
        if ((*it)[1] != "f") throw Error(Error::Kind::Config, "line " + std::to_string(line) + ": memory takes only f");
        const double v = number((*it)[2], line);
        if (v != std::floor(v)) throw Error(Error::Kind::Config, "line " + std::to_string(line) + ": f must be an integer");
        m.memory_f = static_cast<int>(v);
        any = true;
      }
      if (!any) throw Error(Error::Kind::Config, "line " + std::to_string(line) + ": memory needs f");
    } else if (std::regex_match(s, mt, scalar_re)) {
      (mt[1] == "sigma" ? m.sigma : m.k) = number(mt[2], line);
    } else {
      throw Error(Error::Kind::Config, "line " + std::to_string(line) + ": cannot parse '" + s + "'");
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw Error(Error::Kind::Config, "level " + std::to_string(i) + " missing");
  m.validate();
  return m;
}

MachineConfig load_machine(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Kind::Config, "cannot open machine config " + path);
  return parse_machine(in);
}

std::string describe(const MachineConfig& m) {
  std::ostringstream os;
  os << "h=" << m.h() << " p=" << m.processors() << " sigma=" << m.sigma << " beta=" << m.beta() << " |";
  for (int i = 0; i < m.h(); ++i) {
    os << " L" << i << "(M=" << m.levels[i].M;
    if (i > 0) os << " f=" << m.levels[i].f;
    os << " C=" << m.levels[i].C << ")";
  }
  os << " mem(f=" << m.memory_f << ")";
  return os.str();
}

int allocate(double S, int level, const MachineConfig& m, double alpha_prime) {
  if (level <= 0 || level >= m.h()) return level >= m.h() ? m.memory_f : 1;
  const auto& L = m.levels[level];
  const double g = std::floor(L.f * std::pow(3.0 * S / L.M, alpha_prime) * (1.0 + 1e-12));
  return static_cast<int>(std::min<double>(L.f, std::max(1.0, g)));
}

double overhead_v(const MachineConfig& m, double alpha_prime, double k) {
  double v = 2;
  for (int j = 1; j < m.h(); ++j)
    v *= 1.0 / k + m.levels[j].f / ((1.0 - k) * std::pow(m.levels[j].M / m.levels[j - 1].M, alpha_prime));
  return v;
}

double lb_time(const Expansion& e, const TreeInfo& info, const MachineConfig& m) {
  double sum = 0;
  for (int j = 0; j < m.h(); ++j) sum += maximal_decomposition(e, info, m.sigma * m.levels[j].M).qstar * m.levels[j].C;
  return sum / m.processors();
}

void write_trace(std::ostream& os, const std::vector<TraceEvent>& trace) {
  static const char* names[] = {"anchor", "unroll", "start", "finish", "release"};
  for (const auto& ev : trace)
    os << std::setprecision(17) << ev.time << ' ' << ev.proc << ' ' << names[static_cast<int>(ev.kind)] << ' '
       << ev.node << ' ' << ev.level << '\n';
}

// -------------------------------------------------------------- simulator

namespace {

NodeId lca(const SpawnTree& t, NodeId a, NodeId b) {
  while (t[a].depth > t[b].depth) a = t[a].parent;
  while (t[b].depth > t[a].depth) b = t[b].parent;
  while (a != b) {
    a = t[a].parent;
    b = t[b].parent;
  }
  return a;
}

struct Anchor {
  NodeId node;
  int level, cache;
  std::vector<char> subs;  // allocated subclusters of the cache
  int parent;
  std::uint64_t remaining;
  std::list<NodeId> queue;  // levels >= 2
  std::uint32_t cursor = 0;  // level 1: first strand not known to be started
  bool live = true;
};

class Simulator {
 public:
  Simulator(const Program& p, const Expansion& e, const TreeInfo& info, const MachineConfig& m, const SimOptions& o)
      : p_(p), e_(e), t_(e.tree), info_(info), m_(m), opt_(o), rng_(o.seed) {
    if (!e.edges_built) throw Error(Error::Kind::Invariant, "simulation needs an expansion with DAG edges");
    h_ = m.h();
    P_ = m.processors();
    ns_ = e.dag.size();
    cut_.resize(h_ + 1);
    for (int j = 0; j < h_; ++j) cut_[j] = m.sigma * m.levels[j].M;
    cut_[h_] = std::numeric_limits<double>::infinity();

    // Per-level maximal tasks and the resident sets they own.
    task_of_.assign(h_, std::vector<std::uint32_t>(ns_));
    task_left_.resize(h_);
    resident_.resize(h_);
    for (int j = 0; j < h_; ++j) {
      const PccReport r = maximal_decomposition(e, info, cut_[j]);
      task_left_[j].resize(r.maximal.size());
      resident_[j].resize(r.maximal.size());
      for (std::uint32_t k = 0; k < r.maximal.size(); ++k) {
        task_left_[j][k] = r.maximal[k].hi - r.maximal[k].lo;
        for (auto s = r.maximal[k].lo; s < r.maximal[k].hi; ++s) task_of_[j][s] = k;
      }
    }
    charged_.assign(h_, std::vector<char>(t_.size(), 0));

    // External-predecessor counters.
    cnt_.assign(t_.size(), 0);
    for (std::uint32_t u = 0; u < ns_; ++u)
      for (auto k = e.dag.out_off[u]; k < e.dag.out_off[u + 1]; ++k) walk(u, e.dag.out_adj[k], +1);

    live_.resize(h_ + 1);
    reserved_.resize(h_ + 1);
    rr_.resize(h_ + 1);
    for (int j = 1; j <= h_; ++j) {
      live_[j].resize(m.caches_at(j));
      reserved_[j].assign(m.caches_at(j), 0.0);
      rr_[j].assign(m.caches_at(j), 0);
    }
    started_.assign(ns_, 0);
    exec_anchor_.assign(ns_, -1);
    busy_until_.assign(P_, 0.0);
    idle_.assign(P_, 1);

    met_.misses.assign(h_, 0);
    met_.glue.assign(h_, 0);
    met_.busy.assign(P_, 0.0);
    met_.idle.assign(P_, 0.0);
    met_.max_occupancy.assign(h_, 0.0);
    met_.rho.assign(h_, std::vector<double>(ns_, 0.0));
    if (opt_.check_numeric) state_ = p.make_state(kDataSeed);
  }

  SimMetrics run() {
    // The root is anchored at memory with every subcluster.
    Anchor root;
    root.node = t_.root;
    root.level = h_;
    root.cache = 0;
    root.subs.assign(m_.memory_f, 1);
    root.parent = -1;
    root.remaining = ns_;
    root.queue.push_back(t_.root);
    anchors_.push_back(std::move(root));
    live_[h_][0].push_back(0);
    record(0, TraceEvent::Kind::Anchor, t_.root, h_);

    std::uint64_t done = 0;
    while (done < ns_) {
      for (int q = 0; q < P_; ++q)
        if (idle_[q]) find_work(q);
      if (events_.empty()) throw Error(Error::Kind::Invariant, "scheduler deadlock\n" + dump());
      const Event ev = events_.top();
      events_.pop();
      now_ = ev.time;
      finish(ev.proc, ev.strand);
      ++done;
    }
    met_.makespan = now_;
    for (int q = 0; q < P_; ++q) {
      met_.idle[q] = met_.makespan - met_.busy[q];
      met_.total_busy += met_.busy[q];
    }
    met_.lb = lb_time(e_, info_, m_);
    if (opt_.check_numeric) {
      const State ref = serial_elision(p_, kDataSeed);
      met_.numeric_error = max_relative_error(ref, state_);
      met_.numeric_ok = ref.f.empty() ? met_.numeric_error == 0 : met_.numeric_error <= 1e-12;
    }
    return std::move(met_);
  }

 private:
  static constexpr std::uint64_t kDataSeed = 1;

  struct Event {
    double time;
    std::uint64_t key;
    int proc;
    std::uint32_t strand;
    bool operator>(const Event& o) const { return time != o.time ? time > o.time : key > o.key; }
  };

  double size(NodeId v) const { return static_cast<double>(info_.size[v]); }
  bool leaf(NodeId v) const { return t_[v].state != NodeState::Internal; }
  int cache_of(int q, int level) const { return q / m_.span_of(level); }
  int sub_of(int q, int level) const {
    const int f = level >= h_ ? m_.memory_f : m_.levels[level].f;
    return (q / m_.span_of(level - 1)) % f;
  }

  void walk(std::uint32_t u, std::uint32_t w, int delta) {
    NodeId x = e_.dag.strand_node[w];
    const NodeId a = lca(t_, e_.dag.strand_node[u], x);
    for (; x != a; x = t_[x].parent) cnt_[x] += delta;
  }

  void record(int q, TraceEvent::Kind k, NodeId v, int level) {
    if (opt_.trace) met_.trace.push_back({now_, q, k, v, level});
  }

  void find_work(int q) {
    for (;;) {
      bool progress = false;
      for (int i = 1; i <= h_ && !progress; ++i) {
        const int c = cache_of(q, i), sub = sub_of(q, i);
        const std::vector<int> here = live_[i][c];
        for (int a : here) {
          if (!anchors_[a].live || !anchors_[a].subs[sub]) continue;
          const int r = try_anchor(a, q);
          if (r == kStarted) return;
          if (r == kProgress) {
            progress = true;
            break;
          }
        }
      }
      if (!progress) return;
    }
  }

  static constexpr int kNothing = 0, kProgress = 1, kStarted = 2;

  int try_anchor(int ai, int q) {
    Anchor& a = anchors_[ai];
    if (a.level == 1) {
      const std::uint32_t lo = info_.lo[a.node], hi = info_.hi[a.node];
      while (lo + a.cursor < hi && started_[lo + a.cursor]) ++a.cursor;
      for (auto s = lo + a.cursor; s < hi; ++s)
        if (!started_[s] && cnt_[e_.dag.strand_node[s]] == 0) {
          start(q, s, ai);
          return kStarted;
        }
      return kNothing;
    }
    const double below = cut_[a.level - 1];
    for (auto it = a.queue.begin(); it != a.queue.end();) {
      const NodeId v = *it;
      if (!leaf(v) && size(v) > below) {
        // Unroll in place so queue order follows the serial elision.
        *it = t_[v].right;
        it = a.queue.insert(it, t_[v].left);
        ++met_.unrolls;
        record(q, TraceEvent::Kind::Unroll, v, a.level);
        continue;
      }
      if (cnt_[v] != 0) {
        ++it;
        continue;
      }
      if (leaf(v) && size(v) > below) {
        a.queue.erase(it);
        start(q, static_cast<std::uint32_t>(e_.dag.node_strand[v]), ai);
        return kStarted;
      }
      int fit = 1;
      while (size(v) > cut_[fit]) ++fit;
      for (int j = fit; j < a.level; ++j) {
        const int c = cache_of(q, j);
        if (reserved_[j][c] + size(v) > cut_[j]) continue;
        a.queue.erase(it);
        anchor(v, j, c, q, ai);
        return kProgress;
      }
      ++it;
    }
    return kNothing;
  }

  void anchor(NodeId v, int j, int c, int q, int parent) {
    Anchor b;
    b.node = v;
    b.level = j;
    b.cache = c;
    b.parent = parent;
    b.remaining = info_.hi[v] - info_.lo[v];
    const int f = m_.levels[j].f;
    b.subs.assign(f, 0);
    const int g = allocate(size(v), j, m_, opt_.alpha_prime);
    // Least-loaded subclusters first; ties go round robin from the cursor.
    std::vector<int> load(f, 0);
    for (int other : live_[j][c])
      for (int k = 0; k < f; ++k) load[k] += anchors_[other].subs[k];
    std::vector<int> pick(f);
    for (int k = 0; k < f; ++k) pick[k] = (rr_[j][c] + k) % f;
    std::stable_sort(pick.begin(), pick.end(), [&](int x, int y) { return load[x] < load[y]; });
    for (int k = 0; k < g; ++k) b.subs[pick[k]] = 1;
    rr_[j][c] = (pick[g - 1] + 1) % f;
    if (j >= 2) b.queue.push_back(v);
    reserved_[j][c] += size(v);
    if (reserved_[j][c] > cut_[j] * (1 + 1e-12))
      throw Error(Error::Kind::Invariant, "boundedness violated at level " + std::to_string(j));
    met_.max_occupancy[j] = std::max(met_.max_occupancy[j], reserved_[j][c] / cut_[j]);
    anchors_.push_back(std::move(b));
    live_[j][c].push_back(static_cast<int>(anchors_.size() - 1));
    ++met_.anchors;
    record(q, TraceEvent::Kind::Anchor, v, j);
  }

  void start(int q, std::uint32_t s, int ai) {
    const NodeId node = e_.dag.strand_node[s];
    if (cnt_[node] != 0) throw Error(Error::Kind::Invariant, "strand started before its predecessors finished");
    for (int b = ai; b >= 0; b = anchors_[b].parent) {
      const Anchor& an = anchors_[b];
      if (cache_of(q, an.level) != an.cache || !an.subs[sub_of(q, an.level)])
        throw Error(Error::Kind::Invariant, "anchoring violated: processor " + std::to_string(q) +
                                                " outside the subclusters of node " + std::to_string(an.node));
    }
    started_[s] = 1;
    exec_anchor_[s] = ai;
    met_.order.push_back(s);
    const Task& task = t_[node].task;
    if (opt_.check_numeric) p_.execute(task, state_);

    p_.footprint(task, fp_);
    words_.clear();
    std::set_union(fp_.reads.begin(), fp_.reads.end(), fp_.writes.begin(), fp_.writes.end(),
                   std::back_inserter(words_));
    const double W = static_cast<double>(p_.work(task));
    double cost = W;
    for (int j = 0; j < h_; ++j) {
      auto& res = resident_[j][task_of_[j][s]];
      std::uint64_t miss = 0;
      for (auto w : words_) miss += res.insert(w).second;
      std::uint64_t glue = 0;
      NodeId x = t_[node].parent;
      while (x != kNoNode && size(x) <= cut_[j]) x = t_[x].parent;
      for (; x != kNoNode && !charged_[j][x]; x = t_[x].parent) {
        charged_[j][x] = 1;
        ++glue;
      }
      met_.misses[j] += miss;
      met_.glue[j] += glue;
      const double c = m_.levels[j].C * static_cast<double>(miss + glue);
      met_.rho[j][s] = c + (j == 0 ? W : 0.0);
      cost += c;
    }
    met_.busy[q] += cost;
    idle_[q] = 0;
    busy_until_[q] = now_ + cost;
    events_.push({now_ + cost, rng_(), q, s});
    record(q, TraceEvent::Kind::Start, node, anchors_[ai].level);
  }

  void finish(int q, std::uint32_t s) {
    idle_[q] = 1;
    record(q, TraceEvent::Kind::Finish, e_.dag.strand_node[s], 0);
    for (auto k = e_.dag.out_off[s]; k < e_.dag.out_off[s + 1]; ++k) walk(s, e_.dag.out_adj[k], -1);
    for (int j = 0; j < h_; ++j) {
      const auto k = task_of_[j][s];
      if (--task_left_[j][k] == 0) std::unordered_set<std::uint64_t>().swap(resident_[j][k]);
    }
    for (int b = exec_anchor_[s]; b >= 0; b = anchors_[b].parent) {
      Anchor& an = anchors_[b];
      if (--an.remaining > 0) continue;
      an.live = false;
      if (an.level < h_) reserved_[an.level][an.cache] -= size(an.node);
      auto& l = live_[an.level][an.cache];
      l.erase(std::find(l.begin(), l.end(), b));
      record(q, TraceEvent::Kind::Release, an.node, an.level);
    }
  }

  std::string dump() const {
    std::ostringstream os;
    os << "time " << now_ << ", started " << met_.order.size() << "/" << ns_ << "\n";
    for (std::size_t b = 0; b < anchors_.size(); ++b) {
      const Anchor& a = anchors_[b];
      if (!a.live) continue;
      os << "anchor " << b << " node " << a.node << " level " << a.level << " cache " << a.cache << " remaining "
         << a.remaining << " queue " << a.queue.size() << ":";
      int shown = 0;
      for (auto v : a.queue) {
        if (++shown > 8) {
          os << " ...";
          break;
        }
        os << " " << v << "(S=" << info_.size[v] << ",pred=" << cnt_[v] << ")";
      }
      os << "\n";
    }
    for (int j = 1; j < h_; ++j)
      for (std::size_t c = 0; c < reserved_[j].size(); ++c)
        if (reserved_[j][c] > 0) os << "L" << j << "[" << c << "] reserved " << reserved_[j][c] << "/" << cut_[j] << "\n";
    return os.str();
  }

  const Program& p_;
  const Expansion& e_;
  const SpawnTree& t_;
  const TreeInfo& info_;
  const MachineConfig& m_;
  SimOptions opt_;
  std::mt19937_64 rng_;
  int h_ = 0, P_ = 0;
  std::uint32_t ns_ = 0;
  std::vector<double> cut_;
  std::vector<std::vector<std::uint32_t>> task_of_;
  std::vector<std::vector<std::uint32_t>> task_left_;
  std::vector<std::vector<std::unordered_set<std::uint64_t>>> resident_;
  std::vector<std::vector<char>> charged_;
  std::vector<std::int32_t> cnt_;
  std::vector<Anchor> anchors_;
  std::vector<std::vector<std::vector<int>>> live_;
  std::vector<std::vector<double>> reserved_;
  std::vector<std::vector<int>> rr_;
  std::vector<char> started_;
  std::vector<int> exec_anchor_;
  std::vector<double> busy_until_;
  std::vector<char> idle_;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events_;
  double now_ = 0;
  State state_;
  Footprint fp_;
  std::vector<std::uint64_t> words_;
  SimMetrics met_;
};

}  // namespace

SimMetrics simulate(const Program& p, const Expansion& e, const TreeInfo& info, const MachineConfig& m,
                    const SimOptions& opt) {
  return Simulator(p, e, info, m, opt).run();
}

// ------------------------------------------------- latency-added work

namespace {

struct LawContext {
  const Expansion& e;
  const TreeInfo& info;
  std::vector<double> cut;
  double alpha;
  const std::vector<const std::vector<double>*>& rho;  // one cost vector per output
};

// Returns one value per cost vector.
std::vector<double> law(const LawContext& cx, NodeId v) {
  const auto& t = cx.e.tree;
  const std::size_t k = cx.rho.size();
  std::vector<double> out(k, 0.0);
  const double S = static_cast<double>(cx.info.size[v]);
  if (t[v].state != NodeState::Internal) {
    const auto s = static_cast<std::uint32_t>(cx.e.dag.node_strand[v]);
    for (std::size_t r = 0; r < k; ++r) out[r] = std::pow(S, cx.alpha) * (*cx.rho[r])[s];
    return out;
  }
  // Decompose at the largest cutoff below S; below every cutoff, into strands.
  double M = 0;
  for (double c : cx.cut)
    if (c < S) M = std::max(M, c);
  const PccReport pcc = maximal_decomposition(cx.e, cx.info, M, 1.0, v);
  const MaximalDag dag = maximal_dag(cx.e, pcc);
  std::vector<double> sizes(pcc.maximal.size());
  std::vector<std::vector<double>> vals(k, std::vector<double>(pcc.maximal.size()));
  for (std::size_t i = 0; i < pcc.maximal.size(); ++i) {
    sizes[i] = static_cast<double>(pcc.maximal[i].size);
    const auto sub = law(cx, pcc.maximal[i].node);
    for (std::size_t r = 0; r < k; ++r) vals[r][i] = sub[r];
  }
  for (std::size_t r = 0; r < k; ++r) out[r] = combine(S, cx.alpha, sizes, vals[r], dag).value;
  return out;
}

}  // namespace

LatencyAddedWork latency_added_effective_work(const Expansion& e, const TreeInfo& info, const MachineConfig& m,
                                              const SimMetrics& sim, double alpha) {
  const int h = m.h();
  if (static_cast<int>(sim.rho.size()) != h) throw Error(Error::Kind::Invariant, "trace does not match machine");
  const std::size_t ns = e.dag.size();
  std::vector<double> total(ns, 0.0);
  for (int j = 0; j < h; ++j)
    for (std::size_t s = 0; s < ns; ++s) total[s] += sim.rho[j][s];
  std::vector<const std::vector<double>*> rho{&total};
  for (int j = 0; j < h; ++j) rho.push_back(&sim.rho[j]);
  LawContext cx{e, info, {}, alpha, rho};
  for (int j = 0; j < h; ++j) cx.cut.push_back(m.sigma * m.levels[j].M);
  const auto v = law(cx, info.root);
  LatencyAddedWork r;
  r.total = v[0];
  r.per_level.assign(v.begin() + 1, v.end());
  r.S = static_cast<double>(info.size[info.root]);
  r.alpha = alpha;
  return r;
}

}  // namespace nd
