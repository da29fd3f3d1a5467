#include "nd/random_program.hpp"

#include <random>

namespace nd {

namespace {

// Raw engine output only, so trees are identical across standard libraries.
double uniform(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace

RandomTreeProgram::RandomTreeProgram(std::uint64_t seed, int max_depth, double p_internal, Form form)
    : form_(form) {
  std::mt19937_64 g(seed);
  build(g, 0, max_depth, p_internal);
}

RandomTreeProgram::RandomTreeProgram(const RandomTreeProgram& other, Form form)
    : nodes_(other.nodes_), form_(form) {}

int RandomTreeProgram::build(std::mt19937_64& s, int depth, int max_depth, double p) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  const bool internal = depth < max_depth && (depth == 0 || uniform(s) < p);
  if (!internal) return id;
  nodes_[id].serial = (s() & 1) != 0;
  const int l = build(s, depth + 1, max_depth, p);
  const int r = build(s, depth + 1, max_depth, p);
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

Task RandomTreeProgram::root() const {
  Task t;
  t.id = 0;
  return t;
}

bool RandomTreeProgram::is_strand(const Task& t) const { return nodes_[t.id].left < 0; }

Split RandomTreeProgram::split(const Task& t) const {
  const Node& n = nodes_[t.id];
  Split s;
  if (form_ == Form::AsFire)
    s.kind = Construct::fire(n.serial ? kSerialId : kParallelId);
  else
    s.kind = n.serial ? Construct::serial() : Construct::parallel();
  s.left.id = n.left;
  s.right.id = n.right;
  return s;
}

std::size_t RandomTreeProgram::strands() const {
  std::size_t k = 0;
  for (const auto& n : nodes_) k += n.left < 0;
  return k;
}

std::vector<std::vector<bool>> RandomTreeProgram::reference_closure() const {
  const std::size_t ns = strands();
  std::vector<std::vector<bool>> c(ns, std::vector<bool>(ns, false));
  // Strand intervals in depth-first order.
  std::vector<std::pair<std::size_t, std::size_t>> range(nodes_.size());
  std::size_t next_strand = 0;
  auto visit = [&](auto&& self, int v) -> void {
    const Node& n = nodes_[v];
    if (n.left < 0) {
      range[v] = {next_strand, next_strand + 1};
      ++next_strand;
      return;
    }
    self(self, n.left);
    self(self, n.right);
    range[v] = {range[n.left].first, range[n.right].second};
    if (!n.serial) return;
    for (auto a = range[n.left].first; a < range[n.left].second; ++a)
      for (auto b = range[n.right].first; b < range[n.right].second; ++b) c[a][b] = true;
  };
  visit(visit, 0);
  return c;
}

}  // namespace nd
