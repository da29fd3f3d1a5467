// Random spawn trees of serial and parallel compositions, optionally
// written with fire constructs labelled SERIAL / PARALLEL.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nd/drs.hpp"
#include "nd/program.hpp"

namespace nd {

class RandomTreeProgram final : public Program {
 public:
  enum class Form { Constructs, AsFire };

  // Internal nodes appear with probability p_internal down to max_depth;
  // the root is always internal.
  RandomTreeProgram(std::uint64_t seed, int max_depth, double p_internal = 0.7, Form form = Form::Constructs);
  RandomTreeProgram(const RandomTreeProgram& other, Form form);

  std::string name() const override { return "random"; }
  const Registry& registry() const override { return reg_; }
  Task root() const override;
  bool is_strand(const Task& t) const override;
  Split split(const Task& t) const override;

  std::size_t strands() const;

  // Reference closure straight from the tree: a precedes b iff their
  // lowest common ancestor is serial with a on its left.
  std::vector<std::vector<bool>> reference_closure() const;

 private:
  struct Node {
    int left = -1, right = -1;
    bool serial = false;
  };
  int build(std::mt19937_64& g, int depth, int max_depth, double p);

  std::vector<Node> nodes_;
  Form form_;
  Registry reg_;
};

}  // namespace nd
