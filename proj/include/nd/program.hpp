// Interface between program generators and the rewriting engine.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nd/core.hpp"

namespace nd {

// A square block of one of the program's arrays. When t is set the block is
// read transposed: element (i, j) of the view is element (j, i) of the block
// whose top-left corner is (r, c).
struct View {
  std::int32_t r = 0;
  std::int32_t c = 0;
  std::uint8_t mat = 0;
  bool t = false;
};

// Task descriptor. Its meaning is private to the program that produced it.
struct Task {
  std::uint16_t type = 0;
  std::int16_t aux = 0;
  std::int32_t m = 0;
  std::array<View, 3> v{};
  std::int32_t id = 0;
};

struct Construct {
  ConstructKind::Tag tag = ConstructKind::Tag::Parallel;
  LabelId label = kParallelId;

  static Construct serial() { return {ConstructKind::Tag::Serial, kSerialId}; }
  static Construct parallel() { return {ConstructKind::Tag::Parallel, kParallelId}; }
  static Construct fire(LabelId l) { return {ConstructKind::Tag::Fire, l}; }
};

struct Split {
  Construct kind;
  Task left;
  Task right;
};

// Word addresses are (array << 40) | index.
inline std::uint64_t word_addr(std::uint32_t array, std::uint64_t index) {
  return (static_cast<std::uint64_t>(array) << 40) | index;
}

struct Footprint {
  std::vector<std::uint64_t> reads;
  std::vector<std::uint64_t> writes;
  void clear() {
    reads.clear();
    writes.clear();
  }
};

// Numeric arrays a program operates on.
struct State {
  std::vector<std::vector<double>> f;
  std::vector<std::vector<std::int64_t>> i;
};

class Program {
 public:
  virtual ~Program() = default;

  virtual std::string name() const = 0;
  virtual const Registry& registry() const = 0;
  virtual Task root() const = 0;
  virtual bool is_strand(const Task& t) const = 0;
  // Only called for non-strands.
  virtual Split split(const Task& t) const = 0;

  // Strand hooks. Defaults describe a program without data.
  virtual std::int64_t work(const Task&) const { return 1; }
  virtual void footprint(const Task&, Footprint&) const {}
  virtual State make_state(std::uint64_t /*seed*/) const { return {}; }
  virtual void execute(const Task&, State&) const {}
};

}  // namespace nd
