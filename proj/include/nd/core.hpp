// Static vocabulary of the nested dataflow model: pedigrees, fire rules,
// rule-set registries and the plain-text rule format.
#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nd {

struct Error : std::runtime_error {
  enum class Kind { Registry, Structure, BelowBase, Divergence, Numeric, Config, Invariant, Parse };
  Kind kind;
  Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// Path of 1-based child indices relative to an anchor node. Nodes are
// binary, so every step is 1 or 2.
struct Pedigree {
  std::vector<std::uint8_t> steps;

  Pedigree() = default;
  Pedigree(std::initializer_list<int> s);
  explicit Pedigree(std::vector<std::uint8_t> s);

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  std::uint8_t operator[](std::size_t i) const { return steps[i]; }
  std::string str() const;  // "2.1.1"; empty pedigree prints as ""

  friend bool operator==(const Pedigree&, const Pedigree&) = default;
  friend auto operator<=>(const Pedigree&, const Pedigree&) = default;
};

Pedigree pedigree_concat(const Pedigree& a, const Pedigree& b);
// Parses "2.1.1" (or "" for the empty pedigree). Returns nullopt on bad input.
std::optional<Pedigree> parse_pedigree(std::string_view s);

enum class Endpoint { Source, Sink };

struct RuleAtom {
  Endpoint side = Endpoint::Source;
  Pedigree path;
  friend bool operator==(const RuleAtom&, const RuleAtom&) = default;
};

inline constexpr std::string_view kSerialLabel = "SERIAL";
inline constexpr std::string_view kParallelLabel = "PARALLEL";

struct FireRule {
  RuleAtom src;
  RuleAtom dst;
  std::string label;
  std::string str() const;  // "+2.1.1 -> -1.1.2 via MM"
  friend bool operator==(const FireRule&, const FireRule&) = default;
};

struct FireRuleSet {
  std::string name;
  std::vector<FireRule> rules;
};

// The serial composition written as a fire rule set: both pairs of
// subtasks, each refined again with the same set.
FireRuleSet canonical_serial_rules();

using LabelId = std::int32_t;
inline constexpr LabelId kSerialId = 0;
inline constexpr LabelId kParallelId = 1;

struct ConstructKind {
  enum class Tag : std::uint8_t { Serial, Parallel, Fire };
  Tag tag = Tag::Parallel;
  std::string label;  // only for Fire

  static ConstructKind serial() { return {Tag::Serial, {}}; }
  static ConstructKind parallel() { return {Tag::Parallel, {}}; }
  static ConstructKind fire(std::string l) { return {Tag::Fire, std::move(l)}; }
};

struct CompiledRule {
  Pedigree src;
  Pedigree dst;
  LabelId label;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  std::vector<std::string> unresolved;  // dangling labels
  bool ok() const { return errors.empty(); }
  std::string str() const;
};

// Label -> rule set. SERIAL and PARALLEL always exist and cannot be
// redefined; SERIAL resolves to the canonical serial set, PARALLEL to the
// empty set.
class Registry {
 public:
  Registry();

  void add(FireRuleSet set);
  void add_rule(const std::string& set_name, FireRule rule);
  void declare(const std::string& set_name);  // empty set if absent

  bool contains(std::string_view name) const;
  std::optional<LabelId> find(std::string_view name) const;
  LabelId id(std::string_view name) const;  // throws on unknown
  const std::string& name(LabelId id) const;
  std::size_t label_count() const { return names_.size(); }

  // User-defined sets (reserved labels excluded), ordered by name.
  const std::map<std::string, FireRuleSet>& sets() const { return sets_; }

  // Compiled view used by the rewriting engine. Throws Error(Registry) if
  // any label is unresolved.
  const std::vector<CompiledRule>& rules(LabelId id) const;
  bool empty_set(LabelId id) const { return rules(id).empty(); }

 private:
  void rebuild();

  std::map<std::string, FireRuleSet> sets_;
  std::vector<std::string> names_;
  std::map<std::string, LabelId, std::less<>> ids_;
  std::vector<std::vector<CompiledRule>> compiled_;
  std::vector<std::string> dangling_;
};

ValidationReport validate_registry(const std::map<std::string, FireRuleSet>& sets);
ValidationReport validate_registry(const Registry& reg);

// Text format, one rule per line:
//   TYPE: +<path> -> -<path> [via LABEL]
// Paths are dot-separated steps; a bare sign is the empty path. Without
// "via", the rule is labeled with its own set (self-recursive). A line
// "TYPE:" with nothing after it declares an empty set. '#' starts a comment.
Registry parse_registry(std::string_view text);
std::string format_registry(const Registry& reg);

}  // namespace nd
