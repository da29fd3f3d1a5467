#include "nd/core.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace nd {

Pedigree::Pedigree(std::initializer_list<int> s) {
  for (int v : s) {
    if (v < 1 || v > 2) throw Error(Error::Kind::Structure, "pedigree step out of range");
    steps.push_back(static_cast<std::uint8_t>(v));
  }
}

Pedigree::Pedigree(std::vector<std::uint8_t> s) : steps(std::move(s)) {
  for (auto v : steps)
    if (v < 1 || v > 2) throw Error(Error::Kind::Structure, "pedigree step out of range");
}

std::string Pedigree::str() const {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += '.';
    out += static_cast<char>('0' + steps[i]);
  }
  return out;
}

Pedigree pedigree_concat(const Pedigree& a, const Pedigree& b) {
  Pedigree r = a;
  r.steps.insert(r.steps.end(), b.steps.begin(), b.steps.end());
  return r;
}

std::optional<Pedigree> parse_pedigree(std::string_view s) {
  Pedigree p;
  if (s.empty()) return p;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto dot = s.find('.', pos);
    auto tok = s.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || v < 1 || v > 2) return std::nullopt;
    p.steps.push_back(static_cast<std::uint8_t>(v));
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return p;
}

std::string FireRule::str() const {
  std::string s;
  s += src.side == Endpoint::Source ? '+' : '-';
  s += src.path.str();
  s += " -> ";
  s += dst.side == Endpoint::Source ? '+' : '-';
  s += dst.path.str();
  s += " via ";
  s += label;
  return s;
}

FireRuleSet canonical_serial_rules() {
  FireRuleSet s{std::string(kSerialLabel), {}};
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b)
      s.rules.push_back({{Endpoint::Source, Pedigree{a}}, {Endpoint::Sink, Pedigree{b}}, std::string(kSerialLabel)});
  return s;
}

std::string ValidationReport::str() const {
  std::ostringstream os;
  for (auto& e : errors) os << "error: " << e << '\n';
  for (auto& w : warnings) os << "warning: " << w << '\n';
  return os.str();
}

Registry::Registry() { rebuild(); }

void Registry::add(FireRuleSet set) {
  if (set.name == kSerialLabel || set.name == kParallelLabel)
    throw Error(Error::Kind::Registry, "label " + set.name + " is reserved");
  if (set.name.empty()) throw Error(Error::Kind::Registry, "empty rule-set name");
  sets_[set.name] = std::move(set);
  rebuild();
}

void Registry::add_rule(const std::string& set_name, FireRule rule) {
  if (set_name == kSerialLabel || set_name == kParallelLabel)
    throw Error(Error::Kind::Registry, "label " + set_name + " is reserved");
  auto& s = sets_[set_name];
  s.name = set_name;
  s.rules.push_back(std::move(rule));
  rebuild();
}

void Registry::declare(const std::string& set_name) {
  if (set_name == kSerialLabel || set_name == kParallelLabel) return;
  if (!sets_.count(set_name)) {
    sets_[set_name] = FireRuleSet{set_name, {}};
    rebuild();
  }
}

bool Registry::contains(std::string_view name) const { return ids_.find(name) != ids_.end(); }

std::optional<LabelId> Registry::find(std::string_view name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

LabelId Registry::id(std::string_view name) const {
  auto r = find(name);
  if (!r) throw Error(Error::Kind::Registry, "unknown fire label " + std::string(name));
  return *r;
}

const std::string& Registry::name(LabelId id) const { return names_.at(static_cast<std::size_t>(id)); }

const std::vector<CompiledRule>& Registry::rules(LabelId id) const {
  if (!dangling_.empty()) throw Error(Error::Kind::Registry, "unresolved fire label " + dangling_.front());
  return compiled_.at(static_cast<std::size_t>(id));
}

void Registry::rebuild() {
  names_ = {std::string(kSerialLabel), std::string(kParallelLabel)};
  ids_.clear();
  ids_[names_[0]] = kSerialId;
  ids_[names_[1]] = kParallelId;
  for (auto& [n, s] : sets_) {
    ids_[n] = static_cast<LabelId>(names_.size());
    names_.push_back(n);
  }
  compiled_.assign(names_.size(), {});
  dangling_.clear();
  for (auto& r : canonical_serial_rules().rules) compiled_[kSerialId].push_back({r.src.path, r.dst.path, kSerialId});
  for (auto& [n, s] : sets_) {
    auto& out = compiled_[static_cast<std::size_t>(ids_[n])];
    for (auto& r : s.rules) {
      auto it = ids_.find(r.label);
      if (it == ids_.end()) {
        dangling_.push_back(r.label);
        continue;
      }
      out.push_back({r.src.path, r.dst.path, it->second});
    }
  }
}

ValidationReport validate_registry(const std::map<std::string, FireRuleSet>& sets) {
  ValidationReport rep;
  std::set<std::string> known{std::string(kSerialLabel), std::string(kParallelLabel)};
  for (auto& [n, s] : sets) {
    if (n == kSerialLabel || n == kParallelLabel) rep.errors.push_back("reserved label redefined: " + n);
    known.insert(n);
  }
  std::set<std::string> dangling;
  for (auto& [n, s] : sets) {
    for (std::size_t i = 0; i < s.rules.size(); ++i) {
      const auto& r = s.rules[i];
      if (r.src.side != Endpoint::Source || r.dst.side != Endpoint::Sink)
        rep.errors.push_back(n + ": rule " + r.str() + " has swapped endpoints");
      if (!known.count(r.label) && dangling.insert(r.label).second) {
        rep.errors.push_back(n + ": unresolved label " + r.label);
        rep.unresolved.push_back(r.label);
      }
      for (std::size_t j = 0; j < i; ++j)
        if (s.rules[j] == r) {
          rep.warnings.push_back(n + ": duplicate rule " + r.str());
          break;
        }
    }
  }
  return rep;
}

ValidationReport validate_registry(const Registry& reg) { return validate_registry(reg.sets()); }

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw Error(Error::Kind::Parse, "line " + std::to_string(line) + ": " + what);
}

RuleAtom parse_atom(std::string_view tok, int line) {
  tok = trim(tok);
  if (tok.empty() || (tok[0] != '+' && tok[0] != '-')) parse_fail(line, "expected +<path> or -<path>");
  RuleAtom a;
  a.side = tok[0] == '+' ? Endpoint::Source : Endpoint::Sink;
  auto p = parse_pedigree(tok.substr(1));
  if (!p) parse_fail(line, "bad pedigree '" + std::string(tok.substr(1)) + "'");
  a.path = *p;
  return a;
}

}  // namespace

Registry parse_registry(std::string_view text) {
  std::map<std::string, FireRuleSet> sets;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string_view::npos) parse_fail(lineno, "missing ':'");
    std::string name(trim(line.substr(0, colon)));
    if (name.empty()) parse_fail(lineno, "missing rule-set name");
    if (name == kSerialLabel || name == kParallelLabel) parse_fail(lineno, "label " + name + " is reserved");
    auto& set = sets[name];
    set.name = name;
    auto body = trim(line.substr(colon + 1));
    if (body.empty()) continue;
    auto arrow = body.find("->");
    if (arrow == std::string_view::npos) parse_fail(lineno, "missing '->'");
    FireRule r;
    r.src = parse_atom(body.substr(0, arrow), lineno);
    auto rest = trim(body.substr(arrow + 2));
    auto via = rest.find(" via ");
    std::string_view dst = rest;
    r.label = name;
    if (via != std::string_view::npos) {
      dst = rest.substr(0, via);
      r.label = std::string(trim(rest.substr(via + 5)));
      if (r.label.empty()) parse_fail(lineno, "empty label after 'via'");
    }
    r.dst = parse_atom(dst, lineno);
    set.rules.push_back(std::move(r));
  }
  Registry reg;
  for (auto& [n, s] : sets) reg.add(std::move(s));
  return reg;
}

std::string format_registry(const Registry& reg) {
  std::ostringstream os;
  for (auto& [n, s] : reg.sets()) {
    if (s.rules.empty()) os << n << ":\n";
    for (auto& r : s.rules) os << n << ": " << r.str() << '\n';
  }
  return os.str();
}

}  // namespace nd
