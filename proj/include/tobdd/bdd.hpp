// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tobdd/formula.hpp"
#include "tobdd/rational.hpp"

namespace tobdd {

class DdManager;

/// Handle to a node inside one manager. Handle equality coincides with
/// semantic equivalence of the represented functions (canonicity).
struct DdNode {
  const DdManager* manager = nullptr;
  std::uint32_t id = 0;

  bool operator==(const DdNode& o) const {
    return manager == o.manager && id == o.id;
  }
  bool operator!=(const DdNode& o) const { return !(*this == o); }
};

enum class BoolOp : std::uint8_t { And, Or, Xor, Iff };

/// Reduced ordered BDDs under a fixed variable order, with hash-consed
/// nodes and an operation cache. No complement edges, no reordering, no
/// garbage collection: structure stays in one-to-one correspondence with
/// the represented function for the lifetime of the manager.
class DdManager {
 public:
  explicit DdManager(const std::vector<int>& variable_order = {}) {
    nodes_.push_back({TERMINAL_VAR, 0, 0});  // 0: false
    nodes_.push_back({TERMINAL_VAR, 1, 1});  // 1: true
    for (int v : variable_order) add_var(v);
  }

  DdManager(const DdManager&) = delete;
  DdManager& operator=(const DdManager&) = delete;

  /// Appends a variable at the end of the order.
  void add_var(int v) {
    if (level_.count(v))
      throw std::invalid_argument("variable registered twice: " + std::to_string(v));
    level_.emplace(v, static_cast<int>(order_.size()));
    order_.push_back(v);
  }
  bool has_var(int v) const { return level_.count(v) != 0; }
  const std::vector<int>& variable_order() const { return order_; }

  DdNode mk_false() const { return {this, 0}; }
  DdNode mk_true() const { return {this, 1}; }
  DdNode mk_var(int v) {
    check_var(v);
    return {this, mk_node(v, 0, 1)};
  }

  bool is_terminal(DdNode n) const { return own(n) <= 1; }
  bool is_false(DdNode n) const { return own(n) == 0; }
  bool is_true(DdNode n) const { return own(n) == 1; }

  int var_of(DdNode n) const {
    std::uint32_t id = own(n);
    if (id <= 1) throw std::invalid_argument("terminal node has no variable");
    return nodes_[id].var;
  }
  DdNode low_of(DdNode n) const {
    std::uint32_t id = own(n);
    if (id <= 1) throw std::invalid_argument("terminal node has no children");
    return {this, nodes_[id].low};
  }
  DdNode high_of(DdNode n) const {
    std::uint32_t id = own(n);
    if (id <= 1) throw std::invalid_argument("terminal node has no children");
    return {this, nodes_[id].high};
  }

  DdNode apply(BoolOp op, DdNode f, DdNode g) {
    return {this, apply_rec(op, own(f), own(g))};
  }
  DdNode negate(DdNode f) { return {this, negate_rec(own(f))}; }

  /// Bottom-up composition of apply over a Boolean formula.
  DdNode build(const BoolExpr& e) { return {this, build_rec(e)}; }

  /// Cofactor f[v := value].
  DdNode cofactor(DdNode f, int v, bool value) {
    check_var(v);
    std::unordered_map<std::uint32_t, std::uint32_t> memo;
    return {this, cofactor_rec(own(f), level_.at(v), value, memo)};
  }

  /// Existential quantification over a set of variables, quantifying as the
  /// recursion descends; semantically identical to folding the two-cofactor
  /// disjunction over vars. The result mentions no variable in vars.
  DdNode exists(DdNode f, const std::set<int>& vars) {
    std::set<int> levels;
    for (int v : vars) {
      check_var(v);
      levels.insert(level_.at(v));
    }
    if (levels.empty()) return f;
    std::unordered_map<std::uint32_t, std::uint32_t> memo;
    return {this, exists_rec(own(f), levels, memo)};
  }

  /// Number of total assignments over `over` satisfying f; exact.
  /// The support of f must be contained in `over`.
  BigInt model_count(DdNode f, const std::set<int>& over) {
    std::uint32_t root = own(f);
    std::vector<int> positions = count_positions(root, over);
    std::unordered_map<std::uint32_t, BigInt> memo;
    std::map<int, int> level_pos;
    for (std::size_t i = 0; i < positions.size(); ++i)
      level_pos.emplace(positions[i], static_cast<int>(i));
    return count_rec(root, 0, static_cast<int>(positions.size()), level_pos, memo);
  }

  /// All satisfying total assignments over `over`, sorted lexicographically
  /// by variable index with false before true. Intended for small sets.
  std::vector<Assignment> sat_assignments(DdNode f, const std::set<int>& over) {
    std::uint32_t root = own(f);
    count_positions(root, over);  // support check
    std::vector<int> vars_by_level;
    for (int lvl : sorted_levels(over)) vars_by_level.push_back(order_[static_cast<std::size_t>(lvl)]);
    std::vector<Assignment> out;
    Assignment partial;
    gather_rec(root, vars_by_level, 0, partial, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Evaluates f under an assignment covering its support.
  bool eval(DdNode f, const Assignment& a) const {
    std::uint32_t id = own(f);
    while (id > 1) {
      const Node& n = nodes_[id];
      id = a.at(n.var) ? n.high : n.low;
    }
    return id == 1;
  }

  std::set<int> support(DdNode f) const {
    std::set<int> out;
    std::set<std::uint32_t> seen;
    support_rec(own(f), out, seen);
    return out;
  }

  /// Distinct internal (decision) nodes reachable from f.
  std::size_t node_count(DdNode f) const {
    std::set<std::uint32_t> seen;
    std::set<int> vars;
    support_rec(own(f), vars, seen);
    std::size_t internal = 0;
    for (std::uint32_t id : seen)
      if (id > 1) ++internal;
    return internal;
  }

  /// DOT text: decision nodes are boxes labeled by `label(var)`, terminals
  /// are circles, high edges solid, low edges dashed.
  std::string to_dot(DdNode f,
                     const std::function<std::string(int)>& label = {}) const {
    std::uint32_t root = own(f);
    std::set<std::uint32_t> seen;
    std::set<int> vars;
    support_rec(root, vars, seen);
    std::string out = "digraph tdd {\n";
    for (std::uint32_t id : seen) {
      if (id <= 1) {
        out += "  n" + std::to_string(id) + " [shape=circle, label=\"" +
               (id == 1 ? "T" : "F") + "\"];\n";
      } else {
        const Node& n = nodes_[id];
        std::string text =
            label ? label(n.var) : "A" + std::to_string(n.var + 1);
        out += "  n" + std::to_string(id) + " [shape=box, label=\"" + text +
               "\"];\n";
      }
    }
    for (std::uint32_t id : seen) {
      if (id <= 1) continue;
      const Node& n = nodes_[id];
      out += "  n" + std::to_string(id) + " -> n" + std::to_string(n.high) + ";\n";
      out += "  n" + std::to_string(id) + " -> n" + std::to_string(n.low) +
             " [style=dashed];\n";
    }
    out += "}\n";
    return out;
  }

  std::size_t total_nodes() const { return nodes_.size(); }

  /// Structural audit: reduction (low != high, unique triples) and order
  /// (levels strictly increase towards the leaves). Throws on violation.
  void check_invariants() const {
    std::set<std::tuple<int, std::uint32_t, std::uint32_t>> triples;
    for (std::uint32_t id = 2; id < nodes_.size(); ++id) {
      const Node& n = nodes_[id];
      if (n.low == n.high)
        throw std::logic_error("reduction violated: node with equal children");
      if (n.low >= nodes_.size() || n.high >= nodes_.size())
        throw std::logic_error("dangling child handle");
      if (!triples.emplace(n.var, n.low, n.high).second)
        throw std::logic_error("uniqueness violated: duplicate (var, low, high)");
      int lvl = level_.at(n.var);
      for (std::uint32_t child : {n.low, n.high}) {
        if (child <= 1) continue;
        if (level_.at(nodes_[child].var) <= lvl)
          throw std::logic_error("order violated along an edge");
      }
    }
  }

 private:
  static constexpr int TERMINAL_VAR = -1;

  struct Node {
    int var;
    std::uint32_t low, high;
  };

  struct TripleHash {
    std::size_t operator()(const std::tuple<int, std::uint32_t, std::uint32_t>& t) const {
      std::size_t h = std::hash<int>()(std::get<0>(t));
      h ^= std::hash<std::uint32_t>()(std::get<1>(t)) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h ^= std::hash<std::uint32_t>()(std::get<2>(t)) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      return h;
    }
  };

  std::uint32_t own(DdNode n) const {
    if (n.manager != this)
      throw std::invalid_argument("node belongs to a different manager");
    if (n.id >= nodes_.size()) throw std::invalid_argument("stale node handle");
    return n.id;
  }
  void check_var(int v) const {
    if (!level_.count(v))
      throw std::invalid_argument("unknown variable: " + std::to_string(v));
  }

  int level_of_id(std::uint32_t id) const {
    if (id <= 1) return INT32_MAX;  // terminals sit below every level
    return level_.at(nodes_[id].var);
  }

  std::uint32_t mk_node(int var, std::uint32_t low, std::uint32_t high) {
    if (low == high) return low;
    auto key = std::make_tuple(var, low, high);
    auto it = unique_.find(key);
    if (it != unique_.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({var, low, high});
    unique_.emplace(key, id);
    return id;
  }

  std::uint32_t apply_rec(BoolOp op, std::uint32_t f, std::uint32_t g) {
    switch (op) {  // terminal rules
      case BoolOp::And:
        if (f == 0 || g == 0) return 0;
        if (f == 1) return g;
        if (g == 1) return f;
        if (f == g) return f;
        break;
      case BoolOp::Or:
        if (f == 1 || g == 1) return 1;
        if (f == 0) return g;
        if (g == 0) return f;
        if (f == g) return f;
        break;
      case BoolOp::Xor:
        if (f == 0) return g;
        if (g == 0) return f;
        if (f == 1) return negate_rec(g);
        if (g == 1) return negate_rec(f);
        if (f == g) return 0;
        break;
      case BoolOp::Iff:
        if (f == 1) return g;
        if (g == 1) return f;
        if (f == 0) return negate_rec(g);
        if (g == 0) return negate_rec(f);
        if (f == g) return 1;
        break;
    }
    // All four ops are commutative: canonicalize the cache key.
    if (f > g) std::swap(f, g);
    auto key = std::make_tuple(static_cast<int>(op), f, g);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    int lf = level_of_id(f);
    int lg = level_of_id(g);
    int lvl = std::min(lf, lg);
    int var = order_[static_cast<std::size_t>(lvl)];
    std::uint32_t f0 = lf == lvl ? nodes_[f].low : f;
    std::uint32_t f1 = lf == lvl ? nodes_[f].high : f;
    std::uint32_t g0 = lg == lvl ? nodes_[g].low : g;
    std::uint32_t g1 = lg == lvl ? nodes_[g].high : g;
    std::uint32_t result =
        mk_node(var, apply_rec(op, f0, g0), apply_rec(op, f1, g1));
    cache_.emplace(key, result);
    return result;
  }

  std::uint32_t negate_rec(std::uint32_t f) {
    if (f <= 1) return f ^ 1u;
    auto it = negate_cache_.find(f);
    if (it != negate_cache_.end()) return it->second;
    const Node n = nodes_[f];  // by value: recursion may reallocate nodes_
    std::uint32_t result = mk_node(n.var, negate_rec(n.low), negate_rec(n.high));
    negate_cache_.emplace(f, result);
    return result;
  }

  std::uint32_t build_rec(const BoolExpr& e) {
    switch (e.kind()) {
      case BoolKind::True: return 1;
      case BoolKind::False: return 0;
      case BoolKind::Var: {
        check_var(e.var_index());
        return mk_node(e.var_index(), 0, 1);
      }
      case BoolKind::Not: return negate_rec(build_rec(e.children()[0]));
      case BoolKind::And:
      case BoolKind::Or: {
        BoolOp op = e.kind() == BoolKind::And ? BoolOp::And : BoolOp::Or;
        std::uint32_t acc = build_rec(e.children()[0]);
        for (std::size_t i = 1; i < e.children().size(); ++i)
          acc = apply_rec(op, acc, build_rec(e.children()[i]));
        return acc;
      }
      case BoolKind::Xor:
        return apply_rec(BoolOp::Xor, build_rec(e.children()[0]),
                         build_rec(e.children()[1]));
      case BoolKind::Iff:
        return apply_rec(BoolOp::Iff, build_rec(e.children()[0]),
                         build_rec(e.children()[1]));
      case BoolKind::Implies:
        return apply_rec(BoolOp::Or, negate_rec(build_rec(e.children()[0])),
                         build_rec(e.children()[1]));
    }
    throw std::logic_error("unhandled kind");
  }

  std::uint32_t cofactor_rec(std::uint32_t f, int lvl, bool value,
                             std::unordered_map<std::uint32_t, std::uint32_t>& memo) {
    if (f <= 1) return f;
    int lf = level_of_id(f);
    if (lf > lvl) return f;
    auto it = memo.find(f);
    if (it != memo.end()) return it->second;
    const Node n = nodes_[f];  // by value: recursion may reallocate nodes_
    std::uint32_t result;
    if (lf == lvl) {
      result = value ? n.high : n.low;
    } else {
      result = mk_node(n.var, cofactor_rec(n.low, lvl, value, memo),
                       cofactor_rec(n.high, lvl, value, memo));
    }
    memo.emplace(f, result);
    return result;
  }

  std::uint32_t exists_rec(std::uint32_t f, const std::set<int>& levels,
                           std::unordered_map<std::uint32_t, std::uint32_t>& memo) {
    if (f <= 1) return f;
    int lf = level_of_id(f);
    if (lf > *levels.rbegin()) return f;  // below all quantified levels
    auto it = memo.find(f);
    if (it != memo.end()) return it->second;
    const Node n = nodes_[f];  // by value: recursion may reallocate nodes_
    std::uint32_t lo = exists_rec(n.low, levels, memo);
    std::uint32_t hi = exists_rec(n.high, levels, memo);
    std::uint32_t result = levels.count(lf) ? apply_rec(BoolOp::Or, lo, hi)
                                            : mk_node(n.var, lo, hi);
    memo.emplace(f, result);
    return result;
  }

  std::vector<int> sorted_levels(const std::set<int>& vars) const {
    std::set<int> levels;
    for (int v : vars) {
      check_var(v);
      levels.insert(level_.at(v));
    }
    return {levels.begin(), levels.end()};
  }

  std::vector<int> count_positions(std::uint32_t root, const std::set<int>& over) const {
    std::set<int> sup;
    std::set<std::uint32_t> seen;
    support_rec(root, sup, seen);
    for (int v : sup)
      if (!over.count(v))
        throw std::invalid_argument("support exceeds count set: variable " +
                                    std::to_string(v));
    return sorted_levels(over);
  }

  BigInt count_rec(std::uint32_t f, int pos, int total,
                   const std::map<int, int>& level_pos,
                   std::unordered_map<std::uint32_t, BigInt>& memo) const {
    if (f == 0) return 0;
    if (f == 1) return BigInt(1) << (total - pos);
    int node_pos = level_pos.at(level_of_id(f));
    BigInt base;
    auto it = memo.find(f);
    if (it != memo.end()) {
      base = it->second;
    } else {
      const Node& n = nodes_[f];
      base = count_rec(n.low, node_pos + 1, total, level_pos, memo) +
             count_rec(n.high, node_pos + 1, total, level_pos, memo);
      memo.emplace(f, base);
    }
    return base << (node_pos - pos);
  }

  void gather_rec(std::uint32_t f, const std::vector<int>& vars_by_level,
                  std::size_t depth, Assignment& partial,
                  std::vector<Assignment>& out) const {
    if (f == 0) return;
    if (depth == vars_by_level.size()) {
      out.push_back(partial);
      return;
    }
    int var = vars_by_level[depth];
    if (f != 1 && nodes_[f].var == var) {
      const Node n = nodes_[f];
      partial.set(var, false);
      gather_rec(n.low, vars_by_level, depth + 1, partial, out);
      partial.set(var, true);
      gather_rec(n.high, vars_by_level, depth + 1, partial, out);
    } else {
      partial.set(var, false);
      gather_rec(f, vars_by_level, depth + 1, partial, out);
      partial.set(var, true);
      gather_rec(f, vars_by_level, depth + 1, partial, out);
    }
    // no unset(): the next sibling overwrites, and completed paths copy.
  }

  void support_rec(std::uint32_t f, std::set<int>& vars,
                   std::set<std::uint32_t>& seen) const {
    if (!seen.insert(f).second) return;
    if (f <= 1) return;
    vars.insert(nodes_[f].var);
    support_rec(nodes_[f].low, vars, seen);
    support_rec(nodes_[f].high, vars, seen);
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::tuple<int, std::uint32_t, std::uint32_t>, std::uint32_t,
                     TripleHash>
      unique_;
  std::unordered_map<std::tuple<int, std::uint32_t, std::uint32_t>, std::uint32_t,
                     TripleHash>
      cache_;
  std::unordered_map<std::uint32_t, std::uint32_t> negate_cache_;
  std::vector<int> order_;           // level -> variable index
  std::map<int, int> level_;         // variable index -> level
};

}  // namespace tobdd
