#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "systems.hpp"
#include "tlt.hpp"

namespace tlt {

/// Root-to-leaf node ids, alternating set / operator nodes.
struct CompletePath {
    std::vector<std::size_t> nodes;
    std::size_t num_ops() const { return nodes.size() / 2; }
};

enum class FragmentCase { Head, Middle, Tail, Whole };

/// Inclusive range [begin, end] of positions in a complete path.
struct Fragment {
    FragmentCase kind;
    std::size_t begin, end;
};

using TimeCoding = std::map<std::size_t, std::size_t>;

inline std::vector<CompletePath> complete_paths(const Tlt& t) {
    std::vector<CompletePath> out;
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> dfs = [&](std::size_t n) {
        cur.push_back(n);
        auto& node = t.node(n);
        if (node.children.empty()) out.push_back({cur});
        for (auto c : node.children) dfs(c);
        cur.pop_back();
    };
    dfs(t.root());
    return out;
}

inline std::vector<Fragment> minimal_boolean_fragments(const Tlt& t, const CompletePath& p) {
    std::vector<std::size_t> bools;
    for (std::size_t i = 1; i < p.nodes.size(); i += 2)
        if (is_boolean(t.node(p.nodes[i]).op)) bools.push_back(i);
    std::size_t last = p.nodes.size() - 1;
    if (bools.empty()) return {{FragmentCase::Whole, 0, last}};
    std::vector<Fragment> out{{FragmentCase::Head, 0, bools.front()}};
    for (std::size_t j = 0; j + 1 < bools.size(); ++j) out.push_back({FragmentCase::Middle, bools[j], bools[j + 1]});
    out.push_back({FragmentCase::Tail, bools.back(), last});
    return out;
}

/// Tree whose operator nodes are all Boolean; each node stands for one minimal Boolean fragment.
template <class T>
struct CompressedTree {
    struct Node {
        T value;
        std::optional<TltOp> op;           // Boolean operator below this node, if any
        std::vector<std::size_t> children;  // compressed children of that operator
        std::vector<std::size_t> members;   // set-node ids of the source tree merged into this node
        std::optional<std::size_t> source_op;
    };
    std::vector<Node> nodes;
    std::size_t root = 0;
};

/// Tree compression with a caller-supplied payload and merge.
template <class T, class Get, class Merge>
CompressedTree<T> compress(const Tlt& t, Get get, Merge merge) {
    CompressedTree<T> out;
    std::function<std::size_t(std::size_t)> visit = [&](std::size_t s) {
        typename CompressedTree<T>::Node node;
        std::size_t cur = s;
        std::optional<std::size_t> stop;
        for (;;) {
            node.members.push_back(cur);
            auto op = t.op_below(cur);
            if (!op) break;
            if (is_boolean(t.node(*op).op)) {
                stop = op;
                break;
            }
            cur = t.node(*op).children.front();
        }
        node.value = get(node.members.front());
        for (std::size_t i = 1; i < node.members.size(); ++i) merge(node.value, get(node.members[i]));
        std::size_t id = out.nodes.size();
        out.nodes.push_back(std::move(node));
        if (stop) {
            out.nodes[id].op = t.node(*stop).op;
            out.nodes[id].source_op = *stop;
            for (auto c : t.node(*stop).children) {
                auto cid = visit(c);
                out.nodes[id].children.push_back(cid);
            }
        }
        return id;
    };
    out.root = visit(t.root());
    return out;
}

/// Compression on state sets (union within each fragment).
inline CompressedTree<StateSet> compress(const Tlt& t) {
    return compress<StateSet>(t, [&](std::size_t i) { return t.node(i).set; }, [](StateSet& a, const StateSet& b) { a |= b; });
}

namespace detail {

// Clauses (i)-(iv) of path satisfaction over an accessor for x_j. `horizon` bounds the
// always-clause: positions [k_i, horizon] are checked.
template <class At>
bool path_clauses(const Tlt& t, const std::vector<std::size_t>& nodes, const TimeCoding& coding, At at,
                  std::function<std::size_t(std::size_t)> always_end) {
    if (nodes.empty()) return false;
    if (!t.node(nodes[0]).set.contains(at(0))) return false;
    std::size_t prev = 0;
    for (std::size_t i = 1; i + 1 < nodes.size(); i += 2) {
        auto it = coding.find(nodes[i]);
        if (it == coding.end()) throw IncompleteCoding("no time code for operator node " + std::to_string(nodes[i]));
        std::size_t k = it->second;
        if (k < prev) return false;
        const StateSet& before = t.node(nodes[i - 1]).set;
        const StateSet& after = t.node(nodes[i + 1]).set;
        switch (t.node(nodes[i]).op) {
            case TltOp::And:
            case TltOp::Or:
                if (!before.contains(at(k)) || !after.contains(at(k))) return false;
                break;
            case TltOp::Next:
                if (k == 0 || !before.contains(at(k - 1)) || !after.contains(at(k))) return false;
                break;
            case TltOp::Until:
                for (std::size_t j = prev; j < k; ++j)
                    if (!before.contains(at(j))) return false;
                if (!after.contains(at(k))) return false;
                break;
            case TltOp::Always:
                for (std::size_t j = k, e = always_end(k); j <= e; ++j)
                    if (!after.contains(at(j))) return false;
                break;
        }
        prev = k;
    }
    return true;
}

}  // namespace detail

/// Satisfaction of a complete path (or a root-anchored fragment of one) by a lasso under a coding.
inline bool path_satisfies(const Lasso& p, const Tlt& t, const std::vector<std::size_t>& nodes, const TimeCoding& coding) {
    auto at = [&](std::size_t j) { return p.at(j); };
    // positions k..k+|lasso| cover every state that occurs from k on
    return detail::path_clauses(t, nodes, coding, at, [&](std::size_t k) { return k + p.length(); });
}

/// Prefix satisfaction of a root-anchored fragment by x_0..x_k (clause (iv') for always).
inline bool prefix_satisfies(const std::vector<StateId>& prefix, const Tlt& t, const std::vector<std::size_t>& nodes,
                             const TimeCoding& coding) {
    if (prefix.empty() || nodes.empty()) return false;
    std::size_t k = prefix.size() - 1;
    for (std::size_t i = 1; i < nodes.size(); i += 2) {
        auto it = coding.find(nodes[i]);
        if (it == coding.end()) throw IncompleteCoding("no time code for operator node " + std::to_string(nodes[i]));
        if (it->second > k) return false;
    }
    if (!t.node(nodes.back()).set.contains(prefix[k])) return false;
    auto at = [&](std::size_t j) { return prefix.at(j); };
    return detail::path_clauses(t, nodes, coding, at, [&](std::size_t) { return k; });
}

/// Coded satisfaction: evaluate each complete path under the coding, then backtrack the compressed tree.
inline bool algorithm1(const Lasso& p, const Tlt& t, const TimeCoding& coding) {
    auto ct = compress(t);
    auto paths = complete_paths(t);
    std::map<std::size_t, bool> leaf_value;
    for (auto& path : paths) leaf_value[path.nodes.back()] = path_satisfies(p, t, path.nodes, coding);
    std::function<bool(std::size_t)> eval = [&](std::size_t c) {
        auto& n = ct.nodes[c];
        if (!n.op) return leaf_value.at(n.members.back());
        bool conj = *n.op == TltOp::And;
        bool acc = conj;
        for (auto ch : n.children) acc = conj ? (acc && eval(ch)) : (acc || eval(ch));
        return acc;
    };
    return eval(ct.root);
}

/// Search over codings in which Boolean and always operators fire at their parent's time, next one
/// step later, and until at any time in [parent time, bound]. Exponential; intended for small trees.
inline bool tlt_satisfies_enumerative(const Lasso& p, const Tlt& t, std::optional<std::size_t> bound = std::nullopt) {
    std::size_t b = bound ? *bound : p.prefix.size() + p.cycle.size() * (t.count_ops() + 1);
    std::vector<std::size_t> ops;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (!t.node(i).is_set) ops.push_back(i);
    TimeCoding coding;
    auto parent_time = [&](std::size_t op) -> std::size_t {
        auto above = t.node(*t.node(op).parent).parent;
        return above ? coding.at(*above) : 0;
    };
    // ops are numbered depth-first, so parents precede children
    std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
        if (i == ops.size()) return algorithm1(p, t, coding);
        std::size_t op = ops[i];
        std::size_t base = parent_time(op);
        switch (t.node(op).op) {
            case TltOp::And:
            case TltOp::Or:
            case TltOp::Always: coding[op] = base; return go(i + 1);
            case TltOp::Next: coding[op] = base + 1; return go(i + 1);
            case TltOp::Until:
                for (std::size_t k = base; k <= std::max(b, base); ++k) {
                    coding[op] = k;
                    if (go(i + 1)) return true;
                }
                return false;
        }
        return false;
    };
    return go(0);
}

/// Exact satisfaction of a TLT by a lasso under the same timing discipline as
/// tlt_satisfies_enumerative, without a search bound.
inline bool tlt_satisfies(const Lasso& p, const Tlt& t) {
    const std::size_t L = p.length();
    std::vector<std::vector<signed char>> memo(t.size(), std::vector<signed char>(L, -1));
    std::function<bool(std::size_t, std::size_t)> ok = [&](std::size_t x, std::size_t time) -> bool {
        std::size_t pos = p.normalize(time);
        auto& m = memo[x][pos];
        if (m >= 0) return m == 1;
        bool r = t.node(x).set.contains(p.at(pos));
        if (r) {
            if (auto op = t.op_below(x)) {
                auto& o = t.node(*op);
                switch (o.op) {
                    case TltOp::And:
                        for (auto c : o.children) r = r && ok(c, pos);
                        break;
                    case TltOp::Or: {
                        bool any = false;
                        for (auto c : o.children) any = any || ok(c, pos);
                        r = any;
                        break;
                    }
                    case TltOp::Next: r = ok(o.children.front(), pos + 1); break;
                    case TltOp::Until: {
                        bool found = false;
                        for (std::size_t s = pos; s <= pos + L && !found; ++s) {
                            if (ok(o.children.front(), s)) found = true;
                            else if (!t.node(x).set.contains(p.at(s))) break;
                        }
                        r = found;
                        break;
                    }
                    case TltOp::Always: {
                        const StateSet& c = t.node(o.children.front()).set;
                        for (std::size_t j = pos; j <= pos + L && r; ++j) r = c.contains(p.at(j));
                        r = r && ok(o.children.front(), pos);
                        break;
                    }
                }
            }
        }
        m = r ? 1 : 0;
        return r;
    };
    return ok(t.root(), 0);
}

}  // namespace tlt
