#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ltl.hpp"
#include "reachability.hpp"
#include "systems.hpp"

namespace tlt {

enum class TltOp { And, Or, Next, Until, Always };
enum class Flavor { Universal, Existential, Controlled };

/// How a set node's set was obtained from its subtree.
enum class SetRule { Literal, Intersection, Union, OneStep, Reach, Invariant };

inline const char* to_string(TltOp op) {
    switch (op) {
        case TltOp::And: return "and";
        case TltOp::Or: return "or";
        case TltOp::Next: return "next";
        case TltOp::Until: return "until";
        case TltOp::Always: return "always";
    }
    return "?";
}
inline const char* to_string(Flavor f) {
    switch (f) {
        case Flavor::Universal: return "universal";
        case Flavor::Existential: return "existential";
        case Flavor::Controlled: return "controlled";
    }
    return "?";
}
inline const char* to_string(SetRule r) {
    switch (r) {
        case SetRule::Literal: return "literal";
        case SetRule::Intersection: return "intersection";
        case SetRule::Union: return "union";
        case SetRule::OneStep: return "one-step";
        case SetRule::Reach: return "reach";
        case SetRule::Invariant: return "invariant";
    }
    return "?";
}
inline bool is_boolean(TltOp op) { return op == TltOp::And || op == TltOp::Or; }

struct TltNode {
    bool is_set = true;
    // set node payload
    StateSet set;
    Formula provenance;
    SetRule rule = SetRule::Literal;
    std::vector<int> layers;  // per-state iterate index for Reach nodes, empty otherwise
    // operator node payload
    TltOp op = TltOp::And;

    std::vector<std::size_t> children;
    std::optional<std::size_t> parent;
};

/// Temporal logic tree; node 0 is the root and ids follow depth-first, left-to-right order.
class Tlt {
public:
    Tlt() = default;
    Tlt(Flavor flavor, std::size_t universe, std::vector<TltNode> nodes)
        : flavor_(flavor), universe_(universe), nodes_(std::move(nodes)) {}

    Flavor flavor() const { return flavor_; }
    std::size_t universe() const { return universe_; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t root() const { return 0; }
    const TltNode& node(std::size_t i) const { return nodes_.at(i); }
    const std::vector<TltNode>& nodes() const { return nodes_; }
    const StateSet& root_set() const { return nodes_.at(0).set; }

    bool is_leaf(std::size_t i) const { return nodes_.at(i).children.empty(); }
    /// Operator node below a non-leaf set node.
    std::optional<std::size_t> op_below(std::size_t set_node) const {
        auto& n = nodes_.at(set_node);
        if (!n.is_set || n.children.empty()) return std::nullopt;
        return n.children.front();
    }
    /// Operator node directly above a non-root set node.
    std::optional<std::size_t> op_above(std::size_t set_node) const { return nodes_.at(set_node).parent; }
    /// Set node above the operator node above `set_node`.
    std::optional<std::size_t> parent_set(std::size_t set_node) const {
        auto op = nodes_.at(set_node).parent;
        if (!op) return std::nullopt;
        return nodes_.at(*op).parent;
    }
    std::size_t count_ops() const {
        std::size_t c = 0;
        for (auto& n : nodes_) c += n.is_set ? 0 : 1;
        return c;
    }

private:
    Flavor flavor_ = Flavor::Universal;
    std::size_t universe_ = 0;
    std::vector<TltNode> nodes_;
};

/// Checks the structural rules of a TLT; returns an empty string when valid.
inline std::string validate_tlt(const Tlt& t) {
    if (t.size() == 0) return "empty tree";
    if (!t.node(0).is_set) return "root is not a set node";
    if (t.node(0).parent) return "root has a parent";
    for (std::size_t i = 0; i < t.size(); ++i) {
        auto& n = t.node(i);
        for (auto c : n.children) {
            if (c >= t.size()) return "child id out of range at node " + std::to_string(i);
            if (t.node(c).parent != i) return "parent link mismatch at node " + std::to_string(c);
            if (t.node(c).is_set == n.is_set) return "set and operator nodes do not alternate at node " + std::to_string(i);
        }
        if (n.is_set) {
            if (n.set.universe() != t.universe()) return "set universe mismatch at node " + std::to_string(i);
            if (n.children.size() > 1) return "set node with more than one child at node " + std::to_string(i);
        } else {
            if (n.children.empty()) return "operator node is a leaf at node " + std::to_string(i);
            if (is_boolean(n.op) && n.children.size() < 2) return "boolean operator with fewer than two children at node " + std::to_string(i);
            if (!is_boolean(n.op) && n.children.size() != 1) return "temporal operator without exactly one child at node " + std::to_string(i);
        }
    }
    return {};
}

namespace detail {

struct UniversalOps {
    const TransitionSystem& sys;
    StateSet one_step(const StateSet& y) const { return pre_forall(sys, y); }
    ReachResult reach(const StateSet& a, const StateSet& b) const { return reach_min(sys, a, b); }
    ReachResult inv(const StateSet& a) const { return robust_invariant(sys, a); }
};
struct ExistentialOps {
    const TransitionSystem& sys;
    StateSet one_step(const StateSet& y) const { return pre_exists(sys, y); }
    ReachResult reach(const StateSet& a, const StateSet& b) const { return reach_max(sys, a, b); }
    ReachResult inv(const StateSet& a) const { return invariant(sys, a); }
};
struct ControlledOps {
    const ControlledTransitionSystem& sys;
    StateSet one_step(const StateSet& y) const { return pre_ctrl(sys, y); }
    ReachResult reach(const StateSet& a, const StateSet& b) const { return ctrl_reach(sys, a, b); }
    ReachResult inv(const StateSet& a) const { return rcis(sys, a); }
};

// Builds subtrees bottom-up into a scratch node list, then renumbers depth-first.
template <class Ops>
class TltBuilder {
public:
    TltBuilder(const Labeled& labels, Ops ops, Flavor flavor, const Tlt* reuse)
        : labels_(labels), ops_(ops), flavor_(flavor), reuse_(reuse) {
        if (reuse_ && reuse_->flavor() == flavor_ && reuse_->universe() == labels_.size())
            for (std::size_t i = 0; i < reuse_->size(); ++i)
                if (reuse_->node(i).is_set) reuse_index_.emplace(to_string(reuse_->node(i).provenance), i);
    }

    Tlt build(const Formula& f) {
        for (auto& a : atoms_of(f))
            if (!labels_.has_atom(a)) throw UnknownAtom(a);
        std::size_t root = subtree(f);
        return renumber(root);
    }

    std::size_t reused_nodes() const { return reused_; }

private:
    std::size_t add(TltNode n) {
        nodes_.push_back(std::move(n));
        return nodes_.size() - 1;
    }
    std::size_t set_node(StateSet s, Formula prov, SetRule rule, std::vector<int> layers = {}) {
        TltNode n;
        n.set = std::move(s);
        n.provenance = std::move(prov);
        n.rule = rule;
        n.layers = std::move(layers);
        return add(std::move(n));
    }
    void link(std::size_t parent_set, TltOp op, std::vector<std::size_t> kids) {
        TltNode o;
        o.is_set = false;
        o.op = op;
        o.children = kids;
        o.parent = parent_set;
        std::size_t oid = add(std::move(o));
        for (auto k : kids) nodes_[k].parent = oid;
        nodes_[parent_set].children = {oid};
    }

    // Root set of the tree for f without materializing the tree.
    const StateSet& root_set(const Formula& f) {
        auto key = to_string(f);
        auto it = set_cache_.find(key);
        if (it != set_cache_.end()) return it->second;
        StateSet s = compute_set(f);
        return set_cache_.emplace(key, std::move(s)).first->second;
    }
    StateSet compute_set(const Formula& f) {
        if (auto r = reused_set(f)) return *r;
        switch (f.kind()) {
            case Kind::True: return labels_.all();
            case Kind::False: return labels_.none();
            case Kind::Atom: return labels_.label_set(f.name());
            case Kind::Not: return labels_.label_set(f.sub().name()).complement();
            case Kind::And: return root_set(f.left()) & root_set(f.right());
            case Kind::Or: return root_set(f.left()) | root_set(f.right());
            case Kind::Next: return ops_.one_step(root_set(f.sub()));
            case Kind::Until: return reach_result(f).set;
            case Kind::WeakUntil: {
                StateSet inv = inv_set(f.left());
                if (f.right().kind() == Kind::False) return inv;
                return reach_result(Formula::until(f.left(), f.right())).set | inv;
            }
            default: break;
        }
        throw std::invalid_argument("formula is not in weak-until positive normal form: " + to_string(f));
    }
    const ReachResult& reach_result(const Formula& u) {
        auto key = to_string(u);
        auto it = reach_cache_.find(key);
        if (it != reach_cache_.end()) return it->second;
        auto r = ops_.reach(root_set(u.left()), root_set(u.right()));
        return reach_cache_.emplace(key, std::move(r)).first->second;
    }
    const StateSet& inv_set(const Formula& f) {
        auto key = to_string(f);
        auto it = inv_cache_.find(key);
        if (it != inv_cache_.end()) return it->second;
        auto r = ops_.inv(root_set(f)).set;
        return inv_cache_.emplace(key, std::move(r)).first->second;
    }
    std::optional<StateSet> reused_set(const Formula& f) const {
        auto it = reuse_index_.find(to_string(f));
        if (it == reuse_index_.end()) return std::nullopt;
        return reuse_->node(it->second).set;
    }

    std::size_t copy_reused(std::size_t src) {
        const TltNode& s = reuse_->node(src);
        TltNode n = s;
        n.children.clear();
        n.parent.reset();
        std::size_t id = add(std::move(n));
        ++reused_;
        std::vector<std::size_t> kids;
        for (auto c : s.children) kids.push_back(copy_reused(c));
        nodes_[id].children = kids;
        for (auto k : kids) nodes_[k].parent = id;
        return id;
    }

    std::size_t subtree(const Formula& f) {
        auto key = to_string(f);
        if (auto it = reuse_index_.find(key); it != reuse_index_.end()) return copy_reused(it->second);
        switch (f.kind()) {
            case Kind::True:
            case Kind::False:
            case Kind::Atom:
            case Kind::Not: return set_node(root_set(f), f, SetRule::Literal);
            case Kind::And:
            case Kind::Or: {
                auto l = subtree(f.left());
                auto r = subtree(f.right());
                bool conj = f.kind() == Kind::And;
                auto p = set_node(root_set(f), f, conj ? SetRule::Intersection : SetRule::Union);
                link(p, conj ? TltOp::And : TltOp::Or, {l, r});
                return p;
            }
            case Kind::Next: {
                auto c = subtree(f.sub());
                auto p = set_node(root_set(f), f, SetRule::OneStep);
                link(p, TltOp::Next, {c});
                return p;
            }
            case Kind::Until: return until_branch(f);
            case Kind::WeakUntil: {
                if (f.right().kind() == Kind::False) return always_branch(f);
                auto u = until_branch(Formula::until(f.left(), f.right()));
                auto a = always_branch(f);
                auto p = set_node(root_set(f), f, SetRule::Union);
                link(p, TltOp::Or, {u, a});
                return p;
            }
            default: break;
        }
        throw std::invalid_argument("formula is not in weak-until positive normal form: " + key);
    }

    // R(X1, X2) --U--> T(φ2)
    std::size_t until_branch(const Formula& u) {
        if (auto it = reuse_index_.find(to_string(u)); it != reuse_index_.end()) return copy_reused(it->second);
        auto c = subtree(u.right());
        const ReachResult& r = reach_result(u);
        auto p = set_node(r.set, u, SetRule::Reach, r.layers);
        link(p, TltOp::Until, {c});
        return p;
    }
    // Inv(X1) --G--> T(φ1)
    std::size_t always_branch(const Formula& w) {
        Formula g = Formula::always(w.left());
        if (auto it = reuse_index_.find(to_string(g)); it != reuse_index_.end()) return copy_reused(it->second);
        auto c = subtree(w.left());
        auto p = set_node(inv_set(w.left()), g, SetRule::Invariant);
        link(p, TltOp::Always, {c});
        return p;
    }

    Tlt renumber(std::size_t root) {
        std::vector<TltNode> out;
        std::function<std::size_t(std::size_t, std::optional<std::size_t>)> visit = [&](std::size_t old,
                                                                                          std::optional<std::size_t> parent) {
            std::size_t id = out.size();
            out.push_back(nodes_[old]);
            out[id].parent = parent;
            out[id].children.clear();
            for (auto c : nodes_[old].children) {
                auto nc = visit(c, id);
                out[id].children.push_back(nc);
            }
            return id;
        };
        visit(root, std::nullopt);
        Tlt t(flavor_, labels_.size(), std::move(out));
        auto err = validate_tlt(t);
        if (!err.empty()) throw std::logic_error("constructed tree is invalid: " + err);
        return t;
    }

    const Labeled& labels_;
    Ops ops_;
    Flavor flavor_;
    const Tlt* reuse_;
    std::map<std::string, std::size_t> reuse_index_;
    std::map<std::string, StateSet> set_cache_;
    std::map<std::string, ReachResult> reach_cache_;
    std::map<std::string, StateSet> inv_cache_;
    std::vector<TltNode> nodes_;
    std::size_t reused_ = 0;
};

}  // namespace detail

/// Universal TLT of ∀φ (R^m, RI). φ is normalized to weak-until positive normal form first.
inline Tlt build_universal_tlt(const TransitionSystem& ts, const Formula& phi) {
    return detail::TltBuilder(ts, detail::UniversalOps{ts}, Flavor::Universal, nullptr).build(to_wu_pnf(phi));
}

/// Existential TLT of ∃φ (R^M, I).
inline Tlt build_existential_tlt(const TransitionSystem& ts, const Formula& phi) {
    return detail::TltBuilder(ts, detail::ExistentialOps{ts}, Flavor::Existential, nullptr).build(to_wu_pnf(phi));
}

/// Controlled TLT (R^c, RCI). When `reuse` is given, subtrees whose provenance matches are copied from it.
inline Tlt build_controlled_tlt(const ControlledTransitionSystem& cts, const Formula& phi, const Tlt* reuse = nullptr,
                                std::size_t* reused_nodes = nullptr) {
    detail::TltBuilder b(cts, detail::ControlledOps{cts}, Flavor::Controlled, reuse);
    Tlt t = b.build(to_wu_pnf(phi));
    if (reused_nodes) *reused_nodes = b.reused_nodes();
    return t;
}

}  // namespace tlt
