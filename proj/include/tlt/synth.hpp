#pragma once

#include <algorithm>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ltl.hpp"
#include "satisfaction.hpp"
#include "systems.hpp"
#include "tlt.hpp"

namespace tlt {

/// Per-set-node control sets; same shape as the source controlled TLT.
struct ControlTree {
    std::vector<std::optional<ControlSet>> sets;  // engaged for set nodes only
    std::vector<bool> active;
    bool empty_tree = false;
};

/// Set backtracking: at each Boolean node the parent becomes parent ∪ (∩ or ∪ of its children).
inline ControlSet backtrack_control_set(const CompressedTree<ControlSet>& ct) {
    std::function<ControlSet(std::size_t)> up = [&](std::size_t i) {
        auto& n = ct.nodes[i];
        ControlSet v = n.value;
        if (n.op && !n.children.empty()) {
            ControlSet acc = up(n.children.front());
            for (std::size_t c = 1; c < n.children.size(); ++c) {
                if (*n.op == TltOp::And) acc &= up(n.children[c]);
                else acc |= up(n.children[c]);
            }
            v |= acc;
        }
        return v;
    };
    return up(ct.root);
}

/// Activation bookkeeping of each set node along a realized prefix x_0..x_k.
struct Activation {
    std::vector<std::vector<bool>> times;  // times[node][t]: node entered at t
    std::vector<bool> active;              // node constrains the input at k
    std::vector<bool> done;                // node's obligation is discharged at k
};

namespace detail {

inline bool under_always(const Tlt& t, std::size_t x) {
    for (auto op = t.node(x).parent; op; ) {
        if (t.node(*op).op == TltOp::Always) return true;
        auto s = t.node(*op).parent;
        op = t.node(*s).parent;
    }
    return false;
}

}  // namespace detail

inline Activation compute_activation(const Tlt& t, const std::vector<StateId>& prefix) {
    const std::size_t n = t.size(), K = prefix.size() - 1;
    Activation a;
    a.times.assign(n, std::vector<bool>(K + 1, false));
    a.active.assign(n, false);
    a.done.assign(n, false);
    auto in = [&](std::size_t node, std::size_t j) { return t.node(node).set.contains(prefix[j]); };
    // live[s]: some entry time t <= s with x_j in X for j in [t, s-1]
    auto live_scan = [&](std::size_t x) {
        std::vector<bool> live(K + 1, false);
        for (std::size_t s = 0; s <= K; ++s) live[s] = a.times[x][s] || (s > 0 && live[s - 1] && in(x, s - 1));
        return live;
    };
    a.times[0][0] = in(0, 0);
    // ids are depth-first, so a parent set node is finished before its children
    std::vector<std::vector<bool>> lives(n);
    for (std::size_t x = 0; x < n; ++x) {
        if (!t.node(x).is_set) continue;
        auto op = t.op_below(x);
        if (!op) continue;
        auto& o = t.node(*op);
        auto& tx = a.times[x];
        for (auto c : o.children) {
            auto& tc = a.times[c];
            switch (o.op) {
                case TltOp::And:
                case TltOp::Or:
                    for (std::size_t s = 0; s <= K; ++s) tc[s] = tx[s] && in(c, s);
                    break;
                case TltOp::Next:
                    for (std::size_t s = 1; s <= K; ++s) tc[s] = tx[s - 1] && in(c, s);
                    break;
                case TltOp::Until: {
                    if (lives[x].empty()) lives[x] = live_scan(x);
                    for (std::size_t s = 0; s <= K; ++s) tc[s] = lives[x][s] && in(c, s);
                    break;
                }
                case TltOp::Always: {
                    bool stay = true;
                    for (std::size_t s = K + 1; s-- > 0;) {
                        stay = stay && in(c, s);
                        tc[s] = tx[s] && stay;
                    }
                    break;
                }
            }
        }
    }
    auto entered = [&](std::size_t x) { return std::find(a.times[x].begin(), a.times[x].end(), true) != a.times[x].end(); };
    for (std::size_t x = 0; x < n; ++x) {
        if (!t.node(x).is_set) continue;
        auto op = t.op_below(x);
        if (!op) a.active[x] = entered(x) && (!detail::under_always(t, x) || in(x, K));
        else if (t.node(*op).op == TltOp::Until) {
            if (lives[x].empty()) lives[x] = live_scan(x);
            a.active[x] = lives[x][K] && in(x, K);
        } else
            a.active[x] = a.times[x][K];
    }
    for (std::size_t x = n; x-- > 0;) {
        if (!t.node(x).is_set) continue;
        auto op = t.op_below(x);
        if (!op) {
            a.done[x] = a.active[x];
            continue;
        }
        auto& o = t.node(*op);
        switch (o.op) {
            case TltOp::And:
                a.done[x] = std::all_of(o.children.begin(), o.children.end(), [&](std::size_t c) { return a.done[c]; });
                break;
            case TltOp::Or:
                a.done[x] = std::any_of(o.children.begin(), o.children.end(), [&](std::size_t c) { return a.done[c]; });
                break;
            case TltOp::Next:
            case TltOp::Until: a.done[x] = a.done[o.children.front()]; break;
            case TltOp::Always: a.done[x] = false; break;
        }
    }
    return a;
}

/// Control tree of the controlled TLT against the realized prefix.
inline ControlTree control_tree(const ControlledTransitionSystem& cts, const Tlt& t, const std::vector<StateId>& prefix,
                                const Activation& act) {
    ControlTree ct;
    ct.sets.assign(t.size(), std::nullopt);
    ct.active = act.active;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t.node(i).is_set) ct.sets[i] = ControlSet(cts.num_inputs());
    if (prefix.empty() || !t.root_set().contains(prefix.front())) {
        ct.empty_tree = true;
        return ct;
    }
    for (std::size_t i = 1; i < prefix.size(); ++i) {
        auto& s = cts.admissible(prefix[i - 1]);
        bool ok = false;
        s.for_each([&](std::size_t u) {
            auto& succ = cts.successors(prefix[i - 1], u);
            ok = ok || std::binary_search(succ.begin(), succ.end(), prefix[i]);
        });
        if (!ok) throw PrefixInconsistent("prefix step " + std::to_string(i) + " is not a transition");
    }
    StateId xk = prefix.back();
    for (std::size_t x = t.size(); x-- > 0;) {
        if (!t.node(x).is_set || !act.active[x]) continue;
        ControlSet cs(cts.num_inputs());
        auto op = t.op_below(x);
        if (!op) {
            auto above = t.op_above(x);
            if (above && t.node(*above).op == TltOp::Always) cs = cts.inputs_into(xk, t.node(*t.node(*above).parent).set);
            else cs = cts.admissible(xk);
        } else {
            auto& o = t.node(*op);
            switch (o.op) {
                case TltOp::And:
                    cs = *ct.sets[o.children.front()];
                    for (auto c : o.children) cs &= *ct.sets[c];
                    break;
                case TltOp::Or:
                    for (auto c : o.children) cs |= *ct.sets[c];
                    break;
                case TltOp::Next: cs = cts.inputs_into(xk, t.node(o.children.front()).set); break;
                case TltOp::Until:
                case TltOp::Always: cs = cts.inputs_into(xk, t.node(x).set); break;
            }
        }
        // every enclosing always-scope must be kept invariant
        for (auto a = t.op_above(x); a;) {
            auto s = *t.node(*a).parent;
            if (t.node(*a).op == TltOp::Always) cs &= cts.inputs_into(xk, t.node(s).set);
            a = t.op_above(s);
        }
        ct.sets[x] = std::move(cs);
    }
    return ct;
}

inline ControlSet feasible_from(const Tlt& t, const ControlTree& ct) {
    auto compressed = compress<ControlSet>(
        t, [&](std::size_t i) { return *ct.sets[i]; }, [](ControlSet& a, const ControlSet& b) { a |= b; });
    return backtrack_control_set(compressed);
}

enum class SessionStatus { Active, Deadlock, Completed };

inline const char* to_string(SessionStatus s) {
    switch (s) {
        case SessionStatus::Active: return "active";
        case SessionStatus::Deadlock: return "deadlock";
        case SessionStatus::Completed: return "completed";
    }
    return "?";
}

enum class ResolverKind { Random, Adversarial, Scripted, External };

/// Chooses the successor Post(x_k, u) realizes.
struct Resolver {
    ResolverKind kind = ResolverKind::Random;
    std::vector<StateId> script;
    std::size_t cursor = 0;

    static Resolver random() { return {ResolverKind::Random, {}, 0}; }
    static Resolver adversarial() { return {ResolverKind::Adversarial, {}, 0}; }
    static Resolver scripted(std::vector<StateId> s) { return {ResolverKind::Scripted, std::move(s), 0}; }
    static Resolver external() { return {ResolverKind::External, {}, 0}; }
};

inline const char* to_string(ResolverKind k) {
    switch (k) {
        case ResolverKind::Random: return "random";
        case ResolverKind::Adversarial: return "adversarial";
        case ResolverKind::Scripted: return "scripted";
        case ResolverKind::External: return "external";
    }
    return "?";
}

struct StepRecord {
    std::size_t k;
    StateId state;
    ControlSet feasible;
    InputId chosen;
    StateId next;
};

/// Online loop state: realized prefix, step history, feasible set of the current step.
class SynthesisSession {
public:
    SynthesisSession(std::shared_ptr<const ControlledTransitionSystem> cts, Formula phi, StateId x0, Resolver resolver = Resolver::random(),
                     std::uint64_t seed = 0)
        : cts_(std::move(cts)), phi_(std::move(phi)), resolver_(std::move(resolver)), rng_(seed), seed_(seed) {
        if (x0 >= cts_->size()) throw InvalidSystem("initial state out of range", "initial");
        tree_ = std::make_shared<const Tlt>(build_controlled_tlt(*cts_, phi_));
        prefix_.push_back(x0);
        refresh(true);
    }

    const ControlledTransitionSystem& system() const { return *cts_; }
    std::shared_ptr<const ControlledTransitionSystem> system_ptr() const { return cts_; }
    const Tlt& tree() const { return *tree_; }
    const Formula& formula() const { return phi_; }
    const std::vector<StateId>& prefix() const { return prefix_; }
    const std::vector<StepRecord>& history() const { return history_; }
    SessionStatus status() const { return status_; }
    std::size_t k() const { return prefix_.size() - 1; }
    StateId state() const { return prefix_.back(); }
    const Activation& activation() const { return act_; }
    const Resolver& resolver() const { return resolver_; }
    std::uint64_t seed() const { return seed_; }
    bool progress_enabled() const { return progress_; }
    void set_progress(bool on) { progress_ = on; }
    /// U^φ_k(x_k) of the current step.
    const ControlSet& feasible() const { return feasible_; }
    std::size_t last_reused_nodes() const { return reused_; }

    ControlTree current_control_tree() const { return control_tree(*cts_, *tree_, prefix_, act_); }

    /// Feasible inputs of the current step; an empty result ends the session.
    ControlSet synth_step() const {
        if (status_ == SessionStatus::Completed) throw SessionNotActive();
        return feasible_;
    }

    /// Inputs of cs whose successors descend fastest through the pending reach layers. While
    /// always-scopes are active, layers are recomputed inside the intersection of their sets.
    ControlSet progress_filter(const ControlSet& cs) const {
        if (cs.size() <= 1) return cs;
        StateId xk = state();
        std::vector<std::size_t> pending;
        StateSet guard = cts_->all();
        bool guarded = false;
        for (std::size_t x = 0; x < tree_->size(); ++x) {
            auto& n = tree_->node(x);
            if (!n.is_set || !act_.active[x]) continue;
            auto above = tree_->op_above(x);
            if (above && tree_->node(*above).op == TltOp::Always) {
                guard &= tree_->node(*tree_->node(*above).parent).set;
                guarded = true;
            }
            auto op = tree_->op_below(x);
            if (!op) continue;
            if (n.layers.empty() || tree_->node(*op).op != TltOp::Until) continue;
            if (act_.done[tree_->node(*op).children.front()]) continue;
            pending.push_back(x);
        }
        std::vector<const std::vector<int>*> layers;
        for (auto x : pending) {
            const std::vector<int>* l = &tree_->node(x).layers;
            if (guarded) {
                auto& g = guarded_layers(x, guard);
                if (xk < g.size() && g[xk] >= 0) l = &g;
            }
            layers.push_back(l);
        }
        std::vector<std::size_t> order(pending.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return layer(*layers[a], xk) < layer(*layers[b], xk); });
        ControlSet out = cs;
        for (auto i : order) {
            long best = std::numeric_limits<long>::max();
            std::vector<std::pair<InputId, long>> scores;
            out.for_each([&](std::size_t u) {
                long worst = -1;
                for (auto y : cts_->successors(xk, u)) worst = std::max(worst, layer(*layers[i], y));
                scores.push_back({u, worst});
                best = std::min(best, worst);
            });
            ControlSet keep(cts_->num_inputs());
            for (auto& [u, w] : scores)
                if (w == best) keep.insert(u);
            out = keep;
            if (out.size() <= 1) break;
        }
        return out;
    }

    /// The input the command line picks: lowest index after the optional progress filter.
    InputId auto_choice() const {
        ControlSet cs = progress_ ? progress_filter(feasible_) : feasible_;
        return cs.first();
    }

    /// Applies u and appends the successor. `observed` supplies it for the external resolver.
    StateId apply_input(InputId u, std::optional<StateId> observed = std::nullopt) {
        if (status_ != SessionStatus::Active) throw SessionNotActive();
        if (u >= cts_->num_inputs() || !feasible_.contains(u))
            throw InputNotFeasible("input " + std::to_string(u) + " is not in the feasible set");
        auto& succ = cts_->successors(state(), u);
        if (succ.empty()) throw EmptySuccessor("input has no successor");
        StateId next = observed ? *observed : resolve(u);
        if (!std::binary_search(succ.begin(), succ.end(), next))
            throw PrefixInconsistent("state " + cts_->state_name(next) + " is not a successor under this input");
        history_.push_back({k(), state(), feasible_, u, next});
        prefix_.push_back(next);
        refresh(true);
        return next;
    }

    /// Replaces the specification, reusing subtrees of the current tree whose provenance matches.
    void update_spec(const Formula& phi) {
        if (status_ != SessionStatus::Active) throw SessionNotActive();
        std::size_t reused = 0;
        auto t = std::make_shared<const Tlt>(build_controlled_tlt(*cts_, phi, tree_.get(), &reused));
        tree_ = std::move(t);
        phi_ = phi;
        reused_ = reused;
        layer_cache_.clear();
        keys_start_ = k();
        keys_.assign(prefix_.size() - 1, {});
        refresh(true);
    }

    void mark_completed() {
        if (status_ == SessionStatus::Active) status_ = SessionStatus::Completed;
    }

    SynthesisSession fork() const { return *this; }

    /// Lasso closed by the first repetition of (state, active nodes) along the realized prefix.
    std::optional<Lasso> detect_lasso() const {
        for (std::size_t j = keys_start_; j < keys_.size(); ++j)
            for (std::size_t i = j + 1; i < keys_.size(); ++i)
                if (keys_[i] == keys_[j]) {
                    Lasso l;
                    l.prefix.assign(prefix_.begin(), prefix_.begin() + static_cast<std::ptrdiff_t>(j));
                    l.cycle.assign(prefix_.begin() + static_cast<std::ptrdiff_t>(j), prefix_.begin() + static_cast<std::ptrdiff_t>(i));
                    return l;
                }
        return std::nullopt;
    }

    /// Worst-case feasible-set size after choosing u, for each successor.
    std::size_t next_feasible_size(InputId u, StateId next) const {
        SynthesisSession probe = fork();
        probe.resolver_ = Resolver::external();
        probe.apply_input(u, next);
        return probe.feasible_.size();
    }

private:
    static long layer(const std::vector<int>& l, StateId y) {
        if (y >= l.size() || l[y] < 0) return std::numeric_limits<long>::max() / 2;
        return l[y];
    }

    // Layers of R^c(X ∩ G, Y ∩ G) for an until node.
    const std::vector<int>& guarded_layers(std::size_t node, const StateSet& guard) const {
        for (auto& c : layer_cache_)
            if (c.node == node && c.guard == guard) return c.layers;
        auto& n = tree_->node(node);
        auto child = tree_->node(*tree_->op_below(node)).children.front();
        auto r = ctrl_reach(*cts_, n.set & guard, tree_->node(child).set & guard);
        CachedLayers c{node, guard, std::move(r.layers)};
        if (layer_cache_.size() > 64) layer_cache_.clear();
        layer_cache_.push_back(std::move(c));
        return layer_cache_.back().layers;
    }

    StateId resolve(InputId u) {
        auto& succ = cts_->successors(state(), u);
        switch (resolver_.kind) {
            case ResolverKind::Random: {
                std::uniform_int_distribution<std::size_t> d(0, succ.size() - 1);
                return succ[d(rng_)];
            }
            case ResolverKind::Adversarial: {
                StateId pick = succ.front();
                std::size_t best = std::numeric_limits<std::size_t>::max();
                for (auto y : succ) {
                    auto sz = next_feasible_size(u, y);
                    if (sz < best) {
                        best = sz;
                        pick = y;
                    }
                }
                return pick;
            }
            case ResolverKind::Scripted: {
                if (resolver_.cursor >= resolver_.script.size()) throw Error("script-exhausted", "scripted resolver has no more successors");
                return resolver_.script[resolver_.cursor++];
            }
            case ResolverKind::External: throw Error("successor-required", "external resolver needs an observed successor", "next");
        }
        return succ.front();
    }

    void refresh(bool new_position) {
        act_ = compute_activation(*tree_, prefix_);
        if (new_position) keys_.push_back(key());
        if (status_ != SessionStatus::Active) return;
        auto ct = control_tree(*cts_, *tree_, prefix_, act_);
        feasible_ = ct.empty_tree ? ControlSet(cts_->num_inputs()) : feasible_from(*tree_, ct);
        if (feasible_.empty()) status_ = SessionStatus::Deadlock;
    }

    std::vector<std::size_t> key() const {
        std::vector<std::size_t> k{state()};
        for (std::size_t i = 0; i < act_.active.size(); ++i)
            if (act_.active[i]) k.push_back(i);
        return k;
    }

    std::shared_ptr<const ControlledTransitionSystem> cts_;
    std::shared_ptr<const Tlt> tree_;
    Formula phi_;
    Resolver resolver_;
    std::mt19937_64 rng_;
    std::uint64_t seed_ = 0;
    bool progress_ = false;
    std::vector<StateId> prefix_;
    std::vector<StepRecord> history_;
    std::vector<std::vector<std::size_t>> keys_;
    std::size_t keys_start_ = 0;
    Activation act_;
    ControlSet feasible_;
    SessionStatus status_ = SessionStatus::Active;
    std::size_t reused_ = 0;
    struct CachedLayers {
        std::size_t node;
        StateSet guard;
        std::vector<int> layers;
    };
    mutable std::vector<CachedLayers> layer_cache_;
};

}  // namespace tlt
