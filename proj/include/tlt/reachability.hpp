#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "systems.hpp"

namespace tlt {

/// Fixed point of a reachability iteration plus the first iterate each member entered.
struct ReachResult {
    StateSet set;
    std::vector<int> layers;  // -1 when absent
    std::size_t iterations = 0;

    std::optional<std::size_t> layer(StateId x) const {
        if (x >= layers.size() || layers[x] < 0) return std::nullopt;
        return static_cast<std::size_t>(layers[x]);
    }
    int max_layer() const {
        int m = -1;
        for (int l : layers) m = l > m ? l : m;
        return m;
    }
};

enum class ReachOp { Min, Max, RobustInv, Inv, Ctrl, Rcis };

namespace detail {

inline bool all_in(const std::vector<StateId>& s, const StateSet& q) {
    for (auto y : s)
        if (!q.contains(y)) return false;
    return true;
}
inline bool any_in(const std::vector<StateId>& s, const StateSet& q) {
    for (auto y : s)
        if (q.contains(y)) return true;
    return false;
}
inline bool ctrl_into(const ControlledTransitionSystem& cts, StateId x, const StateSet& q) {
    bool ok = false;
    cts.admissible(x).for_each([&](std::size_t u) {
        if (!ok && all_in(cts.successors(x, u), q)) ok = true;
    });
    return ok;
}

// Growing iteration Q_{k+1} = {x in Ω1 | step(x, Q_k)} ∪ Q_k from Q_0 = Ω2.
template <class Step>
ReachResult grow(std::size_t n, const StateSet& omega1, const StateSet& omega2, Step step) {
    ReachResult r{omega2, std::vector<int>(n, -1), 0};
    omega2.for_each([&](std::size_t x) { r.layers[x] = 0; });
    StateSet candidates = omega1 - omega2;
    for (int k = 1;; ++k) {
        std::vector<StateId> added;
        candidates.for_each([&](std::size_t x) {
            if (step(x, r.set)) added.push_back(x);
        });
        if (added.empty()) break;
        for (auto x : added) {
            r.set.insert(x);
            candidates.erase(x);
            r.layers[x] = k;
        }
        r.iterations = static_cast<std::size_t>(k);
        if (r.iterations > n) throw std::logic_error("reachability iteration failed to converge");
    }
    return r;
}

// Shrinking iteration Q_{k+1} = {x in Q_k | step(x, Q_k)} from Q_0 = Ω.
template <class Step>
ReachResult shrink(std::size_t n, const StateSet& omega, Step step) {
    ReachResult r{omega, std::vector<int>(n, -1), 0};
    for (std::size_t k = 1;; ++k) {
        std::vector<StateId> removed;
        r.set.for_each([&](std::size_t x) {
            if (!step(x, r.set)) removed.push_back(x);
        });
        if (removed.empty()) break;
        for (auto x : removed) r.set.erase(x);
        r.iterations = k;
        if (r.iterations > n) throw std::logic_error("invariance iteration failed to converge");
    }
    r.set.for_each([&](std::size_t x) { r.layers[x] = 0; });
    return r;
}

inline void check_universe(std::size_t n, const StateSet& s) {
    if (s.universe() != n) throw std::invalid_argument("state set universe does not match system");
}

}  // namespace detail

/// R^m(Ω1, Ω2)
inline ReachResult reach_min(const TransitionSystem& ts, const StateSet& omega1, const StateSet& omega2) {
    detail::check_universe(ts.size(), omega1);
    detail::check_universe(ts.size(), omega2);
    return detail::grow(ts.size(), omega1, omega2,
                        [&](StateId x, const StateSet& q) { return detail::all_in(ts.successors(x), q); });
}

/// R^M(Ω1, Ω2)
inline ReachResult reach_max(const TransitionSystem& ts, const StateSet& omega1, const StateSet& omega2) {
    detail::check_universe(ts.size(), omega1);
    detail::check_universe(ts.size(), omega2);
    return detail::grow(ts.size(), omega1, omega2,
                        [&](StateId x, const StateSet& q) { return detail::any_in(ts.successors(x), q); });
}

/// RI(Ω)
inline ReachResult robust_invariant(const TransitionSystem& ts, const StateSet& omega) {
    detail::check_universe(ts.size(), omega);
    return detail::shrink(ts.size(), omega, [&](StateId x, const StateSet& q) { return detail::all_in(ts.successors(x), q); });
}

/// I(Ω)
inline ReachResult invariant(const TransitionSystem& ts, const StateSet& omega) {
    detail::check_universe(ts.size(), omega);
    return detail::shrink(ts.size(), omega, [&](StateId x, const StateSet& q) { return detail::any_in(ts.successors(x), q); });
}

/// R^c(Ω1, Ω2)
inline ReachResult ctrl_reach(const ControlledTransitionSystem& cts, const StateSet& omega1, const StateSet& omega2) {
    detail::check_universe(cts.size(), omega1);
    detail::check_universe(cts.size(), omega2);
    return detail::grow(cts.size(), omega1, omega2, [&](StateId x, const StateSet& q) { return detail::ctrl_into(cts, x, q); });
}

/// RCI(Ω)
inline ReachResult rcis(const ControlledTransitionSystem& cts, const StateSet& omega) {
    detail::check_universe(cts.size(), omega);
    return detail::shrink(cts.size(), omega, [&](StateId x, const StateSet& q) { return detail::ctrl_into(cts, x, q); });
}

/// One-step sets R(S, Y, 1) used for the next operator.
inline StateSet pre_forall(const TransitionSystem& ts, const StateSet& y) {
    StateSet r(ts.size());
    for (StateId x = 0; x < ts.size(); ++x)
        if (detail::all_in(ts.successors(x), y)) r.insert(x);
    return r;
}
inline StateSet pre_exists(const TransitionSystem& ts, const StateSet& y) {
    StateSet r(ts.size());
    for (StateId x = 0; x < ts.size(); ++x)
        if (detail::any_in(ts.successors(x), y)) r.insert(x);
    return r;
}
inline StateSet pre_ctrl(const ControlledTransitionSystem& cts, const StateSet& y) {
    StateSet r(cts.size());
    for (StateId x = 0; x < cts.size(); ++x)
        if (detail::ctrl_into(cts, x, y)) r.insert(x);
    return r;
}

}  // namespace tlt
