#pragma once

#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <tlt/ltl.hpp>
#include <tlt/satisfaction.hpp>
#include <tlt/systems.hpp>
#include <tlt/tlt.hpp>
#include <tlt/verify.hpp>

namespace tlt {
template <class Tag>
void PrintTo(const IndexSet<Tag>& s, std::ostream* os) {
    *os << "{";
    bool first = true;
    s.for_each([&](std::size_t i) {
        *os << (first ? "" : ",") << i;
        first = false;
    });
    *os << "}/" << s.universe();
}
}  // namespace tlt

namespace fixtures {

using namespace tlt;

// Traffic light: ids 0..4 carry the names "1".."5".
inline TransitionSystem traffic_light() {
    std::vector<std::vector<StateId>> succ{{1, 4}, {2, 4}, {3, 4}, {0, 4}, {0}};
    std::vector<std::vector<std::size_t>> labels{{0}, {0, 1}, {2}, {1}, {3}};
    return TransitionSystem(succ, StateSet(5, {0}), {"r", "y", "g", "b"}, labels, {"1", "2", "3", "4", "5"});
}

// Four-state controlled system with inputs a1, a2; ids 0..3 are s1..s4.
inline ControlledTransitionSystem example7() {
    std::vector<std::vector<std::vector<StateId>>> succ{
        {{1, 2}, {}},
        {{1, 2}, {3}},
        {{1}, {2}},
        {{1, 3}, {}},
    };
    std::vector<std::vector<std::size_t>> labels{{0}, {1}, {2}, {1}};
    return ControlledTransitionSystem(succ, {"a1", "a2"}, StateSet(4, {0}), {"o1", "o2", "o3"}, labels, {"s1", "s2", "s3", "s4"});
}

inline std::size_t biased_degree(std::mt19937_64& rng, std::size_t n, std::size_t max_deg = 3) {
    std::discrete_distribution<int> d({5, 3, 2});
    return std::min<std::size_t>(std::min(n, max_deg), static_cast<std::size_t>(d(rng)) + 1);
}

inline std::vector<StateId> random_targets(std::mt19937_64& rng, std::size_t n, std::size_t k) {
    std::vector<StateId> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(k);
    return all;
}

inline std::vector<std::vector<std::size_t>> random_labels(std::mt19937_64& rng, std::size_t n, std::size_t n_atoms) {
    std::vector<std::vector<std::size_t>> labels(n);
    std::bernoulli_distribution coin(0.45);
    for (auto& l : labels)
        for (std::size_t a = 0; a < n_atoms; ++a)
            if (coin(rng)) l.push_back(a);
    return labels;
}

inline std::vector<std::string> atom_names(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('p' + i)));
    return out;
}

inline TransitionSystem random_ts(std::mt19937_64& rng, std::size_t n, std::size_t n_atoms, bool deterministic = false) {
    std::vector<std::vector<StateId>> succ(n);
    for (auto& s : succ) s = random_targets(rng, n, deterministic ? 1 : biased_degree(rng, n));
    StateSet init(n);
    init.insert(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
    return TransitionSystem(succ, init, atom_names(n_atoms), random_labels(rng, n, n_atoms));
}

inline ControlledTransitionSystem random_cts(std::mt19937_64& rng, std::size_t n, std::size_t n_inputs, std::size_t n_atoms) {
    std::vector<std::vector<std::vector<StateId>>> succ(n, std::vector<std::vector<StateId>>(n_inputs));
    std::bernoulli_distribution enabled(0.75);
    for (std::size_t x = 0; x < n; ++x) {
        bool any = false;
        for (std::size_t u = 0; u < n_inputs; ++u)
            if (enabled(rng)) {
                succ[x][u] = random_targets(rng, n, biased_degree(rng, n, 2));
                any = true;
            }
        if (!any) succ[x][0] = random_targets(rng, n, 1);
    }
    std::vector<std::string> inputs;
    for (std::size_t u = 0; u < n_inputs; ++u) inputs.push_back("u" + std::to_string(u));
    StateSet init(n);
    init.insert(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
    return ControlledTransitionSystem(succ, inputs, init, atom_names(n_atoms), random_labels(rng, n, n_atoms));
}

// Random formula over the full syntax (F, G and negation of compound subformulas included).
inline Formula random_formula(std::mt19937_64& rng, int depth, std::size_t n_atoms) {
    auto atoms = atom_names(n_atoms);
    std::uniform_int_distribution<int> leaf(0, static_cast<int>(n_atoms) + 1);
    if (depth == 0) {
        int l = leaf(rng);
        if (l == static_cast<int>(n_atoms)) return Formula::truth();
        if (l == static_cast<int>(n_atoms) + 1) return Formula::falsity();
        return Formula::atom(atoms[static_cast<std::size_t>(l)]);
    }
    std::uniform_int_distribution<int> pick(0, 10);
    switch (pick(rng)) {
        case 0: return Formula::lnot(random_formula(rng, depth - 1, n_atoms));
        case 1: return Formula::land(random_formula(rng, depth - 1, n_atoms), random_formula(rng, depth - 1, n_atoms));
        case 2: return Formula::lor(random_formula(rng, depth - 1, n_atoms), random_formula(rng, depth - 1, n_atoms));
        case 3: return Formula::next(random_formula(rng, depth - 1, n_atoms));
        case 4: return Formula::until(random_formula(rng, depth - 1, n_atoms), random_formula(rng, depth - 1, n_atoms));
        case 5: return Formula::weak_until(random_formula(rng, depth - 1, n_atoms), random_formula(rng, depth - 1, n_atoms));
        case 6: return Formula::eventually(random_formula(rng, depth - 1, n_atoms));
        case 7: return Formula::always(random_formula(rng, depth - 1, n_atoms));
        default: return random_formula(rng, 0, n_atoms);
    }
}

// Random formula already in weak-until positive normal form.
inline Formula random_pnf(std::mt19937_64& rng, int depth, std::size_t n_atoms) {
    auto atoms = atom_names(n_atoms);
    if (depth == 0) {
        std::uniform_int_distribution<int> l(0, static_cast<int>(2 * n_atoms) + 1);
        int v = l(rng);
        if (v == static_cast<int>(2 * n_atoms)) return Formula::truth();
        if (v == static_cast<int>(2 * n_atoms) + 1) return Formula::falsity();
        auto a = Formula::atom(atoms[static_cast<std::size_t>(v) / 2]);
        return v % 2 ? Formula::lnot(a) : a;
    }
    std::uniform_int_distribution<int> pick(0, 6);
    switch (pick(rng)) {
        case 0: return Formula::land(random_pnf(rng, depth - 1, n_atoms), random_pnf(rng, depth - 1, n_atoms));
        case 1: return Formula::lor(random_pnf(rng, depth - 1, n_atoms), random_pnf(rng, depth - 1, n_atoms));
        case 2: return Formula::next(random_pnf(rng, depth - 1, n_atoms));
        case 3: return Formula::until(random_pnf(rng, depth - 1, n_atoms), random_pnf(rng, depth - 1, n_atoms));
        case 4: return Formula::weak_until(random_pnf(rng, depth - 1, n_atoms), random_pnf(rng, depth - 1, n_atoms));
        case 5: return Formula::weak_until(random_pnf(rng, depth - 1, n_atoms), Formula::falsity());
        default: return random_pnf(rng, 0, n_atoms);
    }
}

// Closed loop of a stationary policy; inputs must be admissible.
inline TransitionSystem closed_loop(const ControlledTransitionSystem& cts, const std::vector<InputId>& mu) {
    std::vector<std::vector<StateId>> succ(cts.size());
    std::vector<std::vector<std::size_t>> labels(cts.size());
    for (StateId x = 0; x < cts.size(); ++x) {
        succ[x] = cts.successors(x, mu[x]);
        labels[x] = cts.labels(x);
    }
    return TransitionSystem(succ, cts.initial(), cts.atoms(), labels, cts.state_names());
}

// Some stationary policy whose every lasso from x0 (length <= max_len) satisfies t.
inline std::optional<std::vector<InputId>> feasible_policy(const ControlledTransitionSystem& cts, const Tlt& t, StateId x0,
                                                          std::size_t max_len) {
    std::vector<std::vector<InputId>> choices(cts.size());
    for (StateId x = 0; x < cts.size(); ++x) cts.admissible(x).for_each([&](std::size_t u) { choices[x].push_back(u); });
    std::vector<std::size_t> idx(cts.size(), 0);
    for (;;) {
        std::vector<InputId> mu(cts.size());
        for (StateId x = 0; x < cts.size(); ++x) mu[x] = choices[x][idx[x]];
        auto ts = closed_loop(cts, mu);
        auto bad = for_each_lasso(ts, x0, max_len, [&](const Lasso& l) { return !tlt_satisfies(l, t); });
        if (!bad) return mu;
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == choices[i].size()) idx[i++] = 0;
        if (i == idx.size()) return std::nullopt;
    }
}

// ◇□ℓ, □◇ℓ or ℓ U ℓ' over random literals.
inline Formula random_objective(std::mt19937_64& rng, std::size_t n_atoms) {
    auto atoms = atom_names(n_atoms);
    auto lit = [&] {
        auto a = Formula::atom(atoms[std::uniform_int_distribution<std::size_t>(0, n_atoms - 1)(rng)]);
        return std::bernoulli_distribution(0.3)(rng) ? Formula::lnot(a) : a;
    };
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
        case 0: return Formula::eventually(Formula::always(lit()));
        case 1: return Formula::always(Formula::eventually(lit()));
        default: return Formula::until(lit(), lit());
    }
}

inline std::string data_path(const std::string& name) { return std::string(TLT_DATA_DIR) + "/" + name; }

}  // namespace fixtures
