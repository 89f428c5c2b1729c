#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ltl.hpp"
#include "systems.hpp"
#include "tlt.hpp"

namespace tlt {

/// Ultimately periodic word of label sets: prefix · cycle^ω.
struct LassoWord {
    std::vector<std::set<std::string>> prefix;
    std::vector<std::set<std::string>> cycle;
};

inline LassoWord word_of(const Labeled& sys, const Lasso& l) {
    LassoWord w;
    auto conv = [&](StateId x) {
        auto names = sys.label_names(x);
        return std::set<std::string>(names.begin(), names.end());
    };
    for (auto x : l.prefix) w.prefix.push_back(conv(x));
    for (auto x : l.cycle) w.cycle.push_back(conv(x));
    return w;
}

namespace detail {

// holds(atom, p) reports whether the atom labels position p of a lasso with P prefix and L total positions.
template <class Holds>
std::vector<bool> eval_positions(std::size_t P, std::size_t L, const Holds& holds, const Formula& f) {
    auto nx = [&](std::size_t p) { return p + 1 < L ? p + 1 : P; };
    auto until_fix = [&](const std::vector<bool>& a, const std::vector<bool>& b, bool init) {
        std::vector<bool> v(L, init);
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t p = L; p-- > 0;) {
                bool nv = b[p] || (a[p] && v[nx(p)]);
                if (nv != v[p]) {
                    v[p] = nv;
                    changed = true;
                }
            }
        }
        return v;
    };
    std::vector<bool> v(L);
    switch (f.kind()) {
        case Kind::True: return std::vector<bool>(L, true);
        case Kind::False: return std::vector<bool>(L, false);
        case Kind::Atom:
            for (std::size_t p = 0; p < L; ++p) v[p] = holds(f.name(), p);
            return v;
        case Kind::Not: {
            auto a = eval_positions(P, L, holds, f.sub());
            for (std::size_t p = 0; p < L; ++p) v[p] = !a[p];
            return v;
        }
        case Kind::And:
        case Kind::Or: {
            auto a = eval_positions(P, L, holds, f.left()), b = eval_positions(P, L, holds, f.right());
            for (std::size_t p = 0; p < L; ++p) v[p] = f.kind() == Kind::And ? (a[p] && b[p]) : (a[p] || b[p]);
            return v;
        }
        case Kind::Next: {
            auto a = eval_positions(P, L, holds, f.sub());
            for (std::size_t p = 0; p < L; ++p) v[p] = a[nx(p)];
            return v;
        }
        case Kind::Until: return until_fix(eval_positions(P, L, holds, f.left()), eval_positions(P, L, holds, f.right()), false);
        case Kind::WeakUntil: return until_fix(eval_positions(P, L, holds, f.left()), eval_positions(P, L, holds, f.right()), true);
        case Kind::Eventually: return until_fix(std::vector<bool>(L, true), eval_positions(P, L, holds, f.sub()), false);
        case Kind::Always: return until_fix(eval_positions(P, L, holds, f.sub()), std::vector<bool>(L, false), true);
    }
    return v;
}

}  // namespace detail

/// Exact LTL satisfaction of prefix · cycle^ω at position 0.
inline bool eval_lasso(const LassoWord& w, const Formula& f) {
    if (w.cycle.empty()) throw std::invalid_argument("lasso word needs a nonempty cycle");
    const std::size_t P = w.prefix.size();
    auto holds = [&](const std::string& a, std::size_t p) { return (p < P ? w.prefix[p] : w.cycle[p - P]).count(a) > 0; };
    return detail::eval_positions(P, P + w.cycle.size(), holds, f)[0];
}

inline bool eval_lasso(const Labeled& sys, const Lasso& l, const Formula& f) {
    if (l.cycle.empty()) throw std::invalid_argument("lasso needs a nonempty cycle");
    auto holds = [&](const std::string& a, std::size_t p) { return sys.has_atom(a) && sys.label_set(a).contains(l.at(p)); };
    return detail::eval_positions(l.prefix.size(), l.length(), holds, f)[0];
}

enum class VerdictKind { Proved, Refuted, Unknown };

inline const char* to_string(VerdictKind v) {
    switch (v) {
        case VerdictKind::Proved: return "proved";
        case VerdictKind::Refuted: return "refuted";
        case VerdictKind::Unknown: return "unknown";
    }
    return "?";
}

struct Verdict {
    VerdictKind kind = VerdictKind::Unknown;
    std::string via;             // first condition that decided the verdict
    StateSet witness;            // supporting or offending states for `via`
    std::vector<std::string> proved_by;   // every proving condition that holds
    std::vector<std::string> refuted_by;  // every refuting condition that holds
};

/// Sound model checking by comparing the initial states against the four tree roots.
inline Verdict model_check(const TransitionSystem& ts, const Formula& phi) {
    const StateSet& s0 = ts.initial();
    Formula neg = negate(phi);
    StateSet u_pos = build_universal_tlt(ts, phi).root_set();
    StateSet e_neg = build_existential_tlt(ts, neg).root_set();
    StateSet e_pos = build_existential_tlt(ts, phi).root_set();
    StateSet u_neg = build_universal_tlt(ts, neg).root_set();

    Verdict v;
    std::vector<std::pair<std::string, StateSet>> proofs, refutations;
    if (s0.subset_of(u_pos)) proofs.push_back({"thm3(i)", s0 & u_pos});
    if (!s0.intersects(e_neg)) proofs.push_back({"thm3(ii)", e_neg});
    if (!s0.subset_of(e_pos)) refutations.push_back({"thm4(i)", s0 - e_pos});
    if (s0.intersects(u_neg)) refutations.push_back({"thm4(ii)", s0 & u_neg});
    for (auto& p : proofs) v.proved_by.push_back(p.first);
    for (auto& r : refutations) v.refuted_by.push_back(r.first);
    if (!proofs.empty() && !refutations.empty())
        throw std::logic_error("model check found both a proof and a refutation");
    if (!proofs.empty()) {
        v.kind = VerdictKind::Proved;
        v.via = proofs.front().first;
        v.witness = proofs.front().second;
    } else if (!refutations.empty()) {
        v.kind = VerdictKind::Refuted;
        v.via = refutations.front().first;
        v.witness = refutations.front().second;
    } else {
        v.witness = s0;
    }
    return v;
}

enum class OracleOutcome { Holds, RefutedByLasso, Inconclusive };

struct OracleResult {
    OracleOutcome outcome = OracleOutcome::Inconclusive;
    std::optional<Lasso> lasso;
};

/// Enumerates every lasso from x0 with |prefix| + |cycle| <= max_len and calls `visit`
/// until it returns true. Returns the lasso that stopped the search.
inline std::optional<Lasso> for_each_lasso(const TransitionSystem& ts, StateId x0, std::size_t max_len,
                                           const std::function<bool(const Lasso&)>& visit) {
    std::vector<StateId> path{x0};
    std::optional<Lasso> hit;
    std::function<bool()> dfs = [&]() -> bool {
        StateId last = path.back();
        for (auto y : ts.successors(last)) {
            for (std::size_t i = 0; i < path.size(); ++i) {
                if (path[i] != y) continue;
                Lasso l{{path.begin(), path.begin() + static_cast<std::ptrdiff_t>(i)},
                        {path.begin() + static_cast<std::ptrdiff_t>(i), path.end()}};
                if (visit(l)) {
                    hit = l;
                    return true;
                }
            }
        }
        if (path.size() >= max_len) return false;
        for (auto y : ts.successors(last)) {
            path.push_back(y);
            bool stop = dfs();
            path.pop_back();
            if (stop) return true;
        }
        return false;
    };
    dfs();
    return hit;
}

/// Bounded lasso check of x0 ⊨ ∀φ.
inline OracleResult oracle_forall(const TransitionSystem& ts, StateId x0, const Formula& phi, std::size_t max_len) {
    auto bad = for_each_lasso(ts, x0, max_len, [&](const Lasso& l) { return !eval_lasso(ts, l, phi); });
    if (bad) return {OracleOutcome::RefutedByLasso, bad};
    return {max_len >= 2 * ts.size() ? OracleOutcome::Holds : OracleOutcome::Inconclusive, std::nullopt};
}

/// Bounded lasso search for a witness of x0 ⊨ ∃φ.
inline std::optional<Lasso> oracle_exists(const TransitionSystem& ts, StateId x0, const Formula& phi, std::size_t max_len) {
    return for_each_lasso(ts, x0, max_len, [&](const Lasso& l) { return eval_lasso(ts, l, phi); });
}

}  // namespace tlt
