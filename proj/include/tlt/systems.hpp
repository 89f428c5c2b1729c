#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "index_set.hpp"

namespace tlt {

/// Reserved atom carried only by the absorbing state of a grid abstraction.
inline const std::string kOutAtom = "__out";

/// State naming, alphabet, labeling and initial states shared by both system kinds.
class Labeled {
public:
    Labeled() = default;
    Labeled(std::size_t n, StateSet initial, std::vector<std::string> atoms, std::vector<std::vector<std::size_t>> labels,
            std::vector<std::string> names)
        : n_(n), initial_(std::move(initial)), atoms_(std::move(atoms)), labels_(std::move(labels)), names_(std::move(names)) {
        if (initial_.universe() != n_) throw InvalidSystem("initial set has wrong universe", "initial");
        if (labels_.empty()) labels_.resize(n_);
        if (labels_.size() != n_) throw InvalidSystem("labels must list every state", "states");
        if (names_.empty())
            for (std::size_t i = 0; i < n_; ++i) names_.push_back(std::to_string(i));
        if (names_.size() != n_) throw InvalidSystem("names must list every state", "states");
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (atom_index_.count(atoms_[i])) throw InvalidSystem("duplicate atom '" + atoms_[i] + "'", "atoms");
            atom_index_[atoms_[i]] = i;
        }
        for (std::size_t i = 0; i < n_; ++i) {
            if (name_index_.count(names_[i])) throw InvalidSystem("duplicate state name '" + names_[i] + "'", "states");
            name_index_[names_[i]] = i;
        }
        atom_sets_.assign(atoms_.size(), StateSet(n_));
        for (std::size_t x = 0; x < n_; ++x)
            for (auto a : labels_[x]) {
                if (a >= atoms_.size()) throw InvalidSystem("label outside alphabet", "states");
                atom_sets_[a].insert(x);
            }
    }

    std::size_t size() const { return n_; }
    const StateSet& initial() const { return initial_; }
    const std::vector<std::string>& atoms() const { return atoms_; }
    const std::vector<std::size_t>& labels(StateId x) const { return labels_.at(x); }
    const std::string& state_name(StateId x) const { return names_.at(x); }
    const std::vector<std::string>& state_names() const { return names_; }

    std::optional<StateId> find_state(const std::string& name) const {
        auto it = name_index_.find(name);
        if (it == name_index_.end()) return std::nullopt;
        return it->second;
    }
    bool has_atom(const std::string& a) const { return atom_index_.count(a) > 0; }
    std::size_t atom_index(const std::string& a) const {
        auto it = atom_index_.find(a);
        if (it == atom_index_.end()) throw UnknownAtom(a);
        return it->second;
    }
    /// L^{-1}(a)
    const StateSet& label_set(const std::string& a) const { return atom_sets_[atom_index(a)]; }
    std::vector<std::string> label_names(StateId x) const {
        std::vector<std::string> out;
        for (auto a : labels_.at(x)) out.push_back(atoms_[a]);
        return out;
    }
    StateSet all() const { return StateSet::full(n_); }
    StateSet none() const { return StateSet(n_); }

    void set_initial(StateSet s) {
        if (s.universe() != n_) throw InvalidSystem("initial set has wrong universe", "initial");
        initial_ = std::move(s);
    }

protected:
    std::size_t n_ = 0;
    StateSet initial_;
    std::vector<std::string> atoms_;
    std::vector<std::vector<std::size_t>> labels_;
    std::vector<std::string> names_;
    std::map<std::string, std::size_t> atom_index_;
    std::map<std::string, std::size_t> name_index_;
    std::vector<StateSet> atom_sets_;
};

class TransitionSystem : public Labeled {
public:
    TransitionSystem() = default;
    TransitionSystem(std::vector<std::vector<StateId>> succ, StateSet initial, std::vector<std::string> atoms,
                     std::vector<std::vector<std::size_t>> labels, std::vector<std::string> names = {})
        : Labeled(succ.size(), std::move(initial), std::move(atoms), std::move(labels), std::move(names)), succ_(std::move(succ)) {
        for (std::size_t x = 0; x < n_; ++x) {
            auto& s = succ_[x];
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            if (s.empty()) throw InvalidSystem("state '" + names_[x] + "' has no successor", "transitions");
            if (s.back() >= n_) throw InvalidSystem("transition target out of range", "transitions");
        }
    }

    const std::vector<StateId>& successors(StateId x) const { return succ_.at(x); }
    StateSet post(StateId x) const { return StateSet::from(n_, succ_.at(x)); }
    bool deterministic() const {
        for (auto& s : succ_)
            if (s.size() != 1) return false;
        return initial_.size() == 1;
    }

private:
    std::vector<std::vector<StateId>> succ_;
};

/// Axis-aligned box; used for grid-cell geometry and input vectors.
struct Box {
    std::vector<double> lo, hi;
};

class ControlledTransitionSystem : public Labeled {
public:
    ControlledTransitionSystem() = default;
    ControlledTransitionSystem(std::vector<std::vector<std::vector<StateId>>> succ, std::vector<std::string> input_names,
                               StateSet initial, std::vector<std::string> atoms, std::vector<std::vector<std::size_t>> labels,
                               std::vector<std::string> names = {})
        : Labeled(succ.size(), std::move(initial), std::move(atoms), std::move(labels), std::move(names)),
          inputs_(std::move(input_names)),
          succ_(std::move(succ)) {
        admissible_.reserve(n_);
        for (std::size_t x = 0; x < n_; ++x) {
            if (succ_[x].size() != inputs_.size()) throw InvalidSystem("successor table must cover every input", "transitions");
            ControlSet adm(inputs_.size());
            for (std::size_t u = 0; u < inputs_.size(); ++u) {
                auto& s = succ_[x][u];
                std::sort(s.begin(), s.end());
                s.erase(std::unique(s.begin(), s.end()), s.end());
                if (!s.empty()) {
                    if (s.back() >= n_) throw InvalidSystem("transition target out of range", "transitions");
                    adm.insert(u);
                }
            }
            if (adm.empty()) throw InvalidSystem("state '" + names_[x] + "' has no admissible input", "transitions");
            admissible_.push_back(std::move(adm));
        }
    }

    std::size_t num_inputs() const { return inputs_.size(); }
    const std::vector<std::string>& input_names() const { return inputs_; }
    std::optional<InputId> find_input(const std::string& name) const {
        for (std::size_t u = 0; u < inputs_.size(); ++u)
            if (inputs_[u] == name) return u;
        return std::nullopt;
    }
    const std::vector<StateId>& successors(StateId x, InputId u) const { return succ_.at(x).at(u); }
    StateSet post(StateId x, InputId u) const { return StateSet::from(n_, succ_.at(x).at(u)); }
    /// U(x)
    const ControlSet& admissible(StateId x) const { return admissible_.at(x); }
    ControlSet all_inputs() const { return ControlSet::full(inputs_.size()); }

    /// {u in U(x) | Post(x,u) ⊆ target}
    ControlSet inputs_into(StateId x, const StateSet& target) const {
        ControlSet out(inputs_.size());
        admissible_[x].for_each([&](std::size_t u) {
            for (auto y : succ_[x][u])
                if (!target.contains(y)) return;
            out.insert(u);
        });
        return out;
    }

    // Optional geometry for grid abstractions.
    const std::vector<Box>& cells() const { return cells_; }
    const std::vector<std::vector<double>>& input_vectors() const { return input_vectors_; }
    void set_geometry(std::vector<Box> cells, std::vector<std::vector<double>> input_vectors) {
        cells_ = std::move(cells);
        input_vectors_ = std::move(input_vectors);
    }

private:
    std::vector<std::string> inputs_;
    std::vector<std::vector<std::vector<StateId>>> succ_;
    std::vector<ControlSet> admissible_;
    std::vector<Box> cells_;
    std::vector<std::vector<double>> input_vectors_;
};

inline StateSet post(const TransitionSystem& ts, StateId x) { return ts.post(x); }
inline StateSet post_ctrl(const ControlledTransitionSystem& cts, StateId x, InputId u) { return cts.post(x, u); }
inline ControlSet admissible(const ControlledTransitionSystem& cts, StateId x) { return cts.admissible(x); }
inline StateSet label_set(const Labeled& sys, const std::string& atom) { return sys.label_set(atom); }

/// Ultimately periodic trajectory prefix · cycle^ω.
struct Lasso {
    std::vector<StateId> prefix;
    std::vector<StateId> cycle;

    std::size_t period_start() const { return prefix.size(); }
    std::size_t length() const { return prefix.size() + cycle.size(); }
    /// Position t folded onto 0..length()-1.
    std::size_t normalize(std::size_t t) const {
        if (t < prefix.size()) return t;
        return prefix.size() + (t - prefix.size()) % cycle.size();
    }
    StateId at(std::size_t t) const {
        auto n = normalize(t);
        return n < prefix.size() ? prefix[n] : cycle[n - prefix.size()];
    }
    /// Successor position of a normalized position.
    std::size_t next_pos(std::size_t p) const { return p + 1 < length() ? p + 1 : prefix.size(); }

    friend bool operator==(const Lasso&, const Lasso&) = default;
};

inline bool lasso_consistent(const TransitionSystem& ts, const Lasso& l) {
    if (l.cycle.empty()) return false;
    for (std::size_t p = 0; p < l.length(); ++p) {
        auto x = l.at(p), y = l.at(l.next_pos(p));
        auto& s = ts.successors(x);
        if (!std::binary_search(s.begin(), s.end(), y)) return false;
    }
    return true;
}

}  // namespace tlt
