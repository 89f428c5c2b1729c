#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "systems.hpp"

namespace tlt {

enum class LabelMode { Inner, Outer };

struct Region {
    std::string atom;
    Box box;
    /// Inner: cell ⊆ box. Outer: cell ∩ box ≠ ∅.
    LabelMode mode = LabelMode::Inner;
};

/// x' = A x + B u + w with x ∈ X, u ∈ U_box, w ∈ W_box.
struct LinearSystemSpec {
    std::vector<std::vector<double>> A, B;
    Box X, U, W;
    std::vector<Region> regions;
    std::vector<std::vector<double>> initial;
};

struct GridSpec {
    std::vector<std::size_t> cells_per_axis;
    std::vector<std::size_t> input_samples_per_axis;
};

namespace detail {

inline void check_box(const Box& b, std::size_t dim, const std::string& field) {
    if (b.lo.size() != dim || b.hi.size() != dim) throw DimensionMismatch(field + " has wrong dimension", field);
    for (std::size_t i = 0; i < dim; ++i)
        if (!(b.lo[i] <= b.hi[i])) throw DimensionMismatch(field + " is empty", field);
}

constexpr double kTol = 1e-9;

}  // namespace detail

/// Uniform grid over X; cell ids are row-major with axis 0 varying fastest.
class Grid {
public:
    Grid(Box X, std::vector<std::size_t> counts) : X_(std::move(X)), n_(std::move(counts)) {
        for (std::size_t i = 0; i < n_.size(); ++i) w_.push_back((X_.hi[i] - X_.lo[i]) / static_cast<double>(n_[i]));
        total_ = 1;
        for (auto c : n_) total_ *= c;
    }
    std::size_t dims() const { return n_.size(); }
    std::size_t cells() const { return total_; }
    double width(std::size_t axis) const { return w_[axis]; }

    std::vector<std::size_t> unflatten(std::size_t id) const {
        std::vector<std::size_t> idx(n_.size());
        for (std::size_t i = 0; i < n_.size(); ++i) {
            idx[i] = id % n_[i];
            id /= n_[i];
        }
        return idx;
    }
    std::size_t flatten(const std::vector<std::size_t>& idx) const {
        std::size_t id = 0;
        for (std::size_t i = n_.size(); i-- > 0;) id = id * n_[i] + idx[i];
        return id;
    }
    Box cell(std::size_t id) const {
        auto idx = unflatten(id);
        Box b;
        for (std::size_t i = 0; i < n_.size(); ++i) {
            b.lo.push_back(X_.lo[i] + w_[i] * static_cast<double>(idx[i]));
            b.hi.push_back(idx[i] + 1 == n_[i] ? X_.hi[i] : X_.lo[i] + w_[i] * static_cast<double>(idx[i] + 1));
        }
        return b;
    }
    /// Cell containing the point, or cells() when it lies outside X.
    std::size_t locate(const std::vector<double>& x) const {
        std::vector<std::size_t> idx(n_.size());
        for (std::size_t i = 0; i < n_.size(); ++i) {
            if (x[i] < X_.lo[i] || x[i] > X_.hi[i]) return total_;
            auto j = static_cast<std::size_t>(std::floor((x[i] - X_.lo[i]) / w_[i] + detail::kTol));
            idx[i] = std::min(j, n_[i] - 1);
        }
        return flatten(idx);
    }
    /// Index range of cells meeting [a, b] along one axis; empty when lo > hi.
    std::pair<long, long> span(std::size_t axis, double a, double b) const {
        long n = static_cast<long>(n_[axis]);
        long lo = static_cast<long>(std::floor((a - X_.lo[axis]) / w_[axis]));
        long hi = static_cast<long>(std::floor((b - X_.lo[axis]) / w_[axis]));
        return {std::max(lo, 0L), std::min(hi, n - 1)};
    }

private:
    Box X_;
    std::vector<std::size_t> n_;
    std::vector<double> w_;
    std::size_t total_ = 0;
};

/// Uniform samples of U including the endpoints; axis 0 varies fastest.
inline std::vector<std::vector<double>> sample_inputs(const Box& U, const std::vector<std::size_t>& samples) {
    std::vector<std::vector<double>> axes;
    std::size_t total = 1;
    for (std::size_t i = 0; i < U.lo.size(); ++i) {
        std::vector<double> axis;
        if (samples[i] == 1) axis.push_back(0.5 * (U.lo[i] + U.hi[i]));
        else
            for (std::size_t k = 0; k < samples[i]; ++k)
                axis.push_back(U.lo[i] + (U.hi[i] - U.lo[i]) * static_cast<double>(k) / static_cast<double>(samples[i] - 1));
        total *= axis.size();
        axes.push_back(std::move(axis));
    }
    std::vector<std::vector<double>> out;
    for (std::size_t id = 0; id < total; ++id) {
        std::vector<double> v;
        std::size_t rest = id;
        for (auto& axis : axes) {
            v.push_back(axis[rest % axis.size()]);
            rest /= axis.size();
        }
        out.push_back(std::move(v));
    }
    return out;
}

/// Interval hull of {A x + B u + w : x ∈ cell, w ∈ W}.
inline Box image(const LinearSystemSpec& s, const Box& cell, const std::vector<double>& u) {
    std::size_t n = s.A.size();
    Box r{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        double lo = 0, hi = 0;
        for (std::size_t j = 0; j < n; ++j) {
            double p = s.A[i][j] * cell.lo[j], q = s.A[i][j] * cell.hi[j];
            lo += std::min(p, q);
            hi += std::max(p, q);
        }
        double bu = 0;
        for (std::size_t j = 0; j < u.size(); ++j) bu += s.B[i][j] * u[j];
        lo += bu + s.W.lo[i];
        hi += bu + s.W.hi[i];
        r.lo[i] = lo;
        r.hi[i] = hi;
    }
    return r;
}

/// Finite abstraction: grid cells of X plus an absorbing state labeled `__out`.
/// Transitions over-approximate the one-step image; labels follow each region's mode.
inline ControlledTransitionSystem abstract_linear(const LinearSystemSpec& s, const GridSpec& g) {
    std::size_t n = s.A.size();
    if (n == 0) throw DimensionMismatch("A is empty", "A");
    for (auto& row : s.A)
        if (row.size() != n) throw DimensionMismatch("A must be square", "A");
    if (s.B.size() != n) throw DimensionMismatch("B must have as many rows as A", "B");
    std::size_t m = s.B.front().size();
    for (auto& row : s.B)
        if (row.size() != m) throw DimensionMismatch("B rows differ in length", "B");
    detail::check_box(s.X, n, "X");
    detail::check_box(s.U, m, "U");
    detail::check_box(s.W, n, "W");
    for (auto& r : s.regions) detail::check_box(r.box, n, "regions." + r.atom);
    if (g.cells_per_axis.size() != n) throw DimensionMismatch("grid needs one cell count per state axis", "grid");
    if (g.input_samples_per_axis.size() != m) throw DimensionMismatch("grid needs one sample count per input axis", "inputs");
    for (auto c : g.cells_per_axis)
        if (c == 0) throw EmptyGrid("cell count must be positive");
    for (auto c : g.input_samples_per_axis)
        if (c == 0) throw EmptyGrid("input sample count must be positive");
    for (std::size_t i = 0; i < n; ++i)
        if (!(s.X.hi[i] > s.X.lo[i])) throw EmptyGrid("state domain has zero width");

    Grid grid(s.X, g.cells_per_axis);
    std::size_t cells = grid.cells(), out = cells, total = cells + 1;
    auto inputs = sample_inputs(s.U, g.input_samples_per_axis);

    std::vector<std::string> atoms;
    for (auto& r : s.regions)
        if (std::find(atoms.begin(), atoms.end(), r.atom) == atoms.end()) atoms.push_back(r.atom);
    if (std::find(atoms.begin(), atoms.end(), kOutAtom) != atoms.end()) throw InvalidSystem("atom __out is reserved", "regions");
    atoms.push_back(kOutAtom);
    std::size_t out_atom = atoms.size() - 1;

    std::vector<Box> boxes;
    std::vector<std::vector<std::size_t>> labels(total);
    std::vector<std::string> names;
    for (std::size_t c = 0; c < cells; ++c) {
        Box b = grid.cell(c);
        for (auto& r : s.regions) {
            bool hit = true;
            for (std::size_t i = 0; i < n && hit; ++i) {
                if (r.mode == LabelMode::Inner)
                    hit = r.box.lo[i] <= b.lo[i] + detail::kTol && b.hi[i] <= r.box.hi[i] + detail::kTol;
                else  // cells are half-open [lo, hi), regions closed
                    hit = r.box.lo[i] < b.hi[i] - detail::kTol && r.box.hi[i] > b.lo[i] - detail::kTol;
            }
            if (!hit) continue;
            auto a = static_cast<std::size_t>(std::find(atoms.begin(), atoms.end(), r.atom) - atoms.begin());
            if (std::find(labels[c].begin(), labels[c].end(), a) == labels[c].end()) labels[c].push_back(a);
        }
        std::sort(labels[c].begin(), labels[c].end());
        auto idx = grid.unflatten(c);
        std::string name = "c";
        for (std::size_t i = 0; i < n; ++i) name += (i ? "_" : "") + std::to_string(idx[i]);
        names.push_back(name);
        boxes.push_back(std::move(b));
    }
    labels[out] = {out_atom};
    names.push_back("out");
    boxes.push_back(s.X);

    std::vector<std::vector<std::vector<StateId>>> succ(total, std::vector<std::vector<StateId>>(inputs.size()));
    for (std::size_t c = 0; c < cells; ++c) {
        for (std::size_t u = 0; u < inputs.size(); ++u) {
            Box img = image(s, boxes[c], inputs[u]);
            bool leaves = false, empty = false;
            std::vector<std::pair<long, long>> range;
            for (std::size_t i = 0; i < n; ++i) {
                double slack = detail::kTol * (1 + std::abs(img.lo[i]) + std::abs(img.hi[i]));
                if (img.lo[i] < s.X.lo[i] - slack || img.hi[i] > s.X.hi[i] + slack) leaves = true;
                auto r = grid.span(i, img.lo[i] - slack, img.hi[i] + slack);
                if (r.first > r.second) empty = true;
                range.push_back(r);
            }
            auto& dst = succ[c][u];
            if (!empty) {
                std::vector<std::size_t> idx(n);
                for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::size_t>(range[i].first);
                for (;;) {
                    dst.push_back(grid.flatten(idx));
                    std::size_t i = 0;
                    for (; i < n; ++i) {
                        if (static_cast<long>(idx[i]) < range[i].second) {
                            ++idx[i];
                            break;
                        }
                        idx[i] = static_cast<std::size_t>(range[i].first);
                    }
                    if (i == n) break;
                }
            }
            if (leaves) dst.push_back(out);
        }
    }
    for (std::size_t u = 0; u < inputs.size(); ++u) succ[out][u] = {out};

    std::vector<std::string> input_names;
    for (std::size_t u = 0; u < inputs.size(); ++u) input_names.push_back("u" + std::to_string(u));

    StateSet init(total);
    for (auto& x : s.initial) {
        if (x.size() != n) throw DimensionMismatch("initial point has wrong dimension", "initial");
        auto c = grid.locate(x);
        if (c == cells) throw InvalidSystem("initial point outside the state domain", "initial");
        init.insert(c);
    }
    ControlledTransitionSystem cts(std::move(succ), std::move(input_names), std::move(init), std::move(atoms), std::move(labels),
                                   std::move(names));
    cts.set_geometry(std::move(boxes), std::move(inputs));
    return cts;
}

}  // namespace tlt
