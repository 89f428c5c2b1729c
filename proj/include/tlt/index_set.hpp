#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace tlt {

/// Dense bit set over a fixed universe [0, size).
template <class Tag>
class IndexSet {
public:
    IndexSet() = default;
    explicit IndexSet(std::size_t universe) : n_(universe), words_((universe + 63) / 64, 0) {}
    IndexSet(std::size_t universe, std::initializer_list<std::size_t> members) : IndexSet(universe) {
        for (auto m : members) insert(m);
    }

    static IndexSet full(std::size_t universe) {
        IndexSet s(universe);
        for (auto& w : s.words_) w = ~std::uint64_t{0};
        s.trim();
        return s;
    }
    static IndexSet from(std::size_t universe, const std::vector<std::size_t>& members) {
        IndexSet s(universe);
        for (auto m : members) s.insert(m);
        return s;
    }

    std::size_t universe() const { return n_; }

    bool contains(std::size_t i) const { return i < n_ && (words_[i >> 6] >> (i & 63)) & 1u; }
    void insert(std::size_t i) {
        check(i);
        words_[i >> 6] |= std::uint64_t{1} << (i & 63);
    }
    void erase(std::size_t i) {
        check(i);
        words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }

    std::size_t size() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool empty() const {
        for (auto w : words_)
            if (w) return false;
        return true;
    }

    bool subset_of(const IndexSet& o) const {
        same(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }
    bool intersects(const IndexSet& o) const {
        same(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

    IndexSet& operator|=(const IndexSet& o) {
        same(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    IndexSet& operator&=(const IndexSet& o) {
        same(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    IndexSet& operator-=(const IndexSet& o) {
        same(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }
    friend IndexSet operator|(IndexSet a, const IndexSet& b) { return a |= b; }
    friend IndexSet operator&(IndexSet a, const IndexSet& b) { return a &= b; }
    friend IndexSet operator-(IndexSet a, const IndexSet& b) { return a -= b; }

    IndexSet complement() const {
        IndexSet r(n_);
        for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = ~words_[i];
        r.trim();
        return r;
    }

    friend bool operator==(const IndexSet& a, const IndexSet& b) { return a.n_ == b.n_ && a.words_ == b.words_; }

    std::vector<std::size_t> members() const {
        std::vector<std::size_t> out;
        for (std::size_t w = 0; w < words_.size(); ++w) {
            auto bits = words_[w];
            while (bits) {
                out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
                bits &= bits - 1;
            }
        }
        return out;
    }

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            auto bits = words_[w];
            while (bits) {
                f(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
                bits &= bits - 1;
            }
        }
    }

    /// Smallest member, or universe() when empty.
    std::size_t first() const {
        for (std::size_t w = 0; w < words_.size(); ++w)
            if (words_[w]) return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
        return n_;
    }

private:
    void check(std::size_t i) const {
        if (i >= n_) throw std::out_of_range("index " + std::to_string(i) + " outside universe of size " + std::to_string(n_));
    }
    void same(const IndexSet& o) const {
        if (o.n_ != n_) throw std::invalid_argument("set universes differ");
    }
    void trim() {
        if (n_ % 64 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
    }

    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

struct StateTag {};
struct InputTag {};

using StateId = std::size_t;
using InputId = std::size_t;
using StateSet = IndexSet<StateTag>;
using ControlSet = IndexSet<InputTag>;

}  // namespace tlt
