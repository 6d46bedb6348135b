#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlwe {

class InvalidPartition : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class InvalidMultiIndex : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Integer partition lambda = (l1 <= l2 <= ... <= ln), all parts >= 1,
/// stored in non-decreasing order. Immutable after construction.
class Partition {
  public:
    explicit Partition(std::vector<long> parts) : parts_(std::move(parts)) {
        if (parts_.empty()) throw InvalidPartition("partition must have at least one part");
        for (long p : parts_)
            if (p < 1) throw InvalidPartition("partition parts must be positive");
        std::sort(parts_.begin(), parts_.end());
    }

    const std::vector<long> &parts() const { return parts_; }
    long part(std::size_t j) const { return parts_.at(j); }  // 0-based
    std::size_t size() const { return parts_.size(); }       // n
    long weight() const { return std::accumulate(parts_.begin(), parts_.end(), 0L); }  // N
    long largest() const { return parts_.back(); }

    friend bool operator==(const Partition &a, const Partition &b) { return a.parts_ == b.parts_; }
    friend bool operator!=(const Partition &a, const Partition &b) { return !(a == b); }

  private:
    std::vector<long> parts_;
};

/// Partition with zero parts permitted (the image of a multi-index may be
/// empty). Parts are non-decreasing and >= 0.
class WeakPartition {
  public:
    WeakPartition() = default;
    explicit WeakPartition(std::vector<long> parts) : parts_(std::move(parts)) {
        for (std::size_t j = 0; j + 1 < parts_.size(); ++j)
            if (parts_[j] > parts_[j + 1]) throw InvalidPartition("weak partition must be non-decreasing");
        if (!parts_.empty() && parts_.front() < 0) throw InvalidPartition("weak partition parts must be >= 0");
    }

    const std::vector<long> &parts() const { return parts_; }
    std::size_t size() const { return parts_.size(); }
    long weight() const { return std::accumulate(parts_.begin(), parts_.end(), 0L); }
    bool empty() const {
        return std::all_of(parts_.begin(), parts_.end(), [](long p) { return p == 0; });
    }

    /// Drops zero parts; throws if the result would be empty.
    Partition to_partition() const {
        std::vector<long> nz;
        for (long p : parts_)
            if (p > 0) nz.push_back(p);
        return Partition(nz);
    }

    friend bool operator==(const WeakPartition &a, const WeakPartition &b) { return a.parts_ == b.parts_; }

  private:
    std::vector<long> parts_;
};

/// Strictly increasing tuple of non-negative integers r1 < ... < rn,
/// used to index Cauchy-Binet minors. `bound` is the largest admissible
/// entry (2*mn in the tau context).
class MultiIndex {
  public:
    MultiIndex(std::vector<long> entries, long bound) : entries_(std::move(entries)), bound_(bound) {
        if (entries_.empty()) throw InvalidMultiIndex("multi-index must be non-empty");
        for (std::size_t j = 0; j < entries_.size(); ++j) {
            if (entries_[j] < 0) throw InvalidMultiIndex("multi-index entries must be >= 0");
            if (j > 0 && entries_[j] <= entries_[j - 1])
                throw InvalidMultiIndex("multi-index entries must be strictly increasing");
            if (entries_[j] > bound_) throw InvalidMultiIndex("multi-index entry exceeds bound");
        }
    }

    const std::vector<long> &entries() const { return entries_; }
    long entry(std::size_t j) const { return entries_.at(j); }
    std::size_t size() const { return entries_.size(); }
    long bound() const { return bound_; }
    long sum() const { return std::accumulate(entries_.begin(), entries_.end(), 0L); }

    /// The distinguished smallest element (0,1,...,n-1).
    static MultiIndex zero(std::size_t n, long bound) {
        std::vector<long> e(n);
        std::iota(e.begin(), e.end(), 0L);
        return MultiIndex(std::move(e), bound);
    }

    bool is_zero() const {
        for (std::size_t j = 0; j < entries_.size(); ++j)
            if (entries_[j] != static_cast<long>(j)) return false;
        return true;
    }

    friend bool operator==(const MultiIndex &a, const MultiIndex &b) { return a.entries_ == b.entries_; }
    friend bool operator!=(const MultiIndex &a, const MultiIndex &b) { return !(a == b); }

  private:
    std::vector<long> entries_;
    long bound_;
};

struct MultiIndexOrder {
    std::strong_ordering lex;   // total lexicographic order
    bool dominated;             // componentwise r_i <= s_i (partial order)
};

/// Lexicographic comparison (earliest differing index decides) plus the
/// componentwise partial-order flag.
inline MultiIndexOrder compare_multiindices(const MultiIndex &r, const MultiIndex &s) {
    if (r.size() != s.size()) throw InvalidMultiIndex("compare_multiindices: length mismatch");
    std::strong_ordering lex = std::strong_ordering::equal;
    for (std::size_t j = 0; j < r.size(); ++j) {
        if (r.entry(j) != s.entry(j)) {
            lex = r.entry(j) < s.entry(j) ? std::strong_ordering::less : std::strong_ordering::greater;
            break;
        }
    }
    bool dom = true;
    for (std::size_t j = 0; j < r.size(); ++j)
        if (r.entry(j) > s.entry(j)) {
            dom = false;
            break;
        }
    return {lex, dom};
}

inline Partition make_partition(const std::vector<long> &parts) { return Partition(parts); }

/// Degree vector m_j = lambda_j + (j-1); strictly increasing. The returned
/// bound is 2*m_n, the admissible range for tau minors.
inline MultiIndex degree_vector(const Partition &p) {
    std::vector<long> m(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) m[j] = p.part(j) + static_cast<long>(j);
    long mn = m.back();
    return MultiIndex(std::move(m), 2 * mn);
}

/// Conjugate partition: column heights of the Young diagram.
inline Partition conjugate(const Partition &p) {
    long cols = p.largest();
    std::vector<long> conj(cols);
    for (long c = 1; c <= cols; ++c) {
        long h = 0;
        for (long part : p.parts())
            if (part >= c) ++h;
        conj[c - 1] = h;
    }
    std::sort(conj.begin(), conj.end());
    return Partition(std::move(conj));
}

/// lambda_i(r) = r_i - i + 1; zero parts are kept so the empty partition is
/// representable. Requires r_i >= i-1.
inline WeakPartition partition_of_multiindex(const MultiIndex &r) {
    std::vector<long> parts(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) {
        long lam = r.entry(j) - static_cast<long>(j);
        if (lam < 0) throw InvalidMultiIndex("partition_of_multiindex: r_i < i-1");
        parts[j] = lam;
    }
    return WeakPartition(std::move(parts));
}

/// All strictly increasing n-tuples in [0, 2*mn], lexicographic order.
inline std::vector<MultiIndex> enumerate_multiindices(std::size_t n, long mn) {
    if (n < 1) throw InvalidMultiIndex("enumerate_multiindices: n must be >= 1");
    long bound = 2 * mn;
    if (bound < static_cast<long>(n) - 1) throw InvalidMultiIndex("enumerate_multiindices: bound too small");
    std::vector<MultiIndex> out;
    std::vector<long> cur(n);
    std::iota(cur.begin(), cur.end(), 0L);
    while (true) {
        out.emplace_back(cur, bound);
        // advance to next combination
        long j = static_cast<long>(n) - 1;
        while (j >= 0 && cur[j] == bound - (static_cast<long>(n) - 1 - j)) --j;
        if (j < 0) break;
        ++cur[j];
        for (std::size_t k = j + 1; k < n; ++k) cur[k] = cur[k - 1] + 1;
    }
    return out;
}

/// mu contained in lambda as Young diagrams (rows aligned from the top,
/// i.e. from the largest parts). mu may be weak/empty.
inline bool skew_contains(const WeakPartition &mu, const Partition &lam) {
    const auto &mp = mu.parts();
    const auto &lp = lam.parts();
    // align largest-to-largest: pad the shorter list in front with zeros
    std::size_t n = std::max(mp.size(), lp.size());
    for (std::size_t k = 0; k < n; ++k) {
        long m = k < mp.size() ? mp[mp.size() - 1 - k] : 0;
        long l = k < lp.size() ? lp[lp.size() - 1 - k] : 0;
        if (m > l) return false;
    }
    return true;
}

inline bool skew_contains(const Partition &mu, const Partition &lam) {
    return skew_contains(WeakPartition(mu.parts()), lam);
}

enum class SpecialShape : std::uint8_t {
    Rectangular,
    Triangular,
    Trapezoidal,
    Pentagonal,
    Odd,
    Even,
    Square,
    None,
};

inline const char *to_string(SpecialShape s) {
    switch (s) {
        case SpecialShape::Rectangular: return "rectangular";
        case SpecialShape::Triangular: return "triangular";
        case SpecialShape::Trapezoidal: return "trapezoidal";
        case SpecialShape::Pentagonal: return "pentagonal";
        case SpecialShape::Odd: return "odd";
        case SpecialShape::Even: return "even";
        case SpecialShape::Square: return "square";
        case SpecialShape::None: return "none";
    }
    return "?";
}

/// Tags every special family the partition belongs to; {None} if none apply.
inline std::set<SpecialShape> classify_special(const Partition &p) {
    std::set<SpecialShape> tags;
    const auto &parts = p.parts();
    std::size_t n = parts.size();

    bool rectangular = std::all_of(parts.begin(), parts.end(), [&](long x) { return x == parts[0]; });
    if (rectangular) tags.insert(SpecialShape::Rectangular);

    bool staircase = true;  // consecutive run starting at parts[0]
    for (std::size_t j = 0; j < n; ++j)
        if (parts[j] != parts[0] + static_cast<long>(j)) staircase = false;
    if (staircase && parts[0] == 1) tags.insert(SpecialShape::Triangular);
    if (staircase && parts[0] > 1) {
        tags.insert(SpecialShape::Trapezoidal);
        if (parts[0] == static_cast<long>(n)) tags.insert(SpecialShape::Pentagonal);
    }

    bool odd = true, even = true;
    for (std::size_t j = 0; j < n; ++j) {
        if (parts[j] != 2 * static_cast<long>(j) + 1) odd = false;
        if (parts[j] != 2 * static_cast<long>(j) + 2) even = false;
    }
    if (odd) tags.insert(SpecialShape::Odd);
    if (even) tags.insert(SpecialShape::Even);

    if (n % 2 == 0) {
        bool square = true;
        for (std::size_t j = 0; j < n; j += 2)
            if (parts[j] != parts[j + 1]) square = false;
        if (square) tags.insert(SpecialShape::Square);
    }

    if (tags.empty()) tags.insert(SpecialShape::None);
    return tags;
}

/// ASCII Young diagram, top row = largest part, one "[]" per box.
inline std::string render_young_diagram(const Partition &p) {
    std::string out;
    for (std::size_t i = p.size(); i-- > 0;) {
        for (long b = 0; b < p.part(i); ++b) out += "[]";
        out += '\n';
    }
    return out;
}

/// Number of lumps M = N + n*m_n attached to the partition.
inline long lump_count(const Partition &p) {
    MultiIndex m = degree_vector(p);
    return p.weight() + static_cast<long>(p.size()) * m.entries().back();
}

}  // namespace dlwe
