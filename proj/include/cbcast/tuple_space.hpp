#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbcast {

/// Index of a source tuple x in F_q^N. Tuples are numbered in lexicographic
/// order with X1 as the most significant digit, so "011" for q=2, N=3 is 3.
using TupleId = std::uint32_t;

/// Largest q^N we are willing to materialize as a dense table.
inline constexpr std::uint64_t max_tuple_count = std::uint64_t{1} << 24;

struct TupleSpace {
    int q = 2;
    int n = 1;

    std::uint64_t size() const {
        std::uint64_t s = 1;
        for (int j = 0; j < n; ++j) {
            s *= static_cast<std::uint64_t>(q);
            if (s > max_tuple_count) throw std::length_error("q^N exceeds the dense-table limit");
        }
        return s;
    }

    /// Value of coordinate `j` (1-based) of tuple `t`.
    int digit(TupleId t, int j) const {
        std::uint64_t v = t;
        for (int k = n; k > j; --k) v /= static_cast<std::uint64_t>(q);
        return static_cast<int>(v % static_cast<std::uint64_t>(q));
    }

    std::vector<int> digits(TupleId t) const {
        std::vector<int> d(static_cast<std::size_t>(n));
        for (int k = n - 1; k >= 0; --k) {
            d[static_cast<std::size_t>(k)] = static_cast<int>(t % static_cast<TupleId>(q));
            t /= static_cast<TupleId>(q);
        }
        return d;
    }

    TupleId encode(const std::vector<int>& d) const {
        std::uint64_t t = 0;
        for (int v : d) t = t * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(v);
        return static_cast<TupleId>(t);
    }

    /// "011" when q <= 10, otherwise dot-separated digits ("10.3.0").
    std::string format(TupleId t) const {
        std::string s;
        for (int v : digits(t)) {
            if (q > 10 && !s.empty()) s += '.';
            s += std::to_string(v);
        }
        return s;
    }

    /// Inverse of format(); throws std::invalid_argument on malformed text.
    TupleId parse(const std::string& text) const {
        std::vector<int> d;
        if (q <= 10) {
            for (char c : text) {
                if (c < '0' || c > '9') throw std::invalid_argument("bad tuple '" + text + "'");
                d.push_back(c - '0');
            }
        } else {
            std::size_t pos = 0;
            while (pos <= text.size()) {
                auto dot = text.find('.', pos);
                if (dot == std::string::npos) dot = text.size();
                const auto part = text.substr(pos, dot - pos);
                if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
                    throw std::invalid_argument("bad tuple '" + text + "'");
                d.push_back(std::stoi(part));
                pos = dot + 1;
            }
        }
        if (static_cast<int>(d.size()) != n) throw std::invalid_argument("tuple '" + text + "' has wrong length");
        for (int v : d)
            if (v >= q) throw std::invalid_argument("tuple '" + text + "' has a digit outside F_q");
        return encode(d);
    }
};

} // namespace cbcast
