// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "scpir/rational.hpp"

namespace scpir {

// Storage fractions mu[n] over N databases, 0 < mu[n] <= 1, with t = sum(mu) >= 1.
class StorageProfile {
public:
    explicit StorageProfile(std::vector<Rat> mu) : mu_(std::move(mu)) {
        if (mu_.empty()) throw std::invalid_argument("storage profile must be non-empty");
        Rat t(0);
        for (const auto& m : mu_) {
            if (m <= Rat(0) || m > Rat(1))
                throw std::invalid_argument("each storage fraction must satisfy 0 < mu[n] <= 1");
            t += m;
        }
        if (t < Rat(1)) throw std::invalid_argument("total storage t must be at least 1");
        t_ = t;
    }

    static StorageProfile uniform(int n, const Rat& mu0) {
        return StorageProfile(std::vector<Rat>(static_cast<size_t>(n), mu0));
    }

    const std::vector<Rat>& mu() const { return mu_; }
    const Rat& operator[](size_t n) const { return mu_[n]; }
    int db_count() const { return static_cast<int>(mu_.size()); }
    const Rat& total() const { return t_; }
    bool integer_t() const { return is_integer(t_); }

private:
    std::vector<Rat> mu_;
    Rat t_;
};

// K equal-length bit strings; bits stored one per byte (0/1) for simplicity.
struct MessageLibrary {
    int K = 0;
    long L = 0;  // bits per message
    std::vector<std::vector<uint8_t>> messages;

    MessageLibrary(int k, long l, std::vector<std::vector<uint8_t>> msgs)
        : K(k), L(l), messages(std::move(msgs)) {
        if (K < 1 || L < 1) throw std::invalid_argument("need K >= 1 and L >= 1");
        if (static_cast<int>(messages.size()) != K)
            throw std::invalid_argument("message count does not match K");
        for (const auto& m : messages)
            if (static_cast<long>(m.size()) != L)
                throw std::invalid_argument("all messages must have length L");
    }

    static MessageLibrary random(int k, long l, uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::vector<std::vector<uint8_t>> msgs(static_cast<size_t>(k));
        for (auto& m : msgs) {
            m.resize(static_cast<size_t>(l));
            for (auto& b : m) b = static_cast<uint8_t>(rng() & 1u);
        }
        return MessageLibrary(k, l, std::move(msgs));
    }
};

// Ordered segments (alpha_f, N_f) that partition every message.
struct PlacementPlan {
    struct Segment {
        Rat alpha;
        std::vector<int> dbs;  // 1-based database ids, sorted
    };
    std::vector<Segment> segments;

    int segment_count() const { return static_cast<int>(segments.size()); }

    void check(int n_dbs) const {
        Rat total(0);
        for (const auto& s : segments) {
            if (s.alpha <= Rat(0)) throw std::invalid_argument("segment alpha must be positive");
            if (s.dbs.empty()) throw std::invalid_argument("segment database set must be non-empty");
            for (int d : s.dbs)
                if (d < 1 || d > n_dbs) throw std::invalid_argument("database id out of range");
            total += s.alpha;
        }
        if (total != Rat(1)) throw std::invalid_argument("segment fractions must sum to 1");
    }
};

// Capacity-achieving FS-PIR rate for t replicated databases and K messages:
// (1 + 1/t + ... + 1/t^{K-1})^{-1}, exact.
inline Rat capacity_fspir(const BigInt& t, int k) {
    if (t < 1 || k < 1) throw std::invalid_argument("capacity_fspir needs t >= 1, K >= 1");
    Rat sum(0), term(1), inv(BigInt(1), t);
    for (int i = 0; i < k; ++i) {
        sum += term;
        term *= inv;
    }
    return Rat(1) / sum;
}

// SC-PIR capacity for a storage profile: the FS-PIR point at integer t, and the
// download-cost interpolation between floor(t) and ceil(t) otherwise.
inline Rat capacity_scpir(const StorageProfile& profile, int k) {
    const Rat& t = profile.total();
    if (is_integer(t)) return capacity_fspir(t.numerator(), k);
    BigInt lo = rat_floor(t), hi = rat_ceil(t);
    Rat inv_rate = (Rat(hi) - t) / capacity_fspir(lo, k) + (t - Rat(lo)) / capacity_fspir(hi, k);
    return Rat(1) / inv_rate;
}

}  // namespace scpir
