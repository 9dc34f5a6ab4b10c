// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "scpir/rational.hpp"

namespace scpir {

// A symbol is one of the s = t^K equal slices of a (sub-)message. Symbol
// values are bit vectors (one byte per bit) so symbol width is a parameter.
using Word = std::vector<uint8_t>;

inline void xor_into(Word& acc, const Word& w) {
    if (acc.size() != w.size()) throw std::invalid_argument("symbol width mismatch");
    for (size_t i = 0; i < w.size(); ++i) acc[i] ^= w[i];
}

struct SymbolId {
    int message = 0;  // 1-based, in [K]
    long symbol = 0;  // 0-based, in [0, t^K)
    auto operator<=>(const SymbolId&) const = default;
};

// A request is a set of symbols whose XOR the database returns; symbols come
// from distinct messages, sorted by message id.
using Request = std::vector<SymbolId>;

struct QueryPlan {
    int t = 0;      // group size
    int k = 0;      // number of messages
    int theta = 0;  // desired message, 1-based
    long s = 0;     // symbols per message, t^K
    std::vector<std::vector<Request>> per_db;  // [t][requests]
};

// Per-database answers, aligned with QueryPlan::per_db.
using AnswerSet = std::vector<std::vector<Word>>;

// One uniform permutation of [t^K] per message.
using Permutations = std::vector<std::vector<long>>;

inline long symbols_per_message(int t, int k) {
    long s = 1;
    for (int i = 0; i < k; ++i) {
        if (s > (1L << 40) / std::max(t, 1)) throw std::invalid_argument("t^K too large");
        s *= t;
    }
    return s;
}

inline Permutations random_permutations(int t, int k, uint64_t seed) {
    long s = symbols_per_message(t, k);
    std::mt19937_64 rng(seed);
    Permutations perms(static_cast<size_t>(k));
    for (auto& p : perms) {
        p.resize(static_cast<size_t>(s));
        std::iota(p.begin(), p.end(), 0L);
        std::shuffle(p.begin(), p.end(), rng);
    }
    return perms;
}

namespace detail {

inline void sort_requests(std::vector<Request>& reqs) {
    std::sort(reqs.begin(), reqs.end(), [](const Request& a, const Request& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
}

inline std::vector<std::vector<int>> message_subsets(int k, int size, int exclude) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(cur.size()) == size) {
            out.push_back(cur);
            return;
        }
        for (int msg = start; msg <= k; ++msg) {
            if (msg == exclude) continue;
            cur.push_back(msg);
            self(self, msg + 1);
            cur.pop_back();
        }
    };
    rec(rec, 1);
    return out;
}

}  // namespace detail

// Capacity-achieving FS-PIR query generation over a group of t databases.
// Round r issues XOR sums of r symbols from r distinct messages: sums
// containing the desired message pair one fresh desired symbol with a side
// information block downloaded at another database in round r-1, and the
// remaining sums introduce fresh undesired symbols. With break_symmetry set,
// the round-1 undesired singletons are dropped (negative control for the
// privacy audit; decoding is then impossible).
inline QueryPlan generate_queries(int t, int k, int theta, const Permutations& perms,
                                  bool break_symmetry = false) {
    if (t < 1 || k < 1) throw std::invalid_argument("need t >= 1 and K >= 1");
    if (theta < 1 || theta > k) throw std::invalid_argument("theta out of range");
    long s = symbols_per_message(t, k);
    if (static_cast<int>(perms.size()) != k)
        throw std::invalid_argument("need one permutation per message");
    for (const auto& p : perms)
        if (static_cast<long>(p.size()) != s)
            throw std::invalid_argument("sub-message not divisible into t^K symbols");

    QueryPlan plan;
    plan.t = t;
    plan.k = k;
    plan.theta = theta;
    plan.s = s;
    plan.per_db.resize(static_cast<size_t>(t));

    std::vector<long> next(static_cast<size_t>(k + 1), 0);
    auto fresh = [&](int msg) {
        long& ctr = next[static_cast<size_t>(msg)];
        if (ctr >= s) throw std::logic_error("fresh symbol pool exhausted");
        return SymbolId{msg, perms[static_cast<size_t>(msg - 1)][static_cast<size_t>(ctr++)]};
    };

    // side[d] holds the undesired blocks created at database d in the previous
    // round; each is reused as side information at every other database.
    std::vector<std::vector<Request>> side(static_cast<size_t>(t));
    for (int d = 0; d < t; ++d) {
        for (int msg = 1; msg <= k; ++msg) {
            Request req{fresh(msg)};
            if (msg != theta) side[static_cast<size_t>(d)].push_back(req);
            if (msg == theta || !break_symmetry) plan.per_db[static_cast<size_t>(d)].push_back(std::move(req));
        }
    }

    for (int round = 2; round <= k; ++round) {
        std::vector<std::vector<Request>> new_side(static_cast<size_t>(t));
        long fresh_blocks = 1;
        for (int i = 0; i < round - 1; ++i) fresh_blocks *= (t - 1);
        auto undesired_sets = detail::message_subsets(k, round, theta);
        for (int d = 0; d < t; ++d) {
            for (int d2 = 0; d2 < t; ++d2) {
                if (d2 == d) continue;
                for (const Request& blk : side[static_cast<size_t>(d2)]) {
                    if (static_cast<int>(blk.size()) != round - 1) continue;
                    Request req = blk;
                    req.push_back(fresh(theta));
                    std::sort(req.begin(), req.end());
                    plan.per_db[static_cast<size_t>(d)].push_back(std::move(req));
                }
            }
            for (const auto& msgs : undesired_sets) {
                for (long i = 0; i < fresh_blocks; ++i) {
                    Request req;
                    for (int msg : msgs) req.push_back(fresh(msg));
                    plan.per_db[static_cast<size_t>(d)].push_back(req);
                    new_side[static_cast<size_t>(d)].push_back(std::move(req));
                }
            }
        }
        side = std::move(new_side);
    }

    if (!break_symmetry && next[static_cast<size_t>(theta)] != s)
        throw std::logic_error("desired message not fully covered");
    for (auto& reqs : plan.per_db) detail::sort_requests(reqs);
    return plan;
}

inline QueryPlan generate_queries(int t, int k, int theta, uint64_t seed,
                                  bool break_symmetry = false) {
    return generate_queries(t, k, theta, random_permutations(t, k, seed), break_symmetry);
}

// XOR of the requested symbols' stored values. storage[msg-1][symbol] holds
// the group's copy of each symbol.
inline Word answer_request(const std::vector<std::vector<Word>>& storage, const Request& req) {
    if (req.empty()) throw std::invalid_argument("empty request");
    Word acc;
    for (const SymbolId& id : req) {
        if (id.message < 1 || id.message > static_cast<int>(storage.size()) ||
            id.symbol < 0 || id.symbol >= static_cast<long>(storage[static_cast<size_t>(id.message - 1)].size()))
            throw std::out_of_range("query references unstored symbol");
        const Word& w = storage[static_cast<size_t>(id.message - 1)][static_cast<size_t>(id.symbol)];
        if (acc.empty())
            acc = w;
        else
            xor_into(acc, w);
    }
    return acc;
}

inline std::vector<Word> answer_all(const std::vector<std::vector<Word>>& storage,
                                    const std::vector<Request>& reqs) {
    std::vector<Word> out;
    out.reserve(reqs.size());
    for (const auto& r : reqs) out.push_back(answer_request(storage, r));
    return out;
}

// Recovers all t^K symbols of the desired message. Every answered block that
// contains no desired symbol is side information; a block containing one
// desired symbol decodes by cancelling its residual, which is exactly some
// other database's answered block.
inline std::vector<Word> decode(const QueryPlan& plan, const AnswerSet& answers) {
    if (answers.size() != plan.per_db.size()) throw std::invalid_argument("answer count mismatch");
    std::map<Request, Word> known;
    for (size_t d = 0; d < plan.per_db.size(); ++d) {
        if (answers[d].size() != plan.per_db[d].size())
            throw std::invalid_argument("answer count mismatch");
        for (size_t i = 0; i < plan.per_db[d].size(); ++i) {
            const Request& req = plan.per_db[d][i];
            bool has_theta = std::any_of(req.begin(), req.end(),
                                         [&](const SymbolId& s) { return s.message == plan.theta; });
            if (!has_theta) known[req] = answers[d][i];
        }
    }

    std::vector<std::optional<Word>> out(static_cast<size_t>(plan.s));
    for (size_t d = 0; d < plan.per_db.size(); ++d) {
        for (size_t i = 0; i < plan.per_db[d].size(); ++i) {
            const Request& req = plan.per_db[d][i];
            Request residual;
            long theta_symbol = -1;
            for (const SymbolId& sid : req) {
                if (sid.message == plan.theta)
                    theta_symbol = sid.symbol;
                else
                    residual.push_back(sid);
            }
            if (theta_symbol < 0) continue;
            Word value = answers[d][i];
            if (!residual.empty()) {
                auto it = known.find(residual);
                if (it == known.end()) throw std::runtime_error("decoding failed: missing side information");
                xor_into(value, it->second);
            }
            out[static_cast<size_t>(theta_symbol)] = std::move(value);
        }
    }

    std::vector<Word> result;
    result.reserve(out.size());
    for (auto& w : out) {
        if (!w) throw std::runtime_error("decoding failed: uncovered symbol");
        result.push_back(std::move(*w));
    }
    return result;
}

}  // namespace scpir
