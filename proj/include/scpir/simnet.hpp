// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "scpir/fspir.hpp"
#include "scpir/scheme.hpp"

namespace scpir {

// In-process simulated database: contents[f][k-1][j] is symbol j of message
// k's sub-message for segment f (present only when the node is in N_f).
struct DatabaseNode {
    int id = 0;  // 1-based
    std::map<int, std::vector<std::vector<Word>>> contents;
    long stored_bits = 0;
    Rat capacity_bits;  // mu[n] * K * L
};

inline std::vector<DatabaseNode> provision(const SCPIRScheme& scheme, const MessageLibrary& library) {
    if (library.K != scheme.k || library.L != scheme.l)
        throw std::invalid_argument("library does not match scheme dimensions");
    const int n = scheme.db_count();
    std::vector<DatabaseNode> nodes(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        nodes[static_cast<size_t>(i)].id = i + 1;
        nodes[static_cast<size_t>(i)].capacity_bits =
            scheme.profile[static_cast<size_t>(i)] * scheme.k * scheme.l;
    }
    for (int f = 0; f < scheme.segment_count(); ++f) {
        const auto& seg = scheme.plan.segments[static_cast<size_t>(f)];
        long w = scheme.symbol_bits[static_cast<size_t>(f)];
        std::vector<std::vector<Word>> symbols(static_cast<size_t>(scheme.k));
        for (int k = 0; k < scheme.k; ++k) {
            const auto& msg = library.messages[static_cast<size_t>(k)];
            long base = scheme.seg_offset[static_cast<size_t>(f)];
            for (long j = 0; j < scheme.sub_count[static_cast<size_t>(f)]; ++j) {
                Word word(msg.begin() + base + j * w, msg.begin() + base + (j + 1) * w);
                symbols[static_cast<size_t>(k)].push_back(std::move(word));
            }
        }
        for (int d : seg.dbs) {
            auto& node = nodes[static_cast<size_t>(d - 1)];
            node.contents[f] = symbols;
            node.stored_bits += scheme.seg_bits[static_cast<size_t>(f)] * scheme.k;
        }
    }
    for (const auto& node : nodes)
        if (Rat(node.stored_bits) > node.capacity_bits)
            throw std::logic_error("database over capacity: placement bug");
    return nodes;
}

struct Transcript {
    int theta = 0;
    uint64_t seed = 0;
    std::vector<QueryPlan> plans;      // one per segment
    std::vector<AnswerSet> answers;    // aligned with plans
    std::vector<uint8_t> decoded;      // L bits
    long d_total_bits = 0;
    std::vector<long> per_db_bits;
};

namespace detail {

inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

inline Transcript retrieve(const SCPIRScheme& scheme, const std::vector<DatabaseNode>& nodes,
                           int theta, uint64_t seed, bool break_symmetry = false) {
    if (theta < 1 || theta > scheme.k) throw std::invalid_argument("theta out of range");
    Transcript tr;
    tr.theta = theta;
    tr.seed = seed;
    tr.decoded.assign(static_cast<size_t>(scheme.l), 0);
    tr.per_db_bits.assign(static_cast<size_t>(scheme.db_count()), 0);

    for (int f = 0; f < scheme.segment_count(); ++f) {
        const auto& seg = scheme.plan.segments[static_cast<size_t>(f)];
        int t = static_cast<int>(seg.dbs.size());
        long w = scheme.symbol_bits[static_cast<size_t>(f)];
        QueryPlan plan = generate_queries(t, scheme.k, theta,
                                          detail::mix_seed(seed, static_cast<uint64_t>(f)),
                                          break_symmetry);
        AnswerSet answers(static_cast<size_t>(t));
        for (int pos = 0; pos < t; ++pos) {
            int db = seg.dbs[static_cast<size_t>(pos)];
            const auto& node = nodes[static_cast<size_t>(db - 1)];
            auto it = node.contents.find(f);
            if (it == node.contents.end()) throw std::logic_error("node missing its segment");
            answers[static_cast<size_t>(pos)] = answer_all(it->second, plan.per_db[static_cast<size_t>(pos)]);
            long bits = static_cast<long>(plan.per_db[static_cast<size_t>(pos)].size()) * w;
            tr.per_db_bits[static_cast<size_t>(db - 1)] += bits;
            tr.d_total_bits += bits;
        }
        std::vector<Word> symbols = decode(plan, answers);
        long base = scheme.seg_offset[static_cast<size_t>(f)];
        for (long j = 0; j < scheme.sub_count[static_cast<size_t>(f)]; ++j)
            for (long i = 0; i < w; ++i)
                tr.decoded[static_cast<size_t>(base + j * w + i)] = symbols[static_cast<size_t>(j)][static_cast<size_t>(i)];
        tr.plans.push_back(std::move(plan));
        tr.answers.push_back(std::move(answers));
    }
    return tr;
}

struct AuditReport {
    std::string kind;
    bool pass = false;
    double tv_distance = 0.0;  // worst case over databases and theta pairs
    double threshold = 0.0;
    std::vector<bool> per_db;  // privacy audits: verdict per database
    std::vector<std::string> notes;
};

inline AuditReport audit_decode(const SCPIRScheme& scheme, const MessageLibrary& library,
                                const std::vector<uint64_t>& seeds) {
    AuditReport rep;
    rep.kind = "decode";
    rep.pass = true;
    auto nodes = provision(scheme, library);
    for (int theta = 1; theta <= scheme.k; ++theta) {
        for (uint64_t seed : seeds) {
            Transcript tr = retrieve(scheme, nodes, theta, seed);
            if (tr.decoded != library.messages[static_cast<size_t>(theta - 1)]) {
                rep.pass = false;
                rep.notes.push_back("mismatch at theta=" + std::to_string(theta) +
                                    " seed=" + std::to_string(seed));
            }
        }
    }
    return rep;
}

inline AuditReport audit_storage(const SCPIRScheme& scheme, const std::vector<DatabaseNode>& nodes) {
    AuditReport rep;
    rep.kind = "storage";
    rep.pass = true;
    Rat total(0);
    for (const auto& node : nodes) {
        total += Rat(node.stored_bits);
        if (Rat(node.stored_bits) > node.capacity_bits) {
            rep.pass = false;
            rep.notes.push_back("database " + std::to_string(node.id) + " over capacity");
        }
    }
    if (total != scheme.profile.total() * scheme.k * scheme.l) {
        rep.pass = false;
        rep.notes.push_back("total stored bits != t*K*L");
    }
    return rep;
}

namespace detail {

// Canonical form of one database's requests for one segment: raw symbol
// indices are replaced by first-occurrence order per message, then the
// requests are sorted. This quotients out the uniform permutations so query
// distributions across theta become directly comparable.
inline std::string canonical_form(const std::vector<Request>& reqs) {
    std::map<std::pair<int, long>, long> rank;
    std::map<int, long> next;
    std::vector<std::string> rendered;
    for (const auto& req : reqs) {
        std::ostringstream os;
        os << req.size() << "(";
        for (const auto& sid : req) {
            auto key = std::make_pair(sid.message, sid.symbol);
            auto it = rank.find(key);
            if (it == rank.end())
                it = rank.emplace(key, next[sid.message]++).first;
            os << sid.message << ":" << it->second << ",";
        }
        os << ")";
        rendered.push_back(os.str());
    }
    std::sort(rendered.begin(), rendered.end());
    std::string out;
    for (const auto& r : rendered) out += r + ";";
    return out;
}

// All permutations of [s], in lexicographic order.
inline std::vector<std::vector<long>> all_permutations(long s) {
    std::vector<long> p(static_cast<size_t>(s));
    std::iota(p.begin(), p.end(), 0L);
    std::vector<std::vector<long>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

using Histogram = std::map<std::string, long>;

inline double tv_distance(const Histogram& a, const Histogram& b, long trials_a, long trials_b) {
    double tv = 0.0;
    std::map<std::string, std::pair<long, long>> joint;
    for (const auto& [k, v] : a) joint[k].first = v;
    for (const auto& [k, v] : b) joint[k].second = v;
    for (const auto& [k, v] : joint) {
        (void)k;
        tv += std::abs(static_cast<double>(v.first) / static_cast<double>(trials_a) -
                       static_cast<double>(v.second) / static_cast<double>(trials_b));
    }
    return tv / 2.0;
}

}  // namespace detail

// Checks that every database's query distribution is independent of theta:
// exactly (full enumeration of the permutation space) or within a total
// variation budget (seeded sampling).
inline AuditReport audit_privacy_enumerate(const SCPIRScheme& scheme, bool break_symmetry = false,
                                           long max_space = 1000000) {
    AuditReport rep;
    rep.kind = "privacy/enumerate";
    rep.threshold = 0.0;

    // permutation space size: product over segments of (s_f!)^K
    double space = 1.0;
    for (int f = 0; f < scheme.segment_count(); ++f) {
        double fact = 1.0;
        for (long i = 2; i <= scheme.sub_count[static_cast<size_t>(f)]; ++i) fact *= static_cast<double>(i);
        for (int k = 0; k < scheme.k; ++k) space *= fact;
        if (space > static_cast<double>(max_space))
            throw std::invalid_argument("permutation space too large to enumerate");
    }

    const int n = scheme.db_count();
    const int fk = scheme.segment_count() * scheme.k;
    std::vector<std::vector<std::vector<long>>> perm_pool(static_cast<size_t>(scheme.segment_count()));
    for (int f = 0; f < scheme.segment_count(); ++f)
        perm_pool[static_cast<size_t>(f)] = detail::all_permutations(scheme.sub_count[static_cast<size_t>(f)]);

    // histograms[db][theta-1]
    std::vector<std::vector<detail::Histogram>> hist(
        static_cast<size_t>(n), std::vector<detail::Histogram>(static_cast<size_t>(scheme.k)));
    long combos = 0;

    std::vector<size_t> digit(static_cast<size_t>(fk), 0);
    bool done = false;
    while (!done) {
        ++combos;
        for (int theta = 1; theta <= scheme.k; ++theta) {
            std::vector<std::string> per_db(static_cast<size_t>(n));
            for (int f = 0; f < scheme.segment_count(); ++f) {
                const auto& seg = scheme.plan.segments[static_cast<size_t>(f)];
                Permutations perms(static_cast<size_t>(scheme.k));
                for (int k = 0; k < scheme.k; ++k)
                    perms[static_cast<size_t>(k)] =
                        perm_pool[static_cast<size_t>(f)][digit[static_cast<size_t>(f * scheme.k + k)]];
                QueryPlan plan = generate_queries(static_cast<int>(seg.dbs.size()), scheme.k, theta,
                                                  perms, break_symmetry);
                for (size_t pos = 0; pos < seg.dbs.size(); ++pos)
                    per_db[static_cast<size_t>(seg.dbs[pos] - 1)] +=
                        "f" + std::to_string(f) + "{" + detail::canonical_form(plan.per_db[pos]) + "}";
            }
            for (int d = 0; d < n; ++d)
                ++hist[static_cast<size_t>(d)][static_cast<size_t>(theta - 1)][per_db[static_cast<size_t>(d)]];
        }
        // odometer over permutation assignments
        done = true;
        for (int i = 0; i < fk; ++i) {
            size_t base = perm_pool[static_cast<size_t>(i / scheme.k)].size();
            if (++digit[static_cast<size_t>(i)] < base) {
                done = false;
                break;
            }
            digit[static_cast<size_t>(i)] = 0;
        }
    }

    rep.pass = true;
    rep.per_db.assign(static_cast<size_t>(n), true);
    for (int d = 0; d < n; ++d) {
        for (int a = 0; a < scheme.k; ++a)
            for (int b = a + 1; b < scheme.k; ++b) {
                const auto& ha = hist[static_cast<size_t>(d)][static_cast<size_t>(a)];
                const auto& hb = hist[static_cast<size_t>(d)][static_cast<size_t>(b)];
                double tv = detail::tv_distance(ha, hb, combos, combos);
                rep.tv_distance = std::max(rep.tv_distance, tv);
                if (ha != hb) {
                    rep.pass = false;
                    rep.per_db[static_cast<size_t>(d)] = false;
                }
            }
    }
    if (!rep.pass) rep.notes.push_back("query distributions differ across theta");
    return rep;
}

inline AuditReport audit_privacy_sample(const SCPIRScheme& scheme, long trials, uint64_t seed = 1,
                                        double threshold = 0.01, bool break_symmetry = false) {
    AuditReport rep;
    rep.kind = "privacy/sample";
    rep.threshold = threshold;
    const int n = scheme.db_count();
    std::vector<std::vector<detail::Histogram>> hist(
        static_cast<size_t>(n), std::vector<detail::Histogram>(static_cast<size_t>(scheme.k)));

    for (long trial = 0; trial < trials; ++trial) {
        for (int theta = 1; theta <= scheme.k; ++theta) {
            std::vector<std::string> per_db(static_cast<size_t>(n));
            for (int f = 0; f < scheme.segment_count(); ++f) {
                const auto& seg = scheme.plan.segments[static_cast<size_t>(f)];
                uint64_t s = detail::mix_seed(seed, static_cast<uint64_t>(trial) * 1000003ULL +
                                                        static_cast<uint64_t>(theta) * 101ULL +
                                                        static_cast<uint64_t>(f));
                QueryPlan plan = generate_queries(static_cast<int>(seg.dbs.size()), scheme.k, theta,
                                                  s, break_symmetry);
                for (size_t pos = 0; pos < seg.dbs.size(); ++pos)
                    per_db[static_cast<size_t>(seg.dbs[pos] - 1)] +=
                        "f" + std::to_string(f) + "{" + detail::canonical_form(plan.per_db[pos]) + "}";
            }
            for (int d = 0; d < n; ++d)
                ++hist[static_cast<size_t>(d)][static_cast<size_t>(theta - 1)][per_db[static_cast<size_t>(d)]];
        }
    }

    rep.pass = true;
    rep.per_db.assign(static_cast<size_t>(n), true);
    for (int d = 0; d < n; ++d)
        for (int a = 0; a < scheme.k; ++a)
            for (int b = a + 1; b < scheme.k; ++b) {
                double tv = detail::tv_distance(hist[static_cast<size_t>(d)][static_cast<size_t>(a)],
                                                hist[static_cast<size_t>(d)][static_cast<size_t>(b)],
                                                trials, trials);
                rep.tv_distance = std::max(rep.tv_distance, tv);
                if (tv > threshold) {
                    rep.pass = false;
                    rep.per_db[static_cast<size_t>(d)] = false;
                }
            }
    if (!rep.pass) rep.notes.push_back("total variation above threshold");
    return rep;
}

// ---------------------------------------------------------------------------
// JSON shapes
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const Transcript& tr) {
    nlohmann::json j;
    j["theta"] = tr.theta;
    j["seed"] = tr.seed;
    j["d_total_bits"] = tr.d_total_bits;
    j["per_db_bits"] = tr.per_db_bits;
    j["decoded_bits"] = tr.decoded.size();
    return j;
}

inline nlohmann::json to_json(const AuditReport& rep) {
    nlohmann::json j;
    j["kind"] = rep.kind;
    j["verdict"] = rep.pass ? "pass" : "fail";
    j["tv_distance"] = rep.tv_distance;
    j["threshold"] = rep.threshold;
    if (!rep.per_db.empty()) {
        std::vector<std::string> verdicts;
        for (bool ok : rep.per_db) verdicts.push_back(ok ? "pass" : "fail");
        j["per_db"] = verdicts;
    }
    if (!rep.notes.empty()) j["notes"] = rep.notes;
    return j;
}

}  // namespace scpir
