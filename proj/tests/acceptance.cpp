// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance gate: one pass/fail line per criterion, exit 0 only
// if every criterion holds.

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "scpir/placement.hpp"
#include "scpir/scheme.hpp"
#include "scpir/simnet.hpp"

using namespace scpir;

namespace {

int g_failures = 0;

void run(int idx, const std::string& name, const std::function<bool()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string note;
    try {
        ok = body();
    } catch (const std::exception& e) {
        note = std::string(" (exception: ") + e.what() + ")";
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!ok) ++g_failures;
    std::printf("criterion %2d: %s — %s [%.2fs]%s\n", idx, ok ? "pass" : "FAIL", name.c_str(),
                secs, note.c_str());
}

std::vector<Rat> fig1_mu() {
    return {Rat(1, 10), Rat(1, 5), Rat(1, 5), Rat(1, 4), Rat(3, 10), Rat(2, 5), Rat(13, 20),
            Rat(9, 10)};
}

StorageProfile noninteger_profile() {
    return StorageProfile({Rat(1, 5), Rat(1, 5), Rat(2, 5), Rat(3, 5), Rat(1)});
}

Transcript run_retrieval(const SCPIRScheme& sch, int theta, std::uint64_t seed) {
    auto lib = MessageLibrary::random(sch.k, sch.l, seed);
    auto nodes = provision(sch, lib);
    return retrieve(sch, nodes, theta, seed + 1);
}

bool decodes_everywhere(const SCPIRScheme& sch, int seed_count) {
    auto lib = MessageLibrary::random(sch.k, sch.l, 7);
    auto nodes = provision(sch, lib);
    for (int theta = 1; theta <= sch.k; ++theta)
        for (int seed = 0; seed < seed_count; ++seed) {
            Transcript tr = retrieve(sch, nodes, theta, static_cast<std::uint64_t>(seed));
            if (tr.decoded != lib.messages[static_cast<size_t>(theta - 1)]) return false;
        }
    return true;
}

bool rate_matches(const SCPIRScheme& sch, const StorageProfile& profile) {
    Transcript tr = run_retrieval(sch, 1, 31);
    Rat measured = Rat(sch.l) / Rat(tr.d_total_bits);
    return measured == sch.predicted_rate && measured == capacity_scpir(profile, sch.k);
}

}  // namespace

int main() {
    run(1, "4 databases, 3 messages, half storage: D = 28, R = 4/7 at L = 16", [] {
        StorageProfile profile = StorageProfile::uniform(4, Rat(1, 2));
        SCPIRScheme sch = build_scheme(profile, 3, 16);
        Transcript tr = run_retrieval(sch, 1, 1);
        return tr.d_total_bits == 28 && Rat(sch.l) / Rat(tr.d_total_bits) == Rat(4, 7);
    });

    run(2, "5 databases, 2 messages, 3/5 storage, cyclic placement: R = 3/4", [] {
        StorageProfile profile = StorageProfile::uniform(5, Rat(3, 5));
        SCPIRScheme sch = build_scheme(profile, 2, partition_cyclic(5, 3));
        Transcript tr = run_retrieval(sch, 1, 2);
        return Rat(sch.l) / Rat(tr.d_total_bits) == Rat(3, 4);
    });

    run(3, "8-database heterogeneous example: 7 segments, pinned leading segments", [] {
        StorageProfile profile(fig1_mu());
        auto [plan, trace] = place_iterative(profile);
        if (plan.segment_count() != 7 || trace.size() > 8) return false;
        if (plan.segments[0].alpha != Rat(1, 10) ||
            plan.segments[0].dbs != std::vector<int>{1, 7, 8})
            return false;
        if (plan.segments[1].alpha != Rat(1, 5) ||
            plan.segments[1].dbs != std::vector<int>{2, 7, 8})
            return false;
        std::vector<Rat> load(8, Rat(0));
        for (const auto& seg : plan.segments) {
            if (seg.dbs.size() != 3) return false;
            for (int d : seg.dbs) load[static_cast<size_t>(d - 1)] += seg.alpha;
        }
        return load == fig1_mu();
    });

    run(4, "non-integer replication split: exact half-profiles and rate 30/43", [] {
        StorageProfile profile = noninteger_profile();
        StorageSplit s = split_storage(profile);
        if (s.mu_floor !=
            std::vector<Rat>{Rat(1, 15), Rat(1, 15), Rat(2, 15), Rat(1, 3), Rat(3, 5)})
            return false;
        if (s.mu_ceil !=
            std::vector<Rat>{Rat(2, 15), Rat(2, 15), Rat(4, 15), Rat(4, 15), Rat(2, 5)})
            return false;
        auto [plan, trace] = build_placement(profile);
        if (!validate_plan(plan, profile).ok()) return false;
        SCPIRScheme sch = build_scheme(profile, 2);
        Transcript tr = run_retrieval(sch, 1, 3);
        return Rat(sch.l) / Rat(tr.d_total_bits) == Rat(30, 43);
    });

    run(5, "feasibility test agrees with the exact solver on 500 random instances", [] {
        std::mt19937_64 rng(101);
        std::uniform_int_distribution<int> n_dist(1, 8), tau_dist(1, 4);
        std::uniform_int_distribution<int> num(0, 6), den(1, 6);
        for (int i = 0; i < 500; ++i) {
            int n = n_dist(rng), tau = tau_dist(rng);
            std::vector<Rat> m(static_cast<size_t>(n));
            for (auto& x : m) x = Rat(num(rng), den(rng));
            auto solved = fp_oracle_solve(m, tau);
            if (fp_feasible(m, tau) != solved.has_value()) return false;
            if (solved) {
                std::vector<Rat> sum(static_cast<size_t>(n), Rat(0));
                for (const auto& term : *solved)
                    for (int d : term.dbs) sum[static_cast<size_t>(d - 1)] += term.coefficient;
                if (sum != m) return false;
            }
        }
        return true;
    });

    run(6, "iterative placement converges with full invariants on 1000 random profiles", [] {
        std::mt19937_64 rng(202);
        std::uniform_int_distribution<int> n_dist(2, 16);
        int done = 0;
        while (done < 1000) {
            int n = n_dist(rng);
            std::uniform_int_distribution<int> num(1, 12);
            std::vector<Rat> mu(static_cast<size_t>(n));
            for (auto& x : mu) x = Rat(num(rng), 12);
            Rat total = rat_sum(mu);
            int tau = std::max(1, std::min(n, static_cast<int>(rat_floor(total))));
            Rat scale = Rat(tau) / total;
            bool valid = true;
            for (auto& x : mu) {
                x *= scale;
                valid = valid && x > Rat(0) && x <= Rat(1);
            }
            if (!valid) continue;
            ++done;
            auto [plan, trace] = place_iterative(StorageProfile(mu));
            if (plan.segment_count() > n) return false;

            // replay the trace: loop invariant, Lemma 2/3, partial-fill budget
            std::vector<Rat> m = mu;
            int partial_fills = 0, prev_e = -1;
            bool prev_was_pf = false;
            for (const auto& tr : trace) {
                if (tr.t_prime != rat_sum(m)) return false;
                int n_prime = 0, e = 0;
                Rat threshold = tr.t_prime / tau, smallest(-1);
                for (const auto& x : m) {
                    if (x > Rat(0)) {
                        ++n_prime;
                        if (smallest < Rat(0) || x < smallest) smallest = x;
                    }
                    if (x == threshold) ++e;
                }
                if (tr.n_prime != n_prime || tr.e != e) return false;
                if (e == tau - 1 && n_prime >= tau + 1 && tr.kind != FillKind::CompleteFill)
                    return false;
                if (prev_e >= 0) {
                    if (e < prev_e) return false;
                    if (prev_was_pf && e < prev_e + 1) return false;
                }
                prev_e = (n_prime >= tau + 1) ? e : -1;
                prev_was_pf = (tr.kind == FillKind::PartialFill);
                if (tr.kind == FillKind::PartialFill) ++partial_fills;
                if (tr.kind == FillKind::CompleteFill && tr.alpha != smallest) return false;
                for (int d : tr.dbs) m[static_cast<size_t>(d - 1)] -= tr.alpha;
                for (const auto& x : m)
                    if (x < Rat(0)) return false;
                if (!fp_feasible(m, tau)) return false;
            }
            if (rat_sum(m) != Rat(0) || partial_fills > tau - 1) return false;
        }
        return true;
    });

    run(7, "privacy by enumeration over the full permutation space (t=2, K=2)", [] {
        SCPIRScheme sch = build_scheme(StorageProfile::uniform(2, Rat(1)), 2);
        AuditReport rep = audit_privacy_enumerate(sch);
        return rep.pass && rep.tv_distance == 0.0;
    });

    run(8, "privacy by sampling: 1e5 trials with TV <= 0.01; broken control fails", [] {
        SCPIRScheme sch = build_scheme(StorageProfile::uniform(4, Rat(1, 2)), 3, 16);
        AuditReport rep = audit_privacy_sample(sch, 100000, 404);
        if (!rep.pass || rep.tv_distance > 0.01) return false;
        AuditReport broken = audit_privacy_sample(sch, 100000, 404, 0.01, /*break_symmetry=*/true);
        return !broken.pass;
    });

    run(9, "zero-error decodability across built-in schemes, 100 seeds, all messages", [] {
        std::vector<SCPIRScheme> schemes;
        schemes.push_back(build_scheme(StorageProfile::uniform(4, Rat(1, 2)), 3, 16));
        schemes.push_back(
            build_scheme(StorageProfile::uniform(5, Rat(3, 5)), 2, partition_cyclic(5, 3)));
        schemes.push_back(build_scheme(StorageProfile(fig1_mu()), 2));
        schemes.push_back(build_scheme(noninteger_profile(), 2));
        for (const auto& sch : schemes)
            if (!decodes_everywhere(sch, 100)) return false;
        return true;
    });

    run(10, "measured rate = composed prediction = capacity on fixed and random profiles", [] {
        StorageProfile p1 = StorageProfile::uniform(4, Rat(1, 2));
        if (!rate_matches(build_scheme(p1, 3, 16), p1)) return false;
        StorageProfile p2 = StorageProfile::uniform(5, Rat(3, 5));
        if (!rate_matches(build_scheme(p2, 2, partition_cyclic(5, 3)), p2)) return false;
        StorageProfile p3(fig1_mu());
        if (!rate_matches(build_scheme(p3, 2), p3)) return false;
        StorageProfile p4 = noninteger_profile();
        if (!rate_matches(build_scheme(p4, 2), p4)) return false;

        std::mt19937_64 rng(505);
        std::uniform_int_distribution<int> n_dist(2, 5), k_dist(2, 3), num(1, 6);
        int done = 0;
        while (done < 50) {
            int n = n_dist(rng), k = k_dist(rng);
            std::vector<Rat> mu(static_cast<size_t>(n));
            for (auto& x : mu) x = Rat(num(rng), 6);
            if (rat_sum(mu) < Rat(1)) continue;
            StorageProfile profile(mu);
            auto [plan, trace] = build_placement(profile);
            if (minimum_message_length(plan, k) > 500000) continue;
            ++done;
            if (!rate_matches(build_scheme(profile, k, std::move(plan), std::nullopt), profile))
                return false;
        }
        return true;
    });

    if (g_failures == 0) {
        std::printf("acceptance: all 10 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion/criteria FAILED\n", g_failures);
    return 1;
}
