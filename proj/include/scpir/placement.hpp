// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scpir/model.hpp"
#include "scpir/rational.hpp"

namespace scpir {

// ---------------------------------------------------------------------------
// Filling-problem feasibility
// ---------------------------------------------------------------------------

// A (m, tau)-fill exists iff max_n m[n] <= sum(m)/tau (exact comparison).
// Vectors shorter than tau are infeasible by construction.
inline bool fp_feasible(const std::vector<Rat>& m, int tau) {
    if (tau < 1) throw std::invalid_argument("tau must be positive");
    for (const auto& x : m)
        if (x < Rat(0)) throw std::invalid_argument("storage entries must be non-negative");
    Rat total = rat_sum(m);
    if (total == Rat(0)) return true;  // empty decomposition
    if (static_cast<int>(m.size()) < tau) return false;
    for (const auto& x : m)
        if (x * tau > total) return false;
    return true;
}

// One basis vector of the fill: a coefficient on a tau-subset of databases.
struct FillTerm {
    Rat coefficient;
    std::vector<int> dbs;  // 1-based, sorted, exactly tau entries
};

namespace detail {

inline std::vector<std::vector<int>> subsets_of_size(int n, int tau) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(cur.size()) == tau) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i <= n; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 1);
    return out;
}

}  // namespace detail

// Brute-force oracle: exact phase-1 simplex over the C(N, tau) basis of
// {0,1}-vectors with tau ones. Test-scale only; independent of the iterative
// placement path.
inline std::optional<std::vector<FillTerm>> fp_oracle_solve(const std::vector<Rat>& m, int tau) {
    const int n = static_cast<int>(m.size());
    if (n > 12) throw std::invalid_argument("oracle scale exceeded (N <= 12)");
    if (tau < 1) throw std::invalid_argument("tau must be positive");
    for (const auto& x : m)
        if (x < Rat(0)) throw std::invalid_argument("storage entries must be non-negative");
    if (n < tau) {
        if (rat_sum(m) == Rat(0)) return std::vector<FillTerm>{};
        return std::nullopt;
    }

    auto basis = detail::subsets_of_size(n, tau);
    const int b = static_cast<int>(basis.size());

    // Minimize the sum of artificial variables via tableau simplex with
    // Bland's rule; all arithmetic exact.
    // Columns: [0, b) structural, [b, b+n) artificial, column b+n is the RHS.
    std::vector<std::vector<Rat>> tab(static_cast<size_t>(n),
                                      std::vector<Rat>(static_cast<size_t>(b + n + 1), Rat(0)));
    for (int j = 0; j < b; ++j)
        for (int d : basis[static_cast<size_t>(j)]) tab[static_cast<size_t>(d - 1)][static_cast<size_t>(j)] = Rat(1);
    std::vector<int> basic(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        tab[static_cast<size_t>(i)][static_cast<size_t>(b + i)] = Rat(1);
        tab[static_cast<size_t>(i)][static_cast<size_t>(b + n)] = m[static_cast<size_t>(i)];
        basic[static_cast<size_t>(i)] = b + i;
    }
    // w-row: w = sum of artificials expressed over nonbasic columns.
    std::vector<Rat> wrow(static_cast<size_t>(b + n + 1), Rat(0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= b + n; ++j) wrow[static_cast<size_t>(j)] += tab[static_cast<size_t>(i)][static_cast<size_t>(j)];
    for (int i = 0; i < n; ++i) wrow[static_cast<size_t>(b + i)] = Rat(0);

    while (wrow[static_cast<size_t>(b + n)] > Rat(0)) {
        int enter = -1;
        for (int j = 0; j < b + n; ++j)
            if (wrow[static_cast<size_t>(j)] > Rat(0)) { enter = j; break; }
        if (enter < 0) return std::nullopt;  // optimum > 0: infeasible
        int leave = -1;
        Rat best(0);
        for (int i = 0; i < n; ++i) {
            const Rat& a = tab[static_cast<size_t>(i)][static_cast<size_t>(enter)];
            if (a <= Rat(0)) continue;
            Rat ratio = tab[static_cast<size_t>(i)][static_cast<size_t>(b + n)] / a;
            if (leave < 0 || ratio < best ||
                (ratio == best && basic[static_cast<size_t>(i)] < basic[static_cast<size_t>(leave)])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave < 0) return std::nullopt;  // unbounded cannot happen here
        auto& prow = tab[static_cast<size_t>(leave)];
        Rat pivot = prow[static_cast<size_t>(enter)];
        for (auto& v : prow) v /= pivot;
        for (int i = 0; i < n; ++i) {
            if (i == leave) continue;
            Rat f = tab[static_cast<size_t>(i)][static_cast<size_t>(enter)];
            if (f == Rat(0)) continue;
            for (int j = 0; j <= b + n; ++j)
                tab[static_cast<size_t>(i)][static_cast<size_t>(j)] -= f * prow[static_cast<size_t>(j)];
        }
        Rat f = wrow[static_cast<size_t>(enter)];
        if (f != Rat(0))
            for (int j = 0; j <= b + n; ++j) wrow[static_cast<size_t>(j)] -= f * prow[static_cast<size_t>(j)];
        basic[static_cast<size_t>(leave)] = enter;
    }

    std::vector<FillTerm> terms;
    for (int i = 0; i < n; ++i) {
        int v = basic[static_cast<size_t>(i)];
        const Rat& value = tab[static_cast<size_t>(i)][static_cast<size_t>(b + n)];
        if (v < b && value > Rat(0)) terms.push_back({value, basis[static_cast<size_t>(v)]});
    }
    return terms;
}

// ---------------------------------------------------------------------------
// Homogeneous constructions
// ---------------------------------------------------------------------------

// N/t disjoint groups of t databases, each holding a t/N fraction.
inline PlacementPlan partition_disjoint(int n, int t) {
    if (n < 1 || t < 1 || t > n) throw std::invalid_argument("need 1 <= t <= N");
    if (n % t != 0) throw std::invalid_argument("disjoint scheme requires N/t integer");
    PlacementPlan plan;
    for (int f = 0; f < n / t; ++f) {
        PlacementPlan::Segment seg;
        seg.alpha = Rat(t, n);
        for (int i = 1; i <= t; ++i) seg.dbs.push_back(f * t + i);
        plan.segments.push_back(std::move(seg));
    }
    return plan;
}

// N cyclic windows of t databases, each holding a 1/N fraction. Segment f is
// stored at databases f, f-1, ..., f-t+1 (mod N).
inline PlacementPlan partition_cyclic(int n, int t) {
    if (n < 1 || t < 1 || t > n) throw std::invalid_argument("need 1 <= t <= N");
    PlacementPlan plan;
    for (int f = 1; f <= n; ++f) {
        PlacementPlan::Segment seg;
        seg.alpha = Rat(1, n);
        for (int i = 0; i < t; ++i) seg.dbs.push_back(((f - i - 1) % n + n) % n + 1);
        std::sort(seg.dbs.begin(), seg.dbs.end());
        plan.segments.push_back(std::move(seg));
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Iterative placement (heterogeneous, integer t)
// ---------------------------------------------------------------------------

enum class FillKind { CompleteFill, PartialFill, FinalEqualFill };

inline const char* to_string(FillKind k) {
    switch (k) {
        case FillKind::CompleteFill: return "CF";
        case FillKind::PartialFill: return "PF";
        case FillKind::FinalEqualFill: return "FE";
    }
    return "?";
}

struct IterationTrace {
    int index = 0;        // 1-based iteration number
    Rat t_prime;          // remaining normalized storage before this iteration
    int n_prime = 0;      // databases with non-zero remainder
    int e = 0;            // databases with remainder exactly t'/t
    Rat alpha;
    std::vector<int> dbs;
    FillKind kind = FillKind::CompleteFill;
};

struct FillResult {
    std::vector<PlacementPlan::Segment> segments;
    std::vector<IterationTrace> trace;
};

// Core of the iterative filling algorithm over a raw remainder vector (zeros
// allowed). Each iteration fills the database with the smallest non-zero
// remainder together with the tau-1 databases with the largest remainders,
// clamping the step so the remainder stays fillable.
inline FillResult iterative_fill(std::vector<Rat> m, int tau) {
    const int n = static_cast<int>(m.size());
    if (!fp_feasible(m, tau)) throw std::invalid_argument("no (m,tau)-fill exists for this input");

    FillResult result;
    int iter = 0;
    while (rat_sum(m) > Rat(0)) {
        ++iter;
        Rat t_prime = rat_sum(m);
        Rat threshold_all = t_prime / tau;

        std::vector<int> nz;  // 0-based indices of non-zero entries, ascending by (value, index)
        for (int i = 0; i < n; ++i)
            if (m[static_cast<size_t>(i)] > Rat(0)) nz.push_back(i);
        std::stable_sort(nz.begin(), nz.end(), [&](int a, int b) {
            return m[static_cast<size_t>(a)] < m[static_cast<size_t>(b)];
        });
        const int n_prime = static_cast<int>(nz.size());
        if (n_prime < tau) throw std::logic_error("fill invariant broken: fewer than tau non-zero remainders");

        int e = 0;
        for (int i = 0; i < n; ++i)
            if (m[static_cast<size_t>(i)] == threshold_all) ++e;

        IterationTrace tr;
        tr.index = iter;
        tr.t_prime = t_prime;
        tr.n_prime = n_prime;
        tr.e = e;

        int smallest = nz.front();
        std::vector<int> chosen{smallest};
        if (n_prime > tau) {
            // tau-1 largest remainders, ties broken toward lower database index.
            std::vector<int> rest(nz.begin() + 1, nz.end());
            std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) {
                if (m[static_cast<size_t>(a)] != m[static_cast<size_t>(b)])
                    return m[static_cast<size_t>(a)] > m[static_cast<size_t>(b)];
                return a < b;
            });
            chosen.insert(chosen.end(), rest.begin(), rest.begin() + (tau - 1));
            // step size: don't push the tau-th largest remainder above t'/tau
            Rat tau_th_largest = m[static_cast<size_t>(nz[static_cast<size_t>(n_prime - tau)])];
            Rat cap = threshold_all - tau_th_largest;
            tr.alpha = std::min(cap, m[static_cast<size_t>(smallest)]);
            tr.kind = (tr.alpha == m[static_cast<size_t>(smallest)]) ? FillKind::CompleteFill
                                                                     : FillKind::PartialFill;
        } else {
            // exactly tau non-zero remainders: all equal, fill them together
            chosen.assign(nz.begin(), nz.end());
            tr.alpha = m[static_cast<size_t>(smallest)];
            tr.kind = FillKind::FinalEqualFill;
        }

        for (int i : chosen) m[static_cast<size_t>(i)] -= tr.alpha;

        std::vector<int> dbs;
        for (int i : chosen) dbs.push_back(i + 1);
        std::sort(dbs.begin(), dbs.end());
        tr.dbs = dbs;

        result.segments.push_back({tr.alpha, dbs});
        result.trace.push_back(std::move(tr));
        if (iter > 4 * n + 4) throw std::logic_error("iterative fill failed to converge");
    }
    return result;
}

// Integer-t placement for a full storage profile.
inline std::pair<PlacementPlan, std::vector<IterationTrace>> place_iterative(
    const StorageProfile& profile) {
    if (!profile.integer_t())
        throw std::invalid_argument("t is not an integer: use split_storage first");
    int tau = static_cast<int>(profile.total().numerator());
    FillResult r = iterative_fill(profile.mu(), tau);
    PlacementPlan plan;
    plan.segments = std::move(r.segments);
    return {std::move(plan), std::move(r.trace)};
}

// ---------------------------------------------------------------------------
// Non-integer t: split into floor(t) and ceil(t) sub-problems
// ---------------------------------------------------------------------------

struct StorageSplit {
    std::vector<Rat> mu_floor;  // allotted to the floor(t) filling problem
    std::vector<Rat> mu_ceil;   // allotted to the ceil(t) filling problem
};

inline StorageSplit split_storage(const StorageProfile& profile) {
    const Rat& t = profile.total();
    if (is_integer(t)) throw std::invalid_argument("t is an integer: no split needed");
    const int n = profile.db_count();
    Rat lo(rat_floor(t)), hi(rat_ceil(t));
    Rat frac_up = t - lo;    // t - floor(t)
    Rat frac_down = hi - t;  // ceil(t) - t

    auto clip = [](const Rat& x) { return x > Rat(0) ? x : Rat(0); };
    std::vector<Rat> m1(static_cast<size_t>(n)), m2(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        m1[static_cast<size_t>(i)] = clip(profile[static_cast<size_t>(i)] - frac_up);
        m2[static_cast<size_t>(i)] = clip(profile[static_cast<size_t>(i)] - frac_down);
    }
    Rat s1 = rat_sum(m1), s2 = rat_sum(m2);
    Rat denom = t - s1 - s2;
    Rat r = denom > Rat(0) ? (lo * frac_down - s1) / denom : Rat(0);

    StorageSplit out;
    out.mu_floor.resize(static_cast<size_t>(n));
    out.mu_ceil.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        Rat rest = profile[static_cast<size_t>(i)] - m1[static_cast<size_t>(i)] - m2[static_cast<size_t>(i)];
        out.mu_floor[static_cast<size_t>(i)] = m1[static_cast<size_t>(i)] + rest * r;
        out.mu_ceil[static_cast<size_t>(i)] = m2[static_cast<size_t>(i)] + rest * (Rat(1) - r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plan validation against the capacity sufficient conditions
// ---------------------------------------------------------------------------

struct ValidationReport {
    bool sums_to_one = false;
    bool budgets_ok = false;          // per-DB load <= mu[n]
    bool group_sizes_ok = false;      // |N_f| = t (or in {floor, ceil} for fractional t)
    bool mass_split_ok = false;       // fractional t only: masses match floor/ceil shares
    std::vector<bool> exact_fill;     // per DB: load == mu[n]
    std::vector<std::string> violations;

    bool ok() const { return sums_to_one && budgets_ok && group_sizes_ok && mass_split_ok; }
};

inline ValidationReport validate_plan(const PlacementPlan& plan, const StorageProfile& profile) {
    ValidationReport rep;
    const int n = profile.db_count();
    const Rat& t = profile.total();

    Rat total(0);
    std::vector<Rat> load(static_cast<size_t>(n), Rat(0));
    for (const auto& seg : plan.segments) {
        total += seg.alpha;
        for (int d : seg.dbs) {
            if (d < 1 || d > n) {
                rep.violations.push_back("database id out of range");
                continue;
            }
            load[static_cast<size_t>(d - 1)] += seg.alpha;
        }
    }
    rep.sums_to_one = (total == Rat(1));
    if (!rep.sums_to_one) rep.violations.push_back("segment fractions sum to " + to_string(total));

    rep.budgets_ok = true;
    rep.exact_fill.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (load[static_cast<size_t>(i)] > profile[static_cast<size_t>(i)]) {
            rep.budgets_ok = false;
            rep.violations.push_back("database " + std::to_string(i + 1) + " over budget");
        }
        rep.exact_fill[static_cast<size_t>(i)] = (load[static_cast<size_t>(i)] == profile[static_cast<size_t>(i)]);
    }

    if (is_integer(t)) {
        rep.group_sizes_ok = true;
        for (const auto& seg : plan.segments)
            if (Rat(BigInt(seg.dbs.size())) != t) {
                rep.group_sizes_ok = false;
                rep.violations.push_back("segment group size != t");
                break;
            }
        rep.mass_split_ok = true;
    } else {
        BigInt lo = rat_floor(t), hi = rat_ceil(t);
        rep.group_sizes_ok = true;
        Rat mass_lo(0), mass_hi(0);
        for (const auto& seg : plan.segments) {
            BigInt sz(seg.dbs.size());
            if (sz == lo)
                mass_lo += seg.alpha;
            else if (sz == hi)
                mass_hi += seg.alpha;
            else {
                rep.group_sizes_ok = false;
                rep.violations.push_back("segment group size outside {floor(t), ceil(t)}");
            }
        }
        rep.mass_split_ok = (mass_lo == Rat(hi) - t) && (mass_hi == t - Rat(lo));
        if (!rep.mass_split_ok) rep.violations.push_back("floor/ceil segment masses do not match t");
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Dispatch: one entry point for both integer and fractional t
// ---------------------------------------------------------------------------

inline std::pair<PlacementPlan, std::vector<IterationTrace>> build_placement(
    const StorageProfile& profile) {
    if (profile.integer_t()) return place_iterative(profile);

    const Rat& t = profile.total();
    StorageSplit split = split_storage(profile);
    BigInt lo = rat_floor(t), hi = rat_ceil(t);
    Rat mass_lo = Rat(hi) - t, mass_hi = t - Rat(lo);

    PlacementPlan plan;
    std::vector<IterationTrace> trace;
    auto run_half = [&](const std::vector<Rat>& half, const BigInt& tau, const Rat& mass) {
        std::vector<Rat> norm(half.size());
        for (size_t i = 0; i < half.size(); ++i) norm[i] = half[i] / mass;
        FillResult r = iterative_fill(norm, static_cast<int>(tau));
        for (auto& seg : r.segments) {
            seg.alpha *= mass;
            plan.segments.push_back(std::move(seg));
        }
        for (auto& tr : r.trace) {
            tr.index = static_cast<int>(trace.size()) + 1;
            trace.push_back(std::move(tr));
        }
    };
    run_half(split.mu_floor, lo, mass_lo);
    run_half(split.mu_ceil, hi, mass_hi);
    return {std::move(plan), std::move(trace)};
}

}  // namespace scpir
