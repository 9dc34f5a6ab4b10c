// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "scpir/fspir.hpp"
#include "scpir/model.hpp"
#include "scpir/placement.hpp"

namespace scpir {

// Overall rate when segment f (mass alpha_f) is served by an FS-PIR scheme of
// rate rates[f]: (sum_f alpha_f / rates_f)^{-1}, exact.
inline Rat compose_rate(const std::vector<Rat>& alphas, const std::vector<Rat>& rates) {
    if (alphas.size() != rates.size()) throw std::invalid_argument("alpha/rate length mismatch");
    if (rat_sum(alphas) != Rat(1)) throw std::invalid_argument("segment fractions must sum to 1");
    Rat inv(0);
    for (size_t i = 0; i < alphas.size(); ++i) {
        if (rates[i] <= Rat(0) || rates[i] > Rat(1))
            throw std::invalid_argument("rates must lie in (0, 1]");
        inv += alphas[i] / rates[i];
    }
    return Rat(1) / inv;
}

// Smallest L such that every alpha_f * L is an integer divisible by the
// segment's t_f^K sub-split: lcm over f of den(alpha_f) * t_f^K.
inline BigInt minimum_message_length(const PlacementPlan& plan, int k) {
    if (plan.segments.empty()) throw std::invalid_argument("empty plan");
    BigInt l(1);
    for (const auto& seg : plan.segments) {
        BigInt sub(1);
        for (int i = 0; i < k; ++i) sub *= BigInt(seg.dbs.size());
        l = int_lcm(l, seg.alpha.denominator() * sub);
    }
    return l;
}

// A complete SC-PIR scheme: placement plus the per-segment slicing needed to
// run one FS-PIR instance per segment.
struct SCPIRScheme {
    StorageProfile profile;
    int k = 0;
    long l = 0;  // bits per message
    PlacementPlan plan;
    std::vector<long> seg_bits;     // alpha_f * L
    std::vector<long> seg_offset;   // first bit of segment f within each message
    std::vector<long> sub_count;    // t_f^K symbols per sub-message
    std::vector<long> symbol_bits;  // seg_bits / sub_count
    Rat predicted_rate;

    int db_count() const { return profile.db_count(); }
    int segment_count() const { return plan.segment_count(); }
    int group_size(int f) const { return static_cast<int>(plan.segments[static_cast<size_t>(f)].dbs.size()); }
};

inline SCPIRScheme make_scheme(StorageProfile profile, int k, PlacementPlan plan,
                               std::optional<long> l_opt) {
    if (k < 1) throw std::invalid_argument("need K >= 1");
    plan.check(profile.db_count());
    ValidationReport rep = validate_plan(plan, profile);
    if (!rep.ok()) throw std::invalid_argument("plan fails the capacity placement conditions");

    BigInt l_min = minimum_message_length(plan, k);
    long l;
    if (l_opt) {
        l = *l_opt;
        if (l <= 0 || BigInt(l) % l_min != 0)
            throw std::invalid_argument("L must be a positive multiple of " + l_min.str());
    } else {
        if (l_min > BigInt(1L << 40)) throw std::invalid_argument("minimum message length too large");
        l = static_cast<long>(l_min);
    }

    SCPIRScheme sch{std::move(profile), k, l, std::move(plan), {}, {}, {}, {}, Rat(0)};
    long offset = 0;
    std::vector<Rat> alphas, rates;
    for (const auto& seg : sch.plan.segments) {
        Rat bits = seg.alpha * l;
        if (!is_integer(bits)) throw std::logic_error("segment width not an integer bit count");
        long sb = static_cast<long>(bits.numerator());
        long sc = symbols_per_message(static_cast<int>(seg.dbs.size()), k);
        if (sb % sc != 0) throw std::logic_error("segment width not divisible by sub-split");
        sch.seg_bits.push_back(sb);
        sch.seg_offset.push_back(offset);
        sch.sub_count.push_back(sc);
        sch.symbol_bits.push_back(sb / sc);
        offset += sb;
        alphas.push_back(seg.alpha);
        rates.push_back(capacity_fspir(BigInt(seg.dbs.size()), k));
    }
    if (offset != l) throw std::logic_error("segments do not partition the message");
    sch.predicted_rate = compose_rate(alphas, rates);
    return sch;
}

// Builds the placement with the iterative algorithm (splitting first when t is
// fractional) and composes the scheme around it.
inline SCPIRScheme build_scheme(const StorageProfile& profile, int k,
                                std::optional<long> l_opt = std::nullopt) {
    auto [plan, trace] = build_placement(profile);
    (void)trace;
    return make_scheme(profile, k, std::move(plan), l_opt);
}

inline SCPIRScheme build_scheme(const StorageProfile& profile, int k, PlacementPlan plan,
                                std::optional<long> l_opt = std::nullopt) {
    return make_scheme(profile, k, std::move(plan), l_opt);
}

}  // namespace scpir
