// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "scpir/scheme.hpp"

using namespace scpir;

TEST_CASE("compose_rate evaluates the segment-weighted inverse sum") {
    CHECK(compose_rate({Rat(1)}, {Rat(4, 7)}) == Rat(4, 7));
    CHECK(compose_rate({Rat(1, 2), Rat(1, 2)}, {Rat(4, 7), Rat(4, 7)}) == Rat(4, 7));
    CHECK(compose_rate({Rat(3, 5), Rat(2, 5)}, {Rat(2, 3), Rat(3, 4)}) == Rat(30, 43));
    CHECK_THROWS(compose_rate({Rat(1, 2)}, {Rat(1, 2)}));          // alphas don't sum to 1
    CHECK_THROWS(compose_rate({Rat(1)}, {Rat(0)}));                // invalid rate
}

TEST_CASE("minimum_message_length covers slicing and the FS-PIR sub-split") {
    CHECK(minimum_message_length(partition_disjoint(4, 2), 3) == 16);
    CHECK(minimum_message_length(partition_cyclic(5, 3), 2) == 45);
    PlacementPlan single;
    single.segments.push_back({Rat(1), {1, 2}});
    CHECK(minimum_message_length(single, 2) == 4);
}

TEST_CASE("build_scheme composes placement and per-segment slicing") {
    StorageProfile profile = StorageProfile::uniform(4, Rat(1, 2));
    SCPIRScheme sch = build_scheme(profile, 3, 16);
    CHECK(sch.l == 16);
    CHECK(sch.segment_count() == 2);
    CHECK(sch.seg_bits == std::vector<long>{8, 8});
    CHECK(sch.seg_offset == std::vector<long>{0, 8});
    CHECK(sch.sub_count == std::vector<long>{8, 8});
    CHECK(sch.symbol_bits == std::vector<long>{1, 1});
    CHECK(sch.predicted_rate == Rat(4, 7));
    CHECK(sch.predicted_rate == capacity_scpir(profile, 3));

    CHECK_THROWS_WITH(build_scheme(profile, 3, 20), doctest::Contains("multiple of 16"));
}

TEST_CASE("build_scheme defaults to the minimum valid length") {
    StorageProfile hom = StorageProfile::uniform(5, Rat(3, 5));
    SCPIRScheme sch = build_scheme(hom, 2, partition_cyclic(5, 3));
    CHECK(sch.l == 45);
    CHECK(sch.predicted_rate == Rat(3, 4));
}

TEST_CASE("fractional-t scheme hits the interpolated capacity") {
    StorageProfile het({Rat(1, 5), Rat(1, 5), Rat(2, 5), Rat(3, 5), Rat(1)});
    SCPIRScheme sch = build_scheme(het, 2);
    CHECK(sch.predicted_rate == Rat(30, 43));
    CHECK(sch.predicted_rate == capacity_scpir(het, 2));
    CHECK(sch.segment_count() <= 2 * het.db_count());
}

TEST_CASE("placement segment count stays at most N for integer t") {
    for (int n = 2; n <= 8; ++n) {
        StorageProfile full = StorageProfile::uniform(n, Rat(1));
        SCPIRScheme sch = build_scheme(full, 2);
        CHECK(sch.segment_count() <= n);
        CHECK(sch.predicted_rate == capacity_fspir(n, 2));
    }
}

TEST_CASE("schemes reject plans violating the placement conditions") {
    StorageProfile profile = StorageProfile::uniform(4, Rat(1, 2));
    PlacementPlan bad = partition_disjoint(4, 2);
    bad.segments[0].dbs = {1, 2, 3};  // group size != t
    CHECK_THROWS(build_scheme(profile, 3, bad, std::optional<long>{}));
}
