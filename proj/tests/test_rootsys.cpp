#include <doctest.h>

#include "naba/errors.hpp"
#include "naba/rootsys.hpp"

using namespace naba;

namespace {

const std::vector<std::pair<Family, int>> kSupported = {
    {Family::A, 1}, {Family::A, 2}, {Family::A, 3}, {Family::A, 4},
    {Family::B, 2}, {Family::B, 3}, {Family::C, 2}, {Family::C, 3},
    {Family::D, 3}, {Family::D, 4}, {Family::D, 5},
};

}  // namespace

TEST_CASE("A2 cartan data") {
    RootSystem rs = build_root_system(Family::A, 2);
    CHECK(rs.cartan == QMat{{rat(2), rat(-1)}, {rat(-1), rat(2)}});
    CHECK(rs.symmetrizers == std::vector<Rat>{rat(1), rat(1)});
    CHECK(rs.highest_root_coeffs == std::vector<long>{1, 1});
}

TEST_CASE("B2 cartan data") {
    RootSystem rs = build_root_system(Family::B, 2);
    CHECK(rs.cartan(0, 1) * rs.cartan(1, 0) == rat(2));
    CHECK(rs.symmetrizers == std::vector<Rat>{rat(1), rat(1, 2)});
}

TEST_CASE("D4 highest root coefficients") {
    // oracle: brute-force enumeration of positive roots from the Cartan matrix
    RootSystem rs = build_root_system(Family::D, 4);
    auto roots = positive_roots(rs);
    CHECK(roots.size() == 12);  // |Φ⁺(D4)| = 12
    CHECK(roots.back() == std::vector<long>{1, 2, 1, 1});
    CHECK(rs.highest_root_coeffs == std::vector<long>{1, 2, 1, 1});
}

TEST_CASE("bilinear form consistency for every supported type") {
    for (auto [f, r] : kSupported) {
        RootSystem rs = build_root_system(f, r);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                // (α_i, α_j) = a_ij d_j
                CHECK(rs.pairing(rs.simple_roots[i], rs.simple_roots[j]) ==
                      rs.cartan(i, j) * rs.symmetrizers[j]);
            }
        for (int i = 1; i <= r; ++i)
            for (int j = 1; j <= r; ++j) {
                // (ω_i, α_j) = d_j δ_ij and (ω^∨_i, α_j) = δ_ij
                Rat w = rs.pairing(rs.fundamental_weights[i - 1], rs.simple_roots[j - 1]);
                Rat cw = rs.pairing(rs.fundamental_coweights[i - 1], rs.simple_roots[j - 1]);
                CHECK(w == (i == j ? rs.symmetrizers[j - 1] : Rat(0)));
                CHECK(cw == (i == j ? Rat(1) : Rat(0)));
            }
        // closed-form highest root agrees with enumeration
        auto roots = positive_roots(rs);
        std::vector<long> top(roots.back());
        CHECK(top == rs.highest_root_coeffs);
        // long roots have squared length 2
        Rat len = rs.pairing(rs.simple_roots[0], rs.simple_roots[0]);
        Rat maxlen = 0;
        for (int i = 0; i < r; ++i) {
            Rat l = rs.pairing(rs.simple_roots[i], rs.simple_roots[i]);
            if (l > maxlen) maxlen = l;
        }
        CHECK(maxlen == rat(2));
        (void)len;
    }
}

TEST_CASE("rank and family guards") {
    CHECK_THROWS_AS(build_root_system(Family::B, 1), RankTooSmall);
    CHECK_THROWS_AS(build_root_system(Family::C, 1), RankTooSmall);
    CHECK_THROWS_AS(build_root_system(Family::D, 2), RankTooSmall);
    CHECK_THROWS_AS(build_root_system("G2"), UnsupportedType);
    CHECK_THROWS_AS(build_root_system("E6"), UnsupportedType);
}

TEST_CASE("remove_node basic cases") {
    RootSystem a3 = build_root_system(Family::A, 3);
    NestingData nd = remove_node(a3, 1);
    CHECK(nd.sub.name() == "A2");
    CHECK(nd.sub.cartan == build_root_system(Family::A, 2).cartan);
    CHECK(nd.node_map == std::vector<int>{2, 3});
    CHECK(nd.max_charge == 1);

    RootSystem d4 = build_root_system(Family::D, 4);
    NestingData nd4 = remove_node(d4, 4);
    CHECK(nd4.sub.name() == "A3");
    CHECK(nd4.sub.cartan == build_root_system(Family::A, 3).cartan);

    CHECK_THROWS_AS(remove_node(a3, 2), NotEndNode);
}

TEST_CASE("remove_node keeps inherited symmetrizers") {
    RootSystem b2 = build_root_system(Family::B, 2);
    NestingData nd = remove_node(b2, 1);
    CHECK(nd.sub.rank == 1);
    CHECK(nd.sub.cartan == QMat{{rat(2)}});
    CHECK(nd.sub.symmetrizers[0] == rat(1, 2));  // short-root a1, the paper's Y_{dħ} case
}

TEST_CASE("degenerate rank-one nesting") {
    RootSystem a1 = build_root_system(Family::A, 1);
    NestingData nd = remove_node(a1, 1);
    CHECK(nd.sub.rank == 0);
    CHECK(nd.max_charge == 1);
}

TEST_CASE("charge coweight defining property") {
    for (auto [f, r] : kSupported) {
        RootSystem rs = build_root_system(f, r);
        for (int p = 1; p <= r; ++p) {
            if (!rs.is_end_node(p)) continue;
            NestingData nd = remove_node(rs, p);
            auto cw = charge_coweight(nd);
            for (int i = 1; i <= r; ++i)
                CHECK(rs.pairing(cw, rs.simple_roots[i - 1]) == (i == p ? Rat(1) : Rat(0)));
        }
    }
}

TEST_CASE("max charge equals highest-root coefficient") {
    RootSystem a4 = build_root_system(Family::A, 4);
    CHECK(remove_node(a4, 1).max_charge == 1);
    CHECK(remove_node(a4, 4).max_charge == 1);
    RootSystem c2 = build_root_system(Family::C, 2);
    CHECK(remove_node(c2, 1).max_charge == 2);
    CHECK(remove_node(c2, 2).max_charge == 1);
    RootSystem b3 = build_root_system(Family::B, 3);
    CHECK(remove_node(b3, 1).max_charge == 1);
}

TEST_CASE("removing a node and rebuilding gives identical cartan matrices") {
    const std::vector<std::tuple<std::string, int, std::string>> cases = {
        {"A4", 1, "A3"}, {"A4", 4, "A3"}, {"B3", 1, "B2"}, {"B3", 3, "A2"},
        {"C3", 1, "C2"}, {"C3", 3, "A2"}, {"D4", 1, "D3"}, {"D4", 4, "A3"},
        {"D5", 5, "A4"},
    };
    for (const auto& [parent, p, expect] : cases) {
        NestingData nd = remove_node(build_root_system(parent), p);
        CHECK(nd.sub.name() == expect);
        CHECK(nd.sub.cartan == build_root_system(expect).cartan);
    }
}
