#include <doctest.h>

#include "naba/bethe.hpp"
#include "naba/errors.hpp"

using namespace naba;

namespace {

double cabs_max(const std::vector<Cplx>& v) {
    double m = 0;
    for (const Cplx& x : v) m = std::max(m, std::abs(x));
    return m;
}

ProjectorLimit trivial_pl(int dim) {
    ProjectorLimit pl;
    pl.idempotent = true;
    pl.pi = QMat::identity(dim);
    pl.rank = dim;
    pl.scale = 1;
    pl.order = 0;
    pl.pi_hat = pl.pi;
    return pl;
}

}  // namespace

TEST_CASE("drinfeld polynomials from chains") {
    ChainSpec sl2 = defining_chain("A1", 1, 2);
    BetheProblem p = bethe_problem_from_chain(sl2, {1});
    // P₁(u) = (u − ħ/2)² for the homogeneous L=2 fundamental chain
    REQUIRE(p.drinfeld[0].degree() == 2);
    CHECK(std::abs(p.drinfeld[0].eval(Cplx(0.5, 0))) < 1e-14);

    ChainSpec sl3 = defining_chain("A2", 1, 2);
    BetheProblem p3 = bethe_problem_from_chain(sl3, {1, 0});
    CHECK(p3.drinfeld[0].degree() == 2);
    CHECK(p3.drinfeld[1].degree() == 0);

    CHECK_THROWS_AS(bethe_problem_from_chain(sl2, {7}), NestingMismatch);
}

TEST_CASE("sl2 L=2 one magnon: analytic root v=0") {
    ChainSpec spec = defining_chain("A1", 1, 2);
    BetheProblem p = bethe_problem_from_chain(spec, {1});
    // analytic oracle: the cleared equation is (v+ħ/2)² = (v−ħ/2)², root v = 0
    CHECK(cabs_max(bethe_residual(p, {Cplx(0, 0)})) < 1e-15);
    auto sols = solve_bethe(p, 24, 7);
    REQUIRE(sols.size() == 1);
    CHECK(std::abs(sols[0].roots[0][0]) < 1e-12);
    CHECK(sols[0].residual < 1e-12);

    CMat psi = magnon_vector(spec, {Cplx(0, 0)});
    EigenReport rep = verify_eigenvector(spec, psi, {rat(2), rat(7, 2), rat(-5, 3)});
    CHECK(rep.pass);
    CHECK(rep.max_residual < 1e-10);
    CHECK(rep.max_spectrum_gap < 1e-10);
}

TEST_CASE("negative control: a non-Bethe rapidity fails certification") {
    ChainSpec spec = defining_chain("A1", 1, 2);
    CMat psi = magnon_vector(spec, {Cplx(0.37, 0.11)});
    EigenReport rep = verify_eigenvector(spec, psi, {rat(2), rat(7, 2)});
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_residual > 1e-3);
}

TEST_CASE("sl2 L=1 m=1 has no finite solution") {
    ChainSpec spec = defining_chain("A1", 1, 1);
    BetheProblem p = bethe_problem_from_chain(spec, {1});
    CHECK_THROWS_AS(solve_bethe(p, 24, 3), NoConvergence);
}

TEST_CASE("sl2 L=3 m=1: two imaginary roots symmetric about zero") {
    ChainSpec spec = defining_chain("A1", 1, 3);
    BetheProblem p = bethe_problem_from_chain(spec, {1});
    auto sols = solve_bethe(p, 48, 11);
    REQUIRE(sols.size() == 2);
    // oracle: 3v² + ħ²/4 = 0 from the cubic difference
    const double expect = 1.0 / (2.0 * std::sqrt(3.0));
    CHECK(std::abs(sols[0].roots[0][0] - Cplx(0, -expect)) < 1e-10);
    CHECK(std::abs(sols[1].roots[0][0] - Cplx(0, expect)) < 1e-10);
    for (const auto& s : sols) {
        CMat psi = magnon_vector(spec, s.roots[0]);
        EigenReport rep = verify_eigenvector(spec, psi, {rat(3), rat(-7, 4), rat(9, 5)});
        CHECK(rep.pass);
    }
}

TEST_CASE("sl2 L=2 m=2: the degenerate pair sector") {
    // the two cleared equations coincide; solutions fill v₁v₂ = −ħ²/4 and the
    // state is the lowest-weight descendant, still a certified eigenvector
    ChainSpec spec = defining_chain("A1", 1, 2);
    BetheProblem p = bethe_problem_from_chain(spec, {2});
    auto sols = solve_bethe(p, 32, 13);
    REQUIRE(!sols.empty());
    int certified = 0;
    for (const auto& s : sols) {
        CHECK(std::abs(s.roots[0][0] * s.roots[0][1] + Cplx(0.25, 0)) < 1e-9);
        CHECK(s.residual < 1e-12);
        try {
            CMat psi = magnon_vector(spec, s.roots[0]);
            if (verify_eigenvector(spec, psi, {rat(3), rat(-7, 4)}).pass) ++certified;
        } catch (const std::exception&) {
        }
        if (certified > 0) break;
    }
    CHECK(certified > 0);
}

TEST_CASE("sl2 L=4 m=2: isolated pairs certify") {
    ChainSpec spec = defining_chain("A1", 1, 4);
    BetheProblem p = bethe_problem_from_chain(spec, {2});
    auto sols = solve_bethe(p, 64, 17);
    REQUIRE(!sols.empty());
    int certified = 0;
    for (const auto& s : sols) {
        try {
            CMat psi = magnon_vector(spec, s.roots[0]);
            EigenReport rep = verify_eigenvector(spec, psi, {rat(3), rat(-9, 4)});
            if (rep.pass) ++certified;
        } catch (const std::exception&) {
        }
    }
    CHECK(certified >= 1);
}

TEST_CASE("sl3 nested certification") {
    SUBCASE("L=2 m=(1,0): the anti-fundamental highest-weight state") {
        ChainSpec spec = defining_chain("A2", 1, 2);
        BetheProblem p = bethe_problem_from_chain(spec, {1, 0});
        auto sols = solve_bethe(p, 24, 19);
        REQUIRE(sols.size() == 1);
        CHECK(std::abs(sols[0].roots[0][0]) < 1e-12);
        CMat psi = bethe_vector(spec, sols[0].roots);
        EigenReport rep = verify_eigenvector(spec, psi, {rat(3), rat(-7, 4), rat(12, 5)});
        CHECK(rep.pass);
    }
    SUBCASE("L=2 m=(1,1) admits no finite Bethe solution") {
        // 3⊗3 = 6 ⊕ 3̄ has no highest-weight state of that weight; the node-2
        // cleared equation is identically −ħ·(nonzero product)
        ChainSpec spec = defining_chain("A2", 1, 2);
        BetheProblem p = bethe_problem_from_chain(spec, {1, 1});
        CHECK(std::abs(bethe_residual(p, {Cplx(0.31, 0.7), Cplx(-1.2, 0.4)})[1] + Cplx(1, 0)) <
              1e-12);
        CHECK_THROWS_AS(solve_bethe(p, 16, 5), NoConvergence);
    }
    SUBCASE("L=3 m=(2,1): the singlet via the nested construction") {
        ChainSpec spec = defining_chain("A2", 1, 3);
        BetheProblem p = bethe_problem_from_chain(spec, {2, 1});
        auto sols = solve_bethe(p, 64, 23);
        REQUIRE(!sols.empty());
        const auto& s = sols.front();
        // node-1 pair ±iħ/(2√3), node-2 root at the symmetric point 0
        CHECK(std::abs(s.roots[0][0].real()) < 1e-10);
        CHECK(std::abs(s.roots[1][0]) < 1e-10);
        CMat psi = bethe_vector(spec, s.roots);
        EigenReport rep = verify_eigenvector(spec, psi, {rat(3), rat(-7, 4), rat(12, 5)});
        CHECK(rep.pass);
        CHECK(rep.max_residual < 1e-10);
        CHECK(rep.max_spectrum_gap < 1e-10);
    }
}

TEST_CASE("eigenvalue-count sanity: certified values fit the sector dimension") {
    ChainSpec spec = defining_chain("A1", 1, 3);
    BetheProblem p = bethe_problem_from_chain(spec, {1});
    auto sols = solve_bethe(p, 48, 11);
    // charge-1 sector of M has dimension 3
    CHECK(static_cast<int>(sols.size()) <= 3);
}

TEST_CASE("exact diagonalization oracle facts") {
    ChainSpec spec = defining_chain("A1", 1, 2);
    Cplx u(2, 0);
    auto evs = exact_diagonalize(spec, u);
    REQUIRE(evs.size() == 4);
    // trace identity: Σ eigenvalues = tr t(u)
    CMat t = transfer(spec, u);
    Cplx tr = 0;
    for (int i = 0; i < 4; ++i) tr += t(i, i);
    Cplx sum = 0;
    for (const Cplx& x : evs) sum += x;
    CHECK(std::abs(sum - tr) < 1e-12);
    // the vacuum eigenvalue 1 + (u/(u+1))^L appears, three times (triplet)
    Cplx vac_ev = Cplx(1, 0) + std::pow(u / (u + Cplx(1, 0)), 2);
    int count = 0;
    for (const Cplx& x : evs)
        if (std::abs(x - vac_ev) < 1e-9) ++count;
    CHECK(count == 3);
}

TEST_CASE("RBB exchange relation holds exactly") {
    ChainSpec sl3 = defining_chain("A2", 1, 2);
    CHECK(check_rbb(sl3, rat(3), rat(1, 2)).pass);
    CHECK(check_rbb(sl3, rat(-5, 3), rat(7, 4)).pass);
    ChainSpec sl2 = defining_chain("A1", 1, 2);
    CHECK(check_rbb(sl2, rat(2), rat(-1, 3)).pass);
}

TEST_CASE("multi-excitation exchange symmetry is exact on the rational path") {
    SUBCASE("sl2") {
        ChainSpec spec = defining_chain("A1", 1, 2);
        ProjectorLimit pl = trivial_pl(1);
        ExchangeReport rep = check_exchange_symmetry(spec, pl, rat(2), rat(1, 3));
        CHECK(rep.pass);
        // scalar exchange factor is the magnon S-matrix (w−ħ)/(w+ħ)
        Rat w = rat(2) - rat(1, 3);
        CHECK(rep.r_check == QMat{{(w - 1) / (w + 1)}});
    }
    SUBCASE("sl3") {
        ChainSpec spec = defining_chain("A2", 1, 2);
        ProjectorLimit pl = trivial_pl(2);
        ExchangeReport rep = check_exchange_symmetry(spec, pl, rat(5, 2), rat(-1, 3));
        CHECK(rep.pass);
    }
}

TEST_CASE("m=1 multi-excitation operator coincides with the one-excitation operator") {
    ChainSpec spec = defining_chain("A2", 1, 2);
    ProjectorLimit pl = trivial_pl(2);
    Cplx v(0.73, -0.21);
    CMat a = multi_excitation_operator(spec, {v}, pl);
    CMat b = one_excitation_operator(spec, v, 0, pl);
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    double worst = 0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    CHECK(worst < 1e-12);
}

TEST_CASE("multi-excitation guards") {
    ChainSpec b2 = defining_chain("B2", 1, 1);  // N = 2 nesting
    CHECK_THROWS_AS(multi_excitation_operator(b2, {Cplx(1, 0)}, trivial_pl(3)),
                    NestingNotRankOneReducible);
}

TEST_CASE("one-excitation vector lives in the charge-1 sector") {
    ChainSpec spec = defining_chain("A2", 1, 1);
    ProjectorLimit pl = trivial_pl(2);
    CMat vec = one_excitation_vector(spec, Cplx(1.7, 0.3), 0, pl);
    const int dm = spec.m_dim();
    const int w = vec.rows() / dm;
    REQUIRE(w == 2);
    bool nonzero = false;
    for (int a = 0; a < w; ++a)
        for (int m = 0; m < dm; ++m) {
            if (std::abs(vec(a * dm + m, 0)) < 1e-14) continue;
            nonzero = true;
            CHECK(m_charge(spec, m) == 1);  // the covec'd B raises the module charge
        }
    CHECK(nonzero);
}

TEST_CASE("wanted-term relation: defect factors through beta(u)") {
    ChainSpec spec = defining_chain("A2", 1, 2);
    ProjectorLimit pl = trivial_pl(2);
    CheckResult res = check_wanted_term_relation(spec, pl, rat(7, 2), rat(1, 3), rat(-3, 4));
    CHECK(res.pass);
}

TEST_CASE("dressed transfer for the spin-1 auxiliary chain") {
    ChainSpec spec = spin1_aux_chain(2);
    const int nfit = 2;  // dim(W) − 1, the fitted ratio parameter
    SUBCASE("sum of diagonal blocks is the transfer trace") {
        Rat u = rat(23, 2);
        QMat tu = monodromy(spec, u);
        QMat sum(spec.m_dim(), spec.m_dim());
        for (int I = 0; I <= 2; ++I) sum = sum + t_block(spec, tu, I, I);
        CHECK(sum == transfer(spec, u));
    }
    SUBCASE("residue identity at I = 0 and I = 1") {
        CHECK(check_dressed_residue(spec, rat(1, 3), nfit, 0).pass);
        CHECK(check_dressed_residue(spec, rat(1, 3), nfit, 1).pass);
    }
    SUBCASE("pole collision is rejected") {
        CHECK_THROWS_AS(dressed_transfer_sl2(spec, rat(4, 3), rat(1, 3), nfit), PoleCollision);
    }
    SUBCASE("spin-1/2 auxiliary: dressed coefficients match the classical pair") {
        ChainSpec half = defining_chain("A1", 1, 2);
        Rat u = rat(3), v = rat(1, 2);
        Rat w = u - v;
        QMat tp = dressed_transfer_sl2(half, u, v, 1);
        QMat tu = monodromy(half, u);
        QMat expect = t_block(half, tu, 0, 0) * ((w - 1) / w) +
                      t_block(half, tu, 1, 1) * ((w + 1) / w);
        CHECK(tp == expect);
    }
}

TEST_CASE("auxiliary sites") {
    SUBCASE("sl3, p=1: dimension 2, defining weight of the A1 subalgebra") {
        AuxiliarySite aux = auxiliary_site(remove_node(build_root_system("A2"), 1));
        CHECK(aux.dim == 2);
        CHECK(aux.hw_labels == std::vector<Rat>{rat(1)});
    }
    SUBCASE("B2, p=1: dimension equals the charge-1 root count") {
        AuxiliarySite aux = auxiliary_site(remove_node(build_root_system("B2"), 1));
        CHECK(aux.dim == 3);
        CHECK(aux.hw_labels == std::vector<Rat>{rat(2)});
    }
    SUBCASE("A1, p=1: the degenerate one-dimensional site") {
        AuxiliarySite aux = auxiliary_site(remove_node(build_root_system("A1"), 1));
        CHECK(aux.dim == 1);
        CHECK(aux.hw_labels.empty());
    }
    SUBCASE("C2 p=2 and D4 p=4") {
        CHECK(auxiliary_site(remove_node(build_root_system("C2"), 2)).dim == 3);
        CHECK(auxiliary_site(remove_node(build_root_system("D4"), 4)).dim == 6);
    }
    SUBCASE("adjoint-action brackets close on the site") {
        AuxiliarySite aux = auxiliary_site(remove_node(build_root_system("A2"), 1));
        CHECK(commutator(aux.sub_e[0], aux.sub_f[0]) == aux.sub_h[0]);
    }
    SUBCASE("the map x ⊗ ζ ↦ x·ζ intertwines the ĝ action") {
        RootSystem rs = build_root_system("B2");
        NestingData nd = remove_node(rs, 1);
        AuxiliarySite aux = auxiliary_site(nd);
        MatrixRep rep = defining_rep(rs);
        // equivariance: [y, x_k] = Σ_l ad[y]_{lk} x_l in the defining rep,
        // which is exactly y·ψ(x⊗ζ) = ψ(ad_y x ⊗ ζ) + ψ(x ⊗ yζ) on vectors
        for (size_t g = 0; g < aux.sub_e.size(); ++g) {
            int node = nd.node_map[g];
            for (int k = 0; k < aux.dim; ++k) {
                QMat lhs = commutator(rep.e[node - 1], aux.basis[k]);
                QMat rhs(rep.dim, rep.dim);
                for (int l = 0; l < aux.dim; ++l) rhs = rhs + aux.basis[l] * aux.sub_e[g](l, k);
                CHECK(lhs == rhs);
                QMat lhs_f = commutator(rep.f[node - 1], aux.basis[k]);
                QMat rhs_f(rep.dim, rep.dim);
                for (int l = 0; l < aux.dim; ++l) rhs_f = rhs_f + aux.basis[l] * aux.sub_f[g](l, k);
                CHECK(lhs_f == rhs_f);
            }
        }
        // support scan: x^-_α maps the charge-I block into charge-(I+1)
        ChargeDecomposition dec = charge_decompose(rep, nd);
        for (int k = 0; k < aux.dim; ++k) {
            // conjugate into the sorted basis through the weights: recompute the
            // root vectors directly in the sorted rep instead
            AuxiliarySite aux2 = auxiliary_site(nd);
            (void)aux2;
            const QMat& x = aux.basis[k];
            // basis order of defining_rep("B2") is already charge-sorted
            for (int r = 0; r < rep.dim; ++r)
                for (int c = 0; c < rep.dim; ++c)
                    if (sgn(x(r, c)) != 0) CHECK(dec.block_of(r) == dec.block_of(c) + 1);
        }
    }
}

TEST_CASE("nested auxiliary Drinfeld polynomials") {
    // worked cases of the tabulated split
    NestingData a3 = remove_node(build_root_system("A3"), 1);
    // (α_2, α_1) = −1 = −d_p: P = u − ħ/2
    QPoly p2 = nested_aux_drinfeld(a3, 2, 1);
    CHECK(p2.degree() == 1);
    CHECK(p2.eval(rat(1, 2)) == 0);
    // (α_3, α_1) = 0: P = 1
    QPoly p3 = nested_aux_drinfeld(a3, 3, 1);
    CHECK(p3.degree() == 0);
    CHECK(p3.eval(rat(5)) == 1);
    // C2 remove 1: (α_2, α_1) = −1 = −2d_p with d_p = 1/2: P = u(u − ħ/2)
    NestingData c2 = remove_node(build_root_system("C2"), 1);
    QPoly q = nested_aux_drinfeld(c2, 2, 1);
    CHECK(q.degree() == 2);
    CHECK(q.eval(rat(0)) == 0);
    CHECK(q.eval(rat(1, 2)) == 0);

    // weight-content comparison: deg_i · d_p = label_i · d_i across nestings
    for (const auto& [name, p] : std::vector<std::pair<std::string, int>>{
             {"A2", 1}, {"A3", 1}, {"B2", 1}, {"B3", 1}, {"C2", 1}, {"C2", 2}, {"C3", 3},
             {"D4", 4}, {"D4", 1}}) {
        CAPTURE(name);
        CAPTURE(p);
        RootSystem rs = build_root_system(name);
        NestingData nd = remove_node(rs, p);
        AuxiliarySite aux = auxiliary_site(nd);
        int li = 0;
        for (int i = 1; i <= rs.rank; ++i) {
            if (i == p) continue;
            QPoly poly = nested_aux_drinfeld(nd, i, 1);
            Rat lhs = Rat(poly.degree()) * rs.symmetrizers[p - 1];
            Rat rhs = aux.hw_labels[li] * rs.symmetrizers[i - 1];
            CHECK(lhs == rhs);
            ++li;
        }
    }
}

TEST_CASE("oracle dimension guard") {
    ChainSpec spec = defining_chain("A1", 1, 13);  // dim M = 8192 > 4096
    CHECK_THROWS_AS(exact_diagonalize(spec, Cplx(2, 0)), DimensionTooLarge);
}

TEST_CASE("creation operators reject singular spectral points") {
    ChainSpec spec = defining_chain("A1", 1, 2);
    // v − ħ/2 = −ħ is the R-matrix pole
    CHECK_THROWS_AS(magnon_vector(spec, {Cplx(-0.5, 0)}), SingularPoint);
    ChainSpec sl3 = defining_chain("A2", 1, 1);
    ProjectorLimit pl;
    pl.idempotent = true;
    pl.pi = QMat::identity(2);
    pl.rank = 2;
    pl.scale = 1;
    CHECK_THROWS_AS(one_excitation_operator(sl3, Cplx(-0.5, 0), 0, pl), SingularPoint);
}
