#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "naba/matrix.hpp"
#include "naba/rational.hpp"

namespace naba {

// Polynomial with exact rational coefficients, ascending powers.
struct QPoly {
    std::vector<Rat> c;

    int degree() const {
        for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
            if (sgn(c[i]) != 0) return i;
        return -1;  // zero polynomial
    }
    bool is_zero() const { return degree() < 0; }
    Rat eval(const Rat& u) const {
        Rat acc = 0;
        for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) acc = acc * u + c[i];
        return acc;
    }
    QPoly derivative() const {
        QPoly d;
        for (size_t i = 1; i < c.size(); ++i) d.c.push_back(Rat(static_cast<long>(i)) * c[i]);
        return d;
    }
    int valuation() const {
        for (size_t i = 0; i < c.size(); ++i)
            if (sgn(c[i]) != 0) return static_cast<int>(i);
        return -1;
    }
    Rat leading() const {
        int d = degree();
        if (d < 0) throw std::domain_error("QPoly: leading of zero");
        return c[d];
    }
};

// Reduced rational function p/q reconstructed from exact point samples.
struct RatFun {
    QPoly num, den;

    Rat eval(const Rat& u) const {
        Rat d = den.eval(u);
        if (sgn(d) == 0) throw std::domain_error("RatFun: pole at sample");
        return num.eval(u) / d;
    }

    bool is_zero() const { return num.is_zero(); }

    // Valuation at u = 0 (negative: pole order).
    int order_at_zero() const {
        if (num.is_zero()) throw std::domain_error("RatFun: order of zero function");
        return num.valuation() - den.valuation();
    }

    // Coefficient of u^k in the Laurent expansion at 0, for k = order_at_zero().
    Rat leading_at_zero() const {
        int vn = num.valuation(), vd = den.valuation();
        return num.c[vn] / den.c[vd];
    }

    // Limit at infinity; throws if the function diverges there.
    Rat limit_at_infinity() const {
        if (num.is_zero()) return Rat(0);
        int dn = num.degree(), dd = den.degree();
        if (dn > dd) throw std::domain_error("RatFun: diverges at infinity");
        if (dn < dd) return Rat(0);
        return num.leading() / den.leading();
    }

    // Residue at a simple pole u = a.
    Rat residue_at(const Rat& a) const {
        Rat d = den.eval(a);
        if (sgn(d) != 0) throw std::domain_error("RatFun: not a pole");
        Rat dp = den.derivative().eval(a);
        if (sgn(dp) == 0) throw std::domain_error("RatFun: pole not simple");
        return num.eval(a) / dp;
    }

    // Root of a linear factor; requires degree exactly one.
    static Rat linear_root(const QPoly& p) {
        if (p.degree() != 1) throw std::domain_error("RatFun: factor not linear");
        return -p.c[0] / p.c[1];
    }
};

struct ReconstructionFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fit samples (u_i, f_i) with a rational function of degree at most
// (max_num_deg, max_den_deg). The minimal-degree representative is found by
// shrinking bounds until the solution space is one-dimensional, which yields
// a reduced (coprime) fraction without polynomial gcd machinery.
RatFun fit_rational(const std::vector<std::pair<Rat, Rat>>& samples, int max_num_deg,
                    int max_den_deg);

// Sample `f` at generic small-denominator points (skipping failures) and
// reconstruct; verifies on extra held-out points.
RatFun reconstruct_function(const std::function<Rat(const Rat&)>& f, int max_num_deg,
                            int max_den_deg, uint64_t seed = 12345);

// Entrywise reconstruction of a matrix-valued rational function.
std::vector<std::vector<RatFun>> reconstruct_matrix(
    const std::function<QMat(const Rat&)>& f, int rows, int cols, int max_num_deg,
    int max_den_deg, uint64_t seed = 12345);

}  // namespace naba
