#include "naba/ratfun.hpp"

#include "naba/prng.hpp"

namespace naba {

namespace {

// Solve for (num, den) with the given degree bounds; returns nullopt when the
// homogeneous solution space is not exactly one-dimensional.
std::optional<RatFun> try_fit(const std::vector<std::pair<Rat, Rat>>& samples, int dn, int dd) {
    const int unknowns = (dn + 1) + (dd + 1);
    QMat sys(static_cast<int>(samples.size()), unknowns);
    for (int i = 0; i < sys.rows(); ++i) {
        const auto& [u, f] = samples[i];
        Rat p = 1;
        for (int a = 0; a <= dn; ++a) { sys(i, a) = p; p *= u; }
        Rat q = 1;
        for (int b = 0; b <= dd; ++b) { sys(i, dn + 1 + b) = -f * q; q *= u; }
    }
    QMat ker = sys.kernel();
    if (ker.cols() != 1) return std::nullopt;
    RatFun r;
    r.num.c.resize(dn + 1);
    r.den.c.resize(dd + 1);
    for (int a = 0; a <= dn; ++a) r.num.c[a] = ker(a, 0);
    for (int b = 0; b <= dd; ++b) r.den.c[b] = ker(dn + 1 + b, 0);
    if (r.den.is_zero()) return std::nullopt;
    // normalize: monic denominator
    Rat lead = r.den.leading();
    for (auto& x : r.num.c) x /= lead;
    for (auto& x : r.den.c) x /= lead;
    return r;
}

}  // namespace

RatFun fit_rational(const std::vector<std::pair<Rat, Rat>>& samples, int max_num_deg,
                    int max_den_deg) {
    if (static_cast<int>(samples.size()) < max_num_deg + max_den_deg + 2)
        throw ReconstructionFailed("fit_rational: not enough samples");
    // Shrink degree bounds until the kernel is one-dimensional. Shrinking in
    // lockstep first removes the spurious common-factor freedom.
    for (int shrink = 0; shrink <= std::min(max_num_deg, max_den_deg); ++shrink) {
        auto r = try_fit(samples, max_num_deg - shrink, max_den_deg - shrink);
        if (r) return *r;
    }
    // Asymmetric tails (pure polynomial / pure reciprocal cases).
    for (int dn = std::min(max_num_deg, max_den_deg); dn >= 0; --dn) {
        auto r = try_fit(samples, dn, 0);
        if (r) return *r;
    }
    for (int dd = std::min(max_num_deg, max_den_deg); dd >= 0; --dd) {
        auto r = try_fit(samples, 0, dd);
        if (r) return *r;
    }
    throw ReconstructionFailed("fit_rational: no unique fit within degree bounds");
}

RatFun reconstruct_function(const std::function<Rat(const Rat&)>& f, int max_num_deg,
                            int max_den_deg, uint64_t seed) {
    Prng rng(seed);
    const int need = max_num_deg + max_den_deg + 2;
    const int held_out = 3;
    std::vector<std::pair<Rat, Rat>> samples;
    std::vector<Rat> used;
    int failures = 0;
    while (static_cast<int>(samples.size()) < need + held_out) {
        Rat u = rng.next_rat_avoiding(used, 40, 12);
        used.push_back(u);
        try {
            samples.emplace_back(u, f(u));
        } catch (const std::exception&) {
            if (++failures > 200) throw ReconstructionFailed("reconstruct_function: too many poles");
        }
    }
    std::vector<std::pair<Rat, Rat>> fit_set(samples.begin(), samples.end() - held_out);
    RatFun r = fit_rational(fit_set, max_num_deg, max_den_deg);
    for (size_t i = samples.size() - held_out; i < samples.size(); ++i) {
        if (r.eval(samples[i].first) != samples[i].second)
            throw ReconstructionFailed("reconstruct_function: held-out check failed");
    }
    return r;
}

std::vector<std::vector<RatFun>> reconstruct_matrix(const std::function<QMat(const Rat&)>& f,
                                                    int rows, int cols, int max_num_deg,
                                                    int max_den_deg, uint64_t seed) {
    Prng rng(seed);
    const int need = max_num_deg + max_den_deg + 2 + 3;
    std::vector<Rat> points;
    std::vector<QMat> values;
    std::vector<Rat> used;
    int failures = 0;
    while (static_cast<int>(points.size()) < need) {
        Rat u = rng.next_rat_avoiding(used, 40, 12);
        used.push_back(u);
        try {
            QMat m = f(u);
            points.push_back(u);
            values.push_back(std::move(m));
        } catch (const std::exception&) {
            if (++failures > 200) throw ReconstructionFailed("reconstruct_matrix: too many poles");
        }
    }
    std::vector<std::vector<RatFun>> out(rows, std::vector<RatFun>(cols));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            std::vector<std::pair<Rat, Rat>> samples;
            samples.reserve(points.size());
            for (size_t k = 0; k + 3 < points.size(); ++k)
                samples.emplace_back(points[k], values[k](i, j));
            RatFun r = fit_rational(samples, max_num_deg, max_den_deg);
            for (size_t k = points.size() - 3; k < points.size(); ++k)
                if (r.eval(points[k]) != values[k](i, j))
                    throw ReconstructionFailed("reconstruct_matrix: held-out check failed");
            out[i][j] = std::move(r);
        }
    return out;
}

}  // namespace naba
