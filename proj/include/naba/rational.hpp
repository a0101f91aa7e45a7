#pragma once

#include <gmpxx.h>

#include <complex>
#include <stdexcept>
#include <string>

namespace naba {

using Rat = mpq_class;
using Cplx = std::complex<double>;

inline Rat rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rat: zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline Rat rat_from_string(const std::string& s) {
    Rat q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("rat: bad literal '" + s + "'");
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rat& q) { return q.get_str(); }

inline double to_double(const Rat& q) { return q.get_d(); }

// Field-generic conversion used by templated evaluators.
template <typename K>
K to_field(const Rat& q);

template <>
inline Rat to_field<Rat>(const Rat& q) { return q; }

template <>
inline Cplx to_field<Cplx>(const Rat& q) { return Cplx(q.get_d(), 0.0); }

template <typename K>
struct FieldTraits;

template <>
struct FieldTraits<Rat> {
    static bool is_zero(const Rat& x) { return sgn(x) == 0; }
    static double abs_approx(const Rat& x) { return std::abs(x.get_d()); }
};

template <>
struct FieldTraits<Cplx> {
    static bool is_zero(const Cplx& x) { return std::abs(x) < 1e-13; }
    static double abs_approx(const Cplx& x) { return std::abs(x); }
};

}  // namespace naba
