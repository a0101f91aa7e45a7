#pragma once

#include <algorithm>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "naba/rational.hpp"

namespace naba {

// Dense matrix over an exact or floating field. Row-major storage.
template <typename K>
class Mat {
  public:
    Mat() = default;
    Mat(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<size_t>(rows) * cols, K(0)) {}
    Mat(std::initializer_list<std::initializer_list<K>> rows) {
        r_ = static_cast<int>(rows.size());
        c_ = r_ ? static_cast<int>(rows.begin()->size()) : 0;
        a_.reserve(static_cast<size_t>(r_) * c_);
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != c_) throw std::invalid_argument("Mat: ragged init");
            for (const auto& x : row) a_.push_back(x);
        }
    }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = K(1);
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    bool square() const { return r_ == c_; }

    K& operator()(int i, int j) { return a_[static_cast<size_t>(i) * c_ + j]; }
    const K& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * c_ + j]; }

    Mat operator+(const Mat& o) const {
        check_same_shape(o);
        Mat m(r_, c_);
        for (size_t k = 0; k < a_.size(); ++k) m.a_[k] = a_[k] + o.a_[k];
        return m;
    }
    Mat operator-(const Mat& o) const {
        check_same_shape(o);
        Mat m(r_, c_);
        for (size_t k = 0; k < a_.size(); ++k) m.a_[k] = a_[k] - o.a_[k];
        return m;
    }
    Mat operator-() const {
        Mat m(r_, c_);
        for (size_t k = 0; k < a_.size(); ++k) m.a_[k] = -a_[k];
        return m;
    }
    Mat operator*(const Mat& o) const {
        if (c_ != o.r_) throw std::invalid_argument("Mat: shape mismatch in product");
        Mat m(r_, o.c_);
        for (int i = 0; i < r_; ++i)
            for (int k = 0; k < c_; ++k) {
                const K& x = (*this)(i, k);
                if (FieldTraits<K>::is_zero(x)) continue;
                for (int j = 0; j < o.c_; ++j) m(i, j) += x * o(k, j);
            }
        return m;
    }
    Mat operator*(const K& s) const {
        Mat m(r_, c_);
        for (size_t k = 0; k < a_.size(); ++k) m.a_[k] = a_[k] * s;
        return m;
    }
    friend Mat operator*(const K& s, const Mat& m) { return m * s; }

    bool operator==(const Mat& o) const { return r_ == o.r_ && c_ == o.c_ && a_ == o.a_; }
    bool operator!=(const Mat& o) const { return !(*this == o); }

    bool is_zero() const {
        for (const auto& x : a_)
            if (!FieldTraits<K>::is_zero(x)) return false;
        return true;
    }
    bool is_identity() const {
        if (!square()) return false;
        return *this == identity(r_);
    }

    double max_abs() const {
        double m = 0;
        for (const auto& x : a_) m = std::max(m, FieldTraits<K>::abs_approx(x));
        return m;
    }

    Mat transpose() const {
        Mat m(c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
        return m;
    }

    // Gather rows/cols by index lists.
    Mat submatrix(const std::vector<int>& rows, const std::vector<int>& cols) const {
        Mat m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) m(i, j) = (*this)(rows[i], cols[j]);
        return m;
    }
    Mat columns(const std::vector<int>& cols) const {
        std::vector<int> all(r_);
        for (int i = 0; i < r_; ++i) all[i] = i;
        return submatrix(all, cols);
    }

    // Kronecker product, (a⊗b)(i1*rb+i2, j1*cb+j2) = a(i1,j1) b(i2,j2).
    friend Mat kron(const Mat& a, const Mat& b) {
        Mat m(a.rows() * b.rows(), a.cols() * b.cols());
        for (int i1 = 0; i1 < a.rows(); ++i1)
            for (int j1 = 0; j1 < a.cols(); ++j1) {
                const K& x = a(i1, j1);
                if (FieldTraits<K>::is_zero(x)) continue;
                for (int i2 = 0; i2 < b.rows(); ++i2)
                    for (int j2 = 0; j2 < b.cols(); ++j2)
                        m(i1 * b.rows() + i2, j1 * b.cols() + j2) = x * b(i2, j2);
            }
        return m;
    }

    friend Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

    // Gauss-Jordan inverse. Exact pivoting for Rat, max-abs pivot for Cplx.
    // Throws std::domain_error when singular.
    Mat inverse() const {
        if (!square()) throw std::invalid_argument("Mat: inverse of non-square");
        Mat a(*this), inv = identity(r_);
        for (int col = 0; col < c_; ++col) {
            int piv = pick_pivot(a, col, col);
            if (piv < 0) throw std::domain_error("Mat: singular matrix");
            a.swap_rows(col, piv);
            inv.swap_rows(col, piv);
            K d = a(col, col);
            for (int j = 0; j < c_; ++j) a(col, j) = a(col, j) / d;
            for (int j = 0; j < c_; ++j) inv(col, j) = inv(col, j) / d;
            for (int i = 0; i < r_; ++i) {
                if (i == col) continue;
                K f = a(i, col);
                if (FieldTraits<K>::is_zero(f)) continue;
                for (int j = 0; j < c_; ++j) a(i, j) -= f * a(col, j);
                for (int j = 0; j < c_; ++j) inv(i, j) -= f * inv(col, j);
            }
        }
        return inv;
    }

    bool invertible() const {
        if (!square()) return false;
        return rank() == r_;
    }

    int rank() const {
        Mat a(*this);
        int rk = 0;
        for (int col = 0; col < c_ && rk < r_; ++col) {
            int piv = pick_pivot(a, col, rk);
            if (piv < 0) continue;
            a.swap_rows(rk, piv);
            K d = a(rk, col);
            for (int j = 0; j < c_; ++j) a(rk, j) = a(rk, j) / d;
            for (int i = 0; i < r_; ++i) {
                if (i == rk) continue;
                K f = a(i, col);
                if (FieldTraits<K>::is_zero(f)) continue;
                for (int j = 0; j < c_; ++j) a(i, j) -= f * a(rk, j);
            }
            ++rk;
        }
        return rk;
    }

    // Basis of the right kernel, one column per basis vector.
    Mat kernel() const {
        Mat a(*this);
        std::vector<int> pivot_col;
        int rk = 0;
        for (int col = 0; col < c_ && rk < r_; ++col) {
            int piv = pick_pivot(a, col, rk);
            if (piv < 0) continue;
            a.swap_rows(rk, piv);
            K d = a(rk, col);
            for (int j = 0; j < c_; ++j) a(rk, j) = a(rk, j) / d;
            for (int i = 0; i < r_; ++i) {
                if (i == rk) continue;
                K f = a(i, col);
                if (FieldTraits<K>::is_zero(f)) continue;
                for (int j = 0; j < c_; ++j) a(i, j) -= f * a(rk, j);
            }
            pivot_col.push_back(col);
            ++rk;
        }
        std::vector<bool> is_pivot(c_, false);
        for (int c : pivot_col) is_pivot[c] = true;
        Mat ker(c_, c_ - rk);
        int kcol = 0;
        for (int free = 0; free < c_; ++free) {
            if (is_pivot[free]) continue;
            ker(free, kcol) = K(1);
            for (int i = 0; i < rk; ++i) ker(pivot_col[i], kcol) = -a(i, free);
            ++kcol;
        }
        return ker;
    }

    // Indices of pivot columns (a column-space basis selection).
    std::vector<int> pivot_columns() const {
        Mat a(*this);
        std::vector<int> pivots;
        int rk = 0;
        for (int col = 0; col < c_ && rk < r_; ++col) {
            int piv = pick_pivot(a, col, rk);
            if (piv < 0) continue;
            a.swap_rows(rk, piv);
            K d = a(rk, col);
            for (int j = 0; j < c_; ++j) a(rk, j) = a(rk, j) / d;
            for (int i = 0; i < r_; ++i) {
                if (i == rk) continue;
                K f = a(i, col);
                if (FieldTraits<K>::is_zero(f)) continue;
                for (int j = 0; j < c_; ++j) a(i, j) -= f * a(rk, j);
            }
            pivots.push_back(col);
            ++rk;
        }
        return pivots;
    }

    // Least structure needed by callers that solve A x = b exactly.
    // Throws std::domain_error when no solution exists (Rat only).
    Mat solve(const Mat& b) const {
        Mat inv = this->inverse();
        return inv * b;
    }

    void swap_rows(int i, int j) {
        if (i == j) return;
        for (int k = 0; k < c_; ++k) std::swap((*this)(i, k), (*this)(j, k));
    }

    template <typename K2>
    Mat<K2> cast() const {
        Mat<K2> m(r_, c_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) {
                if constexpr (std::is_same_v<K2, K>) m(i, j) = (*this)(i, j);
                else m(i, j) = convert<K2>((*this)(i, j));
            }
        return m;
    }

  private:
    template <typename K2>
    static K2 convert(const K& x);

    void check_same_shape(const Mat& o) const {
        if (r_ != o.r_ || c_ != o.c_) throw std::invalid_argument("Mat: shape mismatch");
    }

    static int pick_pivot(const Mat& a, int col, int from_row) {
        if constexpr (std::is_same_v<K, Rat>) {
            for (int i = from_row; i < a.rows(); ++i)
                if (!FieldTraits<K>::is_zero(a(i, col))) return i;
            return -1;
        } else {
            int best = -1;
            double best_abs = 1e-12;
            for (int i = from_row; i < a.rows(); ++i) {
                double v = FieldTraits<K>::abs_approx(a(i, col));
                if (v > best_abs) { best_abs = v; best = i; }
            }
            return best;
        }
    }

    int r_ = 0, c_ = 0;
    std::vector<K> a_;
};

template <>
template <>
inline Cplx Mat<Rat>::convert<Cplx>(const Rat& x) { return to_field<Cplx>(x); }

using QMat = Mat<Rat>;
using CMat = Mat<Cplx>;

// Multi-index helpers for tensor-leg embeddings -------------------------------

inline int total_dim(const std::vector<int>& dims) {
    int d = 1;
    for (int x : dims) d *= x;
    return d;
}

// Embed an operator acting on legs (a, b) of a tensor product with the given
// per-leg input dimensions. `op` maps leg dims (in_a, in_b) to (out_a, out_b);
// all other legs keep their dimension. Row-major leg ordering throughout.
template <typename K>
Mat<K> on_two_legs(const Mat<K>& op, std::vector<int> in_dims, int leg_a, int leg_b,
                   int out_a, int out_b) {
    const int n = static_cast<int>(in_dims.size());
    if (leg_a < 0 || leg_b < 0 || leg_a >= n || leg_b >= n || leg_a == leg_b)
        throw std::invalid_argument("on_two_legs: bad legs");
    const int in_a = in_dims[leg_a], in_b = in_dims[leg_b];
    if (op.rows() != out_a * out_b || op.cols() != in_a * in_b)
        throw std::invalid_argument("on_two_legs: op shape mismatch");
    std::vector<int> out_dims = in_dims;
    out_dims[leg_a] = out_a;
    out_dims[leg_b] = out_b;

    const int din = total_dim(in_dims), dout = total_dim(out_dims);
    // strides
    auto strides = [](const std::vector<int>& d) {
        std::vector<int> s(d.size(), 1);
        for (int i = static_cast<int>(d.size()) - 2; i >= 0; --i) s[i] = s[i + 1] * d[i + 1];
        return s;
    };
    std::vector<int> sin = strides(in_dims), sout = strides(out_dims);

    Mat<K> res(dout, din);
    std::vector<int> idx(n, 0);
    for (int col = 0; col < din; ++col) {
        // decode col into multi-index
        int rem = col;
        for (int l = 0; l < n; ++l) { idx[l] = rem / sin[l]; rem %= sin[l]; }
        const int ia = idx[leg_a], ib = idx[leg_b];
        // base of the output index over passive legs
        int base = 0;
        for (int l = 0; l < n; ++l)
            if (l != leg_a && l != leg_b) base += idx[l] * sout[l];
        for (int oa = 0; oa < out_a; ++oa)
            for (int ob = 0; ob < out_b; ++ob) {
                const K& x = op(oa * out_b + ob, ia * in_b + ib);
                if (FieldTraits<K>::is_zero(x)) continue;
                res(base + oa * sout[leg_a] + ob * sout[leg_b], col) += x;
            }
    }
    return res;
}

template <typename K>
Mat<K> on_two_legs(const Mat<K>& op, const std::vector<int>& dims, int leg_a, int leg_b) {
    return on_two_legs(op, dims, leg_a, leg_b, dims[leg_a], dims[leg_b]);
}

// Same for a single leg.
template <typename K>
Mat<K> on_one_leg(const Mat<K>& op, std::vector<int> in_dims, int leg, int out_dim) {
    const int n = static_cast<int>(in_dims.size());
    if (leg < 0 || leg >= n) throw std::invalid_argument("on_one_leg: bad leg");
    if (op.cols() != in_dims[leg] || op.rows() != out_dim)
        throw std::invalid_argument("on_one_leg: op shape mismatch");
    Mat<K> left = Mat<K>::identity(1);
    for (int l = 0; l < n; ++l) {
        Mat<K> factor = (l == leg) ? op : Mat<K>::identity(in_dims[l]);
        left = kron(left, factor);
    }
    return left;
}

template <typename K>
Mat<K> on_one_leg(const Mat<K>& op, const std::vector<int>& dims, int leg) {
    return on_one_leg(op, dims, leg, dims[leg]);
}

// Permutation operator P(x⊗y) = y⊗x as a map C^{da}⊗C^{db} → C^{db}⊗C^{da}.
template <typename K>
Mat<K> permutation_op(int da, int db) {
    Mat<K> p(db * da, da * db);
    for (int a = 0; a < da; ++a)
        for (int b = 0; b < db; ++b) p(b * da + a, a * db + b) = K(1);
    return p;
}

// Ordinary partial transpose on the second tensor factor:
// M ∈ Hom(A⊗B) ↦ M' with M'((i,l),(j,k)) = M((i,k),(j,l)).
template <typename K>
Mat<K> partial_transpose_second(const Mat<K>& m, int da, int db) {
    if (m.rows() != da * db || m.cols() != da * db)
        throw std::invalid_argument("partial_transpose_second: shape");
    Mat<K> t(da * db, da * db);
    for (int i = 0; i < da; ++i)
        for (int k = 0; k < db; ++k)
            for (int j = 0; j < da; ++j)
                for (int l = 0; l < db; ++l) t(i * db + l, j * db + k) = m(i * db + k, j * db + l);
    return t;
}

// Trace over the first factor with a weight W on it: result = tr_A((W⊗1)·M).
template <typename K>
Mat<K> weighted_partial_trace_first(const Mat<K>& m, const Mat<K>& w, int da, int db) {
    Mat<K> out(db, db);
    for (int a = 0; a < da; ++a)
        for (int ap = 0; ap < da; ++ap) {
            const K& z = w(a, ap);
            if (FieldTraits<K>::is_zero(z)) continue;
            for (int i = 0; i < db; ++i)
                for (int j = 0; j < db; ++j) out(i, j) += z * m(ap * db + i, a * db + j);
        }
    return out;
}

}  // namespace naba
