#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace toroidal {

using Q = mpq_class;
using Z = mpz_class;

/// Dense row-major matrix over a commutative ring.
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols, T(0)) {}
    Matrix(std::size_t rows, std::size_t cols, const T& fill) : r_(rows), c_(cols), a_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    static Matrix from_rows(const std::vector<std::vector<T>>& rows, std::size_t cols = 0) {
        std::size_t c = rows.empty() ? cols : rows.front().size();
        Matrix m(rows.size(), c);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != c) throw dimension_error("ragged rows");
            for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return r_; }
    std::size_t cols() const { return c_; }

    T& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

    std::vector<T> row(std::size_t i) const {
        return std::vector<T>(a_.begin() + i * c_, a_.begin() + (i + 1) * c_);
    }
    std::vector<T> col(std::size_t j) const {
        std::vector<T> v;
        v.reserve(r_);
        for (std::size_t i = 0; i < r_; ++i) v.push_back((*this)(i, j));
        return v;
    }

    Matrix transpose() const {
        Matrix t(c_, r_);
        for (std::size_t i = 0; i < r_; ++i)
            for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    void swap_rows(std::size_t i, std::size_t k) {
        if (i == k) return;
        for (std::size_t j = 0; j < c_; ++j) std::swap((*this)(i, j), (*this)(k, j));
    }
    void swap_cols(std::size_t j, std::size_t k) {
        if (j == k) return;
        for (std::size_t i = 0; i < r_; ++i) std::swap((*this)(i, j), (*this)(i, k));
    }

    bool is_zero() const {
        return std::all_of(a_.begin(), a_.end(), [](const T& x) { return x == T(0); });
    }

    friend bool operator==(const Matrix& x, const Matrix& y) {
        return x.r_ == y.r_ && x.c_ == y.c_ && x.a_ == y.a_;
    }
    friend bool operator!=(const Matrix& x, const Matrix& y) { return !(x == y); }

    friend Matrix operator+(Matrix x, const Matrix& y) {
        if (x.r_ != y.r_ || x.c_ != y.c_) throw dimension_error("matrix sum shape");
        for (std::size_t k = 0; k < x.a_.size(); ++k) x.a_[k] += y.a_[k];
        return x;
    }
    friend Matrix operator-(Matrix x, const Matrix& y) {
        if (x.r_ != y.r_ || x.c_ != y.c_) throw dimension_error("matrix difference shape");
        for (std::size_t k = 0; k < x.a_.size(); ++k) x.a_[k] -= y.a_[k];
        return x;
    }
    friend Matrix operator*(const T& s, Matrix x) {
        for (auto& e : x.a_) e *= s;
        return x;
    }
    friend Matrix operator*(const Matrix& x, const Matrix& y) {
        if (x.c_ != y.r_) throw dimension_error("matrix product shape");
        Matrix p(x.r_, y.c_);
        for (std::size_t i = 0; i < x.r_; ++i)
            for (std::size_t k = 0; k < x.c_; ++k) {
                const T& xik = x(i, k);
                if (xik == T(0)) continue;
                for (std::size_t j = 0; j < y.c_; ++j) {
                    if (y(k, j) == T(0)) continue;
                    p(i, j) += xik * y(k, j);
                }
            }
        return p;
    }
    friend std::vector<T> operator*(const Matrix& x, const std::vector<T>& v) {
        if (x.c_ != v.size()) throw dimension_error("matrix-vector shape");
        std::vector<T> out(x.r_, T(0));
        for (std::size_t i = 0; i < x.r_; ++i)
            for (std::size_t k = 0; k < x.c_; ++k)
                if (!(x(i, k) == T(0)) && !(v[k] == T(0))) out[i] += x(i, k) * v[k];
        return out;
    }

    friend std::ostream& operator<<(std::ostream& os, const Matrix& m) {
        for (std::size_t i = 0; i < m.r_; ++i) {
            os << (i ? "\n[" : "[");
            for (std::size_t j = 0; j < m.c_; ++j) os << (j ? " " : "") << m(i, j);
            os << "]";
        }
        return os;
    }

private:
    std::size_t r_ = 0, c_ = 0;
    std::vector<T> a_;
};

using QMatrix = Matrix<Q>;
using IntMatrix = Matrix<Z>;

/// Canonical p/q; the two-argument mpq_class constructor does not reduce.
inline Q frac(long p, long q) {
    Q x(p, q);
    x.canonicalize();
    return x;
}

inline bool is_zero(const Q& x) { return sgn(x) == 0; }
inline bool is_zero(const Z& x) { return sgn(x) == 0; }

template <class T>
bool is_zero_vec(const std::vector<T>& v) {
    return std::all_of(v.begin(), v.end(), [](const T& x) { return x == T(0); });
}

struct Echelon {
    QMatrix r;                        // reduced row echelon form
    std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

inline Echelon rref(QMatrix m) {
    Echelon e;
    std::size_t row = 0;
    for (std::size_t c = 0; c < m.cols() && row < m.rows(); ++c) {
        std::size_t p = row;
        while (p < m.rows() && is_zero(m(p, c))) ++p;
        if (p == m.rows()) continue;
        m.swap_rows(p, row);
        Q inv = 1 / m(row, c);
        for (std::size_t j = c; j < m.cols(); ++j) m(row, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == row || is_zero(m(i, c))) continue;
            Q f = m(i, c);
            for (std::size_t j = c; j < m.cols(); ++j)
                if (!is_zero(m(row, j))) m(i, j) -= f * m(row, j);
        }
        e.pivots.push_back(c);
        ++row;
    }
    e.r = std::move(m);
    return e;
}

inline std::size_t rank(const QMatrix& m) { return rref(m).pivots.size(); }

/// Basis of {x : m x = 0}, one vector per free column.
inline std::vector<std::vector<Q>> nullspace(const QMatrix& m) {
    Echelon e = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : e.pivots) is_pivot[p] = true;
    std::vector<std::vector<Q>> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        std::vector<Q> v(m.cols(), Q(0));
        v[f] = 1;
        for (std::size_t i = 0; i < e.pivots.size(); ++i) v[e.pivots[i]] = -e.r(i, f);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Some x with m x = b, or nothing when inconsistent.
inline std::optional<std::vector<Q>> solve(const QMatrix& m, const std::vector<Q>& b) {
    if (b.size() != m.rows()) throw dimension_error("solve: right-hand side length");
    QMatrix aug(m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
        aug(i, m.cols()) = b[i];
    }
    Echelon e = rref(aug);
    if (!e.pivots.empty() && e.pivots.back() == m.cols()) return std::nullopt;
    std::vector<Q> x(m.cols(), Q(0));
    for (std::size_t i = 0; i < e.pivots.size(); ++i) x[e.pivots[i]] = e.r(i, m.cols());
    return x;
}

inline Q det(QMatrix m) {
    if (m.rows() != m.cols()) throw dimension_error("det of non-square matrix");
    Q d = 1;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        std::size_t p = c;
        while (p < m.rows() && is_zero(m(p, c))) ++p;
        if (p == m.rows()) return Q(0);
        if (p != c) {
            m.swap_rows(p, c);
            d = -d;
        }
        d *= m(c, c);
        for (std::size_t i = c + 1; i < m.rows(); ++i) {
            if (is_zero(m(i, c))) continue;
            Q f = m(i, c) / m(c, c);
            for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(c, j);
        }
    }
    return d;
}

inline std::optional<QMatrix> inverse(const QMatrix& m) {
    if (m.rows() != m.cols()) throw dimension_error("inverse of non-square matrix");
    std::size_t n = m.rows();
    QMatrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = 1;
    }
    Echelon e = rref(aug);
    if (e.pivots.size() < n || e.pivots[n - 1] != n - 1) return std::nullopt;
    QMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = e.r(i, n + j);
    return inv;
}

inline QMatrix to_rational(const IntMatrix& m) {
    QMatrix q(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) q(i, j) = Q(m(i, j));
    return q;
}

/// Exact determinant of an integer matrix.
inline Z det(const IntMatrix& m) {
    Q d = det(to_rational(m));
    return d.get_num();
}

/// "p/q", or "p" when the denominator is one.
inline std::string to_string(const Q& x) { return x.get_str(); }

/// Parses "p", "p/q" or "-p/q"; throws on a zero denominator or junk.
inline Q parse_rational(const std::string& s) {
    auto ok_int = [](const std::string& t) {
        std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
        if (i >= t.size()) return false;
        for (; i < t.size(); ++i)
            if (t[i] < '0' || t[i] > '9') return false;
        return true;
    };
    auto slash = s.find('/');
    std::string num = s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!ok_int(num) || !ok_int(den) || den[0] == '-' || den[0] == '+')
        throw std::invalid_argument("not a rational: \"" + s + "\"");
    if (num[0] == '+') num.erase(0, 1);
    Z n(num), d(den);
    if (d == 0) throw std::invalid_argument("zero denominator: \"" + s + "\"");
    Q q(n, d);
    q.canonicalize();
    return q;
}

} // namespace toroidal
