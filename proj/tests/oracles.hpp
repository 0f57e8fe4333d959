#pragma once

// Independent reference computations used by the unit tests and the acceptance run.

#include <map>
#include <vector>

#include "toroidal/laurent.hpp"
#include "toroidal/matrix.hpp"

namespace oracles {

using toroidal::Q;
using toroidal::QMatrix;

/// Cofactor expansion along the first row.
inline Q det_laplace(const QMatrix& m) {
    const std::size_t n = m.rows();
    if (n == 0) return Q(1);
    if (n == 1) return m(0, 0);
    Q total = 0;
    for (std::size_t c = 0; c < n; ++c) {
        if (m(0, c) == 0) continue;
        QMatrix minor(n - 1, n - 1);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0, k = 0; j < n; ++j)
                if (j != c) minor(i - 1, k++) = m(i, j);
        Q term = m(0, c) * det_laplace(minor);
        total += (c % 2 == 0) ? term : Q(-term);
    }
    return total;
}

/// det of the grid matrix from the Vandermonde product formula and det(A (x) B) = det(A)^q det(B)^p.
inline Q det_grid_closed_form(const toroidal::Grid& axes) {
    std::size_t N = 1;
    for (const auto& a : axes) N *= a.size();
    Q total = 1;
    for (const auto& a : axes) {
        Q v = 1;
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t k = i + 1; k < a.size(); ++k) v *= a[k] - a[i];
        total *= toroidal::qpow(v, static_cast<long>(N / a.size()));
    }
    return total;
}

/// Weyl dimension formula for sl(d+1) from Dynkin labels.
inline Q weyl_dimension(const std::vector<long>& labels) {
    const std::size_t r = labels.size() + 1;
    Q num = 1, den = 1;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j) {
            long s = 0;
            for (std::size_t k = i; k < j; ++k) s += labels[k] + 1;
            num *= s;
            den *= static_cast<long>(j - i);
        }
    return num / den;
}

/// Freudenthal recursion for a simply laced Kac-Moody algebra of type A.
/// Weights are lambda - sum k_i alpha_i; positive roots carry multiplicities.
class Freudenthal {
public:
    using Key = std::vector<long>;
    struct Root {
        Key c;
        long mult;
    };

    Freudenthal(std::vector<std::vector<long>> cartan, std::vector<long> labels, std::vector<Root> roots)
        : a_(std::move(cartan)), lam_(std::move(labels)), roots_(std::move(roots)) {}

    /// sl(d+1): finite positive roots alpha_a + ... + alpha_b.
    static Freudenthal finite(int d, std::vector<long> labels) {
        std::vector<std::vector<long>> a(d, std::vector<long>(d, 0));
        for (int i = 0; i < d; ++i) {
            a[i][i] = 2;
            if (i + 1 < d) a[i][i + 1] = a[i + 1][i] = -1;
        }
        std::vector<Root> roots;
        for (int s = 0; s < d; ++s)
            for (int e = s; e < d; ++e) {
                Key c(d, 0);
                for (int k = s; k <= e; ++k) c[k] = 1;
                roots.push_back({c, 1});
            }
        return Freudenthal(a, std::move(labels), std::move(roots));
    }

    /// Affine sl(d+1), index 0 = alpha_0, positive roots up to delta-height max_j.
    static Freudenthal affine(int d, std::vector<long> labels, long max_j) {
        const int r = d + 1;
        std::vector<std::vector<long>> a(r, std::vector<long>(r, 0));
        for (int i = 0; i < r; ++i) {
            a[i][i] = 2;
            if (d == 1) {
                a[0][1] = a[1][0] = -2;
            } else {
                a[i][(i + 1) % r] = a[(i + 1) % r][i] = -1;
            }
        }
        std::vector<Root> roots;
        for (long j = 0; j <= max_j; ++j) {
            for (int s = 1; s <= d; ++s)
                for (int e = s; e <= d; ++e) {
                    Key pos(r, j), neg(r, j);
                    for (int k = s; k <= e; ++k) {
                        pos[k] += 1;
                        neg[k] -= 1;
                    }
                    roots.push_back({pos, 1});
                    if (j >= 1) roots.push_back({neg, 1});
                }
            if (j >= 1) roots.push_back({Key(r, j), d});
        }
        return Freudenthal(a, std::move(labels), std::move(roots));
    }

    long mult(const Key& k) {
        for (long x : k)
            if (x < 0) return 0;
        bool top = true;
        for (long x : k) top = top && x == 0;
        if (top) return 1;
        auto it = memo_.find(k);
        if (it != memo_.end()) return it->second;
        const std::size_t r = k.size();
        auto form = [&](const Key& x, const Key& y) {
            long s = 0;
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j) s += x[i] * a_[i][j] * y[j];
            return s;
        };
        long den = -form(k, k);
        for (std::size_t i = 0; i < r; ++i) den += 2 * k[i] * (lam_[i] + 1);
        long num = 0;
        for (const auto& root : roots_) {
            long lam_c = 0;
            for (std::size_t i = 0; i < r; ++i) lam_c += root.c[i] * lam_[i];
            for (long j = 1;; ++j) {
                Key kj(r);
                bool ok = true;
                for (std::size_t i = 0; i < r; ++i) {
                    kj[i] = k[i] - j * root.c[i];
                    ok = ok && kj[i] >= 0;
                }
                if (!ok) break;
                long m = mult(kj);
                if (m) num += 2 * root.mult * (lam_c - form(kj, root.c)) * m;
            }
        }
        long res = 0;
        if (den != 0) {
            if (num % den != 0) throw std::logic_error("Freudenthal quotient is not integral");
            res = num / den;
        } else if (num != 0) {
            throw std::logic_error("Freudenthal denominator vanishes");
        }
        memo_[k] = res;
        return res;
    }

private:
    std::vector<std::vector<long>> a_;
    std::vector<long> lam_;
    std::vector<Root> roots_;
    std::map<Key, long> memo_;
};

} // namespace oracles
