#include "spinchain/tridiagonal_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace spinchain {

RealMatrix RealMatrix::identity(std::size_t n) {
    RealMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

void tridiagonal_ql(std::vector<double>& d, std::span<const double> offdiag, RealMatrix* z) {
    const std::size_t n = d.size();
    if (n == 0) return;
    if (offdiag.size() + 1 != n) {
        throw std::invalid_argument("tridiagonal_ql: offdiag must have length n - 1");
    }
    if (z != nullptr && z->cols() != n) {
        throw std::invalid_argument("tridiagonal_ql: eigenvector rows must have n columns");
    }
    constexpr int kMaxIter = 60;
    const double eps = std::numeric_limits<double>::epsilon();

    std::vector<double> e(n, 0.0);
    std::copy(offdiag.begin(), offdiag.end(), e.begin());

    double anorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) anorm = std::max(anorm, std::abs(d[i]) + std::abs(e[i]));
    const double tiny = eps * eps * anorm;

    const std::size_t zrows = z ? z->rows() : 0;

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            // Look for a negligible off-diagonal element to split the matrix.
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd || std::abs(e[m]) <= tiny) break;
            }
            if (m == l) break;
            if (++iter > kMaxIter) {
                throw std::runtime_error("tridiagonal_ql: no convergence");
            }

            // Wilkinson-type shift from the leading 2x2 block.
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;

            for (std::size_t ii = m; ii-- > l;) {
                double f = s * e[ii];
                const double b = c * e[ii];
                r = std::hypot(f, g);
                e[ii + 1] = r;
                if (r == 0.0) {
                    d[ii + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[ii + 1] - p;
                r = (d[ii] - g) * s + 2.0 * c * b;
                p = s * r;
                d[ii + 1] = g + p;
                g = c * r - b;
                for (std::size_t k = 0; k < zrows; ++k) {
                    double* zr = z->row(k).data();
                    f = zr[ii + 1];
                    zr[ii + 1] = s * zr[ii] + c * f;
                    zr[ii] = c * zr[ii] - s * f;
                }
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        } while (m != l);
    }

    // Sort ascending, permuting eigenvector columns alongside.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    if (std::is_sorted(order.begin(), order.end())) return;

    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = d[order[i]];
    d.swap(sorted);
    if (z != nullptr) {
        std::vector<double> tmp(n);
        for (std::size_t k = 0; k < zrows; ++k) {
            auto zr = z->row(k);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = zr[order[i]];
            std::copy(tmp.begin(), tmp.end(), zr.begin());
        }
    }
}

std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag, std::span<const double> offdiag) {
    std::vector<double> d(diag.begin(), diag.end());
    tridiagonal_ql(d, offdiag, nullptr);
    return d;
}

}  // namespace spinchain
