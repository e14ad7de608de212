#ifndef AFFINE_LINALG_HPP
#define AFFINE_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "affine/dual.hpp"

namespace affine {

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gauss-Jordan inverse with partial pivoting, templated so dual-number
// matrices invert with exact derivative propagation. n is small (<= 8).
template <class T>
void mat_inverse(const T* a_in, T* out, int n) {
    std::vector<T> a(a_in, a_in + n * n);
    std::vector<T> inv(n * n, T(0.0));
    for (int i = 0; i < n; ++i) inv[i * n + i] = T(1.0);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::fabs(value_of(a[col * n + col]));
        for (int r = col + 1; r < n; ++r) {
            double m = std::fabs(value_of(a[r * n + col]));
            if (m > best) { best = m; piv = r; }
        }
        if (best < 1e-12) throw SingularMatrixError("matrix is singular (pivot < 1e-12)");
        if (piv != col) {
            for (int c = 0; c < n; ++c) {
                std::swap(a[piv * n + c], a[col * n + c]);
                std::swap(inv[piv * n + c], inv[col * n + c]);
            }
        }
        T ip = T(1.0) / a[col * n + col];
        for (int c = 0; c < n; ++c) { a[col * n + c] *= ip; inv[col * n + c] *= ip; }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            T f = a[r * n + col];
            if (value_of(f) == 0.0) continue;
            for (int c = 0; c < n; ++c) {
                a[r * n + c] -= f * a[col * n + c];
                inv[r * n + c] -= f * inv[col * n + c];
            }
        }
    }
    std::copy(inv.begin(), inv.end(), out);
}

template <class T>
void mat_mul(const T* a, const T* b, T* out, int n) {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            T s(0.0);
            for (int k = 0; k < n; ++k) s += a[i * n + k] * b[k * n + j];
            out[i * n + j] = s;
        }
}

inline double mat_det(const double* a_in, int n) {
    std::vector<double> a(a_in, a_in + n * n);
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
        if (a[piv * n + col] == 0.0) return 0.0;
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
            det = -det;
        }
        det *= a[col * n + col];
        for (int r = col + 1; r < n; ++r) {
            double f = a[r * n + col] / a[col * n + col];
            for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
        }
    }
    return det;
}

// Jacobi eigensolver for a symmetric matrix. Eigenvalues returned descending;
// eigenvectors (columns of V) optional.
inline std::vector<double> sym_eigenvalues(const double* a_in, int n, std::vector<double>* vectors = nullptr) {
    std::vector<double> a(a_in, a_in + n * n);
    std::vector<double> v(n * n, 0.0);
    for (int i = 0; i < n; ++i) v[i * n + i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                double apq = a[p * n + q];
                if (std::fabs(apq) < 1e-300) continue;
                double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v[k * n + p], vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
    }
    std::vector<double> lam(n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) { lam[i] = a[i * n + i]; order[i] = i; }
    std::sort(order.begin(), order.end(), [&](int i, int j) { return lam[i] > lam[j]; });
    std::vector<double> sorted(n);
    for (int i = 0; i < n; ++i) sorted[i] = lam[order[i]];
    if (vectors) {
        vectors->assign(n * n, 0.0);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) (*vectors)[i * n + j] = v[i * n + order[j]];
    }
    return sorted;
}

// Symmetric positive square root via eigendecomposition.
inline std::vector<double> sym_sqrt(const double* a, int n) {
    std::vector<double> V;
    std::vector<double> lam = sym_eigenvalues(a, n, &V);
    std::vector<double> out(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) {
                if (lam[k] < 0.0) throw std::runtime_error("matrix square root requires positive semidefinite input");
                s += V[i * n + k] * std::sqrt(lam[k]) * V[j * n + k];
            }
            out[i * n + j] = s;
        }
    return out;
}

// Matrix exponential by scaling-and-squaring with a Taylor core; adequate for
// the small, moderate-norm matrices used for ensemble transformations.
inline std::vector<double> mat_exp(const std::vector<double>& a, int n) {
    double norm = 0.0;
    for (double x : a) norm = std::max(norm, std::fabs(x));
    int squarings = 0;
    double scale = 1.0;
    while (norm * scale > 0.25) { scale *= 0.5; ++squarings; }
    std::vector<double> as(n * n);
    for (int i = 0; i < n * n; ++i) as[i] = a[i] * scale;
    std::vector<double> result(n * n, 0.0), term(n * n, 0.0), tmp(n * n);
    for (int i = 0; i < n; ++i) { result[i * n + i] = 1.0; term[i * n + i] = 1.0; }
    for (int k = 1; k <= 16; ++k) {
        mat_mul(term.data(), as.data(), tmp.data(), n);
        for (int i = 0; i < n * n; ++i) term[i] = tmp[i] / k;
        for (int i = 0; i < n * n; ++i) result[i] += term[i];
    }
    for (int s = 0; s < squarings; ++s) {
        mat_mul(result.data(), result.data(), tmp.data(), n);
        result = tmp;
    }
    return result;
}

// Dense complex matrices for the Clifford generator construction.
struct CMatrix {
    int n = 0;
    std::vector<std::complex<double>> a;

    CMatrix() = default;
    explicit CMatrix(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, {0.0, 0.0}) {}

    std::complex<double>& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    const std::complex<double>& at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

    static CMatrix identity(int n) {
        CMatrix m(n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    CMatrix operator*(const CMatrix& o) const {
        CMatrix r(n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                std::complex<double> f = at(i, k);
                if (f == std::complex<double>(0.0, 0.0)) continue;
                for (int j = 0; j < n; ++j) r.at(i, j) += f * o.at(k, j);
            }
        return r;
    }
    CMatrix operator+(const CMatrix& o) const {
        CMatrix r(n);
        for (int i = 0; i < n * n; ++i) r.a[i] = a[i] + o.a[i];
        return r;
    }
    CMatrix operator-(const CMatrix& o) const {
        CMatrix r(n);
        for (int i = 0; i < n * n; ++i) r.a[i] = a[i] - o.a[i];
        return r;
    }
    CMatrix operator*(std::complex<double> c) const {
        CMatrix r(n);
        for (int i = 0; i < n * n; ++i) r.a[i] = a[i] * c;
        return r;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& z : a) m = std::max(m, std::abs(z));
        return m;
    }

    // Spectral norm estimate by power iteration on A^H A.
    double op_norm() const {
        std::vector<std::complex<double>> v(n, {1.0, 0.0}), w(n);
        double lam = 0.0;
        for (int it = 0; it < 60; ++it) {
            for (int i = 0; i < n; ++i) {
                std::complex<double> s = 0.0;
                for (int j = 0; j < n; ++j) s += at(i, j) * v[j];
                w[i] = s;
            }
            for (int j = 0; j < n; ++j) {
                std::complex<double> s = 0.0;
                for (int i = 0; i < n; ++i) s += std::conj(at(i, j)) * w[i];
                v[j] = s;
            }
            double norm = 0.0;
            for (const auto& z : v) norm += std::norm(z);
            norm = std::sqrt(norm);
            if (norm == 0.0) return 0.0;
            lam = norm;
            for (auto& z : v) z /= norm;
        }
        return std::sqrt(lam);
    }
};

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix r(a.n * b.n);
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) {
            std::complex<double> f = a.at(i, j);
            if (f == std::complex<double>(0.0, 0.0)) continue;
            for (int k = 0; k < b.n; ++k)
                for (int l = 0; l < b.n; ++l) r.at(i * b.n + k, j * b.n + l) = f * b.at(k, l);
        }
    return r;
}

}  // namespace affine

#endif
