#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "ndekit/errors.hpp"

namespace ndekit {

// Real symmetric matrix of dimension 1..3 stored densely.
struct SmallMatrix {
    int dim = 0;
    std::array<std::array<double, 3>, 3> a{};

    explicit SmallMatrix(int n = 0) : dim(n) {
        if (n < 0 || n > 3) throw ValidationError("SmallMatrix: dimension must be 1..3");
    }
    double& operator()(int i, int j) { return a[i][j]; }
    double operator()(int i, int j) const { return a[i][j]; }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < dim; ++i) t += a[i][i];
        return t;
    }
    bool finite() const {
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                if (!std::isfinite(a[i][j])) return false;
        return true;
    }
    SmallMatrix& operator+=(const SmallMatrix& o) {
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) a[i][j] += o.a[i][j];
        return *this;
    }
    friend SmallMatrix operator+(SmallMatrix x, const SmallMatrix& y) { return x += y; }
};

// Ascending eigenvalues of a symmetric 2x2 [[p, q], [q, r]].
inline std::array<double, 2> eigenvalues_2x2(double p, double q, double r) {
    const double mean = 0.5 * (p + r);
    const double half = 0.5 * (p - r);
    const double rad = std::hypot(half, q);
    // Product form for the smaller-magnitude root avoids cancellation.
    double big = mean >= 0.0 ? mean + rad : mean - rad;
    double small = big != 0.0 ? (p * r - q * q) / big : 0.0;
    if (big == 0.0) small = mean;
    return {std::min(big, small), std::max(big, small)};
}

// Ascending eigenvalues of a symmetric matrix of dimension 1..3, closed form.
// 3x3 uses the trigonometric solution of the characteristic cubic.
inline std::array<double, 3> symmetric_eigenvalues(const SmallMatrix& m) {
    if (!m.finite()) throw NumericError("symmetric_eigenvalues: non-finite matrix entry");
    std::array<double, 3> out{0.0, 0.0, 0.0};
    if (m.dim == 1) {
        out[0] = m(0, 0);
        return out;
    }
    if (m.dim == 2) {
        auto e = eigenvalues_2x2(m(0, 0), m(0, 1), m(1, 1));
        out[0] = e[0];
        out[1] = e[1];
        return out;
    }
    const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
    const double q = m.trace() / 3.0;
    if (p1 == 0.0) {
        out = {m(0, 0), m(1, 1), m(2, 2)};
        std::sort(out.begin(), out.end());
        return out;
    }
    const double d0 = m(0, 0) - q, d1 = m(1, 1) - q, d2 = m(2, 2) - q;
    const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    // B = (A - qI)/p, r = det(B)/2
    const double b00 = d0 / p, b11 = d1 / p, b22 = d2 / p;
    const double b01 = m(0, 1) / p, b02 = m(0, 2) / p, b12 = m(1, 2) / p;
    const double detb = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) +
                        b02 * (b01 * b12 - b11 * b02);
    const double r = std::clamp(0.5 * detb, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double pi = 3.14159265358979323846;
    const double e_hi = q + 2.0 * p * std::cos(phi);
    const double e_lo = q + 2.0 * p * std::cos(phi + 2.0 * pi / 3.0);
    const double e_mid = 3.0 * q - e_hi - e_lo;
    out = {e_lo, e_mid, e_hi};
    std::sort(out.begin(), out.end());
    return out;
}

// Eigenvectors of a constant symmetric matrix by cyclic Jacobi rotations.
// Columns of `vectors` pair with ascending `values`. Used only for the
// asymptotic (R independent) part of the case (c) blocks.
struct EigenSystem {
    std::array<double, 3> values{};
    SmallMatrix vectors;
};

inline EigenSystem jacobi_eigensystem(SmallMatrix m) {
    const int n = m.dim;
    SmallMatrix v(n);
    for (int i = 0; i < n; ++i) v(i, i) = 1.0;
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off == 0.0) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (m(p, q) == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.begin() + n, [&](int x, int y) { return m(x, x) < m(y, y); });
    EigenSystem out;
    out.vectors = SmallMatrix(n);
    for (int c = 0; c < n; ++c) {
        out.values[c] = m(idx[c], idx[c]);
        for (int k = 0; k < n; ++k) out.vectors(k, c) = v(k, idx[c]);
    }
    return out;
}

}  // namespace ndekit
