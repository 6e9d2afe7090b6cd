#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ndekit/errors.hpp"
#include "ndekit/quadrature.hpp"

namespace ndekit {

struct ValidityRange {
    double r_min = 0.0;
    double r_max = std::numeric_limits<double>::infinity();
    bool contains(double r) const { return r >= r_min && r <= r_max; }
};

// V(R) in hartree for R in bohr. Curves are immutable after construction.
class PotentialCurve {
public:
    virtual ~PotentialCurve() = default;

    virtual double evaluate(double r) const = 0;

    // V(R -> infinity); +inf for confining test curves.
    virtual double asymptote() const { return std::numeric_limits<double>::infinity(); }

    // D - V(R). Overridden where the difference can be formed without
    // cancelling against a large asymptote.
    virtual double binding(double r) const { return asymptote() - evaluate(r); }

    virtual ValidityRange validity() const { return {}; }

    virtual std::string describe() const { return "curve"; }

    double operator()(double r) const { return evaluate(r); }
    bool dissociates() const { return std::isfinite(asymptote()); }
};

using CurvePtr = std::shared_ptr<const PotentialCurve>;

// V(R) = D + sum_k C_k / R^k
struct MultipoleTail {
    double D = 0.0;
    std::vector<std::pair<int, double>> terms;  // (power k, C_k), ascending k

    double sum(double r) const {
        double s = 0.0;
        // Smallest terms first.
        for (auto it = terms.rbegin(); it != terms.rend(); ++it) s += it->second / std::pow(r, it->first);
        return s;
    }
    double operator()(double r) const { return D + sum(r); }

    double coefficient(int k) const {
        for (const auto& t : terms)
            if (t.first == k) return t.second;
        return 0.0;
    }
    bool has(int k) const {
        for (const auto& t : terms)
            if (t.first == k) return true;
        return false;
    }
};

class TailCurve final : public PotentialCurve {
public:
    explicit TailCurve(MultipoleTail tail, ValidityRange range = {1e-3, std::numeric_limits<double>::infinity()})
        : tail_(std::move(tail)), range_(range) {}
    double evaluate(double r) const override { return tail_(r); }
    double asymptote() const override { return tail_.D; }
    double binding(double r) const override { return -tail_.sum(r); }
    ValidityRange validity() const override { return range_; }
    std::string describe() const override { return "multipole tail"; }
    const MultipoleTail& tail() const { return tail_; }

private:
    MultipoleTail tail_;
    ValidityRange range_;
};

// V = 1/2 mu omega^2 (R - R_e)^2, confined to R_e +- half_width.
class HarmonicCurve final : public PotentialCurve {
public:
    HarmonicCurve(double mu, double omega, double r_e, double half_width)
        : mu_(mu), omega_(omega), r_e_(r_e), half_width_(half_width) {
        if (!(mu > 0.0) || !(omega > 0.0) || !(half_width > 0.0))
            throw ValidationError("HarmonicCurve: mu, omega and half width must be positive");
    }
    double evaluate(double r) const override {
        const double x = r - r_e_;
        return 0.5 * mu_ * omega_ * omega_ * x * x;
    }
    ValidityRange validity() const override { return {r_e_ - half_width_, r_e_ + half_width_}; }
    std::string describe() const override { return "harmonic"; }
    double omega() const { return omega_; }
    double r_e() const { return r_e_; }

private:
    double mu_, omega_, r_e_, half_width_;
};

// Monotone piecewise cubic Hermite interpolant (Fritsch-Carlson slopes).
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw ValidationError("MonotoneCubic: need at least two matching samples");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1])) throw ValidationError("MonotoneCubic: abscissae must increase strictly");
        std::vector<double> h(n - 1), d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            d[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        m_.assign(n, 0.0);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
    }
    double operator()(double x) const {
        const std::size_t n = x_.size();
        std::size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
        i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * m_[i] +
               (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * m_[i + 1];
    }
    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }

private:
    std::vector<double> x_, y_, m_;
};

struct PiecewiseParams {
    double D_tilde = 0.0;   // wall value at R_minus_c
    double C_tilde = 0.0;   // wall slope, V = D_tilde + C_tilde (R_minus_c - R)
    double R_minus_c = 0.0;
    double R_plus_c = 0.0;
    std::vector<double> bridge_r;  // samples spanning [R_minus_c, R_plus_c]
    std::vector<double> bridge_v;
    MultipoleTail tail;
};

// Linear inner wall, monotone-cubic bridge, multipole tail.
class PiecewisePotential final : public PotentialCurve {
public:
    static constexpr double continuity_tolerance = 1e-10;

    explicit PiecewisePotential(PiecewiseParams p) : p_(std::move(p)) {
        if (!(p_.R_minus_c < p_.R_plus_c)) throw ValidationError("build_piecewise: need R_minus_c < R_plus_c");
        if (!(p_.C_tilde > 0.0)) throw ValidationError("build_piecewise: wall slope C_tilde must be positive");
        if (!(p_.tail.sum(p_.R_plus_c) < 0.0))
            throw ValidationError("build_piecewise: tail must be attractive at R_plus_c");
        auto r = p_.bridge_r;
        auto v = p_.bridge_v;
        if (r.size() != v.size()) throw ValidationError("build_piecewise: bridge sample size mismatch");
        if (r.empty()) {
            r = {p_.R_minus_c, p_.R_plus_c};
            v = {p_.D_tilde, p_.tail(p_.R_plus_c)};
        }
        const double tol_r = 1e-9 * p_.R_plus_c;
        if (std::fabs(r.front() - p_.R_minus_c) > tol_r || std::fabs(r.back() - p_.R_plus_c) > tol_r)
            throw ValidationError("build_piecewise: bridge samples must start at R_minus_c and end at R_plus_c");
        // Pin endpoints to the wall and tail values.
        r.front() = p_.R_minus_c;
        r.back() = p_.R_plus_c;
        v.front() = p_.D_tilde;
        v.back() = p_.tail(p_.R_plus_c);
        bridge_ = MonotoneCubic(r, v);
        const double gap_in = std::fabs(bridge_(p_.R_minus_c) - p_.D_tilde);
        const double gap_out = std::fabs(bridge_(p_.R_plus_c) - p_.tail(p_.R_plus_c));
        if (!(gap_in <= continuity_tolerance) || !(gap_out <= continuity_tolerance))
            throw ValidationError("build_piecewise: continuity gap above tolerance");
    }

    double evaluate(double r) const override {
        if (r < p_.R_minus_c) return p_.D_tilde + p_.C_tilde * (p_.R_minus_c - r);
        if (r <= p_.R_plus_c) return bridge_(r);
        return p_.tail(r);
    }
    double asymptote() const override { return p_.tail.D; }
    double binding(double r) const override {
        if (r > p_.R_plus_c) return -p_.tail.sum(r);
        return p_.tail.D - evaluate(r);
    }
    ValidityRange validity() const override {
        return {0.0, std::numeric_limits<double>::infinity()};
    }
    std::string describe() const override { return "piecewise wall/bridge/tail"; }
    const PiecewiseParams& params() const { return p_; }

    // Integral of (D - V)^(-1/2) over the bridge, in atomic units.
    double bridge_integral() const {
        const double D = p_.tail.D;
        auto f = [&](double r) { return 1.0 / std::sqrt(D - bridge_(r)); };
        return integrate(f, p_.R_minus_c, p_.R_plus_c, 1e-12).value;
    }

private:
    PiecewiseParams p_;
    MonotoneCubic bridge_;
};

inline CurvePtr build_piecewise(PiecewiseParams p) { return std::make_shared<PiecewisePotential>(std::move(p)); }

// R where ratio * |C_n| / R^n equals |C_m| / R^m.
inline double choose_cutoff(const MultipoleTail& tail, int n, int m, double ratio) {
    if (!tail.has(n) || !tail.has(m)) throw ValidationError("choose_cutoff: tail lacks one of the requested powers");
    if (!(ratio > 0.0) || ratio > 1.0) throw ValidationError("choose_cutoff: ratio must lie in (0, 1]");
    if (m <= n) throw ValidationError("choose_cutoff: need m > n");
    const double cn = tail.coefficient(n), cm = tail.coefficient(m);
    if (cn == 0.0) throw ValidationError("choose_cutoff: C_n = 0");
    return std::pow(std::fabs(cm) / (ratio * std::fabs(cn)), 1.0 / (m - n));
}

}  // namespace ndekit
