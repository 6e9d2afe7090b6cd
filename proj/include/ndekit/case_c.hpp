#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ndekit/errors.hpp"
#include "ndekit/linalg.hpp"
#include "ndekit/potential.hpp"
#include "ndekit/units.hpp"

namespace ndekit {

// Long-range parameters of an ns + n'p pair, atomic units.
// C3 > 0 by convention; the sign of each 1/R^3 term is fixed by the state.
struct CaseCParams {
    double C3 = 0.0;
    double C6_sigma = 0.0, C6_pi = 0.0;
    double C8_sigma_s = 0.0, C8_sigma_a = 0.0, C8_pi_s = 0.0, C8_pi_a = 0.0;
    double A = 0.0;        // spin-orbit constant, 2/3 of the fine-structure splitting
    double epsilon = 0.0;  // relativistic dipole-ratio correction
    double E_p = 0.0;      // center of gravity of the np doublet

    void validate() const {
        if (!(C3 > 0.0)) throw ValidationError("CaseCParams: C3 must be positive");
        if (!(A > 0.0)) throw ValidationError("CaseCParams: spin-orbit constant A must be positive");
        if (!(std::fabs(epsilon) < 0.1)) throw ValidationError("CaseCParams: |epsilon| must stay below 0.1");
        for (double x : {C6_sigma, C6_pi, C8_sigma_s, C8_sigma_a, C8_pi_s, C8_pi_a, E_p})
            if (!std::isfinite(x)) throw ValidationError("CaseCParams: non-finite coefficient");
    }
    double limit_p32() const { return E_p + 0.5 * A; }
    double limit_p12() const { return E_p - A; }
};

struct SymmetryLabel {
    int omega = 0;    // |Omega|
    char sigma = 0;   // '+' or '-' for Omega = 0, otherwise 0
    char parity = 'g';

    int dim() const { return omega == 2 ? 1 : (omega == 1 ? 3 : 2); }
    bool gerade() const { return parity == 'g'; }

    std::string str() const {
        std::string s = std::to_string(omega);
        s += parity;
        if (omega == 0) s += sigma;
        return s;
    }
    bool operator==(const SymmetryLabel& o) const {
        return omega == o.omega && sigma == o.sigma && parity == o.parity;
    }

    static const std::vector<SymmetryLabel>& all() {
        static const std::vector<SymmetryLabel> labels = {
            {2, 0, 'g'}, {2, 0, 'u'}, {1, 0, 'g'}, {1, 0, 'u'},
            {0, '+', 'g'}, {0, '+', 'u'}, {0, '-', 'g'}, {0, '-', 'u'}};
        return labels;
    }

    static std::string valid_list() {
        std::string s;
        for (const auto& l : all()) s += (s.empty() ? "" : ", ") + l.str();
        return s;
    }

    // Accepts "0g-", "0g+", "1u", "2g" and the variants "0-g", "0_g^-".
    static SymmetryLabel parse(const std::string& text) {
        std::string t;
        for (char c : text)
            if (c != '_' && c != '^' && c != ' ') t += c;
        SymmetryLabel l;
        bool ok = !t.empty() && t[0] >= '0' && t[0] <= '2';
        if (ok) {
            l.omega = t[0] - '0';
            for (std::size_t i = 1; i < t.size(); ++i) {
                char c = t[i];
                if ((c == 'g' || c == 'u') && l.parity == 'g' && i < 3) {
                    l.parity = c;
                } else if ((c == '+' || c == '-') && l.omega == 0 && l.sigma == 0) {
                    l.sigma = c;
                } else {
                    ok = false;
                }
            }
            const bool has_parity = t.find_first_of("gu") != std::string::npos;
            if (!has_parity) ok = false;
            if (l.omega == 0 && l.sigma == 0) ok = false;
        }
        if (!ok) throw ConfigError("unknown symmetry label '" + text + "'; valid labels: " + valid_list());
        return l;
    }
};

struct CaseCOptions {
    bool include_epsilon = false;
    bool include_spin_spin = false;
    std::optional<int> rotation_J;
    bool include_retardation = false;
    double lambda_bar = 0.0;  // c / omega, bohr; needed with retardation
    double mu = 0.0;          // reduced mass, electron masses; needed with rotation
};

// f_Sigma and f_Pi multiply the C3 terms of Sigma and Pi case (a) states.
inline std::pair<double, double> retardation_factors(double r, double lambda_bar) {
    if (!(lambda_bar > 0.0)) throw ValidationError("retardation_factors: lambda_bar must be positive");
    const double x = r / lambda_bar;
    const double c = std::cos(x), s = std::sin(x);
    return {c + x * s, -x * x * c + x * s + c};
}

inline double leroy_radius(double r_a, double r_b) {
    if (!(r_a > 0.0) || !(r_b > 0.0)) throw ValidationError("leroy_radius: radii must be positive");
    return 2.0 * (r_a + r_b);
}

// (1 + eps)/sqrt(2) = D_1/2 / D_3/2 with the squared ratio taken from the
// lifetimes: |D_1/2|^2 / |D_3/2|^2 = tau_32 E_32^3 / (2 tau_12 E_12^3).
inline double epsilon_from_lifetimes(double tau_32, double tau_12, double E_32, double E_12) {
    if (!(tau_32 > 0.0) || !(tau_12 > 0.0) || !(E_32 > 0.0) || !(E_12 > 0.0))
        throw ValidationError("epsilon_from_lifetimes: inputs must be positive");
    const double ratio = tau_32 * E_32 * E_32 * E_32 / (2.0 * tau_12 * E_12 * E_12 * E_12);
    if (!(ratio > 0.0) || !std::isfinite(ratio)) throw ValidationError("epsilon_from_lifetimes: non-physical ratio");
    return std::sqrt(2.0 * ratio) - 1.0;
}

// tau = 3 hbar c^3 / (4 |C3| omega^3), everything in atomic units.
inline double lifetime_from_C3(double C3_mag, double omega) {
    if (!(C3_mag > 0.0) || !(omega > 0.0)) throw ValidationError("lifetime_from_C3: inputs must be positive");
    const double c = constants::speed_of_light_au;
    return 3.0 * c * c * c / (4.0 * C3_mag * omega * omega * omega);
}

// C3 from the reduced dipole <ns||d||n'p_3/2> in e a0.
inline double c3_from_reduced_dipole(double d32) { return 0.25 * d32 * d32; }

inline double reduced_wavelength(double omega) { return constants::speed_of_light_au / omega; }

// Case (c) block split into its R independent part (spin-orbit plus E_p)
// and the interaction part that vanishes at large R. Keeping them apart lets
// the far tail be evaluated without cancelling against the asymptote.
struct CaseCBlocks {
    SmallMatrix asymptotic;
    SmallMatrix interaction;
    SmallMatrix total() const { return asymptotic + interaction; }
};

inline CaseCBlocks case_c_blocks(const SymmetryLabel& label, double r, const CaseCParams& p,
                                 const CaseCOptions& opt = {}) {
    if (!(r > 0.0)) throw ValidationError("build_case_c_matrix: R must be positive");
    if (label.omega < 0 || label.omega > 2 || (label.parity != 'g' && label.parity != 'u') ||
        (label.omega == 0 && label.sigma != '+' && label.sigma != '-'))
        throw ConfigError("unknown symmetry label; valid labels: " + SymmetryLabel::valid_list());
    if (opt.rotation_J && *opt.rotation_J < label.omega)
        throw ValidationError("build_case_c_matrix: rotation J must be at least Omega");
    const bool special = opt.include_spin_spin || opt.rotation_J.has_value();
    if (special && !(label.omega == 0 && label.sigma == '-' && label.parity == 'g'))
        throw ValidationError("spin-spin and rotational corrections are not available for " + label.str() +
                              " (only 0g-)");

    double fs = 1.0, fp = 1.0;
    if (opt.include_retardation) {
        auto f = retardation_factors(r, opt.lambda_bar);
        fs = f.first;
        fp = f.second;
    }
    const double r3 = r * r * r, r6 = r3 * r3, r8 = r6 * r * r;
    const double c3 = p.C3 / r3;
    const double s6 = p.C6_sigma / r6, p6 = p.C6_pi / r6;
    double v3pi, v1pi, v3sig, v1sig;
    if (label.gerade()) {
        v3pi = fp * c3 + p6 + p.C8_pi_a / r8;
        v1pi = -fp * c3 + p6 + p.C8_pi_s / r8;
        v3sig = -2.0 * fs * c3 + s6 + p.C8_sigma_a / r8;
        v1sig = 2.0 * fs * c3 + s6 + p.C8_sigma_s / r8;
    } else {
        v3pi = -fp * c3 + p6 + p.C8_pi_s / r8;
        v1pi = fp * c3 + p6 + p.C8_pi_a / r8;
        v3sig = 2.0 * fs * c3 + s6 + p.C8_sigma_s / r8;
        v1sig = -2.0 * fs * c3 + s6 + p.C8_sigma_a / r8;
    }

    const double A = p.A;
    const double rt2 = std::sqrt(2.0);
    const int n = label.dim();
    CaseCBlocks b{SmallMatrix(n), SmallMatrix(n)};
    SmallMatrix& m0 = b.asymptotic;
    SmallMatrix& w = b.interaction;
    for (int i = 0; i < n; ++i) m0(i, i) = p.E_p;

    // Relativistic correction: g states carry an overall minus sign.
    const double e = opt.include_epsilon ? p.epsilon : 0.0;
    const double sgn = label.gerade() ? -1.0 : 1.0;

    if (label.omega == 2) {
        m0(0, 0) += 0.5 * A;
        w(0, 0) = v3pi;
    } else if (label.omega == 1) {
        // basis 3Pi, 1Pi, 3Sigma+
        m0(0, 1) = m0(1, 0) = -0.5 * A;
        m0(0, 2) = m0(2, 0) = 0.5 * A;
        m0(1, 2) = m0(2, 1) = 0.5 * A;
        w(0, 0) = v3pi;
        w(1, 1) = v1pi;
        w(2, 2) = v3sig;
        if (e != 0.0) {
            const double k = sgn * e * p.C3 / (9.0 * r3);
            const double x[3][3] = {{2.0 * (e - 3.0), 2.0 * e, -(3.0 + 2.0 * e)},
                                    {2.0 * e, 2.0 * (3.0 + e), -(9.0 + 2.0 * e)},
                                    {-(3.0 + 2.0 * e), -(9.0 + 2.0 * e), 2.0 * (6.0 + e)}};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) w(i, j) += k * x[i][j];
        }
    } else if (label.sigma == '+') {
        // basis 3Pi, 1Sigma+
        m0(0, 0) += -0.5 * A;
        m0(0, 1) = m0(1, 0) = -A / rt2;
        w(0, 0) = v3pi;
        w(1, 1) = v1sig;
        if (e != 0.0) {
            const double k = sgn * e * p.C3 / (9.0 * r3);
            w(0, 0) += k * (-4.0 * (3.0 + 2.0 * e));
            w(0, 1) += k * (-rt2 * (9.0 + 4.0 * e));
            w(1, 0) += k * (-rt2 * (9.0 + 4.0 * e));
            w(1, 1) += k * (-4.0 * (3.0 + e));
        }
    } else {
        // basis 3Pi, 3Sigma+
        m0(0, 0) += -0.5 * A;
        m0(0, 1) = m0(1, 0) = A / rt2;
        w(0, 0) = v3pi;
        w(1, 1) = v3sig;
        if (e != 0.0) {
            const double k = sgn * e * p.C3 / (3.0 * r3);
            w(0, 0) += k * -4.0;
            w(0, 1) += k * -rt2;
            w(1, 0) += k * -rt2;
            w(1, 1) += k * 4.0;
        }
        if (opt.include_spin_spin) {
            const double c = constants::speed_of_light_au;
            const double k = 1.0 / (c * c * r3);
            w(0, 0) += -0.5 * k;
            w(1, 1) += k;
        }
        if (opt.rotation_J) {
            if (!(opt.mu > 0.0)) throw ValidationError("rotational correction needs a positive reduced mass");
            const double jj = double(*opt.rotation_J) * (*opt.rotation_J + 1);
            const double k = 1.0 / (2.0 * opt.mu * r * r);
            w(0, 0) += k * (jj + 2.0);
            w(0, 1) += k * 2.0 * rt2;
            w(1, 0) += k * 2.0 * rt2;
            w(1, 1) += k * (jj + 4.0);
        }
    }
    return b;
}

inline SmallMatrix build_case_c_matrix(const SymmetryLabel& label, double r, const CaseCParams& p,
                                       const CaseCOptions& opt = {}) {
    return case_c_blocks(label, r, p, opt).total();
}

// One adiabatic eigenvalue branch, ascending order (branch 0 lowest).
// Close in, the closed-form eigenvalue is used. Far out, the shift from the
// asymptote is computed directly by partitioning in the eigenbasis of the
// spin-orbit block, so D - V keeps full relative precision even when it is
// many orders of magnitude below A.
class CaseCBranch final : public PotentialCurve {
public:
    CaseCBranch(SymmetryLabel label, int branch, CaseCParams params, CaseCOptions options = {},
                ValidityRange range = {1.0, std::numeric_limits<double>::infinity()})
        : label_(label), branch_(branch), p_(params), opt_(options), range_(range) {
        p_.validate();
        if (branch < 0 || branch >= label.dim())
            throw ValidationError("adiabatic_branch: branch index " + std::to_string(branch) + " out of range for " +
                                  label.str());
        const int n = label.dim();
        SmallMatrix m0 = case_c_blocks(label_, 1.0, p_, opt_).asymptotic;  // also validates options
        auto es = jacobi_eigensystem(m0);
        basis_ = es.vectors;
        const double hi = p_.limit_p32(), lo = p_.limit_p12();
        for (int j = 0; j < n; ++j)
            limit_of_[j] = std::fabs(es.values[j] - hi) < std::fabs(es.values[j] - lo) ? hi : lo;
        asymptote_ = limit_of_[branch];
        first_in_group_ = branch;
        while (first_in_group_ > 0 && limit_of_[first_in_group_ - 1] == asymptote_) --first_in_group_;
    }

    double evaluate(double r) const override {
        auto blocks = case_c_blocks(label_, r, p_, opt_);
        if (far(blocks.interaction)) return asymptote_ + shift(blocks.interaction);
        return symmetric_eigenvalues(blocks.total())[branch_];
    }
    double asymptote() const override { return asymptote_; }
    double binding(double r) const override {
        auto blocks = case_c_blocks(label_, r, p_, opt_);
        if (far(blocks.interaction)) return -shift(blocks.interaction);
        return asymptote_ - symmetric_eigenvalues(blocks.total())[branch_];
    }
    ValidityRange validity() const override { return range_; }
    std::string describe() const override {
        return label_.str() + " branch " + std::to_string(branch_) +
               (asymptote_ == p_.limit_p32() ? " (p3/2 limit)" : " (p1/2 limit)");
    }

    const SymmetryLabel& label() const { return label_; }
    int branch() const { return branch_; }
    const CaseCParams& params() const { return p_; }
    const CaseCOptions& options() const { return opt_; }
    bool to_p32() const { return asymptote_ == p_.limit_p32(); }

private:
    bool far(const SmallMatrix& w) const {
        double mx = 0.0;
        for (int i = 0; i < w.dim; ++i)
            for (int j = 0; j < w.dim; ++j) mx = std::max(mx, std::fabs(w(i, j)));
        return mx < 0.015 * p_.A;
    }

    // Eigenvalue shift of this branch relative to its asymptote via the
    // Schur complement of the other asymptotic group, iterated to a fixed point.
    double shift(const SmallMatrix& interaction) const {
        const int n = label_.dim();
        SmallMatrix w(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) s += basis_(k, i) * interaction(k, l) * basis_(l, j);
                w(i, j) = s;
            }
        int S[3], L[3], ns = 0, nl = 0;
        for (int j = 0; j < n; ++j) {
            if (limit_of_[j] == asymptote_) S[ns++] = j;
            else L[nl++] = j;
        }
        const int k = branch_ - first_in_group_;
        auto eig_k = [&](const SmallMatrix& h) {
            if (h.dim == 1) return h(0, 0);
            return eigenvalues_2x2(h(0, 0), h(0, 1), h(1, 1))[k];
        };
        auto heff = [&](double s) {
            SmallMatrix h(ns);
            for (int a = 0; a < ns; ++a)
                for (int b = 0; b < ns; ++b) h(a, b) = w(S[a], S[b]);
            if (nl == 0) return h;
            // G = (s - offset - W_LL)^-1, dimension 1 or 2
            double g[2][2];
            double m[2][2];
            for (int a = 0; a < nl; ++a)
                for (int b = 0; b < nl; ++b)
                    m[a][b] = (a == b ? s - (limit_of_[L[a]] - asymptote_) : 0.0) - w(L[a], L[b]);
            if (nl == 1) {
                g[0][0] = 1.0 / m[0][0];
            } else {
                const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                g[0][0] = m[1][1] / det;
                g[1][1] = m[0][0] / det;
                g[0][1] = -m[0][1] / det;
                g[1][0] = -m[1][0] / det;
            }
            for (int a = 0; a < ns; ++a)
                for (int b = 0; b < ns; ++b) {
                    double s2 = 0.0;
                    for (int c = 0; c < nl; ++c)
                        for (int d = 0; d < nl; ++d) s2 += w(S[a], L[c]) * g[c][d] * w(L[d], S[b]);
                    h(a, b) += s2;
                }
            return h;
        };
        double s = eig_k(heff(0.0));
        for (int it = 0; it < 100; ++it) {
            const double next = eig_k(heff(s));
            if (std::fabs(next - s) <= 4e-16 * std::fabs(next)) return next;
            s = next;
        }
        return s;
    }

    SymmetryLabel label_;
    int branch_;
    CaseCParams p_;
    CaseCOptions opt_;
    ValidityRange range_;
    SmallMatrix basis_;
    std::array<double, 3> limit_of_{};
    double asymptote_ = 0.0;
    int first_in_group_ = 0;
};

inline CurvePtr adiabatic_branch(const SymmetryLabel& label, int branch, const CaseCParams& params,
                                 const CaseCOptions& options = {},
                                 ValidityRange range = {1.0, std::numeric_limits<double>::infinity()}) {
    return std::make_shared<CaseCBranch>(label, branch, params, options, range);
}

}  // namespace ndekit
