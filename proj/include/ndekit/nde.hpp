#pragma once

#include <cmath>
#include <string>

#include "ndekit/errors.hpp"
#include "ndekit/quadrature.hpp"
#include "ndekit/special.hpp"
#include "ndekit/units.hpp"

namespace ndekit {

enum class DeltaBranch { negative, zero, positive };

inline std::string branch_name(DeltaBranch b) {
    switch (b) {
        case DeltaBranch::negative: return "neg";
        case DeltaBranch::zero: return "zero";
        case DeltaBranch::positive: return "pos";
    }
    return "?";
}

struct Exponents {
    Rational beta;
    Rational delta;
    DeltaBranch branch = DeltaBranch::negative;
};

// beta = (n + 2 - 2l) / (2n), delta = beta - (m - n)/n, exactly.
inline Exponents exponents(int n, int m, int l) {
    if (n <= 2) throw ValidationError("exponents: need n > 2");
    if (m <= n) throw ValidationError("exponents: need m > n");
    if (l < 0 || l > 2) throw ValidationError("exponents: l must be 0, 1 or 2");
    Exponents e;
    e.beta = Rational(n + 2 - 2 * l, 2 * n);
    e.delta = e.beta - Rational(m - n, n);
    const int s = e.delta.sign();
    e.branch = s < 0 ? DeltaBranch::negative : (s == 0 ? DeltaBranch::zero : DeltaBranch::positive);
    return e;
}

inline double beta_of(int n, int l) { return Rational(n + 2 - 2 * l, 2 * n).value(); }

// sqrt(2 mu) / (2 pi hbar): converts an I_0 integral into dv/dE.
inline double kappa(double mu) { return std::sqrt(2.0 * mu) / (2.0 * constants::pi); }

inline void require_attractive(double C_n) {
    if (!(C_n < 0.0)) throw ValidationError("C_n must be negative (attractive leading term)");
}

// H_n^-1 = sqrt(2 mu / pi) (-C_n)^(1/n) / (hbar (n - 2)) Gamma((n+2)/2n) / Gamma((n+1)/n)
inline double H_n_inverse(int n, double C_n, double mu) {
    if (n <= 2) throw ValidationError("H_n_inverse: need n > 2");
    require_attractive(C_n);
    const double nn = n;
    return std::sqrt(2.0 * mu / constants::pi) * std::pow(-C_n, 1.0 / nn) / (nn - 2.0) *
           std::tgamma((nn + 2.0) / (2.0 * nn)) / std::tgamma((nn + 1.0) / nn);
}

// The classic law written as D - E = [(v_D - v) * K]^(2n/(n-2)); K is this constant.
inline double lrb_scale_constant(int n, double C_n, double mu) {
    require_attractive(C_n);
    const double nn = n;
    return std::sqrt(constants::pi / (2.0 * mu)) * std::tgamma(1.0 + 1.0 / nn) / std::tgamma(0.5 + 1.0 / nn) *
           (nn - 2.0) / std::pow(-C_n, 1.0 / nn);
}

inline double classic_lrb_energy(double v, int n, double C_n, double mu, double D, double v_D) {
    if (v > v_D) throw ValidationError("classic_lrb: v above v_D");
    const double s = (v_D - v) / H_n_inverse(n, C_n, mu);
    return D - std::pow(s, 2.0 * n / (n - 2.0));
}

inline double classic_lrb_index(double E, int n, double C_n, double mu, double D, double v_D) {
    if (!(E < D) && E != D) throw ValidationError("classic_lrb: energy above D");
    return v_D - H_n_inverse(n, C_n, mu) * std::pow(D - E, (n - 2.0) / (2.0 * n));
}

// Constant of the improved one-parameter law, split into its pieces (all
// multiplied by sqrt(2 mu)/(2 pi hbar), i.e. contributions to v per unit D - E).
struct GammaParts {
    double wall = 0.0;        // linear inner wall
    double bridge = 0.0;      // bridge region up to R_+^c
    double asymptotic = 0.0;  // cut-off correction of the tail integral
    double total() const { return wall + bridge + asymptotic; }
};

inline GammaParts gamma_coefficient(double D, double D_tilde, double C_tilde, double bridge_integral, double C_n,
                                    int n, double mu, double R_plus_c) {
    require_attractive(C_n);
    if (!(C_tilde > 0.0) && C_tilde != 0.0) throw ValidationError("gamma_coefficient: wall slope must be positive");
    GammaParts g;
    const double k = kappa(mu);
    g.asymptotic = -std::sqrt(2.0 * mu) / ((n + 2.0) * constants::pi) / std::sqrt(-C_n) *
                   std::pow(R_plus_c, (n + 2.0) / 2.0);
    g.wall = C_tilde > 0.0 ? k * 2.0 * std::sqrt(D - D_tilde) / C_tilde : 0.0;
    g.bridge = k * bridge_integral;
    return g;
}

// Constant gamma_delta of the compact integral formula, in integral units
// (hartree^-1/2 bohr^(1-l)). Multiply by kappa(mu) for the l = 0 NDE constant.
struct GammaDelta {
    double value = 0.0;
    double nonasymptotic = 0.0;  // I_l^n.a.(D)
    double beta_term = 0.0;      // cut-off correction of the leading term
    double delta_term = 0.0;     // C_m contribution
    DeltaBranch branch = DeltaBranch::negative;
};

inline GammaDelta gamma_delta_constant(double I_na_D, double C_n, double C_m, int n, int m, int l, double R_plus_c) {
    require_attractive(C_n);
    const auto ex = exponents(n, m, l);
    const double beta = ex.beta.value(), delta = ex.delta.value();
    const double sc = 1.0 / std::sqrt(-C_n);
    GammaDelta g;
    g.branch = ex.branch;
    g.nonasymptotic = I_na_D;
    g.beta_term = -sc * std::pow(R_plus_c, n * beta) / (n * beta);
    switch (ex.branch) {
        case DeltaBranch::negative:
            g.delta_term = 0.5 * sc * (C_m / C_n) * std::pow(R_plus_c, n * delta) / (n * delta);
            break;
        case DeltaBranch::zero:
            g.delta_term = sc / n * (C_m / C_n) *
                           (beta * beta_function(beta, 0.5) + 0.5 * std::log(std::pow(R_plus_c, n) / (-C_n)));
            break;
        case DeltaBranch::positive:
            g.delta_term = 0.0;
            break;
    }
    g.value = g.nonasymptotic + g.beta_term + g.delta_term;
    return g;
}

// gamma~_delta: the same constant expressed per unit D - E in v.
inline GammaDelta gamma_tilde_delta(double I_na_D, double C_n, double C_m, int n, int m, int l, double R_plus_c,
                                    double mu) {
    auto g = gamma_delta_constant(I_na_D, C_n, C_m, n, m, l, R_plus_c);
    const double k = kappa(mu);
    g.value *= k;
    g.nonasymptotic *= k;
    g.beta_term *= k;
    g.delta_term *= k;
    return g;
}

struct ExpansionPoint {
    double y0_to_n = 0.0;
    double alpha_0 = 0.0;
    double alpha_c = 0.0;
    bool series_valid() const { return std::fabs(alpha_c) < 1.0; }
    bool warn() const { return std::fabs(alpha_c) > 0.1; }
};

inline ExpansionPoint expansion_point(double binding, double C_n, double C_m, int n, int m, double R_plus_c) {
    require_attractive(C_n);
    ExpansionPoint p;
    p.y0_to_n = binding * std::pow(R_plus_c, n) / (-C_n);
    p.alpha_c = C_m / C_n / std::pow(R_plus_c, m - n);
    p.alpha_0 = C_m / C_n * std::pow(binding / (-C_n), double(m - n) / n);
    return p;
}

enum class TMode { series, quadrature };

// T_{l,k}^{n,m}(y^n) for k = 0, 1.
inline double T_integral(int l, int k, int n, int m, double y_to_n, TMode mode) {
    if (k != 0 && k != 1) throw ValidationError("T_integral: only k = 0 and k = 1 are supported");
    if (!(y_to_n >= 0.0 && y_to_n < 1.0)) throw ValidationError("T_integral: need 0 <= y^n < 1");
    const auto ex = exponents(n, m, l);
    const double beta = ex.beta.value(), delta = ex.delta.value();
    const double z = y_to_n;
    const double inf = std::numeric_limits<double>::infinity();
    if (mode == TMode::series) {
        if (k == 0) return beta_function(beta, 0.5) / n - std::pow(z, beta) / (n * beta);
        switch (ex.branch) {
            case DeltaBranch::negative: return z == 0.0 ? inf : -std::pow(z, delta) / (n * delta);
            case DeltaBranch::zero: return z == 0.0 ? inf : -std::log(z) / n;
            case DeltaBranch::positive:
                return ((1.0 - 2.0 * delta) * beta_function(delta, 0.5) + 2.0 * beta * beta_function(beta, 0.5)) / n;
        }
    }
    // (1/n) int_z^1 u^(a-1) (1-u)^(-1/2) [(1 - u^(m/n)) / (1 - u)]^k du with a = beta or delta.
    const double a = k == 0 ? beta : delta;
    if (z == 0.0 && !(a > 0.0)) return inf;
    const double q = double(m) / n;
    auto ratio = [&](double w) {  // (1 - u^q)/(1 - u) with w = 1 - u
        if (k == 0) return 1.0;
        if (w == 0.0) return q;
        return -std::expm1(q * std::log1p(-w)) / w;
    };
    const double um = 0.5 * (1.0 + z);
    double lower = 0.0;
    if (a != 0.0) {
        // t = u^a turns u^(a-1) du into dt / a
        const double t0 = std::pow(z, a), t1 = std::pow(um, a);
        auto f = [&](double t) {
            const double u = std::pow(t, 1.0 / a);
            return std::pow(1.0 - u, -0.5) * ratio(1.0 - u) / a;
        };
        lower = integrate(f, t0, t1, 1e-13).value;
    } else {
        auto f = [&](double s) {
            const double u = std::exp(s);
            return std::pow(1.0 - u, -0.5) * ratio(1.0 - u);
        };
        lower = integrate(f, std::log(z), std::log(um), 1e-13).value;
    }
    // u = 1 - (1 - um) s^2 removes the square-root singularity at u = 1.
    const double wm = 1.0 - um;
    auto g = [&](double s) {
        const double w = wm * s * s;
        const double u = 1.0 - w;
        return 2.0 * std::sqrt(wm) * std::pow(u, a - 1.0) * ratio(w);
    };
    const double upper = integrate(g, 0.0, 1.0, 1e-13).value;
    return (lower + upper) / n;
}

// Parameters of the near-dissociation model. m = 0 means no second term.
struct NdeModel {
    int n = 3;
    int m = 0;
    int l = 0;
    double D = 0.0;
    double C_n = 0.0;
    double C_m = 0.0;
    double v_D = 0.0;
    double gamma_tilde = 0.0;  // v per hartree
    double mu = 0.0;

    bool has_m() const { return m > n && C_m != 0.0; }
    void validate() const {
        if (n <= 2) throw ValidationError("NdeModel: need n > 2");
        if (m != 0 && m <= n) throw ValidationError("NdeModel: need m > n");
        require_attractive(C_n);
        if (!(mu > 0.0)) throw ValidationError("NdeModel: reduced mass must be positive");
    }
};

// Asymptotic part of I_l (R_+^c .. R_+) to first order in alpha_c, by term.
struct AsymptoticTerms {
    double leading = 0.0;     // B(beta,1/2)/n term
    double beta_cut = 0.0;    // -y^(n beta)/(n beta) term
    double delta_term = 0.0;  // C_m term including its cut-off piece
    double total() const { return leading + beta_cut + delta_term; }
};

inline AsymptoticTerms nde_asymptotic_terms(double binding, int n, int m, int l, double C_n, double C_m,
                                            double R_plus_c) {
    require_attractive(C_n);
    if (!(binding > 0.0)) throw ValidationError("nde_asymptotic_terms: need D - E > 0");
    const double sc = 1.0 / std::sqrt(-C_n);
    const double x = binding / (-C_n);
    AsymptoticTerms t;
    const double beta = beta_of(n, l);
    t.leading = sc * std::pow(x, -beta) * beta_function(beta, 0.5) / n;
    t.beta_cut = -sc * std::pow(R_plus_c, n * beta) / (n * beta);
    if (m == 0 || C_m == 0.0) return t;
    const auto ex = exponents(n, m, l);
    const double delta = ex.delta.value();
    const double y0n = x * std::pow(R_plus_c, n);
    double bracket = 0.0;
    switch (ex.branch) {
        case DeltaBranch::negative:
            bracket = beta * beta_function(beta, 0.5) + std::pow(y0n, delta) / (2.0 * delta);
            break;
        case DeltaBranch::zero:
            bracket = beta * beta_function(beta, 0.5) + 0.5 * std::log(binding) +
                      0.5 * std::log(std::pow(R_plus_c, n) / (-C_n));
            break;
        case DeltaBranch::positive:
            bracket = (delta - 0.5) * beta_function(delta, 0.5);
            break;
    }
    t.delta_term = sc / n * (C_m / C_n) * std::pow(x, -delta) * bracket;
    return t;
}

// E dependent C_m term of the compact formula (the cut-off pieces live in gamma_delta).
inline double compact_delta_term(double binding, int n, int m, int l, double C_n, double C_m) {
    if (m == 0 || C_m == 0.0) return 0.0;
    const auto ex = exponents(n, m, l);
    const double beta = ex.beta.value(), delta = ex.delta.value();
    const double sc = 1.0 / std::sqrt(-C_n);
    const double x = binding / (-C_n);
    double k = 0.0;
    switch (ex.branch) {
        case DeltaBranch::negative: k = beta * beta_function(beta, 0.5); break;
        case DeltaBranch::zero: k = 0.5 * std::log(binding); break;
        case DeltaBranch::positive: k = (delta - 0.5) * beta_function(delta, 0.5); break;
    }
    return sc / n * (C_m / C_n) * std::pow(x, -delta) * k;
}

// Compact two-coefficient I_l. `gamma_delta` is in integral units; for l = 0
// it equals model.gamma_tilde / kappa(mu).
inline double nde_I_l(double binding, const NdeModel& model, double gamma_delta) {
    model.validate();
    if (!(binding > 0.0)) throw ValidationError("nde_I_l: need D - E > 0");
    const double beta = beta_of(model.n, model.l);
    const double sc = 1.0 / std::sqrt(-model.C_n);
    const double lead = sc * std::pow(binding / (-model.C_n), -beta) * beta_function(beta, 0.5) / model.n;
    return lead + gamma_delta + compact_delta_term(binding, model.n, model.m, model.l, model.C_n, model.C_m);
}

inline double nde_I_0(double binding, const NdeModel& model) {
    return nde_I_l(binding, model, model.gamma_tilde / kappa(model.mu));
}

// Pieces of v_D - v for l = 0.
struct VibrationalTerms {
    double leading = 0.0;  // (D-E)^(1-beta)
    double linear = 0.0;   // gamma~ (D-E)
    double delta = 0.0;    // (D-E)^(1-delta)
    double total() const { return leading + linear + delta; }
};

inline double delta_coefficient(const NdeModel& model) {
    if (!model.has_m()) return 0.0;
    const auto ex = exponents(model.n, model.m, 0);
    const double beta = ex.beta.value(), delta = ex.delta.value();
    double k = 0.0;
    switch (ex.branch) {
        case DeltaBranch::negative: k = beta * beta_function(beta, 0.5); break;
        case DeltaBranch::zero: k = 1.0; break;  // the log factor is applied by the caller
        case DeltaBranch::positive: k = (delta - 0.5) * beta_function(delta, 0.5); break;
    }
    return kappa(model.mu) * std::pow(-model.C_n, delta - 0.5) / model.n * (model.C_m / model.C_n) / (1.0 - delta) * k;
}

inline VibrationalTerms nde_vibrational_terms(double binding, const NdeModel& model) {
    model.validate();
    if (!(binding > 0.0)) throw ValidationError("nde_vibrational: need D - E > 0");
    VibrationalTerms t;
    const double beta = beta_of(model.n, 0);
    t.leading = H_n_inverse(model.n, model.C_n, model.mu) * std::pow(binding, 1.0 - beta);
    t.linear = model.gamma_tilde * binding;
    if (model.has_m()) {
        const auto ex = exponents(model.n, model.m, 0);
        const double delta = ex.delta.value();
        double f = std::pow(binding, 1.0 - delta);
        if (ex.branch == DeltaBranch::zero) f *= 0.5 * std::log(binding);
        t.delta = delta_coefficient(model) * f;
    }
    return t;
}

// v_D - v at binding D - E.
inline double nde_vibrational(double binding, const NdeModel& model) {
    return nde_vibrational_terms(binding, model).total();
}

enum class InverseVariant { first_order_single, full };

// D - E from v_D - v by first-order inversion around the classic law.
inline double nde_inverse_binding(double v, const NdeModel& model, InverseVariant variant) {
    model.validate();
    const double s = model.v_D - v;
    if (s < 0.0) throw ValidationError("nde_inverse_energy: v above v_D (negative base)");
    if (s == 0.0) return 0.0;
    const double beta = beta_of(model.n, 0);
    const double p = 1.0 / (1.0 - beta);  // 2n/(n-2)
    const double X = std::pow(s / H_n_inverse(model.n, model.C_n, model.mu), p);
    double corr = model.gamma_tilde * X;
    if (variant == InverseVariant::full && model.has_m()) {
        const auto ex = exponents(model.n, model.m, 0);
        double f = std::pow(X, 1.0 - ex.delta.value());
        if (ex.branch == DeltaBranch::zero) f *= 0.5 * std::log(X);
        corr += delta_coefficient(model) * f;
    }
    return X * (1.0 - p * corr / s);
}

inline double nde_inverse_energy(double v, const NdeModel& model, InverseVariant variant) {
    return model.D - nde_inverse_binding(v, model, variant);
}

struct RotKin {
    double B_v = 0.0;
    double T_avg = 0.0;
};

// B_v and <T> from compact I_0, I_2. gamma_delta_0/2 are the constants of the
// l = 0 and l = 2 integrals in integral units.
inline RotKin nde_rotational_and_kinetic(double binding, double v, const NdeModel& model0, double gamma_delta_0,
                                         const NdeModel& model2, double gamma_delta_2) {
    if (model0.l != 0 || model2.l != 2) throw ValidationError("nde_rotational_and_kinetic: need l = 0 and l = 2 models");
    const double i0 = nde_I_l(binding, model0, gamma_delta_0);
    const double i2 = nde_I_l(binding, model2, gamma_delta_2);
    RotKin out;
    out.B_v = i2 / i0 / (2.0 * model0.mu);
    out.T_avg = constants::pi / std::sqrt(2.0 * model0.mu) * (v + 0.5) / i0;
    return out;
}

// Magnitude of the first dropped O(y^n) term of the leading T integral,
// as a contribution to v_D - v (l = 0).
inline double order_yn_term(double binding, int n, double C_n, double mu, double R_plus_c) {
    require_attractive(C_n);
    const double beta = beta_of(n, 0);
    const double pref = -kappa(mu) / std::sqrt(-C_n) * std::pow(R_plus_c, n * beta) / (n * beta);
    const double slope = beta / (2.0 * (beta + 1.0)) * std::pow(R_plus_c, n) / (-C_n);
    return pref * slope * binding * binding / 2.0;
}

}  // namespace ndekit
