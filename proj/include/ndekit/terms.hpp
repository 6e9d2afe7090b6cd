#pragma once

#include <vector>

#include "ndekit/bkw.hpp"
#include "ndekit/nde.hpp"

namespace ndekit {

// Contributions to v_D - v at one binding energy, each in units of v.
struct TermColumn {
    double binding = 0.0;        // D - E, hartree
    double leading = 0.0;        // H_n^-1 (D-E)^(1-beta)
    double na_at_D = 0.0;        // kappa I^n.a.(D) (D-E)
    double na_at_E = 0.0;        // kappa I^n.a.(E) (D-E)
    double gamma_beta = 0.0;     // cut-off correction of the leading term, times (D-E)
    double gamma_delta = 0.0;    // full constant gamma~_delta (D-E)
    double gamma_cm = 0.0;       // C_m part of gamma~_delta, times (D-E)
    double delta_term = 0.0;     // (D-E)^(1-delta) term
    double order_yn = 0.0;       // first neglected O(y^n) term (diagnostic)
    double model_sum = 0.0;      // leading + gamma_delta + delta_term
    double oracle = 0.0;         // v_D - v(E) by quadrature
    ExpansionPoint point;
};

struct TermBudget {
    int n = 3, m = 6;
    double C_n = 0.0, C_m = 0.0, R_plus_c = 0.0;
    double gamma_tilde = 0.0;  // v per hartree
    std::vector<TermColumn> columns;
};

// Budget of the two-coefficient NDE against the oracle for a given tail.
inline TermBudget term_budget(const BkwOracle& oracle, int n, int m, double C_n, double C_m, double R_plus_c,
                              const std::vector<double>& bindings) {
    TermBudget out;
    out.n = n;
    out.m = m;
    out.C_n = C_n;
    out.C_m = C_m;
    out.R_plus_c = R_plus_c;
    const double mu = oracle.mu();
    const double k = kappa(mu);
    const double I_na_D = oracle.nonasymptotic_at_dissociation(0, R_plus_c);
    const auto gd = gamma_delta_constant(I_na_D, C_n, C_m, n, m, 0, R_plus_c);
    out.gamma_tilde = k * gd.value;
    NdeModel model;
    model.n = n;
    model.m = m;
    model.l = 0;
    model.D = oracle.D();
    model.C_n = C_n;
    model.C_m = C_m;
    model.v_D = oracle.v_D();
    model.gamma_tilde = out.gamma_tilde;
    model.mu = mu;
    for (double b : bindings) {
        if (!(b > 0.0) || !(b < oracle.well_depth()))
            throw ValidationError("term budget: D - E must lie inside the well (0, depth)");
        TermColumn c;
        c.binding = b;
        const auto vt = nde_vibrational_terms(b, model);
        c.leading = vt.leading;
        c.delta_term = vt.delta;
        c.gamma_delta = vt.linear;
        c.na_at_D = k * gd.nonasymptotic * b;
        c.gamma_beta = k * gd.beta_term * b;
        c.gamma_cm = k * gd.delta_term * b;
        const auto p = oracle.at_binding(b);
        const auto tp = oracle.turning_points(p);
        if (R_plus_c < tp.R_plus) c.na_at_E = k * oracle.integral_I_l_split(p, 0, R_plus_c).non_asymptotic * b;
        c.order_yn = order_yn_term(b, n, C_n, mu, R_plus_c);
        c.model_sum = vt.total();
        c.oracle = oracle.v_D() - oracle.vibrational_index(p);
        c.point = expansion_point(b, C_n, C_m, n, m, R_plus_c);
        out.columns.push_back(c);
    }
    return out;
}

}  // namespace ndekit
