#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "ndekit/nde.hpp"
#include "ndekit/terms.hpp"

using namespace ndekit;
using testing_support::rel;

namespace {

NdeModel cs_model(double C_m, double gamma_tilde, double v_D) {
    NdeModel m;
    m.n = 3;
    m.m = C_m != 0.0 ? 6 : 0;
    m.C_n = -9.997;
    m.C_m = C_m;
    m.v_D = v_D;
    m.gamma_tilde = gamma_tilde;
    m.mu = testing_support::cs_mu();
    return m;
}

const BkwOracle& cesium() {
    static const BkwOracle o(testing_support::cs_0g_minus(), testing_support::cs_mu());
    return o;
}

}  // namespace

TEST(NdeExponents, ExactRationals) {
    const auto a = exponents(3, 6, 0);
    EXPECT_TRUE(a.beta == Rational(5, 6));
    EXPECT_TRUE(a.delta == Rational(-1, 6));
    EXPECT_EQ(a.branch, DeltaBranch::negative);
    EXPECT_EQ(exponents(4, 5, 2).branch, DeltaBranch::zero);
    EXPECT_EQ(exponents(6, 10, 0).branch, DeltaBranch::zero);
    EXPECT_TRUE(exponents(6, 10, 0).delta == Rational(0));
    EXPECT_EQ(exponents(3, 4, 0).branch, DeltaBranch::positive);
    EXPECT_TRUE(exponents(3, 4, 0).delta == Rational(1, 2));
    EXPECT_THROW(exponents(2, 6, 0), ValidationError);
    EXPECT_THROW(exponents(6, 6, 0), ValidationError);
    EXPECT_THROW(exponents(3, 6, 3), ValidationError);
}

TEST(NdeClassic, ScaleConstantsAreInverse) {
    for (int n = 3; n <= 12; ++n) {
        const double h = H_n_inverse(n, -7.5, 1.2e5);
        EXPECT_NEAR(h * lrb_scale_constant(n, -7.5, 1.2e5), 1.0, 1e-14) << n;
    }
    EXPECT_THROW(H_n_inverse(3, 1.0, 1.0), ValidationError);
}

TEST(NdeClassic, RoundTrip) {
    const double mu = testing_support::cs_mu();
    for (double v : {0.0, 50.0, 130.0, 200.0}) {
        const double E = classic_lrb_energy(v, 3, -10.0, mu, 0.0, 207.4);
        EXPECT_NEAR(classic_lrb_index(E, 3, -10.0, mu, 0.0, 207.4), v, 1e-12 * 207.4);
    }
    // With D != 0 the binding D - E is formed by subtraction; far from threshold that is harmless.
    const double E = classic_lrb_energy(20.0, 3, -10.0, mu, 0.25, 207.4);
    EXPECT_NEAR(classic_lrb_index(E, 3, -10.0, mu, 0.25, 207.4), 20.0, 1e-9);
    EXPECT_THROW(classic_lrb_energy(208.0, 3, -10.0, mu, 0.0, 207.4), ValidationError);
}

TEST(NdeTIntegral, ClosedFormsAtZero) {
    // k = 0: B(beta, 1/2)/n; k = 1 with delta > 0: the finite z -> 0 limit.
    for (int l : {0, 1, 2}) {
        const double s = T_integral(l, 0, 3, 6, 0.0, TMode::series);
        EXPECT_LE(rel(T_integral(l, 0, 3, 6, 0.0, TMode::quadrature), s), 1e-10) << l;
    }
    const double s = T_integral(0, 1, 3, 4, 0.0, TMode::series);
    EXPECT_LE(rel(T_integral(0, 1, 3, 4, 0.0, TMode::quadrature), s), 1e-9);
}

TEST(NdeTIntegral, SeriesErrorIsHigherOrder) {
    const double beta = 5.0 / 6.0;
    for (double z : {1e-2, 1e-3, 1e-4}) {
        const double d = T_integral(0, 0, 3, 6, z, TMode::quadrature) - T_integral(0, 0, 3, 6, z, TMode::series);
        EXPECT_LE(std::fabs(d), std::pow(z, beta + 1.0)) << z;
    }
    // Divergent k = 1 branches: quadrature minus series tends to a constant.
    for (auto [n, m] : {std::pair{3, 6}, std::pair{4, 8}}) {
        const double d1 = T_integral(0, 1, n, m, 1e-6, TMode::quadrature) - T_integral(0, 1, n, m, 1e-6, TMode::series);
        const double d2 = T_integral(0, 1, n, m, 1e-8, TMode::quadrature) - T_integral(0, 1, n, m, 1e-8, TMode::series);
        EXPECT_NEAR(d1, d2, 1e-4) << n << "," << m;
    }
    EXPECT_THROW(T_integral(0, 2, 3, 6, 0.1, TMode::series), ValidationError);
    EXPECT_THROW(T_integral(0, 0, 3, 6, 1.0, TMode::series), ValidationError);
}

TEST(NdeReduction, SingleTermIsClassicPlusLinear) {
    auto m = cs_model(0.0, 0.0, 207.4);
    for (double cm : {30.0, 1.0, 0.01}) {
        const double b = cm_to_hartree(cm);
        const double classic = m.v_D - classic_lrb_index(-b, 3, m.C_n, m.mu, 0.0, m.v_D);
        EXPECT_LE(rel(nde_vibrational(b, m), classic), 1e-12);
        EXPECT_LE(rel(nde_inverse_binding(m.v_D - classic, m, InverseVariant::full), b), 1e-12);
    }
    m.gamma_tilde = 1234.0;
    const double b = cm_to_hartree(3.0);
    EXPECT_NEAR(nde_vibrational_terms(b, m).linear, 1234.0 * b, 1e-15);
}

TEST(NdeReduction, VibrationalDerivativeIsKappaI0) {
    for (int mm : {6, 4}) {
        auto m = cs_model(63676.0, 500.0, 207.4);
        m.m = mm;
        for (double cm : {20.0, 2.0}) {
            const double b = cm_to_hartree(cm), h = 1e-5 * b;
            const double fd = (nde_vibrational(b + h, m) - nde_vibrational(b - h, m)) / (2.0 * h);
            EXPECT_LE(rel(fd, kappa(m.mu) * nde_I_0(b, m)), 1e-7) << mm << " " << cm;
        }
    }
}

TEST(NdeReduction, CompactMatchesAsymptoticTerms) {
    // The compact formula regroups the cut-off pieces into gamma_delta.
    const double Cn = -9.997, Cm = 63676.0, Rc = 35.0, b = cm_to_hartree(5.0);
    const auto t = nde_asymptotic_terms(b, 3, 6, 0, Cn, Cm, Rc);
    const auto g = gamma_delta_constant(0.0, Cn, Cm, 3, 6, 0, Rc);
    auto m = cs_model(Cm, 0.0, 0.0);
    EXPECT_LE(rel(nde_I_l(b, m, g.value), t.total()), 1e-12);
}

TEST(NdeInverse, RoundTripResidual) {
    const auto& o = cesium();
    const auto tb = term_budget(o, 3, 6, -9.997, 63676.0, 35.0, {cm_to_hartree(10.0)});
    const auto m = cs_model(63676.0, tb.gamma_tilde, o.v_D());
    const double H = H_n_inverse(3, m.C_n, m.mu);
    double near = 0.0;
    for (int v = 0; v <= 207; ++v) {
        const double b = nde_inverse_binding(v, m, InverseVariant::full);
        const double r = std::fabs(nde_vibrational(b, m) - (m.v_D - v));
        // Second order in the correction terms c at the classic binding, plus rounding.
        const auto vt = nde_vibrational_terms(std::pow((m.v_D - v) / H, 6.0), m);
        const double c = vt.linear + vt.delta;
        EXPECT_LE(r, c * c + 1e-12) << v;
        if (b <= cm_to_hartree(12.0)) near = std::max(near, r);
    }
    EXPECT_LT(near, 0.3);
    EXPECT_THROW(nde_inverse_binding(208.0, m, InverseVariant::full), ValidationError);
    EXPECT_EQ(nde_inverse_binding(m.v_D, m, InverseVariant::first_order_single), 0.0);
}

TEST(NdeOracle, CesiumBudgetTracksQuadrature) {
    const auto& o = cesium();
    const auto tb = term_budget(o, 3, 6, -9.997, 63676.0, 35.0,
                                {cm_to_hartree(30.0), cm_to_hartree(10.0), cm_to_hartree(1.0)});
    ASSERT_EQ(tb.columns.size(), 3u);
    EXPECT_NEAR(tb.columns[0].model_sum, tb.columns[0].oracle, 1.0);
    EXPECT_NEAR(tb.columns[1].model_sum, tb.columns[1].oracle, 0.3);
    EXPECT_NEAR(tb.columns[2].model_sum, tb.columns[2].oracle, 0.02);
    EXPECT_NEAR(tb.columns[1].point.alpha_c, -0.1486, 1e-3);
    EXPECT_THROW(term_budget(o, 3, 6, -9.997, 63676.0, 35.0, {cm_to_hartree(80.0)}), ValidationError);
}

TEST(NdeOracle, RotationalAndKinetic) {
    const auto& o = cesium();
    const double Cn = -9.997, Cm = 63676.0, Rc = 35.0;
    const double g0 = gamma_delta_constant(o.nonasymptotic_at_dissociation(0, Rc), Cn, Cm, 3, 6, 0, Rc).value;
    const double g2 = gamma_delta_constant(o.nonasymptotic_at_dissociation(2, Rc), Cn, Cm, 3, 6, 2, Rc).value;
    auto m0 = cs_model(Cm, 0.0, o.v_D()), m2 = m0;
    m2.l = 2;
    for (int v : {150, 180, 200}) {
        const double E = o.level_energy(v), b = o.D() - E;
        const auto rk = nde_rotational_and_kinetic(b, v, m0, g0, m2, g2);
        EXPECT_LE(rel(rk.B_v, o.rotational_constant(E)), 0.05) << v;
        EXPECT_LE(rel(rk.T_avg, o.kinetic_energy(E, v)), 0.05) << v;
    }
}
