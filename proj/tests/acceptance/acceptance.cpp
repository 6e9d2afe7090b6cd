// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// numbers underneath. Exit status is the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ndekit/commands.hpp"
#include "ndekit/terms.hpp"

using namespace ndekit;

namespace {

struct Criterion {
    explicit Criterion(std::string t) : title(std::move(t)) {}
    std::string title;
    std::vector<std::string> lines;
    bool ok = true;

    void check(bool pass, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Criterion::check(bool pass, const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    lines.push_back(std::string(pass ? "    ok   " : "    FAIL ") + buf);
    ok = ok && pass;
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

bool within(double got, double want, double tol) { return rel(got, want) <= tol; }

struct Setup {
    RunConfig cfg;
    SpeciesData species;
    CurvePtr curve;
    double mu = 0.0;
};

Setup cesium() {
    Setup s;
    s.cfg = RunConfig::load(std::string(NDEKIT_SOURCE_DIR) + "/data/cs_0gminus.cfg");
    s.species = load_species(s.cfg.species_path());
    s.curve = cmd::single_curve(s.cfg, s.species);
    s.mu = s.species.mu();
    return s;
}

// Effective C3 and C6 of the curve on the configured expansion window.
MultipoleTail effective_tail(const Setup& s) { return cmd::fitted_tail(s.cfg, *s.curve, {3, 6}); }

Criterion term_budget_check(const Setup& s, const BkwOracle& o, const MultipoleTail& t) {
    Criterion c{"term budget of the Cs 0g- curve at D-E = 30/10/1 cm-1, R+c = 35"};
    const std::vector<double> cm{30.0, 10.0, 1.0};
    std::vector<double> b;
    for (double x : cm) b.push_back(cm_to_hartree(x));
    const auto tb = term_budget(o, 3, 6, t.coefficient(3), t.coefficient(6), s.cfg.R_plus_c, b);
    struct Row {
        const char* name;
        double TermColumn::*field;
        double want[3];
        double tol;
    };
    const Row rows[] = {
        {"leading (D-E)^(1-beta)", &TermColumn::leading, {172, 143, 97}, 0.03},
        {"non-asymptotic at D", &TermColumn::na_at_D, {12.7, 4.2, 0.4}, 0.10},
        {"gamma_beta", &TermColumn::gamma_beta, {-9.8, -3.3, -0.3}, 0.10},
        {"gamma_delta (C_m part)", &TermColumn::gamma_cm, {3.7, 1.2, 0.1}, 0.15},
        {"(D-E)^(1-delta) term", &TermColumn::delta_term, {-1.8, -0.5, -0.03}, 0.15},
    };
    for (const auto& r : rows)
        for (int i = 0; i < 3; ++i) {
            const double got = tb.columns[i].*r.field;
            c.check(within(got, r.want[i], r.tol), "%-24s %5.0f cm-1: %9.4f  target %6.2f +-%2.0f%%  (off %.1f%%)",
                    r.name, cm[i], got, r.want[i], 100 * r.tol, 100 * rel(got, r.want[i]));
        }
    for (int i = 0; i < 3; ++i)
        c.lines.push_back("    info model sum " + fmt17(tb.columns[i].model_sum).substr(0, 8) + " vs oracle v_D - v " +
                          fmt17(tb.columns[i].oracle).substr(0, 8));
    return c;
}

Criterion expansion_check(const MultipoleTail& t) {
    Criterion c{"effective C3 and C6 of the Cs 0g- curve"};
    const double c3 = t.coefficient(3), c6 = t.coefficient(6);
    c.check(std::fabs(c3 + 10.0) <= 0.5, "C3_eff = %.5f  target -10 +- 0.5", c3);
    c.check(within(c6, 65000.0, 0.05), "C6_eff = %.1f  target 65000 +- 5%%", c6);
    return c;
}

// Quadrature of the asymptotic part of I_l on a pure two-term tail.
double tail_integral(int n, int m, int l, double Cn, double Cm, double Rc, double Rp) {
    auto bind = [&](double r) { return -Cn / std::pow(r, n) - Cm / std::pow(r, m); };
    const double b = bind(Rp), d = Rp - Rc;
    // R = R+ - d s^2 removes the inverse square root at R+.
    auto f = [&](double s) {
        if (s == 0.0) {
            const double h = 1e-6 * Rp;
            const double slope = (bind(Rp - h) - b) / h;
            return 2.0 * std::sqrt(d) * std::pow(Rp, -l) / std::sqrt(slope);
        }
        const double r = Rp - d * s * s;
        return std::pow(r, -l) * 2.0 * d * s / std::sqrt(bind(r) - b);
    };
    return integrate(f, 0.0, 1.0, 1e-12).value;
}

Criterion oracle_equivalence_check() {
    Criterion c{"compact I_l against quadrature on two-term tails"};
    struct Case {
        int n, m, l;
        double Cn;
    };
    const double Rc = 35.0;
    for (const auto& k : {Case{3, 6, 0, -10.0}, Case{3, 6, 2, -10.0}, Case{6, 8, 0, -5000.0}}) {
        for (double alpha : {-0.1, 0.0, 0.1}) {
            const double Cm = alpha * k.Cn * std::pow(Rc, k.m - k.n);
            double worst = 0.0, at = 0.0, crossing = 1.6;
            // Scan from far out inwards; the crossing is where leading-only first exceeds 1%.
            bool crossed = false;
            for (int i = 400; i >= 0; --i) {
                const double ratio = 1.6 * std::pow(20.0 / 1.6, i / 400.0);
                const double Rp = ratio * Rc;
                const double q = tail_integral(k.n, k.m, k.l, k.Cn, Cm, Rc, Rp);
                const double b = -k.Cn / std::pow(Rp, k.n) - Cm / std::pow(Rp, k.m);
                const auto t = nde_asymptotic_terms(b, k.n, k.m, k.l, k.Cn, Cm, Rc);
                const double e = rel(t.total(), q);
                if (e > worst) worst = e, at = ratio;
                if (!crossed && rel(t.leading, q) > 0.01) crossed = true, crossing = ratio;
            }
            c.check(worst <= 0.01, "(%d,%d,%d) alpha_c=%+.1f: compact max error %.3f%% (at R+ = %.2f R+c), target 1%%",
                    k.n, k.m, k.l, alpha, 100 * worst, at);
            const bool gated = k.n == 3 && k.m == 6 && k.l == 0;
            const bool in_band = crossing >= 4.0 && crossing <= 6.0;
            if (gated)
                c.check(in_band, "(%d,%d,%d) alpha_c=%+.1f: leading-only reaches 1%% at R+ = %.2f R+c, target [4,6]",
                        k.n, k.m, k.l, alpha, crossing);
            else
                c.lines.push_back("    info (" + std::to_string(k.n) + "," + std::to_string(k.m) + "," +
                                  std::to_string(k.l) + ") leading-only reaches 1% at R+ = " +
                                  fmt17(crossing).substr(0, 5) + " R+c");
        }
    }
    return c;
}

Criterion classification_check() {
    Criterion c{"exponent classification in exact rationals"};
    const auto a = exponents(4, 5, 2), b = exponents(6, 10, 0), d = exponents(3, 6, 0);
    c.check(a.delta == Rational(0) && a.branch == DeltaBranch::zero, "(4,5,2): delta = %lld/%lld",
            (long long)a.delta.num, (long long)a.delta.den);
    c.check(b.delta == Rational(0) && b.branch == DeltaBranch::zero, "(6,10,0): delta = %lld/%lld",
            (long long)b.delta.num, (long long)b.delta.den);
    c.check(d.beta == Rational(5, 6) && d.delta == Rational(-1, 6), "(3,6,0): beta = %lld/%lld, delta = %lld/%lld",
            (long long)d.beta.num, (long long)d.beta.den, (long long)d.delta.num, (long long)d.delta.den);
    return c;
}

FitSpec fit_spec(const Setup& s, Variant v, double window_cm, const std::string& label) {
    FitSpec f;
    f.variant = v;
    f.n = 3;
    f.m = 6;
    f.mu = s.mu;
    f.window = std::isfinite(window_cm) ? cm_to_hartree(window_cm) : window_cm;
    f.window_label = label;
    f.max_iterations = s.cfg.max_iterations;
    return f;
}

Criterion closed_loop_check(const Setup& s, const BkwOracle& o, const LevelSeries& levels, const MultipoleTail& t) {
    Criterion c{"closed-loop fit of semiclassical levels"};
    const int count = o.max_level() + 1;
    c.check(std::abs(count - 134) <= 3, "bound levels of the curve: %d  target 134 +- 3", count);
    const double first = hartree_to_cm(o.D() - levels.levels.front().E);
    const double last = hartree_to_cm(o.D() - levels.levels.back().E);
    c.check(std::fabs(first - 77.0) <= 3.0, "v = 0 at D - E = %.3f cm-1  target 77 +- 3", first);
    c.check(std::fabs(last - 0.4) <= 0.2, "v = %d at D - E = %.3f cm-1  target 0.4 +- 0.2", levels.levels.back().v,
            last);
    const auto k5 = fit_nde(levels, fit_spec(s, Variant::full_k5, 10.0, "10"));
    const auto k3 = fit_nde(levels, fit_spec(s, Variant::classic_k3, 10.0, "10"));
    const double c3 = t.coefficient(3);
    c.check(k5.converged && within(k5.params[1], c3, 0.01), "k5 on D-E < 10 cm-1 (N = %d): C3 = %.5f vs C3_eff %.5f (%.3f%%)",
            k5.n_levels, k5.params[1], c3, 100 * rel(k5.params[1], c3));
    c.check(std::fabs(k5.params[2] - o.v_D()) <= 0.5, "k5 v_D = %.4f vs oracle %.4f", k5.params[2], o.v_D());
    c.check(rel(k3.params[1], c3) >= 0.02, "k3 on the same window: C3 = %.4f deviates %.1f%% (needs >= 2%%)",
            k3.params[1], 100 * rel(k3.params[1], c3));
    return c;
}

Criterion ladder_check(const Setup& s, const LevelSeries& levels) {
    Criterion c{"model ladder ordering and C3 stability"};
    std::map<std::string, double> c3;
    for (const auto& w : s.cfg.fit_windows) {
        const double cm = w == "all" ? INFINITY : std::stod(w);
        const auto lad = model_ladder(levels, fit_spec(s, Variant::full_k5, cm, w));
        const double s3 = lad[0].sigma_fit_mhz(), s4 = lad[1].sigma_fit_mhz(), s5 = lad[2].sigma_fit_mhz();
        c.check(s5 <= s4 && s4 <= s3, "window %-3s: sigma_fit k3/k4/k5 = %.4g / %.4g / %.4g MHz", w.c_str(), s3, s4, s5);
        c3[w] = lad[2].params[1];
    }
    double lo = INFINITY, hi = -INFINITY;
    for (const char* w : {"30", "10", "5"}) {
        lo = std::min(lo, c3.at(w));
        hi = std::max(hi, c3.at(w));
    }
    c.check((hi - lo) / std::fabs(0.5 * (hi + lo)) < 0.01, "k5 C3 over windows 30/10/5: %.5f / %.5f / %.5f (spread %.3f%%)",
            c3.at("30"), c3.at("10"), c3.at("5"), 100 * (hi - lo) / std::fabs(0.5 * (hi + lo)));
    return c;
}

Criterion branch_table_check(const Setup& s) {
    Criterion c{"1/R^3 coefficients of all 16 branches against closed forms"};
    for (double eps : {0.0, 0.0048}) {
        CaseCParams p = s.cfg.case_c_params(s.species);
        p.epsilon = eps;
        CaseCOptions opt;
        opt.include_epsilon = eps != 0.0;
        const double C3 = p.C3, s7 = std::sqrt(7.0), f = (1 + eps) * (1 + eps);
        // {p3/2 limit?, coefficient}
        const std::map<std::string, std::vector<std::pair<bool, double>>> table = {
            {"2g", {{true, C3}}},
            {"2u", {{true, -C3}}},
            {"1u", {{true, (2 + s7) / 3 * C3}, {false, 2.0 / 3 * C3 * f}, {true, -(s7 - 2) / 3 * C3}}},
            {"1g", {{true, (s7 - 2) / 3 * C3}, {false, -2.0 / 3 * C3 * f}, {true, -(2 + s7) / 3 * C3}}},
            {"0u+", {{false, -4.0 / 3 * C3 * f}, {true, -5.0 / 3 * C3}}},
            {"0g+", {{false, 4.0 / 3 * C3 * f}, {true, 5.0 / 3 * C3}}},
            {"0u-", {{false, 0.0}, {true, C3}}},
            {"0g-", {{false, 0.0}, {true, -C3}}},
        };
        int matched = 0;
        double worst = 0.0;
        bool ok = true;
        for (const auto& l : SymmetryLabel::all()) {
            for (bool upper : {true, false}) {
                std::vector<double> got, want;
                for (int b = 0; b < l.dim(); ++b) {
                    const auto br = adiabatic_branch(l, b, p, opt);
                    if ((br->asymptote() == p.limit_p32()) != upper) continue;
                    got.push_back(expand_branch(*br, {3, 6}, 200.0, 2000.0).tail.coefficient(3));
                }
                for (const auto& [u, x] : table.at(l.str()))
                    if (u == upper) want.push_back(x);
                if (got.size() != want.size()) {
                    ok = false;
                    continue;
                }
                std::sort(got.begin(), got.end());
                std::sort(want.begin(), want.end());
                for (std::size_t i = 0; i < got.size(); ++i, ++matched) {
                    const double e = want[i] == 0.0 ? std::fabs(got[i]) / C3 : rel(got[i], want[i]);
                    worst = std::max(worst, e);
                }
            }
        }
        c.check(ok && matched == 16 && worst <= 0.005, "epsilon = %.4f: %d branches, worst deviation %.4f%%", eps,
                matched, 100 * worst);
    }
    return c;
}

Criterion property_check(const Setup& s, const BkwOracle& o, const MultipoleTail& t) {
    Criterion c{"property suites"};
    {
        const double mu = 1000.0, w = 2e-3;
        const BkwOracle h(std::make_shared<HarmonicCurve>(mu, w, 10.0, 6.0), mu);
        double worst = 0.0;
        for (const auto& l : h.level_energies(0, 10).levels) {
            worst = std::max(worst, rel(l.E, (l.v + 0.5) * w));
            worst = std::max(worst, rel(h.dv_dE(h.at_energy(l.E)), 1.0 / w));
            worst = std::max(worst, rel(h.kinetic_energy(l.E, l.v), 0.5 * l.E));
        }
        c.check(worst <= 1e-9, "harmonic levels, dv/dE and <T>: worst relative error %.2e (1e-9)", worst);
    }
    {
        double worst = 0.0;
        for (double cm : {50.0, 30.0, 10.0, 1.0, 0.2}) {
            const double b = cm_to_hartree(cm), h = 1e-4 * b;
            const double fd =
                (o.vibrational_index(o.at_binding(b - h)) - o.vibrational_index(o.at_binding(b + h))) / (2 * h);
            worst = std::max(worst, rel(fd, o.dv_dE(o.at_binding(b))));
        }
        c.check(worst <= 1e-6, "dv/dE against finite differences of v(E): %.2e (1e-6)", worst);
    }
    {
        NdeModel m;
        m.n = 3;
        m.C_n = t.coefficient(3);
        m.v_D = o.v_D();
        m.mu = s.mu;
        double worst = 0.0;
        for (double cm : {30.0, 1.0, 0.01}) {
            const double b = cm_to_hartree(cm);
            const double classic = m.v_D - classic_lrb_index(-b, 3, m.C_n, m.mu, 0.0, m.v_D);
            worst = std::max(worst, rel(nde_vibrational(b, m), classic));
            worst = std::max(worst, rel(nde_inverse_binding(m.v_D - classic, m, InverseVariant::full), b));
            worst = std::max(worst, rel(nde_inverse_binding(m.v_D - classic, m, InverseVariant::first_order_single), b));
            const auto at = nde_asymptotic_terms(b, 3, 6, 0, m.C_n, t.coefficient(6), s.cfg.R_plus_c);
            const auto gd = gamma_delta_constant(0.0, m.C_n, t.coefficient(6), 3, 6, 0, s.cfg.R_plus_c);
            NdeModel full = m;
            full.m = 6;
            full.C_m = t.coefficient(6);
            worst = std::max(worst, rel(nde_I_l(b, full, gd.value), at.total()));
        }
        c.check(worst <= 1e-12, "classic / improved / full reduction identities: %.2e (1e-12)", worst);
    }
    {
        const double pi = constants::pi;
        double worst = rel(beta_function(0.5, 0.5), pi);
        worst = std::max(worst, rel(beta_function(1.0, 0.5), 2.0));
        worst = std::max(worst, rel(gamma_function(0.5), std::sqrt(pi)));
        for (double a : {0.3, 5.0 / 6.0, 2.5})
            worst = std::max(worst, rel(beta_function(a + 1.0, 0.5), beta_function(a, 0.5) * a / (a + 0.5)));
        c.check(worst <= 1e-12, "Beta/Gamma identities incl. B(1/2,1/2) = pi: %.2e (1e-12)", worst);
    }
    {
        // The first-order inversion leaves a residual of second order in the
        // correction terms c (evaluated at the classic binding): |r| <= c^2.
        const auto tb = term_budget(o, 3, 6, t.coefficient(3), t.coefficient(6), s.cfg.R_plus_c, {cm_to_hartree(10.0)});
        NdeModel m;
        m.n = 3;
        m.m = 6;
        m.C_n = t.coefficient(3);
        m.C_m = t.coefficient(6);
        m.v_D = o.v_D();
        m.gamma_tilde = tb.gamma_tilde;
        m.mu = s.mu;
        double worst_ratio = 0.0, worst_near = 0.0;
        for (int v = 0; v < static_cast<int>(m.v_D); ++v) {
            const double sv = m.v_D - v;
            const auto vt = nde_vibrational_terms(std::pow(sv / H_n_inverse(3, m.C_n, m.mu), 6.0), m);
            const double corr = vt.linear + vt.delta;
            const double b = nde_inverse_binding(v, m, InverseVariant::full);
            const double r = std::fabs(nde_vibrational(b, m) - sv);
            worst_ratio = std::max(worst_ratio, r / (corr * corr + 1e-12));
            if (b <= cm_to_hartree(12.0)) worst_near = std::max(worst_near, r);
        }
        c.check(worst_ratio <= 1.0, "inversion residual within c^2 for every level (max %.3f of the bound)",
                worst_ratio);
        c.check(worst_near < 0.3, "inversion residual for D-E <= 12 cm-1: %.3g in v (0.3)", worst_near);
    }
    return c;
}

}  // namespace

int main() {
    const Setup s = cesium();
    const BkwOracle o(s.curve, s.mu, cmd::bkw_options(s.cfg));
    const MultipoleTail t = effective_tail(s);
    const int v_max = std::stoi(s.cfg.v_max);
    const LevelSeries levels = o.level_energies(0, v_max);

    const std::vector<Criterion> all = {
        term_budget_check(s, o, t),  expansion_check(t),         oracle_equivalence_check(),
        classification_check(),      closed_loop_check(s, o, levels, t), ladder_check(s, levels),
        branch_table_check(s),       property_check(s, o, t),
    };
    int failed = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        std::printf("%s criterion %zu: %s\n", all[i].ok ? "PASS" : "FAIL", i + 1, all[i].title.c_str());
        for (const auto& l : all[i].lines) std::printf("%s\n", l.c_str());
        if (!all[i].ok) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed;
}
