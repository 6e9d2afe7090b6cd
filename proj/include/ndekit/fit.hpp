#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ndekit/bkw.hpp"
#include "ndekit/errors.hpp"
#include "ndekit/nde.hpp"
#include "ndekit/roots.hpp"
#include "ndekit/units.hpp"

namespace ndekit {

enum class Variant { classic_k3, improved_k4, full_k5 };

inline int parameter_count(Variant v) { return v == Variant::classic_k3 ? 3 : (v == Variant::improved_k4 ? 4 : 5); }

inline std::string variant_name(Variant v) {
    switch (v) {
        case Variant::classic_k3: return "classic_k3";
        case Variant::improved_k4: return "improved_k4";
        case Variant::full_k5: return "full_k5";
    }
    return "?";
}

// Parameter order everywhere: D, C_n, v_D, gamma_tilde, C_m.
inline const char* parameter_name(int i) {
    static const char* names[5] = {"D", "C_n", "v_D", "gamma_tilde", "C_m"};
    return names[i];
}

struct FitSpec {
    Variant variant = Variant::full_k5;
    int n = 3;
    int m = 6;
    double mu = 0.0;
    std::optional<double> D, C_n, v_D, gamma_tilde, C_m;  // initial guesses
    // Keep levels with D_guess - E below this (hartree); infinity keeps all.
    double window = std::numeric_limits<double>::infinity();
    std::string window_label = "all";
    int max_iterations = 100;
    std::vector<double> weights;  // optional, one per input level
};

struct FitReport {
    Variant variant = Variant::full_k5;
    std::string window_label;
    int n_levels = 0;
    int k = 0;
    double params[5] = {0, 0, 0, 0, 0};
    double std_errors[5] = {0, 0, 0, 0, 0};
    double ssr = 0.0;        // hartree^2
    double sigma_fit = 0.0;  // hartree, sqrt(ssr)/(N - k)
    double rmse = 0.0;       // hartree, sqrt(ssr/(N - k))
    std::vector<double> residuals;  // hartree, model - data
    std::vector<int> v;
    int iterations = 0;
    bool converged = false;
    Eigen::MatrixXd covariance;
    std::vector<std::string> flags;

    double sigma_fit_mhz() const { return hartree_to_mhz(sigma_fit); }
    double rmse_mhz() const { return hartree_to_mhz(rmse); }
    bool flagged(const std::string& f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }
    NdeModel model(double mu, int n, int m) const {
        NdeModel md;
        md.n = n;
        md.m = m;
        md.D = params[0];
        md.C_n = params[1];
        md.v_D = params[2];
        md.gamma_tilde = params[3];
        md.C_m = params[4];
        md.mu = mu;
        return md;
    }
};

struct SigmaFit {
    double caption = 0.0;  // sqrt(sum r^2) / (N - k)
    double rmse = 0.0;     // sqrt(sum r^2 / (N - k))
};

inline SigmaFit sigma_fit(const std::vector<double>& residuals, int N, int k) {
    if (N <= k) throw ValidationError("sigma_fit: need N > k");
    double s = 0.0;
    for (double r : residuals) s += r * r;
    return {std::sqrt(s) / (N - k), std::sqrt(s / (N - k))};
}

// Energy of level v under the variant's reversed formula.
inline double variant_energy(Variant variant, double v, const NdeModel& m) {
    const auto inv = variant == Variant::full_k5 ? InverseVariant::full : InverseVariant::first_order_single;
    return nde_inverse_energy(v, m, inv);
}

namespace detail {

struct Guess {
    double D, C_n, v_D;
};

// Classic law through the window: for a fixed D it is linear in (v_D, H),
// v = v_D - H (D - E)^((n-2)/2n), so D is profiled by a log-spaced scan and a
// golden-section polish, starting at one top spacing above the last level.
inline double classic_profile_ssr(const LevelSeries& s, int n, double D, double* v_D, double* H) {
    const double e = (n - 2.0) / (2.0 * n);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double N = static_cast<double>(s.size());
    for (const auto& l : s.levels) {
        const double x = std::pow(D - l.E, e);
        sx += x;
        sy += l.v;
        sxx += x * x;
        sxy += x * l.v;
    }
    const double slope = (N * sxy - sx * sy) / (N * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / N;
    double ssr = 0.0;
    for (const auto& l : s.levels) {
        const double r = icpt + slope * std::pow(D - l.E, e) - l.v;
        ssr += r * r;
    }
    if (v_D) *v_D = icpt;
    if (H) *H = -slope;
    return ssr;
}

inline Guess cold_guess(const LevelSeries& s, int n, double mu) {
    if (s.size() < 3) throw ValidationError("fit: need at least three levels for a starting guess");
    const auto& hi = s.levels.back();
    const auto& lo = s.levels[s.size() - 2];
    const double spacing = hi.E - lo.E;
    const double span = hi.E - s.levels.front().E;
    const double a = std::log(spacing), b = std::log(10.0 * span + spacing);
    auto f = [&](double t) { return classic_profile_ssr(s, n, hi.E + std::exp(t), nullptr, nullptr); };
    const int K = 80;
    int best = 0;
    double fbest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < K; ++i) {
        const double fi = f(a + (b - a) * i / (K - 1));
        if (fi < fbest) {
            fbest = fi;
            best = i;
        }
    }
    const double step = (b - a) / (K - 1);
    const auto m = golden_minimum(f, a + step * std::max(best - 1, 0) - (best == 0 ? step : 0.0),
                                  a + step * (best + 1), 1e-10);
    Guess g;
    g.D = hi.E + std::exp(m.first);
    double H = 0.0;
    classic_profile_ssr(s, n, g.D, &g.v_D, &H);
    if (!(H > 0.0) || !(g.v_D > hi.v)) {
        // Fall back to the two-point solve through the last two levels.
        g.D = hi.E + spacing;
        const double e = (n - 2.0) / (2.0 * n);
        const double x1 = std::pow(g.D - lo.E, e), x2 = std::pow(g.D - hi.E, e);
        H = (hi.v - lo.v) / (x1 - x2);
        g.v_D = lo.v + H * x1;
    }
    g.C_n = -std::pow(H / H_n_inverse(n, -1.0, mu), n);
    return g;
}

}  // namespace detail

inline double default_d_guess(const LevelSeries& s) {
    if (s.size() < 2) throw ValidationError("fit: need at least two levels");
    const auto& a = s.levels[s.size() - 2];
    const auto& b = s.levels.back();
    return b.E + (b.E - a.E);
}

inline FitReport fit_nde(const LevelSeries& all, const FitSpec& spec) {
    if (!(spec.mu > 0.0)) throw ValidationError("fit_nde: reduced mass must be positive");
    all.check();
    const int k = parameter_count(spec.variant);

    // Window selection relative to the cold D guess of the full series.
    const double d_all = default_d_guess(all);
    LevelSeries s;
    std::vector<double> w;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (d_all - all.levels[i].E < spec.window) {
            s.levels.push_back(all.levels[i]);
            w.push_back(spec.weights.empty() ? 1.0 : spec.weights.at(i));
        }
    }
    FitReport rep;
    rep.variant = spec.variant;
    rep.window_label = spec.window_label;
    rep.k = k;
    rep.n_levels = static_cast<int>(s.size());
    for (const auto& l : s.levels) rep.v.push_back(l.v);
    if (rep.n_levels < k + 2) {
        rep.flags.push_back("too_few_levels");
        return rep;
    }

    const auto g = detail::cold_guess(s, spec.n, spec.mu);
    double p0[5] = {spec.D.value_or(g.D), spec.C_n.value_or(g.C_n), spec.v_D.value_or(g.v_D),
                    spec.gamma_tilde.value_or(0.0), spec.C_m.value_or(0.0)};

    // Scales: one level spacing for D, the guesses for C_n and v_D, and
    // values that make the gamma and C_m corrections O(1) over the window.
    const double spacing = std::max(s.levels.back().E - s.levels[s.size() - 2].E, 1e-300);
    const double b_typ = std::max(p0[0] - s.levels.front().E, spacing);
    const double r_typ = std::pow(std::fabs(p0[1]) / b_typ, 1.0 / spec.n);
    double scale[5] = {spacing, std::fabs(p0[1]), 1.0, 1.0 / b_typ,
                       std::fabs(p0[1]) * std::pow(r_typ, spec.m - spec.n)};

    auto make_model = [&](const Eigen::VectorXd& q) {
        NdeModel m;
        m.n = spec.n;
        m.m = spec.variant == Variant::full_k5 ? spec.m : 0;
        m.mu = spec.mu;
        double p[5] = {p0[0], p0[1], p0[2], 0.0, 0.0};
        for (int j = 0; j < k; ++j) p[j] = q(j) * scale[j];
        m.D = p[0];
        m.C_n = p[1];
        m.v_D = p[2];
        m.gamma_tilde = p[3];
        m.C_m = p[4];
        return m;
    };
    const int N = rep.n_levels;
    auto residuals = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) -> bool {
        const NdeModel m = make_model(q);
        if (!(m.C_n < 0.0) || !std::isfinite(m.C_n)) return false;
        r.resize(N);
        for (int i = 0; i < N; ++i) {
            if (!(m.v_D - s.levels[i].v > 0.0)) return false;
            const double e = variant_energy(spec.variant, s.levels[i].v, m);
            if (!std::isfinite(e)) return false;
            r(i) = (e - s.levels[i].E) * w[i] / spacing;
        }
        return true;
    };

    Eigen::VectorXd q(k);
    for (int j = 0; j < k; ++j) q(j) = p0[j] / scale[j];
    Eigen::VectorXd r;
    if (!residuals(q, r)) throw NumericError("fit_nde: starting point is outside the model's domain");
    double ssr = r.squaredNorm();

    auto jacobian = [&](const Eigen::VectorXd& q0, Eigen::MatrixXd& J) -> bool {
        J.resize(N, k);
        Eigen::VectorXd rp, rm;
        for (int j = 0; j < k; ++j) {
            const double h = 1e-6 * std::max(1.0, std::fabs(q0(j)));
            Eigen::VectorXd qp = q0, qm = q0;
            qp(j) += h;
            qm(j) -= h;
            const bool okp = residuals(qp, rp), okm = residuals(qm, rm);
            if (okp && okm) J.col(j) = (rp - rm) / (2.0 * h);
            else if (okp) J.col(j) = (rp - r) / h;
            else if (okm) J.col(j) = (r - rm) / h;
            else return false;
        }
        return true;
    };

    double lambda = 1e-3;  // relative to the diagonal of J^T J
    Eigen::MatrixXd J;
    bool converged = false;
    int it = 0;
    for (; it < spec.max_iterations; ++it) {
        if (!jacobian(q, J)) break;
        const Eigen::MatrixXd A = J.transpose() * J;
        const Eigen::VectorXd grad = J.transpose() * r;
        if (grad.lpNorm<Eigen::Infinity>() <= 1e-30) {
            converged = true;
            break;
        }
        bool accepted = false;
        double ssr_new = ssr;
        Eigen::VectorXd q_new, r_new;
        for (int tries = 0; tries < 30 && !accepted; ++tries) {
            Eigen::MatrixXd Ad = A;
            for (int j = 0; j < k; ++j) Ad(j, j) += lambda * std::max(A(j, j), 1e-300);
            const Eigen::VectorXd step = Ad.ldlt().solve(-grad);
            q_new = q + step;
            if (step.allFinite() && residuals(q_new, r_new)) {
                ssr_new = r_new.squaredNorm();
                if (ssr_new < ssr) {
                    accepted = true;
                    lambda = std::max(lambda / 3.0, 1e-12);
                    break;
                }
            }
            lambda *= 4.0;
        }
        if (!accepted) {
            converged = true;  // no decrease possible at any damping: a minimum to working precision
            break;
        }
        const double drop = ssr - ssr_new;
        const double dq = (q_new - q).norm();
        q = q_new;
        r = r_new;
        ssr = ssr_new;
        // Small progress only counts as convergence on a lightly damped step.
        if (lambda <= 1e-2 && (drop <= 1e-13 * ssr || dq <= 1e-12 * (q.norm() + 1e-12))) {
            converged = true;
            ++it;
            break;
        }
    }

    const NdeModel best = make_model(q);
    double p[5] = {best.D, best.C_n, best.v_D, best.gamma_tilde, best.C_m};
    std::copy(p, p + 5, rep.params);
    rep.iterations = it;
    rep.converged = converged;
    rep.residuals.resize(N);
    for (int i = 0; i < N; ++i)
        rep.residuals[i] = variant_energy(spec.variant, s.levels[i].v, best) - s.levels[i].E;
    rep.ssr = 0.0;
    for (double x : rep.residuals) rep.ssr += x * x;
    const auto sf = sigma_fit(rep.residuals, N, k);
    rep.sigma_fit = sf.caption;
    rep.rmse = sf.rmse;

    // Covariance from the Gauss-Newton normal matrix at the solution.
    if (jacobian(q, J)) {
        const Eigen::MatrixXd A = J.transpose() * J;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        if (lu.isInvertible()) {
            const Eigen::MatrixXd cq = lu.inverse() * (ssr / (N - k));
            rep.covariance = Eigen::MatrixXd(k, k);
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b) rep.covariance(a, b) = cq(a, b) * scale[a] * scale[b];
            for (int a = 0; a < k; ++a) rep.std_errors[a] = std::sqrt(std::max(rep.covariance(a, a), 0.0));
        } else {
            rep.flags.push_back("singular_jacobian");
        }
    }
    if (!converged) rep.flags.push_back("not_converged");
    if (spec.variant == Variant::full_k5) {
        const bool wide = N < 6 || (rep.std_errors[4] > std::fabs(rep.params[4]));
        if (wide) rep.flags.push_back("wide_confidence_C_m");
    }
    return rep;
}

// k3, k4 and k5 on one window, each started from the previous solution.
inline std::vector<FitReport> model_ladder(const LevelSeries& levels, const FitSpec& base) {
    std::vector<FitReport> out;
    FitSpec s = base;
    s.variant = Variant::classic_k3;
    s.gamma_tilde.reset();
    s.C_m.reset();
    out.push_back(fit_nde(levels, s));
    for (Variant v : {Variant::improved_k4, Variant::full_k5}) {
        const FitReport& prev = out.back();
        FitSpec t = base;
        t.variant = v;
        if (!prev.flagged("too_few_levels")) {
            t.D = prev.params[0];
            t.C_n = prev.params[1];
            t.v_D = prev.params[2];
            t.gamma_tilde = prev.params[3];
            t.C_m = 0.0;
        }
        out.push_back(fit_nde(levels, t));
    }
    // Nested models: the sum of squares may not increase with added parameters.
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].n_levels == 0 || out[i].flagged("too_few_levels")) continue;
        if (out[i].ssr > out[i - 1].ssr * (1.0 + 1e-9) + 1e-300) out[i].flags.push_back("nested_violation");
    }
    return out;
}

}  // namespace ndekit
