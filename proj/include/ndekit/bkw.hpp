#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ndekit/errors.hpp"
#include "ndekit/potential.hpp"
#include "ndekit/quadrature.hpp"
#include "ndekit/roots.hpp"
#include "ndekit/units.hpp"

namespace ndekit {

struct TurningPoints {
    double R_minus = 0.0;
    double R_plus = 0.0;
};

struct IntegralParts {
    double total = 0.0;
    double non_asymptotic = 0.0;  // R_minus .. R_c
    double asymptotic = 0.0;      // R_c .. R_plus
};

struct Level {
    int v = 0;
    double E = 0.0;  // hartree, absolute
};

// Ordered (v, E) pairs. Energies are stored in hartree; `unit` is the
// preferred unit for I/O and `reference` the energy subtracted on output.
struct LevelSeries {
    std::vector<Level> levels;
    EnergyUnit unit = EnergyUnit::inverse_cm;
    double reference = 0.0;
    std::string source;

    std::size_t size() const { return levels.size(); }
    bool empty() const { return levels.empty(); }

    void check() const {
        for (std::size_t i = 1; i < levels.size(); ++i)
            if (!(levels[i].v > levels[i - 1].v) || !(levels[i].E > levels[i - 1].E))
                throw ValidationError("LevelSeries: v and E must both increase strictly");
    }
};

struct BkwOptions {
    bool flambaum = false;  // phase correction 1/(2(n-2)) at threshold
    int n = 3;              // leading tail power, used with `flambaum`
    double rel_tol = 1e-12;
};

// A point below threshold, carried both as E and as D - E. When D is finite
// the binding value is authoritative; it stays exact for tiny D - E.
struct EnergyPoint {
    double E = 0.0;
    double b = 0.0;
};

// Semiclassical observables of a single-well curve by direct quadrature.
class BkwOracle {
public:
    BkwOracle(CurvePtr curve, double mu, BkwOptions opt = {}) : curve_(std::move(curve)), mu_(mu), opt_(opt) {
        if (!curve_) throw ValidationError("BkwOracle: null curve");
        if (!(mu_ > 0.0)) throw ValidationError("BkwOracle: reduced mass must be positive");
        D_ = curve_->asymptote();
        finite_D_ = std::isfinite(D_);
        build_grid();
        if (finite_D_) v_D_ = compute_v_D();
    }

    const PotentialCurve& curve() const { return *curve_; }
    double mu() const { return mu_; }
    double D() const { return D_; }
    double well_minimum_energy() const { return V_min_; }
    double well_minimum_position() const { return R_min_; }
    double well_depth() const { return finite_D_ ? b_max_ : std::numeric_limits<double>::infinity(); }
    bool dissociates() const { return finite_D_; }

    // v at the dissociation limit (non-integer).
    double v_D() const {
        if (!finite_D_) throw ValidationError("v_D: curve has no finite dissociation limit");
        return v_D_;
    }

    EnergyPoint at_energy(double E) const {
        return {E, finite_D_ ? D_ - E : std::numeric_limits<double>::infinity()};
    }
    EnergyPoint at_binding(double b) const {
        if (!finite_D_) throw ValidationError("at_binding: curve has no finite dissociation limit");
        return {D_ - b, b};
    }

    TurningPoints turning_points(double E) const { return turning_points(at_energy(E)); }
    TurningPoints turning_points(const EnergyPoint& p) const {
        check_range(p);
        auto ex = [&](double r) { return excess(r, p); };
        // Crossings seen on the sample grid; more than two means several wells.
        int crossings = 0;
        double prev = ex(grid_[0]);
        for (std::size_t i = 1; i < grid_.size(); ++i) {
            const double cur = ex(grid_[i]);
            if ((cur >= 0.0) != (prev >= 0.0)) ++crossings;
            prev = cur;
        }
        if (crossings > 2)
            throw ValidationError("turning_points: more than two roots in the validity range (not a single well)");

        TurningPoints tp;
        tp.R_minus = inner_turning_point(p);
        if (!(ex(R_min_) > 0.0)) throw ValidationError("energy must lie above the well minimum");
        std::size_t k = i_min_;
        while (k < grid_.size() && grid_[k] <= R_min_) ++k;
        double lo = R_min_;
        while (k < grid_.size() && ex(grid_[k]) > 0.0) lo = grid_[k++];
        if (k < grid_.size()) {
            tp.R_plus = refine(ex, lo, grid_[k]);
        } else {
            const double rmax = curve_->validity().r_max;
            double hi = lo;
            while (true) {
                hi = std::min(hi * 1.5, rmax);
                if (ex(hi) <= 0.0) break;
                if (hi >= rmax || !std::isfinite(hi))
                    throw ValidationError("turning_points: outer turning point lies outside the validity range");
                lo = hi;
            }
            tp.R_plus = refine(ex, lo, hi);
        }
        return tp;
    }

    double vibrational_index(double E) const { return vibrational_index(at_energy(E)); }
    double vibrational_index(const EnergyPoint& p) const {
        const auto tp = turning_points(p);
        const double d = tp.R_plus - tp.R_minus;
        auto f = [&](double th) {
            const double s = std::sin(th);
            const double r = tp.R_minus + d * s * s;
            return std::sqrt(std::max(excess(r, p), 0.0)) * d * std::sin(2.0 * th);
        };
        const double integral = checked(integrate(f, 0.0, 0.5 * constants::pi, opt_.rel_tol), "vibrational_index");
        return std::sqrt(2.0 * mu_) / constants::pi * integral - 0.5 - flambaum_shift();
    }

    // dv/dE by the phase-integral derivative.
    double dv_dE(const EnergyPoint& p) const { return std::sqrt(2.0 * mu_) / (2.0 * constants::pi) * integral_I_l(p, 0); }

    double integral_I_l(double E, int l) const { return integral_I_l(at_energy(E), l); }
    double integral_I_l(const EnergyPoint& p, int l) const {
        const auto tp = turning_points(p);
        return singular_integral(p, l, tp.R_minus, tp.R_plus, true, true);
    }

    IntegralParts integral_I_l_split(const EnergyPoint& p, int l, double R_c) const {
        const auto tp = turning_points(p);
        if (!(R_c > tp.R_minus && R_c < tp.R_plus))
            throw ValidationError("integral_I_l: split point must lie between the turning points");
        IntegralParts out;
        out.non_asymptotic = singular_integral(p, l, tp.R_minus, R_c, true, false);
        out.asymptotic = singular_integral(p, l, R_c, tp.R_plus, false, true);
        out.total = out.non_asymptotic + out.asymptotic;
        return out;
    }

    // Integral of R^-l (D - V)^(-1/2) from the inner turning point at D to R_c.
    double nonasymptotic_at_dissociation(int l, double R_c) const {
        const auto p = at_binding(0.0);
        const double r_in = inner_turning_point(p);
        if (!(R_c > r_in)) throw ValidationError("nonasymptotic_at_dissociation: R_c inside the inner wall");
        return singular_integral(p, l, r_in, R_c, true, false);
    }

    double rotational_constant(const EnergyPoint& p) const {
        return integral_I_l(p, 2) / integral_I_l(p, 0) / (2.0 * mu_);
    }
    double rotational_constant(double E) const { return rotational_constant(at_energy(E)); }

    double kinetic_energy(const EnergyPoint& p, int v) const {
        const double vi = vibrational_index(p);
        if (std::fabs(vi - v) > 0.5)
            throw ValidationError("kinetic_energy: v = " + std::to_string(v) + " does not match v(E) = " +
                                  std::to_string(vi));
        return constants::pi / std::sqrt(2.0 * mu_) * (v + 0.5) / integral_I_l(p, 0);
    }
    double kinetic_energy(double E, int v) const { return kinetic_energy(at_energy(E), v); }

    int max_level() const {
        if (!finite_D_) return std::numeric_limits<int>::max();
        return static_cast<int>(std::floor(v_D_));
    }

    // Binding energy D - E of level v (finite D only).
    double level_binding(int v) const {
        if (!finite_D_) throw ValidationError("level_binding: curve has no finite dissociation limit");
        auto g = [&](double b) { return vibrational_index(at_binding(b)) - v; };
        // v(D) = v_D and v(V_min) = -1/2 are known, so the bracket costs nothing.
        return bracketed_root(g, 0.0, b_max_, v_D_ - v, -0.5 - flambaum_shift() - v, 1e-17, 2e-10);
    }

    double level_energy(int v) const {
        if (v < 0) throw ValidationError("level_energies: v must be non-negative");
        if (finite_D_) {
            if (v > max_level())
                throw ValidationError("level_energies: v = " + std::to_string(v) +
                                      " exceeds the maximum supported v = " + std::to_string(max_level()));
            return D_ - level_binding(v);
        }
        auto g = [&](double E) { return vibrational_index(E) - v; };
        const double top = confined_top();
        const double lo = V_min_ + 1e-15 * std::max(1.0, std::fabs(V_min_));
        const double fhi = g(top);
        if (fhi < 0.0) throw ValidationError("level_energies: level lies above the validity range");
        return bracketed_root(g, lo, top, -0.5 - flambaum_shift() - v, fhi, 1e-17, 2e-10);
    }

    LevelSeries level_energies(int v_min, int v_max) const {
        LevelSeries out;
        out.reference = finite_D_ ? D_ : 0.0;
        out.source = curve_->describe();
        if (v_max < v_min) return out;
        if (v_min < 0) throw ValidationError("level_energies: v must be non-negative");
        if (finite_D_ && v_max > max_level())
            throw ValidationError("level_energies: requested v = " + std::to_string(v_max) +
                                  " exceeds the maximum supported v = " + std::to_string(max_level()));
        for (int v = v_min; v <= v_max; ++v) out.levels.push_back({v, level_energy(v)});
        return out;
    }

private:
    double flambaum_shift() const { return opt_.flambaum ? 1.0 / (2.0 * (opt_.n - 2)) : 0.0; }

    double excess(double r, const EnergyPoint& p) const {
        return finite_D_ ? curve_->binding(r) - p.b : p.E - curve_->evaluate(r);
    }

    static double checked(const QuadratureResult& q, const char* what) {
        if (!std::isfinite(q.value) || q.error > 1e-9 * std::fabs(q.value) + 1e-300)
            throw NumericError(std::string(what) + ": quadrature did not converge (estimate " +
                               std::to_string(q.value) + ", error " + std::to_string(q.error) + ")");
        return q.value;
    }

    void check_range(const EnergyPoint& p) const {
        if (finite_D_) {
            if (!(p.b > 0.0)) throw ValidationError("energy must lie strictly below the dissociation limit");
            if (!(p.b < b_max_)) throw ValidationError("energy must lie above the well minimum");
        } else {
            if (!(p.E > V_min_)) throw ValidationError("energy must lie above the well minimum");
        }
    }

    template <class F>
    static double refine(F& ex, double a, double b) {
        const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(a), std::fabs(b));
        return bracketed_root(ex, a, b, tol);
    }

    double inner_turning_point(const EnergyPoint& p) const {
        auto ex = [&](double r) { return excess(r, p); };
        if (!(ex(R_min_) > 0.0)) throw ValidationError("energy must lie above the well minimum");
        std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i_min_);
        while (j >= 0 && grid_[j] >= R_min_) --j;
        double hi = R_min_;
        while (j >= 0 && ex(grid_[j]) > 0.0) hi = grid_[j--];
        if (j < 0) throw ValidationError("inner turning point lies outside the validity range");
        return refine(ex, grid_[j], hi);
    }

    // Integral of R^-l / sqrt(E - V) on [a, b]; flags mark the ends that are
    // turning points. sin^2 maps absorb the square-root singularities, and a
    // local linear model replaces E - V within 1e-8 of a turning point where
    // rounding in E - V would otherwise dominate.
    double singular_integral(const EnergyPoint& p, int l, double a, double b, bool tp_a, bool tp_b) const {
        const double d = b - a;
        auto slope_at = [&](double r) {
            const double h = 1e-5 * r;
            return std::fabs(excess(r + h, p) - excess(r - h, p)) / (2.0 * h);
        };
        const double sa = tp_a ? slope_at(a) : 0.0;
        const double sb = tp_b ? slope_at(b) : 0.0;
        const double cut = 1e-8;
        auto rpow = [&](double r) { return l == 0 ? 1.0 : std::pow(r, -l); };
        double value = 0.0;
        if (tp_a && tp_b) {
            auto f = [&](double th) {
                const double s = std::sin(th), c = std::cos(th);
                const double s2 = s * s, c2 = c * c;
                const double r = a + d * s2;
                double e;
                if (s2 < cut) e = sa * d * s2;
                else if (c2 < cut) e = sb * d * c2;
                else e = excess(r, p);
                return rpow(r) * 2.0 * d * s * c / std::sqrt(e);
            };
            value = checked(integrate(f, 0.0, 0.5 * constants::pi, opt_.rel_tol), "integral_I_l");
        } else if (tp_a) {
            auto f = [&](double th) {
                const double s = std::sin(th), c = std::cos(th);
                const double s2 = s * s;
                const double r = a + d * s2;
                const double e = s2 < cut ? sa * d * s2 : excess(r, p);
                return rpow(r) * 2.0 * d * s * c / std::sqrt(e);
            };
            value = checked(integrate(f, 0.0, 0.5 * constants::pi, opt_.rel_tol), "integral_I_l");
        } else if (tp_b) {
            auto f = [&](double th) {
                const double s = std::sin(th), c = std::cos(th);
                const double c2 = c * c;
                const double r = b - d * c2;
                const double e = c2 < cut ? sb * d * c2 : excess(r, p);
                return rpow(r) * 2.0 * d * s * c / std::sqrt(e);
            };
            value = checked(integrate(f, 0.0, 0.5 * constants::pi, opt_.rel_tol), "integral_I_l");
        } else {
            auto f = [&](double r) { return rpow(r) / std::sqrt(excess(r, p)); };
            value = checked(integrate(f, a, b, opt_.rel_tol), "integral_I_l");
        }
        return value;
    }

    void build_grid() {
        const auto range = curve_->validity();
        const double lo = range.r_min;
        double hi = std::isfinite(range.r_max) ? range.r_max : std::max(100.0 * lo, 50.0);
        const int N = 2400;
        auto depth_of = [&](double r) { return finite_D_ ? curve_->binding(r) : -curve_->evaluate(r); };
        for (int pass = 0; pass < 12; ++pass) {
            grid_.resize(N);
            const bool log_grid = lo > 0.0 && hi / lo > 20.0;
            for (int i = 0; i < N; ++i) {
                const double t = double(i) / (N - 1);
                grid_[i] = log_grid ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
            }
            grid_.back() = hi;
            std::size_t best = 0;
            double best_depth = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < grid_.size(); ++i) {
                const double dd = depth_of(grid_[i]);
                if (!std::isfinite(dd)) throw NumericError("curve evaluates to a non-finite value at R = " +
                                                           std::to_string(grid_[i]));
                if (dd > best_depth) {
                    best_depth = dd;
                    best = i;
                }
            }
            i_min_ = best;
            // Stop once the deepest point is well inside the sampled span.
            const bool interior = best + N / 10 < grid_.size();
            if (interior || std::isfinite(range.r_max)) break;
            hi *= 4.0;
        }
        const std::size_t a = i_min_ == 0 ? 0 : i_min_ - 1;
        const std::size_t b = std::min(i_min_ + 1, grid_.size() - 1);
        auto neg = [&](double r) { return -depth_of(r); };
        auto m = golden_minimum(neg, grid_[a], grid_[b], 1e-10 * grid_[b]);
        R_min_ = m.first;
        if (finite_D_) {
            b_max_ = -m.second;
            V_min_ = D_ - b_max_;
            if (!(b_max_ > 0.0)) throw ValidationError("curve has no bound well below its asymptote");
        } else {
            V_min_ = curve_->evaluate(R_min_);
        }
    }

    double confined_top() const {
        const auto range = curve_->validity();
        return std::min(curve_->evaluate(range.r_min), curve_->evaluate(range.r_max));
    }

    double compute_v_D() const {
        const auto p = at_binding(0.0);
        const double r_in = inner_turning_point(p);
        const double r_s = std::max(2.0 * R_min_, 1.5 * r_in);
        const double d = r_s - r_in;
        auto f_in = [&](double th) {
            const double s = std::sin(th);
            const double r = r_in + d * s * s;
            return std::sqrt(std::max(curve_->binding(r), 0.0)) * d * std::sin(2.0 * th);
        };
        auto f_out = [&](double t) {
            const double r = r_s / (t * t);
            return std::sqrt(std::max(curve_->binding(r), 0.0)) * 2.0 * r_s / (t * t * t);
        };
        const double inner = checked(integrate(f_in, 0.0, 0.5 * constants::pi, opt_.rel_tol), "v_D");
        const double outer = checked(integrate(f_out, 0.0, 1.0, opt_.rel_tol), "v_D");
        return std::sqrt(2.0 * mu_) / constants::pi * (inner + outer) - 0.5 - flambaum_shift();
    }

    CurvePtr curve_;
    double mu_;
    BkwOptions opt_;
    double D_ = 0.0;
    bool finite_D_ = false;
    double v_D_ = 0.0;
    std::vector<double> grid_;
    std::size_t i_min_ = 0;
    double R_min_ = 0.0, V_min_ = 0.0, b_max_ = 0.0;
};

}  // namespace ndekit
