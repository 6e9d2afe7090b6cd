#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ndekit/bkw.hpp"
#include "ndekit/case_c.hpp"
#include "ndekit/config.hpp"
#include "ndekit/csv.hpp"
#include "ndekit/expansion.hpp"
#include "ndekit/fit.hpp"
#include "ndekit/terms.hpp"

namespace ndekit {

// Run-wide switches that do not belong in the config file.
struct RunSwitches {
    bool timestamp = true;
    std::ostream* log = nullptr;  // human readable summary; may be null
};

namespace cmd {

inline std::ofstream open_output(const RunConfig& cfg, const std::string& name, std::vector<std::string>& written) {
    std::filesystem::create_directories(cfg.out);
    const std::string path = (std::filesystem::path(cfg.out) / name).string();
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write output file '" + path + "'");
    written.push_back(path);
    return f;
}

inline std::vector<std::pair<SymmetryLabel, int>> selected_branches(const RunConfig& cfg) {
    std::vector<SymmetryLabel> labels;
    if (cfg.label == "all") labels = SymmetryLabel::all();
    else labels.push_back(SymmetryLabel::parse(cfg.label));
    std::vector<std::pair<SymmetryLabel, int>> out;
    for (const auto& l : labels) {
        if (cfg.branch == "all") {
            for (int b = 0; b < l.dim(); ++b) out.emplace_back(l, b);
        } else {
            const double b = parse_number(cfg.branch, "branch");
            if (b != std::floor(b) || b < 0 || b >= l.dim())
                throw ConfigError("branch '" + cfg.branch + "' out of range for " + l.str() + " (0.." +
                                  std::to_string(l.dim() - 1) + ")");
            out.emplace_back(l, static_cast<int>(b));
        }
    }
    return out;
}

inline CurvePtr case_c_curve(const RunConfig& cfg, const SpeciesData& s, const SymmetryLabel& l, int b) {
    return adiabatic_branch(l, b, cfg.case_c_params(s), cfg.case_c_options(s),
                            {cfg.R_min, std::numeric_limits<double>::infinity()});
}

// The single curve a level or term run works on.
inline CurvePtr single_curve(const RunConfig& cfg, const SpeciesData& s) {
    if (cfg.curve == "harmonic") {
        const double w = to_hartree(cfg.harmonic_omega, cfg.energy_unit());
        return std::make_shared<HarmonicCurve>(s.mu(), w, cfg.harmonic_R_e, cfg.harmonic_half_width);
    }
    const auto sel = selected_branches(cfg);
    if (sel.size() != 1) throw ConfigError("this command needs a single label and branch, not 'all'");
    return case_c_curve(cfg, s, sel[0].first, sel[0].second);
}

inline BkwOptions bkw_options(const RunConfig& cfg) {
    BkwOptions o;
    o.flambaum = cfg.flambaum;
    o.n = cfg.n;
    return o;
}

inline MultipoleTail fitted_tail(const RunConfig& cfg, const PotentialCurve& c, std::vector<int> powers) {
    return expand_branch(c, powers, cfg.expand_R_min, cfg.expand_R_max).tail;
}

}  // namespace cmd

// One CSV per branch: R (bohr), E relative to the configured energy zero.
inline std::vector<std::string> cmd_curve(const RunConfig& cfg, const RunSwitches& sw) {
    if (cfg.grid_points < 1) throw ValidationError("grid_points must be at least 1");
    if (!(cfg.grid_R_min > 0.0) || cfg.grid_R_max < cfg.grid_R_min)
        throw ValidationError("need 0 < grid_R_min <= grid_R_max");
    const auto s = load_species(cfg.species_path());
    const auto unit = cfg.energy_unit();
    std::vector<std::string> written;
    for (const auto& [label, b] : cmd::selected_branches(cfg)) {
        const auto c = cmd::case_c_curve(cfg, s, label, b);
        auto f = cmd::open_output(cfg, "curve_" + label.str() + "_" + std::to_string(b) + ".csv", written);
        if (sw.timestamp) f << "# generated = " << utc_timestamp() << "\n";
        f << "# curve = " << c->describe() << "\n";
        f << "# unit = " << unit_name(unit) << "\n";
        f << "# asymptote = " << fmt17(from_hartree(c->asymptote(), unit)) << "\n";
        f << "R,E\n";
        for (int i = 0; i < cfg.grid_points; ++i) {
            const double r = cfg.grid_points == 1
                                 ? cfg.grid_R_min
                                 : cfg.grid_R_min + (cfg.grid_R_max - cfg.grid_R_min) * i / (cfg.grid_points - 1);
            f << fmt17(r) << "," << fmt17(from_hartree(c->evaluate(r), unit)) << "\n";
        }
    }
    if (sw.log) *sw.log << "wrote " << written.size() << " curve files to " << cfg.out << "\n";
    return written;
}

// Effective tail coefficients of each selected branch over the expand window.
inline std::vector<std::string> cmd_expand(const RunConfig& cfg, const RunSwitches& sw) {
    const auto s = load_species(cfg.species_path());
    const auto unit = cfg.energy_unit();
    std::vector<std::string> written;
    auto f = cmd::open_output(cfg, "expand.csv", written);
    if (sw.timestamp) f << "# generated = " << utc_timestamp() << "\n";
    f << "# window = " << fmt17(cfg.expand_R_min) << ".." << fmt17(cfg.expand_R_max) << " bohr; C_k in au\n";
    f << "label,branch,asymptote_" << unit_name(unit);
    for (int k : cfg.expand_powers) f << ",C" << k;
    f << ",rms_rel_residual,max_rel_residual,condition\n";
    std::optional<MultipoleTail> first;
    auto row = [&](const std::string& name, const std::string& branch, const ExpansionResult& r) {
        f << name << "," << branch << "," << fmt17(from_hartree(r.tail.D, unit));
        for (const auto& t : r.tail.terms) f << "," << fmt17(t.second);
        f << "," << fmt17(r.rms_relative_residual) << "," << fmt17(r.max_relative_residual) << ","
          << fmt17(r.condition) << "\n";
        if (sw.log) {
            *sw.log << name << " " << branch;
            for (const auto& t : r.tail.terms) *sw.log << "  C" << t.first << " = " << t.second;
            *sw.log << "\n";
        }
    };
    for (const auto& [label, b] : cmd::selected_branches(cfg)) {
        const auto c = cmd::case_c_curve(cfg, s, label, b);
        const auto r = expand_branch(*c, cfg.expand_powers, cfg.expand_R_min, cfg.expand_R_max);
        if (!first) first = r.tail;
        row(label.str(), std::to_string(b), r);
    }
    // Self test: a pure tail built from the first row must be recovered.
    if (first) {
        const TailCurve tail(*first);
        row("selftest", "-", expand_branch(tail, cfg.expand_powers, cfg.expand_R_min, cfg.expand_R_max));
    }
    return written;
}

inline LevelSeries run_levels(const RunConfig& cfg, const SpeciesData& s) {
    const auto c = cmd::single_curve(cfg, s);
    const BkwOracle oracle(c, s.mu(), cmd::bkw_options(cfg));
    int v_max = 0;
    if (cfg.v_max == "max") {
        if (!oracle.dissociates()) throw ConfigError("v_max = max needs a dissociating curve; give an integer");
        v_max = oracle.max_level();
    } else {
        const double x = parse_number(cfg.v_max, "v_max");
        if (x != std::floor(x)) throw ConfigError("v_max must be an integer or 'max'");
        v_max = static_cast<int>(x);
    }
    return oracle.level_energies(cfg.v_min, v_max);
}

inline std::vector<std::string> cmd_levels(const RunConfig& cfg, const RunSwitches& sw) {
    const auto s = load_species(cfg.species_path());
    const auto levels = run_levels(cfg, s);
    std::vector<std::string> written;
    auto f = cmd::open_output(cfg, "levels.csv", written);
    write_levels_csv(f, levels, cfg.energy_unit(), sw.timestamp);
    if (sw.log) {
        *sw.log << levels.size() << " levels";
        if (!levels.empty()) {
            const auto u = cfg.energy_unit();
            *sw.log << ", v = " << levels.levels.front().v << " at "
                    << from_hartree(levels.levels.front().E - levels.reference, u) << " to v = "
                    << levels.levels.back().v << " at " << from_hartree(levels.levels.back().E - levels.reference, u)
                    << " " << unit_name(u);
        }
        *sw.log << "\n";
    }
    return written;
}

// Table-shaped budget: one row per term, one column per D - E.
inline std::vector<std::string> cmd_terms(const RunConfig& cfg, const RunSwitches& sw) {
    const auto s = load_species(cfg.species_path());
    const auto c = cmd::single_curve(cfg, s);
    const BkwOracle oracle(c, s.mu(), cmd::bkw_options(cfg));
    const auto tail = cmd::fitted_tail(cfg, *c, {cfg.n, cfg.m});
    const auto unit = cfg.energy_unit();
    std::vector<double> b;
    for (double x : cfg.term_bindings) b.push_back(to_hartree(x, unit));
    const auto budget = term_budget(oracle, cfg.n, cfg.m, tail.coefficient(cfg.n), tail.coefficient(cfg.m),
                                    cfg.R_plus_c, b);
    std::vector<std::string> written;
    auto f = cmd::open_output(cfg, "terms.csv", written);
    if (sw.timestamp) f << "# generated = " << utc_timestamp() << "\n";
    f << "# C" << cfg.n << " = " << fmt17(budget.C_n) << " au; C" << cfg.m << " = " << fmt17(budget.C_m)
      << " au; R_plus_c = " << fmt17(cfg.R_plus_c) << " bohr\n";
    f << "# gamma_tilde = " << fmt17(budget.gamma_tilde / per_hartree(unit)) << " per " << unit_name(unit) << "\n";
    f << "term";
    for (double x : cfg.term_bindings) f << "," << fmt17(x);
    f << "\n";
    auto put = [&](const char* name, auto get) {
        f << name;
        for (const auto& col : budget.columns) f << "," << fmt17(get(col));
        f << "\n";
    };
    put("leading", [](const TermColumn& t) { return t.leading; });
    put("na_at_D", [](const TermColumn& t) { return t.na_at_D; });
    put("na_at_E", [](const TermColumn& t) { return t.na_at_E; });
    put("gamma_beta", [](const TermColumn& t) { return t.gamma_beta; });
    put("gamma_cm", [](const TermColumn& t) { return t.gamma_cm; });
    put("gamma_delta", [](const TermColumn& t) { return t.gamma_delta; });
    put("delta_term", [](const TermColumn& t) { return t.delta_term; });
    put("order_yn", [](const TermColumn& t) { return t.order_yn; });
    put("model_sum", [](const TermColumn& t) { return t.model_sum; });
    put("oracle", [](const TermColumn& t) { return t.oracle; });
    put("alpha_c", [](const TermColumn& t) { return t.point.alpha_c; });
    if (sw.log) {
        char line[256];
        for (const auto& col : budget.columns) {
            std::snprintf(line, sizeof line,
                          "D-E = %-8g leading %9.4f  na(D) %8.4f  g_beta %8.4f  g_Cm %8.4f  delta %8.4f  "
                          "model %9.4f  oracle %9.4f\n",
                          from_hartree(col.binding, unit), col.leading, col.na_at_D, col.gamma_beta, col.gamma_cm,
                          col.delta_term, col.model_sum, col.oracle);
            *sw.log << line;
        }
    }
    return written;
}

inline std::vector<std::string> cmd_fit(const RunConfig& cfg, const RunSwitches& sw,
                                        const std::string& levels_override = "") {
    const auto s = load_species(cfg.species_path());
    std::string path = levels_override.empty() ? cfg.levels_file : levels_override;
    if (path.empty()) throw ConfigError("fit needs a level file: set levels_file or pass --levels");
    if (levels_override.empty() && !std::filesystem::path(path).is_absolute())
        path = (std::filesystem::path(cfg.base_dir) / path).string();
    const auto levels = load_levels_csv(path);
    const auto unit = cfg.energy_unit();
    std::vector<FitReport> all;
    for (const auto& w : cfg.fit_windows) {
        FitSpec spec;
        spec.n = cfg.n;
        spec.m = cfg.m;
        spec.mu = s.mu();
        spec.max_iterations = cfg.max_iterations;
        spec.window_label = w;
        spec.window = w == "all" ? std::numeric_limits<double>::infinity()
                                 : to_hartree(parse_number(w, "fit_windows"), unit);
        for (auto& r : model_ladder(levels, spec)) all.push_back(std::move(r));
    }
    std::vector<std::string> written;
    {
        auto f = cmd::open_output(cfg, "fit.csv", written);
        write_fit_csv(f, all, unit, sw.timestamp);
    }
    {
        auto f = cmd::open_output(cfg, "fit.txt", written);
        write_fit_text(f, all, unit);
    }
    if (sw.log) write_fit_text(*sw.log, all, unit);
    return written;
}

struct LifetimeInput {
    std::optional<double> C3;             // au
    std::optional<double> wavelength_nm;  // vacuum wavelength
    std::optional<double> frequency;      // transition energy in the run unit
};

inline std::vector<std::string> cmd_lifetime(const RunConfig& cfg, const RunSwitches& sw, const LifetimeInput& in) {
    std::optional<SpeciesData> s;
    if (!cfg.species.empty()) s = load_species(cfg.species_path());
    const double C3 = in.C3 ? *in.C3 : (s ? s->params.C3 : 0.0);
    if (!(C3 > 0.0)) throw ConfigError("lifetime needs C3 (--C3 or a species file)");
    double omega = 0.0;
    if (in.wavelength_nm) {
        if (!(*in.wavelength_nm > 0.0)) throw ValidationError("wavelength must be positive");
        omega = 2.0 * constants::pi * constants::speed_of_light_au * constants::bohr_in_m / (*in.wavelength_nm * 1e-9);
    } else if (in.frequency) {
        omega = to_hartree(*in.frequency, cfg.energy_unit());
    } else if (s && s->transition_p32 > 0.0) {
        omega = s->transition_p32;
    } else {
        throw ConfigError("lifetime needs a transition: --wavelength-nm, --frequency or transition_p32");
    }
    const double tau = lifetime_from_C3(C3, omega);
    std::vector<std::string> written;
    auto f = cmd::open_output(cfg, "lifetime.csv", written);
    if (sw.timestamp) f << "# generated = " << utc_timestamp() << "\n";
    f << "quantity,value,unit\n";
    f << "C3," << fmt17(C3) << ",au\n";
    f << "transition," << fmt17(hartree_to_cm(omega)) << ",cm-1\n";
    f << "lambda_bar," << fmt17(reduced_wavelength(omega)) << ",bohr\n";
    f << "tau," << fmt17(au_to_ns(tau)) << ",ns\n";
    std::optional<double> eps;
    if (s && s->tau_p32 > 0.0 && s->tau_p12 > 0.0 && s->transition_p32 > 0.0 && s->transition_p12 > 0.0) {
        eps = epsilon_from_lifetimes(s->tau_p32, s->tau_p12, s->transition_p32, s->transition_p12);
        f << "epsilon_from_lifetimes," << fmt17(*eps) << ",1\n";
    }
    if (sw.log) {
        *sw.log << "tau = " << au_to_ns(tau) << " ns for C3 = " << C3 << " au at " << hartree_to_cm(omega)
                << " cm-1\n";
        if (eps) *sw.log << "epsilon from lifetimes = " << *eps << "\n";
    }
    return written;
}

struct RetardationInput {
    std::vector<double> R;              // bohr; empty: config list
    std::optional<double> lambda_bar;   // bohr
};

inline std::vector<std::string> cmd_retardation(const RunConfig& cfg, const RunSwitches& sw,
                                                const RetardationInput& in) {
    double lb = 0.0;
    if (in.lambda_bar) lb = *in.lambda_bar;
    else if (cfg.lambda_bar > 0.0) lb = cfg.lambda_bar;
    else if (!cfg.species.empty()) lb = load_species(cfg.species_path()).lambda_bar();
    if (!(lb > 0.0)) throw ConfigError("retardation needs lambda_bar (--lambda-bar, config or species transition)");
    const auto& R = in.R.empty() ? cfg.retardation_R : in.R;
    std::vector<std::string> written;
    auto f = cmd::open_output(cfg, "retardation.csv", written);
    if (sw.timestamp) f << "# generated = " << utc_timestamp() << "\n";
    f << "# lambda_bar = " << fmt17(lb) << " bohr\n";
    f << "R,R_over_lambda_bar,f_sigma,f_pi\n";
    for (double r : R) {
        if (!(r >= 0.0)) throw ValidationError("retardation: R must be non-negative");
        const auto [fs, fp] = retardation_factors(r, lb);
        f << fmt17(r) << "," << fmt17(r / lb) << "," << fmt17(fs) << "," << fmt17(fp) << "\n";
        if (sw.log) *sw.log << "R = " << r << "  f_sigma = " << fs << "  f_pi = " << fp << "\n";
    }
    return written;
}

}  // namespace ndekit
