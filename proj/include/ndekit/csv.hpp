#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ndekit/bkw.hpp"
#include "ndekit/config.hpp"
#include "ndekit/errors.hpp"
#include "ndekit/fit.hpp"
#include "ndekit/units.hpp"

namespace ndekit {

// 17 significant digits: enough for a lossless double round trip.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Level file layout:
//   # generated = <UTC time>        (optional)
//   # source = <curve description>
//   # unit = cm-1
//   # reference_hartree = <energy subtracted before conversion>
//   v,E
//   0,-71.89...
inline void write_levels_csv(std::ostream& o, const LevelSeries& s, EnergyUnit unit, bool timestamp) {
    if (timestamp) o << "# generated = " << utc_timestamp() << "\n";
    if (!s.source.empty()) o << "# source = " << s.source << "\n";
    o << "# unit = " << unit_name(unit) << "\n";
    o << "# reference_hartree = " << fmt17(s.reference) << "\n";
    o << "v,E\n";
    for (const auto& l : s.levels) o << l.v << "," << fmt17(from_hartree(l.E - s.reference, unit)) << "\n";
}

inline LevelSeries read_levels_csv(std::istream& in, const std::string& name = "<levels>") {
    LevelSeries s;
    bool have_unit = false, have_header = false;
    std::vector<std::pair<int, double>> raw;
    std::string line;
    int no = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw ValidationError(name + ":" + std::to_string(no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const std::string body = trim(t.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = trim(body.substr(0, eq)), val = trim(body.substr(eq + 1));
            try {
                if (key == "unit") {
                    s.unit = parse_energy_unit(val);
                    have_unit = true;
                } else if (key == "reference_hartree") {
                    s.reference = parse_number(val, "reference_hartree");
                } else if (key == "source") {
                    s.source = val;
                }
            } catch (const std::exception& e) {
                fail(e.what());
            }
            continue;
        }
        if (!have_header) {
            if (t != "v,E") fail("expected header 'v,E', got '" + t + "'");
            have_header = true;
            continue;
        }
        const auto cols = split_list(t);
        if (cols.size() != 2) fail("expected two columns v,E");
        double v = 0.0, E = 0.0;
        try {
            v = parse_number(cols[0], "v");
            E = parse_number(cols[1], "E");
        } catch (const std::exception& e) {
            fail(e.what());
        }
        if (v != std::floor(v) || v < 0) fail("v must be a non-negative integer");
        if (!std::isfinite(E)) fail("E must be finite");
        if (!raw.empty() && !(static_cast<int>(v) > raw.back().first)) fail("v must increase strictly");
        if (!raw.empty() && !(E > raw.back().second)) fail("E must increase strictly");
        raw.emplace_back(static_cast<int>(v), E);
    }
    if (!have_unit) throw ValidationError(name + ": missing '# unit = ...' header line");
    if (!have_header) throw ValidationError(name + ": missing 'v,E' header row");
    for (auto [v, E] : raw) s.levels.push_back({v, to_hartree(E, s.unit) + s.reference});
    return s;
}

inline LevelSeries load_levels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open level file '" + path + "'");
    return read_levels_csv(in, path);
}

// One row per (window, variant): the fitted parameters with their standard
// errors, the sum of squares and both sigma conventions.
inline void write_fit_csv(std::ostream& o, const std::vector<FitReport>& reports, EnergyUnit unit, bool timestamp) {
    if (timestamp) o << "# generated = " << utc_timestamp() << "\n";
    o << "# unit = " << unit_name(unit) << " (D; gamma_tilde per unit); C_n and C_m in au\n";
    o << "window,variant,N,k,D,D_err,C_n,C_n_err,v_D,v_D_err,gamma_tilde,gamma_tilde_err,C_m,C_m_err,"
         "ssr_hartree2,sigma_fit_MHz,rmse_MHz,iterations,converged,flags\n";
    for (const auto& r : reports) {
        std::string flags;
        for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
        o << r.window_label << "," << variant_name(r.variant) << "," << r.n_levels << "," << r.k << ","
          << fmt17(from_hartree(r.params[0], unit)) << "," << fmt17(from_hartree(r.std_errors[0], unit));
        for (int j = 1; j < 5; ++j) {
            // gamma_tilde is an inverse energy.
            const double f = j == 3 ? 1.0 / per_hartree(unit) : 1.0;
            o << "," << fmt17(r.params[j] * f) << "," << fmt17(r.std_errors[j] * f);
        }
        o << "," << fmt17(r.ssr) << "," << fmt17(r.sigma_fit_mhz()) << "," << fmt17(r.rmse_mhz()) << ","
          << r.iterations << "," << (r.converged ? "true" : "false") << "," << flags << "\n";
    }
}

// Human readable table of the same reports.
inline void write_fit_text(std::ostream& o, const std::vector<FitReport>& reports, EnergyUnit unit) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-8s %-12s %4s %16s %12s %12s %12s %14s %12s  %s\n", "window", "variant", "N",
                  ("D/" + unit_name(unit)).c_str(), "C_n", "v_D", "gamma~", "C_m", "sigma/MHz", "flags");
    o << buf;
    for (const auto& r : reports) {
        std::string flags;
        for (const auto& f : r.flags) flags += (flags.empty() ? "" : ",") + f;
        std::snprintf(buf, sizeof buf, "%-8s %-12s %4d %16.8g %12.6g %12.6g %12.5g %14.6g %12.5g  %s\n",
                      r.window_label.c_str(), variant_name(r.variant).c_str(), r.n_levels,
                      from_hartree(r.params[0], unit), r.params[1], r.params[2], r.params[3] / per_hartree(unit), r.params[4],
                      r.sigma_fit_mhz(), flags.c_str());
        o << buf;
    }
}

}  // namespace ndekit
