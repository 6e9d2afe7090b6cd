#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ndekit/case_c.hpp"
#include "ndekit/errors.hpp"
#include "ndekit/units.hpp"

namespace ndekit {

// One `key = value [unit] [# source]` line.
struct ConfigEntry {
    std::string value;
    std::string unit;
    std::string source;
    std::string file;
    int line = 0;
};

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double parse_number(const std::string& text, const std::string& where) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(where + ": '" + text + "' is not a number");
    }
    if (used != text.size()) throw ConfigError(where + ": '" + text + "' is not a number");
    return x;
}

inline bool parse_bool(const std::string& text, const std::string& where) {
    if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
    if (text == "false" || text == "no" || text == "off" || text == "0") return false;
    throw ConfigError(where + ": expected true or false, got '" + text + "'");
}

// Flat key/value file. `include = path` pulls in another file (relative to
// the including one); later keys override earlier ones.
class KeyValueFile {
public:
    static KeyValueFile load(const std::string& path) {
        KeyValueFile kv;
        kv.load_into(path, 0);
        return kv;
    }
    static KeyValueFile parse(const std::string& text, const std::string& name = "<text>",
                              const std::string& base_dir = ".") {
        KeyValueFile kv;
        std::istringstream in(text);
        kv.parse_stream(in, name, base_dir, 0);
        return kv;
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    const ConfigEntry& at(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'");
        return it->second;
    }
    const std::map<std::string, ConfigEntry>& entries() const { return entries_; }
    const std::vector<std::string>& order() const { return order_; }

    static std::string where(const ConfigEntry& e) { return e.file + ":" + std::to_string(e.line); }

private:
    void load_into(const std::string& path, int depth) {
        if (depth > 8) throw ConfigError("include nesting too deep at " + path);
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        const auto dir = std::filesystem::path(path).parent_path().string();
        parse_stream(in, path, dir.empty() ? "." : dir, depth);
    }

    void parse_stream(std::istream& in, const std::string& name, const std::string& dir, int depth) {
        std::string raw;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            std::string source;
            const auto hash = raw.find('#');
            if (hash != std::string::npos) {
                source = trim(raw.substr(hash + 1));
                raw = raw.substr(0, hash);
            }
            const std::string text = trim(raw);
            if (text.empty()) continue;
            const auto eq = text.find('=');
            if (eq == std::string::npos)
                throw ConfigError(name + ":" + std::to_string(line) + ": expected 'key = value'");
            const std::string key = trim(text.substr(0, eq));
            std::string rest = trim(text.substr(eq + 1));
            if (key.empty()) throw ConfigError(name + ":" + std::to_string(line) + ": empty key");
            if (key == "include") {
                load_into((std::filesystem::path(dir) / rest).string(), depth + 1);
                continue;
            }
            ConfigEntry e;
            e.file = name;
            e.line = line;
            e.source = source;
            // A trailing token after a number is its unit.
            const auto sp = rest.find_first_of(" \t");
            if (sp != std::string::npos && rest.find(',') == std::string::npos) {
                e.value = trim(rest.substr(0, sp));
                e.unit = trim(rest.substr(sp + 1));
            } else {
                e.value = rest;
            }
            if (!entries_.count(key)) order_.push_back(key);
            entries_[key] = e;
        }
    }

    std::map<std::string, ConfigEntry> entries_;
    std::vector<std::string> order_;
};

// Species data: long-range coefficients, masses and atomic constants.
struct SpeciesData {
    std::string name;
    CaseCParams params;       // E_p = 0 here; placement is a run option
    double mass_a = 0.0;      // electron masses
    double mass_b = 0.0;
    double fine_structure = 0.0;  // hartree, E(p3/2) - E(p1/2)
    double transition_p32 = 0.0;  // hartree, ns - n'p3/2 excitation energy
    double transition_p12 = 0.0;
    double tau_p32 = 0.0;  // atomic time units
    double tau_p12 = 0.0;
    double reduced_dipole_p32 = 0.0;  // e a0
    std::map<std::string, std::string> sources;

    double mu() const { return reduced_mass(mass_a, mass_b); }
    double lambda_bar() const {
        if (!(transition_p32 > 0.0)) throw ConfigError("species: transition_p32 is needed for lambda_bar");
        return reduced_wavelength(transition_p32);
    }
};

inline double energy_value(const ConfigEntry& e, const std::string& key) {
    const double x = parse_number(e.value, KeyValueFile::where(e) + " " + key);
    if (e.unit.empty()) throw ConfigError(KeyValueFile::where(e) + ": energy '" + key + "' needs a unit");
    return to_hartree(x, parse_energy_unit(e.unit));
}

inline double coefficient_value(const ConfigEntry& e, const std::string& key) {
    if (!e.unit.empty() && e.unit != "au")
        throw ConfigError(KeyValueFile::where(e) + ": coefficient '" + key + "' must be given in au (hartree bohr^k)");
    return parse_number(e.value, KeyValueFile::where(e) + " " + key);
}

inline double mass_value(const ConfigEntry& e, const std::string& key) {
    const double x = parse_number(e.value, KeyValueFile::where(e) + " " + key);
    if (e.unit == "u" || e.unit == "amu") return amu_to_me(x);
    if (e.unit == "me" || e.unit == "au") return x;
    throw ConfigError(KeyValueFile::where(e) + ": mass '" + key + "' needs unit u or me");
}

inline double time_value(const ConfigEntry& e, const std::string& key) {
    const double x = parse_number(e.value, KeyValueFile::where(e) + " " + key);
    if (e.unit == "ns") return ns_to_au(x);
    if (e.unit == "s") return x / constants::atomic_time_in_s;
    if (e.unit == "au") return x;
    throw ConfigError(KeyValueFile::where(e) + ": time '" + key + "' needs unit ns, s or au");
}

inline SpeciesData species_from(const KeyValueFile& kv) {
    static const std::vector<std::string> known = {
        "name", "C3", "C6_sigma", "C6_pi", "C8_sigma_s", "C8_sigma_a", "C8_pi_s", "C8_pi_a",
        "fine_structure_splitting", "A", "epsilon", "atom_mass", "atom_mass_b", "transition_p32",
        "transition_p12", "tau_p32", "tau_p12", "reduced_dipole_p32"};
    for (const auto& k : kv.order())
        if (std::find(known.begin(), known.end(), k) == known.end())
            throw ConfigError(KeyValueFile::where(kv.at(k)) + ": unknown species key '" + k + "'");
    SpeciesData s;
    s.name = kv.has("name") ? kv.at("name").value : "species";
    auto& p = s.params;
    p.C3 = coefficient_value(kv.at("C3"), "C3");
    p.C6_sigma = coefficient_value(kv.at("C6_sigma"), "C6_sigma");
    p.C6_pi = coefficient_value(kv.at("C6_pi"), "C6_pi");
    for (auto [key, dst] : std::vector<std::pair<std::string, double*>>{{"C8_sigma_s", &p.C8_sigma_s},
                                                                       {"C8_sigma_a", &p.C8_sigma_a},
                                                                       {"C8_pi_s", &p.C8_pi_s},
                                                                       {"C8_pi_a", &p.C8_pi_a}})
        if (kv.has(key)) *dst = coefficient_value(kv.at(key), key);
    if (kv.has("A")) {
        p.A = energy_value(kv.at("A"), "A");
        s.fine_structure = 1.5 * p.A;
    } else {
        s.fine_structure = energy_value(kv.at("fine_structure_splitting"), "fine_structure_splitting");
        p.A = 2.0 / 3.0 * s.fine_structure;
    }
    if (kv.has("epsilon")) p.epsilon = parse_number(kv.at("epsilon").value, "epsilon");
    s.mass_a = mass_value(kv.at("atom_mass"), "atom_mass");
    s.mass_b = kv.has("atom_mass_b") ? mass_value(kv.at("atom_mass_b"), "atom_mass_b") : s.mass_a;
    if (kv.has("transition_p32")) s.transition_p32 = energy_value(kv.at("transition_p32"), "transition_p32");
    if (kv.has("transition_p12")) s.transition_p12 = energy_value(kv.at("transition_p12"), "transition_p12");
    if (kv.has("tau_p32")) s.tau_p32 = time_value(kv.at("tau_p32"), "tau_p32");
    if (kv.has("tau_p12")) s.tau_p12 = time_value(kv.at("tau_p12"), "tau_p12");
    if (kv.has("reduced_dipole_p32"))
        s.reduced_dipole_p32 = parse_number(kv.at("reduced_dipole_p32").value, "reduced_dipole_p32");
    for (const auto& [k, e] : kv.entries()) s.sources[k] = e.source;
    p.validate();
    return s;
}

inline SpeciesData load_species(const std::string& path) { return species_from(KeyValueFile::load(path)); }

// Settings of one CLI run. Every field serializes to one `key = value` line.
struct RunConfig {
    std::string species;  // path, relative to the config file
    std::string label = "0g-";
    std::string branch = "1";  // index or "all"
    std::string curve = "case_c";  // case_c or harmonic
    std::string reference = "p32";  // energy zero: p32, p12 or center
    bool include_epsilon = false;
    bool include_c8 = false;
    bool spin_spin = false;
    std::optional<int> rotation_J;
    bool retardation = false;
    bool flambaum = false;
    double R_min = 15.0;
    double grid_R_min = 15.0;
    double grid_R_max = 200.0;
    int grid_points = 200;
    double expand_R_min = 200.0;
    double expand_R_max = 2000.0;
    std::vector<int> expand_powers{3, 6};
    int n = 3;
    int m = 6;
    double R_plus_c = 35.0;
    std::vector<double> term_bindings{30.0, 10.0, 1.0};  // in `units`
    int v_min = 0;
    std::string v_max = "max";
    std::vector<std::string> fit_windows{"30", "10", "5", "2", "all"};  // D - E bounds in `units`
    int max_iterations = 100;
    std::string units = "cm-1";
    std::string out = "out";
    std::string levels_file;
    double harmonic_omega = 100.0;  // in `units`
    double harmonic_R_e = 10.0;
    double harmonic_half_width = 5.0;
    std::vector<double> retardation_R{0.0, 100.0, 200.0, 1000.0};
    double lambda_bar = 0.0;  // 0: from the species transition energy
    std::string base_dir = ".";  // not serialized

    static std::string fmt(double x) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    }
    template <class T>
    static std::string join(const std::vector<T>& v) {
        std::string s;
        for (const auto& x : v) {
            if (!s.empty()) s += ", ";
            if constexpr (std::is_same_v<T, double>) s += fmt(x);
            else if constexpr (std::is_same_v<T, int>) s += std::to_string(x);
            else s += x;
        }
        return s;
    }

    std::string to_text() const {
        std::ostringstream o;
        auto b = [](bool x) { return x ? "true" : "false"; };
        o << "species = " << species << "\n"
          << "label = " << label << "\n"
          << "branch = " << branch << "\n"
          << "curve = " << curve << "\n"
          << "reference = " << reference << "\n"
          << "include_epsilon = " << b(include_epsilon) << "\n"
          << "include_c8 = " << b(include_c8) << "\n"
          << "spin_spin = " << b(spin_spin) << "\n"
          << "rotation_J = " << (rotation_J ? std::to_string(*rotation_J) : "none") << "\n"
          << "retardation = " << b(retardation) << "\n"
          << "flambaum = " << b(flambaum) << "\n"
          << "R_min = " << fmt(R_min) << "\n"
          << "grid_R_min = " << fmt(grid_R_min) << "\n"
          << "grid_R_max = " << fmt(grid_R_max) << "\n"
          << "grid_points = " << grid_points << "\n"
          << "expand_R_min = " << fmt(expand_R_min) << "\n"
          << "expand_R_max = " << fmt(expand_R_max) << "\n"
          << "expand_powers = " << join(expand_powers) << "\n"
          << "n = " << n << "\n"
          << "m = " << m << "\n"
          << "R_plus_c = " << fmt(R_plus_c) << "\n"
          << "term_bindings = " << join(term_bindings) << "\n"
          << "v_min = " << v_min << "\n"
          << "v_max = " << v_max << "\n"
          << "fit_windows = " << join(fit_windows) << "\n"
          << "max_iterations = " << max_iterations << "\n"
          << "units = " << units << "\n"
          << "out = " << out << "\n"
          << "levels_file = " << levels_file << "\n"
          << "harmonic_omega = " << fmt(harmonic_omega) << "\n"
          << "harmonic_R_e = " << fmt(harmonic_R_e) << "\n"
          << "harmonic_half_width = " << fmt(harmonic_half_width) << "\n"
          << "retardation_R = " << join(retardation_R) << "\n"
          << "lambda_bar = " << fmt(lambda_bar) << "\n";
        return o.str();
    }

    bool operator==(const RunConfig& o) const { return to_text() == o.to_text(); }

    static RunConfig from(const KeyValueFile& kv, const std::string& base_dir = ".") {
        RunConfig c;
        c.base_dir = base_dir;
        for (const auto& key : kv.order()) {
            const auto& e = kv.at(key);
            const std::string where = KeyValueFile::where(e) + " " + key;
            // Values like "35 a0" keep their unit token; lists keep everything.
            const std::string& v = e.value;
            const std::string full = e.unit.empty() ? v : v + " " + e.unit;
            auto num = [&] { return parse_number(v, where); };
            auto integer = [&] {
                const double x = num();
                if (x != std::floor(x)) throw ConfigError(where + ": expected an integer");
                return static_cast<int>(x);
            };
            auto dlist = [&] {
                std::vector<double> out;
                for (const auto& s : split_list(full)) out.push_back(parse_number(s, where));
                return out;
            };
            if (key == "species") c.species = full;
            else if (key == "label") c.label = v;
            else if (key == "branch") c.branch = v;
            else if (key == "curve") c.curve = v;
            else if (key == "reference") c.reference = v;
            else if (key == "include_epsilon") c.include_epsilon = parse_bool(v, where);
            else if (key == "include_c8") c.include_c8 = parse_bool(v, where);
            else if (key == "spin_spin") c.spin_spin = parse_bool(v, where);
            else if (key == "rotation_J") c.rotation_J = (v == "none" || v.empty()) ? std::nullopt : std::optional<int>(integer());
            else if (key == "retardation") c.retardation = parse_bool(v, where);
            else if (key == "flambaum") c.flambaum = parse_bool(v, where);
            else if (key == "R_min") c.R_min = num();
            else if (key == "grid_R_min") c.grid_R_min = num();
            else if (key == "grid_R_max") c.grid_R_max = num();
            else if (key == "grid_points") c.grid_points = integer();
            else if (key == "expand_R_min") c.expand_R_min = num();
            else if (key == "expand_R_max") c.expand_R_max = num();
            else if (key == "expand_powers") {
                c.expand_powers.clear();
                for (double x : dlist()) c.expand_powers.push_back(static_cast<int>(x));
            } else if (key == "n") c.n = integer();
            else if (key == "m") c.m = integer();
            else if (key == "R_plus_c") c.R_plus_c = num();
            else if (key == "term_bindings") c.term_bindings = dlist();
            else if (key == "v_min") c.v_min = integer();
            else if (key == "v_max") c.v_max = v;
            else if (key == "fit_windows") c.fit_windows = split_list(full);
            else if (key == "max_iterations") c.max_iterations = integer();
            else if (key == "units") c.units = v;
            else if (key == "out") c.out = full;
            else if (key == "levels_file") c.levels_file = full;
            else if (key == "harmonic_omega") c.harmonic_omega = num();
            else if (key == "harmonic_R_e") c.harmonic_R_e = num();
            else if (key == "harmonic_half_width") c.harmonic_half_width = num();
            else if (key == "retardation_R") c.retardation_R = dlist();
            else if (key == "lambda_bar") c.lambda_bar = num();
            else throw ConfigError(KeyValueFile::where(e) + ": unknown config key '" + key + "'");
        }
        parse_energy_unit(c.units);
        if (c.curve != "case_c" && c.curve != "harmonic")
            throw ConfigError("curve must be case_c or harmonic, got '" + c.curve + "'");
        if (c.reference != "p32" && c.reference != "p12" && c.reference != "center")
            throw ConfigError("reference must be p32, p12 or center, got '" + c.reference + "'");
        return c;
    }

    static RunConfig load(const std::string& path) {
        const auto dir = std::filesystem::path(path).parent_path().string();
        return from(KeyValueFile::load(path), dir.empty() ? "." : dir);
    }
    static RunConfig parse(const std::string& text) { return from(KeyValueFile::parse(text)); }

    std::string species_path() const {
        if (species.empty()) throw ConfigError("config does not name a species file");
        const std::filesystem::path p(species);
        return p.is_absolute() ? species : (std::filesystem::path(base_dir) / p).string();
    }

    EnergyUnit energy_unit() const { return parse_energy_unit(units); }

    // E_p such that the chosen asymptote sits at zero energy.
    double E_p_for(const CaseCParams& p) const {
        if (reference == "p32") return -0.5 * p.A;
        if (reference == "p12") return p.A;
        return 0.0;
    }

    CaseCParams case_c_params(const SpeciesData& s) const {
        CaseCParams p = s.params;
        if (!include_c8) p.C8_sigma_s = p.C8_sigma_a = p.C8_pi_s = p.C8_pi_a = 0.0;
        p.E_p = E_p_for(p);
        return p;
    }

    CaseCOptions case_c_options(const SpeciesData& s) const {
        CaseCOptions o;
        o.include_epsilon = include_epsilon;
        o.include_spin_spin = spin_spin;
        o.rotation_J = rotation_J;
        o.include_retardation = retardation;
        if (retardation) o.lambda_bar = lambda_bar > 0.0 ? lambda_bar : s.lambda_bar();
        o.mu = s.mu();
        return o;
    }
};

}  // namespace ndekit
