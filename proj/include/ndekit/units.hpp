#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ndekit/errors.hpp"

namespace ndekit {

// Internal unit system: hartree, bohr, electron mass, hbar = 1.
// All numbers below come from CODATA 2018; data/constants_codata2018.txt mirrors them.
namespace constants {
inline constexpr const char* table_version = "CODATA 2018";
inline constexpr double hartree_in_inverse_cm = 219474.6313632;
inline constexpr double hartree_in_mhz = 6.579683920502e9;
inline constexpr double hartree_in_kelvin = 315775.02480407;
inline constexpr double atomic_mass_unit_in_me = 1822.888486209;
inline constexpr double speed_of_light_au = 137.035999084;
inline constexpr double bohr_in_m = 5.29177210903e-11;
inline constexpr double atomic_time_in_s = 2.4188843265857e-17;
inline constexpr double speed_of_light_si = 299792458.0;
inline constexpr double pi = 3.14159265358979323846;
}  // namespace constants

enum class EnergyUnit { hartree, inverse_cm, mhz, kelvin };

inline EnergyUnit parse_energy_unit(std::string_view s) {
    if (s == "hartree" || s == "au" || s == "Eh") return EnergyUnit::hartree;
    if (s == "cm-1" || s == "cm^-1" || s == "1/cm") return EnergyUnit::inverse_cm;
    if (s == "MHz" || s == "mhz") return EnergyUnit::mhz;
    if (s == "K" || s == "kelvin") return EnergyUnit::kelvin;
    throw ConfigError("unknown energy unit '" + std::string(s) +
                      "' (expected hartree, cm-1, MHz or K)");
}

inline std::string unit_name(EnergyUnit u) {
    switch (u) {
        case EnergyUnit::hartree: return "hartree";
        case EnergyUnit::inverse_cm: return "cm-1";
        case EnergyUnit::mhz: return "MHz";
        case EnergyUnit::kelvin: return "K";
    }
    return "?";
}

// Size of one hartree expressed in unit u.
inline double per_hartree(EnergyUnit u) {
    switch (u) {
        case EnergyUnit::hartree: return 1.0;
        case EnergyUnit::inverse_cm: return constants::hartree_in_inverse_cm;
        case EnergyUnit::mhz: return constants::hartree_in_mhz;
        case EnergyUnit::kelvin: return constants::hartree_in_kelvin;
    }
    return 1.0;
}

inline double convert_energy(double value, EnergyUnit from, EnergyUnit to) {
    if (from == to) return value;
    return value / per_hartree(from) * per_hartree(to);
}

inline double to_hartree(double value, EnergyUnit from) { return value / per_hartree(from); }
inline double from_hartree(double value, EnergyUnit to) { return value * per_hartree(to); }

inline double cm_to_hartree(double x) { return x / constants::hartree_in_inverse_cm; }
inline double hartree_to_cm(double x) { return x * constants::hartree_in_inverse_cm; }
inline double hartree_to_mhz(double x) { return x * constants::hartree_in_mhz; }

inline double amu_to_me(double m_u) { return m_u * constants::atomic_mass_unit_in_me; }
inline double ns_to_au(double t_ns) { return t_ns * 1e-9 / constants::atomic_time_in_s; }
inline double au_to_ns(double t) { return t * constants::atomic_time_in_s * 1e9; }

inline double reduced_mass(double mass_a, double mass_b) {
    if (!(mass_a > 0.0) || !(mass_b > 0.0))
        throw ValidationError("reduced_mass: masses must be positive");
    // Written symmetrically so that swapping arguments is bit-identical.
    return 1.0 / (1.0 / mass_a + 1.0 / mass_b);
}

}  // namespace ndekit
