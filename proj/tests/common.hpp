#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "ndekit/bkw.hpp"
#include "ndekit/case_c.hpp"
#include "ndekit/units.hpp"

namespace testing_support {

// Cs2 6s+6p coefficients (au), C8 and epsilon off.
inline ndekit::CaseCParams cs_params() {
    ndekit::CaseCParams p;
    p.C3 = 9.997;
    p.C6_sigma = -17390.0;
    p.C6_pi = -11830.0;
    p.A = 2.0 / 3.0 * ndekit::to_hartree(351725718.50 - 335116048.807, ndekit::EnergyUnit::mhz);
    p.E_p = -0.5 * p.A;  // p3/2 limit at zero
    return p;
}

inline double cs_mu() { return ndekit::reduced_mass(ndekit::amu_to_me(132.905451961), ndekit::amu_to_me(132.905451961)); }

inline ndekit::CurvePtr cs_0g_minus() {
    return ndekit::adiabatic_branch(ndekit::SymmetryLabel::parse("0g-"), 1, cs_params(), {},
                                    {15.0, std::numeric_limits<double>::infinity()});
}

inline std::string source_path(const std::string& rel) { return std::string(NDEKIT_SOURCE_DIR) + "/" + rel; }

inline double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace testing_support
