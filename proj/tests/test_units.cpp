#include <gtest/gtest.h>

#include "common.hpp"
#include "ndekit/config.hpp"
#include "ndekit/units.hpp"

using namespace ndekit;
using testing_support::rel;

TEST(Units, IdentityConversion) { EXPECT_EQ(convert_energy(1.0, EnergyUnit::hartree, EnergyUnit::hartree), 1.0); }

TEST(Units, HartreeToWavenumber) {
    EXPECT_DOUBLE_EQ(convert_energy(1.0, EnergyUnit::hartree, EnergyUnit::inverse_cm), 219474.6313632);
}

TEST(Units, HundredMicrokelvinIsAboutTwoMHz) {
    const double mhz = convert_energy(100e-6, EnergyUnit::kelvin, EnergyUnit::mhz);
    EXPECT_NEAR(mhz, 2.08, 0.05);
}

TEST(Units, RoundTripAndComposition) {
    const EnergyUnit all[] = {EnergyUnit::hartree, EnergyUnit::inverse_cm, EnergyUnit::mhz, EnergyUnit::kelvin};
    for (double x : {1e-9, 0.37, 12.5, 3.2e7}) {
        for (auto a : all) {
            EXPECT_LE(rel(from_hartree(to_hartree(x, a), a), x), 1e-12);
            for (auto b : all)
                for (auto c : all) {
                    const double two = convert_energy(convert_energy(x, a, b), b, c);
                    EXPECT_LE(rel(two, convert_energy(x, a, c)), 1e-12);
                }
        }
    }
}

TEST(Units, ParseAliasesAndRejectUnknown) {
    EXPECT_EQ(parse_energy_unit("cm-1"), EnergyUnit::inverse_cm);
    EXPECT_EQ(parse_energy_unit("1/cm"), EnergyUnit::inverse_cm);
    EXPECT_EQ(parse_energy_unit("au"), EnergyUnit::hartree);
    EXPECT_EQ(parse_energy_unit("MHz"), EnergyUnit::mhz);
    EXPECT_EQ(parse_energy_unit("K"), EnergyUnit::kelvin);
    EXPECT_THROW(parse_energy_unit("eV"), ConfigError);
}

TEST(Units, ReducedMass) {
    const double m = amu_to_me(132.905451961);
    EXPECT_DOUBLE_EQ(reduced_mass(m, m), m / 2.0);
    EXPECT_EQ(reduced_mass(3.0, 7.0), reduced_mass(7.0, 3.0));
    EXPECT_LE(rel(reduced_mass(5.0, 5e12), 5.0), 1e-11);
    EXPECT_NEAR(reduced_mass(m, m), 121135.91, 0.01);
    EXPECT_THROW(reduced_mass(0.0, 1.0), ValidationError);
    EXPECT_THROW(reduced_mass(1.0, -2.0), ValidationError);
}

TEST(Units, TimeConversion) {
    EXPECT_LE(rel(au_to_ns(ns_to_au(30.499)), 30.499), 1e-14);
    EXPECT_NEAR(ns_to_au(1.0), 4.1341373e7, 1.0);
}

// The shipped constants file must agree with the embedded table.
TEST(Units, ConstantsFileMatchesEmbeddedTable) {
    const auto kv = KeyValueFile::load(testing_support::source_path("data/constants_codata2018.txt"));
    auto val = [&](const char* k) { return parse_number(kv.at(k).value, k); };
    EXPECT_EQ(val("hartree_in_inverse_cm"), constants::hartree_in_inverse_cm);
    EXPECT_EQ(val("hartree_in_mhz"), constants::hartree_in_mhz);
    EXPECT_EQ(val("hartree_in_kelvin"), constants::hartree_in_kelvin);
    EXPECT_EQ(val("atomic_mass_unit_in_me"), constants::atomic_mass_unit_in_me);
    EXPECT_EQ(val("speed_of_light_au"), constants::speed_of_light_au);
    EXPECT_EQ(val("bohr_in_m"), constants::bohr_in_m);
    EXPECT_EQ(val("atomic_time_in_s"), constants::atomic_time_in_s);
    EXPECT_EQ(kv.order().size(), 7u);
}
