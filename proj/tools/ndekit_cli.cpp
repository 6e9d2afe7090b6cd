// ndekit: long-range curves, semiclassical levels and near-dissociation fits.
//
//   ndekit levels --config data/cs_0gminus.cfg --out out
//   ndekit fit --config data/cs_0gminus.cfg --levels out/levels.csv
//
// Exit codes: 0 ok, 2 config error, 3 numeric failure, 4 validation failure.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ndekit/commands.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_numeric = 3;
constexpr int exit_validation = 4;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Near-dissociation expansion toolkit for long-range diatomic states"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir, units, levels_path;
    bool no_timestamp = false, flambaum = false, epsilon = false;
    std::optional<int> rotation_J;
    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--units", units, "energy unit: hartree, cm-1, MHz or K");
    app.add_flag("--no-timestamp", no_timestamp, "omit the generated-at line so outputs are byte identical");
    app.add_flag("--flambaum", flambaum, "add the 1/(2(n-2)) threshold phase to the quantization rule");
    app.add_flag("--epsilon", epsilon, "include the fine-structure dipole ratio correction");
    app.add_option("--rotation-J", rotation_J, "add rotation with this J (0g- only)");

    auto* curve = app.add_subcommand("curve", "sample case (c) branches on an R grid");
    auto* expand = app.add_subcommand("expand", "fit effective multipole coefficients to branches");
    auto* levels = app.add_subcommand("levels", "semiclassical vibrational levels of one curve");
    auto* terms = app.add_subcommand("terms", "term budget of the two-coefficient expansion");
    auto* fit = app.add_subcommand("fit", "fit the k3/k4/k5 expansions to a level file");
    fit->add_option("--levels", levels_path, "level CSV (overrides levels_file)");
    auto* lifetime = app.add_subcommand("lifetime", "radiative lifetime from C3");
    ndekit::LifetimeInput life;
    lifetime->add_option("--C3", life.C3, "C3 in au");
    lifetime->add_option("--wavelength-nm", life.wavelength_nm, "transition wavelength in nm");
    lifetime->add_option("--frequency", life.frequency, "transition energy in --units");
    auto* retard = app.add_subcommand("retardation", "retardation factors f_sigma and f_pi");
    ndekit::RetardationInput ret;
    retard->add_option("--R", ret.R, "separations in bohr");
    retard->add_option("--lambda-bar", ret.lambda_bar, "reduced wavelength in bohr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    try {
        ndekit::RunConfig cfg;
        const bool needs_config = !(lifetime->parsed() || retard->parsed());
        if (!config_path.empty()) cfg = ndekit::RunConfig::load(config_path);
        else if (needs_config) throw ndekit::ConfigError("--config is required for this command");
        if (!out_dir.empty()) cfg.out = out_dir;
        if (!units.empty()) {
            ndekit::parse_energy_unit(units);
            cfg.units = units;
        }
        if (flambaum) cfg.flambaum = true;
        if (epsilon) cfg.include_epsilon = true;
        if (rotation_J) cfg.rotation_J = rotation_J;

        ndekit::RunSwitches sw;
        sw.timestamp = !no_timestamp;
        sw.log = &std::cout;

        std::vector<std::string> written;
        if (curve->parsed()) written = ndekit::cmd_curve(cfg, sw);
        else if (expand->parsed()) written = ndekit::cmd_expand(cfg, sw);
        else if (levels->parsed()) written = ndekit::cmd_levels(cfg, sw);
        else if (terms->parsed()) written = ndekit::cmd_terms(cfg, sw);
        else if (fit->parsed()) written = ndekit::cmd_fit(cfg, sw, levels_path);
        else if (lifetime->parsed()) written = ndekit::cmd_lifetime(cfg, sw, life);
        else if (retard->parsed()) written = ndekit::cmd_retardation(cfg, sw, ret);
        for (const auto& p : written) std::cout << "wrote " << p << "\n";
    } catch (const ndekit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const ndekit::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return exit_numeric;
    } catch (const ndekit::ValidationError& e) {
        std::cerr << "validation failure: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    }
    return 0;
}
