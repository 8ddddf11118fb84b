// mmsrom command-line front end.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "mmsrom/scenario.hpp"

namespace {

using namespace mmsrom;

struct Common {
    std::string config;
    std::string scenario;
    std::optional<double> eps;
    std::optional<double> cycles;
    std::optional<unsigned> seed;
    std::string out;
    std::string database;
};

void add_common(CLI::App* cmd, Common& c, bool with_eps = true) {
    cmd->add_option("--config", c.config, "INI configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--scenario", c.scenario, "straight-linear | curved-linear | curved-nonlinear | twodof");
    if (with_eps) {
        cmd->add_option("--eps", c.eps, "scale separation");
        cmd->add_option("--cycles", c.cycles, "forcing cycles to simulate");
    }
    cmd->add_option("--seed", c.seed, "seed of the perturbation loading");
    cmd->add_option("--out", c.out, "output directory");
}

ScenarioConfig resolve(const Common& c, ScenarioId fallback) {
    ScenarioConfig cfg = !c.config.empty() ? load_config(c.config)
                                           : default_config(c.scenario.empty() ? fallback : scenario_from_string(c.scenario));
    if (!c.config.empty() && !c.scenario.empty() && scenario_from_string(c.scenario) != cfg.scenario)
        throw ConfigError("--scenario disagrees with the configuration file");
    if (c.eps) cfg.eps = *c.eps;
    if (c.cycles) cfg.cycles = *c.cycles;
    if (c.seed) cfg.seed = *c.seed;
    if (!c.database.empty()) cfg.database_dir = c.database;
    if (!c.out.empty()) cfg.output_dir = c.out;
    if (cfg.output_dir.empty()) cfg.output_dir = default_output_root() + "/" + to_string(cfg.scenario);
    cfg.validate();
    return cfg;
}

void print_database(const BasisDatabase& db) {
    std::printf("entries      %ld\n", static_cast<long>(db.size()));
    std::printf("dofs         %ld\n", static_cast<long>(db.dof_count()));
    std::printf("basis size   %ld (%s)\n", static_cast<long>(db.basis_size()), to_string(db.kind).c_str());
    std::printf("aligned      %s (reference entry %ld)\n", db.aligned ? "yes" : "no", static_cast<long>(db.reference_index));
    std::printf("%4s %12s %14s %14s %14s\n", "j", "x_c [m]", "omega_1", "align resid", "angle to next");
    for (Index j = 0; j < db.size(); ++j) {
        const auto& e = db.entries[static_cast<size_t>(j)];
        const double res = j < static_cast<Index>(db.alignment_residuals.size()) ? db.alignment_residuals[static_cast<size_t>(j)] : 0.0;
        const double ang = j < static_cast<Index>(db.adjacent_angles.size()) ? db.adjacent_angles[static_cast<size_t>(j)] : 0.0;
        std::printf("%4ld %12.5f %14.4f %14.3e %14.4f\n", static_cast<long>(j + 1), e.param,
                    e.frequencies.size() ? e.frequencies(0) : 0.0, res, ang);
    }
    const Vector s = singular_value_profile(stack_all(db));
    Index rank = 0;
    while (rank < s.size() && s(rank) > 1e-8 * s(0)) ++rank;
    std::printf("stack rank   %ld of %ld (sigma > 1e-8 sigma_1)\n", static_cast<long>(rank), static_cast<long>(s.size()));
}

int run_compare(const ScenarioConfig& cfg, const std::vector<Method>& methods) {
    const BeamScenario s = setup_beam_scenario(cfg);
    const ComparisonResult cr = compare_methods(s, methods);
    write_comparison(cr, cfg.output_dir);
    std::printf("scenario %s, eps=%g, %g cycles, omega_f=%.2f rad/s\n", to_string(cfg.scenario).c_str(), cfg.eps,
                cfg.cycle_count(), cr.omega_f);
    std::cout << format_table(cr);
    std::printf("outputs in %s\n", cfg.output_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermally adaptive reduced-order models for beams and a two-DOF oscillator"};
    app.require_subcommand(1);

    Common dbc;
    auto* db = app.add_subcommand("db", "basis database tools");
    db->require_subcommand(1);
    auto* db_build = db->add_subcommand("build", "build and save a basis database");
    add_common(db_build, dbc, false);
    std::string inspect_dir;
    auto* db_inspect = db->add_subcommand("inspect", "summarise a saved database");
    db_inspect->add_option("dir", inspect_dir, "database directory")->required()->check(CLI::ExistingDirectory);

    Common runc;
    std::string method = "mms-o1";
    auto* run = app.add_subcommand("run", "full model and one reduction");
    add_common(run, runc);
    run->add_option("--method", method, "hfm | mms-o1 | mms-oeps | modal | modal-pod");
    run->add_option("--database", runc.database, "use a saved database");

    Common cmpc;
    std::vector<std::string> methods;
    auto* cmp = app.add_subcommand("compare", "full model against several reductions");
    add_common(cmp, cmpc);
    cmp->add_option("--methods", methods, "reductions (default: all)")->delimiter(',');
    cmp->add_option("--database", cmpc.database, "use a saved database");

    Common democ;
    bool fixed = false;
    std::optional<double> t_fixed;
    auto* demo = app.add_subcommand("demo", "small demonstrations");
    demo->require_subcommand(1);
    auto* twodof = demo->add_subcommand("twodof", "two-DOF oscillator with a 1-mode adaptive ROM");
    add_common(twodof, democ);
    twodof->add_flag("--fixed", fixed, "hold the reduction mode at T(0)");
    twodof->add_option("--temperature", t_fixed, "freeze the temperature at this value");

    Common svdc;
    auto* svd = app.add_subcommand("svd-profile", "singular values of the stacked database");
    add_common(svd, svdc, false);
    svd->add_option("--database", svdc.database, "use a saved database");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return e.get_exit_code() == 0 ? code : 2;
    }

    try {
        if (db_build->parsed()) {
            const ScenarioConfig cfg = resolve(dbc, ScenarioId::curved_nonlinear);
            if (cfg.scenario == ScenarioId::twodof) throw ConfigError("the two-DOF scenario has no database");
            const BasisDatabase d = build_scenario_database(cfg);
            save_database(d, cfg.output_dir);
            print_database(d);
            std::printf("saved to %s\n", cfg.output_dir.c_str());
        } else if (db_inspect->parsed()) {
            print_database(load_database(inspect_dir));
        } else if (run->parsed()) {
            const ScenarioConfig cfg = resolve(runc, ScenarioId::curved_nonlinear);
            if (cfg.scenario == ScenarioId::twodof) throw ConfigError("use 'demo twodof' for the two-DOF scenario");
            return run_compare(cfg, {Method::hfm, method_from_string(method)});
        } else if (cmp->parsed()) {
            const ScenarioConfig cfg = resolve(cmpc, ScenarioId::curved_nonlinear);
            if (cfg.scenario == ScenarioId::twodof) throw ConfigError("use 'demo twodof' for the two-DOF scenario");
            std::vector<Method> ms{Method::hfm};
            if (methods.empty()) ms = cfg.methods;
            for (const auto& m : methods) ms.push_back(method_from_string(m));
            return run_compare(cfg, ms);
        } else if (twodof->parsed()) {
            Common c = democ;
            if (c.scenario.empty()) c.scenario = "twodof";
            ScenarioConfig cfg = resolve(c, ScenarioId::twodof);
            cfg.twodof_adaptive = !fixed;
            if (t_fixed) cfg.twodof_fixed_temperature = t_fixed;
            const TwoDofResult r = scenario_twodof(cfg);
            write_twodof(r, cfg.output_dir);
            std::printf("two-DOF, eps=%g, %s 1-mode ROM: E = %.4f %%\n", cfg.eps, fixed ? "fixed" : "adaptive",
                        100 * r.uniform_error);
            std::printf("outputs in %s\n", cfg.output_dir.c_str());
        } else if (svd->parsed()) {
            const ScenarioConfig cfg = resolve(svdc, ScenarioId::curved_nonlinear);
            const BasisDatabase d = cfg.database_dir.empty() ? build_scenario_database(cfg) : load_database(cfg.database_dir);
            const Vector s = singular_value_profile(stack_all(d));
            std::filesystem::create_directories(cfg.output_dir);
            std::vector<double> idx;
            for (Index i = 0; i < s.size(); ++i) idx.push_back(static_cast<double>(i + 1));
            write_csv(cfg.output_dir + "/svd_profile.csv", idx, {"sigma", "sigma_rel"}, {s, s / s(0)}, "index");
            Index rank = 0;
            while (rank < s.size() && s(rank) > 1e-8 * s(0)) ++rank;
            for (Index i = 0; i < s.size(); ++i) std::printf("%4ld %.6e\n", static_cast<long>(i + 1), s(i) / s(0));
            std::printf("rank %ld (sigma > 1e-8 sigma_1)\n", static_cast<long>(rank));
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
