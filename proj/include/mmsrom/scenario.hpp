#pragma once

/**
 * @file scenario.hpp
 * @brief Beam and two-DOF scenarios: configuration, full/reduced runs,
 *        method comparison, CSV and JSON outputs.
 */

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "forcing.hpp"
#include "metrics.hpp"
#include "rom.hpp"
#include "trajectory_io.hpp"

namespace mmsrom {

enum class ScenarioId { twodof, straight_linear, curved_linear, curved_nonlinear };
enum class Method { hfm, mms_o1, mms_oeps, modal, modal_pod };

inline std::string to_string(ScenarioId s) {
    switch (s) {
        case ScenarioId::twodof: return "twodof";
        case ScenarioId::straight_linear: return "straight-linear";
        case ScenarioId::curved_linear: return "curved-linear";
        case ScenarioId::curved_nonlinear: return "curved-nonlinear";
    }
    return "?";
}

inline ScenarioId scenario_from_string(const std::string& s) {
    for (auto id : {ScenarioId::twodof, ScenarioId::straight_linear, ScenarioId::curved_linear, ScenarioId::curved_nonlinear})
        if (to_string(id) == s) return id;
    throw ConfigError("unknown scenario '" + s + "' (twodof, straight-linear, curved-linear, curved-nonlinear)");
}

inline std::string to_string(Method m) {
    switch (m) {
        case Method::hfm: return "hfm";
        case Method::mms_o1: return "mms-o1";
        case Method::mms_oeps: return "mms-oeps";
        case Method::modal: return "modal";
        case Method::modal_pod: return "modal-pod";
    }
    return "?";
}

inline Method method_from_string(const std::string& s) {
    for (auto m : {Method::hfm, Method::mms_o1, Method::mms_oeps, Method::modal, Method::modal_pod})
        if (to_string(m) == s) return m;
    throw ConfigError("unknown method '" + s + "' (hfm, mms-o1, mms-oeps, modal, modal-pod)");
}

struct ScenarioConfig {
    ScenarioId scenario = ScenarioId::curved_nonlinear;
    double eps = 1e-3;
    std::optional<double> cycles;  ///< default: slow-time span / (2 pi eps)
    int steps_per_cycle = 50;
    unsigned seed = 1;
    std::vector<Method> methods;
    std::string output_dir;

    // beam and pulse
    BeamProperties beam{};
    TemperaturePulse pulse{};
    Kinematics kinematics = Kinematics::nonlinear;
    double probe_fraction = 0.25;
    double load_density = 0.0;  ///< amplitude of the uniform transverse load [N/m]
    bool perturbed_load = false;

    // reduction
    int modes = 5;
    BasisKind kind = BasisKind::vm_only;
    Index pod_size = 5;
    std::string modal_preset;
    Index modal_count = 3;
    std::string database_dir;  ///< load instead of building when set
    OepsOptions oeps{};

    // two-DOF demo
    SpringLaw twodof_law = SpringLaw::isospectral;
    bool twodof_adaptive = true;
    std::optional<double> twodof_fixed_temperature;
    double twodof_forcing_frequency = 1.5;
    double twodof_temperature_amplitude = std::numbers::pi / 3;

    double tau_span() const {
        switch (scenario) {
            case ScenarioId::straight_linear: return 2 * std::numbers::pi;
            case ScenarioId::curved_linear:
            case ScenarioId::curved_nonlinear: return std::numbers::pi;
            case ScenarioId::twodof: return 0.0;
        }
        return 0.0;
    }
    double cycle_count() const {
        if (cycles) return *cycles;
        if (scenario == ScenarioId::twodof) return 50.0;
        return std::round(tau_span() / (2 * std::numbers::pi * eps));
    }

    void validate() const {
        if (!(eps >= 0)) throw ConfigError("eps must be >= 0");
        if (cycle_count() < 1) throw ConfigError("cycles must be >= 1");
        if (steps_per_cycle < 20) throw ConfigError("steps_per_cycle must be >= 20");
        if (modes < 1) throw ConfigError("modes must be >= 1");
        if (pod_size < 1) throw ConfigError("pod_size must be >= 1");
        if (!(probe_fraction > 0 && probe_fraction < 1)) throw ConfigError("probe must lie inside the beam");
    }
};

/// Scenario defaults. Pulse heights differ between the linear-kinematics and the
/// nonlinear scenarios: the linearised hot beam buckles well below 100 K.
inline ScenarioConfig default_config(ScenarioId id) {
    ScenarioConfig c;
    c.scenario = id;
    const double l = c.beam.length;
    c.pulse.width = 0.2 * l;
    switch (id) {
        case ScenarioId::twodof:
            c.eps = 0.01;
            c.methods = {Method::hfm, Method::mms_o1};
            break;
        case ScenarioId::straight_linear:
            c.eps = 1e-3;
            c.beam.rise = 0.0;
            c.kinematics = Kinematics::linear;
            c.pulse.height = 50.0;
            c.pulse.center0 = 0.5 * l;
            c.pulse.amplitude = 0.3 * l;
            c.load_density = 1e4;
            c.kind = BasisKind::vm_only;
            c.pod_size = 5;
            c.modal_preset = "fixed-linear";
            c.methods = {Method::hfm, Method::mms_o1, Method::mms_oeps, Method::modal, Method::modal_pod};
            break;
        case ScenarioId::curved_linear:
            c.eps = 1e-3;
            c.beam.rise = 5e-3;
            c.kinematics = Kinematics::linear;
            c.pulse.height = 50.0;
            c.pulse.center0 = 0.1 * l;
            c.pulse.amplitude = 0.3 * l;
            c.load_density = 1e3;
            c.perturbed_load = true;
            c.kind = BasisKind::vm_only;
            c.pod_size = 5;
            c.modal_preset = "fixed-linear";
            c.methods = {Method::hfm, Method::mms_o1, Method::mms_oeps, Method::modal, Method::modal_pod};
            break;
        case ScenarioId::curved_nonlinear:
            c.eps = 1e-3;
            c.beam.rise = 5e-3;
            c.kinematics = Kinematics::nonlinear;
            c.pulse.height = 100.0;
            c.pulse.center0 = 0.1 * l;
            c.pulse.amplitude = 0.8 * l;
            c.load_density = 1e3;
            c.perturbed_load = true;
            c.kind = BasisKind::vm_md;
            c.pod_size = 20;
            c.modal_preset = "fixed-nonlinear";
            c.methods = {Method::hfm, Method::mms_o1, Method::mms_oeps, Method::modal, Method::modal_pod};
            break;
    }
    return c;
}

/// Root directory for outputs: $MMSROM_OUTPUT_ROOT or ./results.
inline std::string default_output_root() {
    const char* e = std::getenv("MMSROM_OUTPUT_ROOT");
    return e && *e ? e : "results";
}

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s + ",") {
        if (ch == ',' || ch == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    return out;
}

inline bool parse_bool(const std::string& s) {
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw ConfigError("not a boolean: '" + s + "'");
}

}  // namespace detail

/**
 * INI configuration. `[scenario] id` selects the defaults; every other key
 * overrides one field. Unknown sections or keys are errors.
 *
 *   [scenario]  id eps cycles steps_per_cycle seed methods output
 *   [pulse]     height width x0 amplitude
 *   [beam]      rise damping elements kinematics load probe
 *   [reduction] modes kind pod_size modal_preset modal_count database
 *               damping_cross_factor include_ueq_derivative
 *   [twodof]    law adaptive fixed_temperature
 */
inline ScenarioConfig load_config(const std::string& path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    const auto id = tree.get_optional<std::string>("scenario.id");
    if (!id) throw ConfigError("config: missing [scenario] id");
    ScenarioConfig c = default_config(scenario_from_string(*id));

    using Setter = std::function<void(const std::string&)>;
    auto num = [](const std::string& v) {
        try {
            size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw ConfigError("trailing characters");
            return d;
        } catch (const std::exception&) {
            throw ConfigError("not a number: '" + v + "'");
        }
    };
    const std::map<std::string, Setter> setters{
        {"scenario.id", [](const std::string&) {}},
        {"scenario.eps", [&](const std::string& v) { c.eps = num(v); }},
        {"scenario.cycles", [&](const std::string& v) { c.cycles = num(v); }},
        {"scenario.steps_per_cycle", [&](const std::string& v) { c.steps_per_cycle = static_cast<int>(num(v)); }},
        {"scenario.seed", [&](const std::string& v) { c.seed = static_cast<unsigned>(num(v)); }},
        {"scenario.methods",
         [&](const std::string& v) {
             c.methods.clear();
             for (const auto& m : detail::split_list(v)) c.methods.push_back(method_from_string(m));
         }},
        {"scenario.output", [&](const std::string& v) { c.output_dir = v; }},
        {"pulse.height", [&](const std::string& v) { c.pulse.height = num(v); }},
        {"pulse.width", [&](const std::string& v) { c.pulse.width = num(v); }},
        {"pulse.x0", [&](const std::string& v) { c.pulse.center0 = num(v); }},
        {"pulse.amplitude", [&](const std::string& v) { c.pulse.amplitude = num(v); }},
        {"beam.rise", [&](const std::string& v) { c.beam.rise = num(v); }},
        {"beam.damping", [&](const std::string& v) { c.beam.damping_modulus = num(v); }},
        {"beam.elements", [&](const std::string& v) { c.beam.n_elements = static_cast<int>(num(v)); }},
        {"beam.kinematics",
         [&](const std::string& v) {
             if (v == "linear") c.kinematics = Kinematics::linear;
             else if (v == "nonlinear") c.kinematics = Kinematics::nonlinear;
             else throw ConfigError("kinematics must be linear or nonlinear");
         }},
        {"beam.load", [&](const std::string& v) { c.load_density = num(v); }},
        {"beam.probe", [&](const std::string& v) { c.probe_fraction = num(v); }},
        {"reduction.modes", [&](const std::string& v) { c.modes = static_cast<int>(num(v)); }},
        {"reduction.kind",
         [&](const std::string& v) {
             try {
                 c.kind = basis_kind_from_string(v);
             } catch (const ContractError& e) {
                 throw ConfigError(e.what());
             }
         }},
        {"reduction.pod_size", [&](const std::string& v) { c.pod_size = static_cast<Index>(num(v)); }},
        {"reduction.modal_preset", [&](const std::string& v) { c.modal_preset = v; }},
        {"reduction.modal_count", [&](const std::string& v) { c.modal_count = static_cast<Index>(num(v)); }},
        {"reduction.database", [&](const std::string& v) { c.database_dir = v; }},
        {"reduction.damping_cross_factor", [&](const std::string& v) { c.oeps.damping_cross_factor = num(v); }},
        {"reduction.include_ueq_derivative", [&](const std::string& v) { c.oeps.include_ueq_derivative = detail::parse_bool(v); }},
        {"twodof.law",
         [&](const std::string& v) {
             if (v == "printed") c.twodof_law = SpringLaw::printed;
             else if (v == "isospectral") c.twodof_law = SpringLaw::isospectral;
             else throw ConfigError("twodof law must be printed or isospectral");
         }},
        {"twodof.adaptive", [&](const std::string& v) { c.twodof_adaptive = detail::parse_bool(v); }},
        {"twodof.fixed_temperature", [&](const std::string& v) { c.twodof_fixed_temperature = num(v); }},
    };
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) throw ConfigError("config: key '" + section + "' outside a section");
        for (const auto& [key, val] : body) {
            const auto it = setters.find(section + "." + key);
            if (it == setters.end()) throw ConfigError("config: unknown key '" + section + "." + key + "'");
            it->second(val.data());
        }
    }
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Beam scenario setup
// ---------------------------------------------------------------------------

/// Everything shared by the runs of one beam scenario (immutable once built).
struct BeamScenario {
    ScenarioConfig config;
    std::unique_ptr<BeamModel> model;
    std::shared_ptr<const BasisDatabase> database;
    Vector frequencies_mid;  ///< lowest natural frequencies at x_c = L/2 [rad/s]
    double omega_f = 0.0;    ///< forcing frequency (w1 + w2)/2
    double dt = 0.0;
    Index steps = 0;
    ThermalSchedule schedule;
    Vector l0;
    std::optional<PerturbationForcing> perturbation;
    Vector u_initial;  ///< full-order equilibrium at x_c(0)
    Index probe_axial = 0, probe_transverse = 0;
    int probe_node = 0;

    /// p(t, 0)
    LoadFunction leading_load() const {
        if (perturbation) {
            const auto pf = *perturbation;
            return [pf](double t) { return pf.leading(t); };
        }
        const Vector l = l0;
        const double w = omega_f;
        return [l, w](double t) { return Vector(l * std::sin(w * t)); };
    }
    /// dp/deps (t, 0)
    LoadFunction load_derivative() const {
        if (perturbation) {
            const auto pf = *perturbation;
            return [pf](double t) { return pf.perturbation(t); };
        }
        return zero_load(model->dof_count());
    }
    /// p(t, eps)
    LoadFunction full_load() const {
        if (perturbation) {
            const auto pf = *perturbation;
            const double eps = config.eps;
            return [pf, eps](double t) { return pf.total(t, eps); };
        }
        return leading_load();
    }
};

inline LocalBasisOptions basis_options(const ScenarioConfig& c) {
    LocalBasisOptions o;
    o.modes = c.modes;
    o.with_md = c.kind == BasisKind::vm_md;
    return o;
}

inline BeamModel make_beam(const ScenarioConfig& c) { return BeamModel(c.beam, c.pulse, c.kinematics); }

inline BasisDatabase build_scenario_database(const ScenarioConfig& c) {
    const BeamModel model = make_beam(c);
    DatabaseOptions opt;
    opt.basis = basis_options(c);
    return build_database(model, default_grid(c.beam.length), opt);
}

inline BeamScenario setup_beam_scenario(const ScenarioConfig& cfg) {
    if (cfg.scenario == ScenarioId::twodof) throw ContractError("setup_beam_scenario: two-DOF scenario has no beam");
    cfg.validate();
    BeamScenario s;
    s.config = cfg;
    s.model = std::make_unique<BeamModel>(make_beam(cfg));
    const BeamModel& model = *s.model;
    const double l = cfg.beam.length;

    if (!cfg.database_dir.empty()) {
        auto db = std::make_shared<BasisDatabase>(load_database(cfg.database_dir));
        if (db->dof_count() != model.dof_count()) throw ConfigError("database dimension does not match the beam");
        s.database = db;
    } else {
        s.database = std::make_shared<const BasisDatabase>(build_scenario_database(cfg));
    }

    // forcing frequency from the heated configuration with the pulse at midspan
    const auto eq_mid = solve_equilibrium(model, 0.5 * l, Vector::Zero(model.dof_count()));
    const Modes mid = vibration_modes(model, eq_mid.u, 0.5 * l, 5);
    s.frequencies_mid = mid.omega;
    s.omega_f = 0.5 * (mid.omega(0) + mid.omega(1));
    s.dt = 2 * std::numbers::pi / (s.omega_f * cfg.steps_per_cycle);
    s.steps = static_cast<Index>(std::llround(cfg.cycle_count() * cfg.steps_per_cycle));
    s.schedule = pulse_schedule(cfg.pulse, cfg.eps, s.omega_f);

    s.l0 = model.uniform_transverse_load(cfg.load_density);
    if (cfg.perturbed_load)
        s.perturbation = make_perturbation(mid.phi, s.l0, s.omega_f, mid.omega(2), s.dt, s.steps + 1, cfg.seed);

    s.u_initial = solve_equilibrium(model, s.schedule.theta(0.0), Vector::Zero(model.dof_count())).u;
    s.probe_node = model.nearest_node(cfg.probe_fraction * l);
    s.probe_axial = model.free_index(s.probe_node, BeamModel::axial);
    s.probe_transverse = model.free_index(s.probe_node, BeamModel::transverse);
    log::info("scenario " + to_string(cfg.scenario) + ": omega_f=" + std::to_string(s.omega_f) +
              " rad/s, dt=" + std::to_string(s.dt) + " s, steps=" + std::to_string(s.steps));
    return s;
}

/// Constant bases of the stacking baselines.
inline Matrix modal_basis(const BeamScenario& s) {
    const auto idx = modal_subset(s.database->size(), s.config.modal_preset, s.config.seed, s.config.modal_count);
    return stack_orthonormalize(stack_bases(*s.database, idx));
}

inline Matrix modal_pod_basis(const BeamScenario& s) { return modal_pod(stack_all(*s.database), s.config.pod_size); }

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

struct MethodResult {
    Method method = Method::hfm;
    Index basis_size = 0;
    Matrix u;                 ///< full-space displacement at the recorded samples
    std::vector<double> times;
    double runtime_s = 0.0;
    int newton_iterations = 0;
    double max_step_residual = 0.0;
    Trajectory reduced;       ///< raw reduced trajectory (q0 for MMS)
};

namespace detail {

inline NewmarkSettings settings_for(const BeamScenario& s) {
    NewmarkSettings ns;
    ns.dt = s.dt;
    return ns;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

inline MethodResult run_hfm(const BeamScenario& s) {
    const auto t0 = std::chrono::steady_clock::now();
    FullSystem sys(*s.model, s.schedule, s.full_load());
    const Vector v0 = Vector::Zero(s.model->dof_count());
    MethodResult r;
    r.method = Method::hfm;
    r.basis_size = s.model->dof_count();
    r.reduced = newmark_integrate(sys, s.u_initial, v0, detail::settings_for(s), s.steps);
    r.u = r.reduced.u;
    r.times = r.reduced.times;
    r.newton_iterations = r.reduced.total_newton_iterations;
    r.max_step_residual = r.reduced.max_step_residual;
    r.runtime_s = detail::seconds_since(t0);
    return r;
}

/// MMS O(1) and, when `with_oeps`, the O(eps) correction. Returns one or two results.
inline std::vector<MethodResult> run_mms(const BeamScenario& s, bool with_o1, bool with_oeps) {
    const auto t0 = std::chrono::steady_clock::now();
    DatabaseBasisSource src(s.database, s.schedule);
    MmsO1System o1sys(*s.model, src, s.schedule, s.leading_load());
    const Index m = o1sys.size();
    const Vector z = Vector::Zero(m);
    Trajectory o1 = newmark_integrate(o1sys, z, z, detail::settings_for(s), s.steps);
    std::vector<MethodResult> out;
    if (with_o1) {
        MethodResult r;
        r.method = Method::mms_o1;
        r.basis_size = m;
        r.u = reconstruct_history(src, s.schedule, o1);
        r.times = o1.times;
        r.newton_iterations = o1.total_newton_iterations;
        r.max_step_residual = o1.max_step_residual;
        r.runtime_s = detail::seconds_since(t0);
        r.reduced = o1;
        out.push_back(std::move(r));
    }
    if (with_oeps) {
        MmsOepsSystem esys(*s.model, src, s.schedule, s.load_derivative(), o1, s.dt, s.config.oeps);
        Trajectory q1 = newmark_integrate(esys, z, z, detail::settings_for(s), s.steps);
        MethodResult r;
        r.method = Method::mms_oeps;
        r.basis_size = m;
        r.u = reconstruct_history(src, s.schedule, o1, &q1);
        r.times = o1.times;
        r.newton_iterations = o1.total_newton_iterations + q1.total_newton_iterations;
        r.max_step_residual = std::max(o1.max_step_residual, q1.max_step_residual);
        r.runtime_s = detail::seconds_since(t0);
        r.reduced = q1;
        out.push_back(std::move(r));
    }
    return out;
}

inline MethodResult run_constant_basis(const BeamScenario& s, Method method) {
    const auto t0 = std::chrono::steady_clock::now();
    const Matrix v = method == Method::modal ? modal_basis(s) : modal_pod_basis(s);
    const Vector origin = Vector::Zero(s.model->dof_count());
    const Vector q0 = reduced_equilibrium(*s.model, v, origin, s.schedule.theta(0.0), Vector::Zero(s.model->dof_count()));
    ConstantBasisSystem sys(*s.model, v, origin, s.schedule, s.full_load());
    const Vector z = Vector::Zero(v.cols());
    MethodResult r;
    r.method = method;
    r.basis_size = v.cols();
    r.reduced = newmark_integrate(sys, q0, z, detail::settings_for(s), s.steps);
    r.u = v * r.reduced.u;
    r.times = r.reduced.times;
    r.newton_iterations = r.reduced.total_newton_iterations;
    r.max_step_residual = r.reduced.max_step_residual;
    r.runtime_s = detail::seconds_since(t0);
    return r;
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

struct MethodError {
    Method method;
    Index basis_size = 0;
    double uniform = 0.0;     ///< E over the full displacement vector
    double axial = 0.0;       ///< E of the probe axial component
    double transverse = 0.0;  ///< E of the probe transverse component
    double runtime_s = 0.0;
    int newton_iterations = 0;
    double max_step_residual = 0.0;
};

struct ComparisonResult {
    ScenarioConfig config;
    double omega_f = 0.0;
    Vector frequencies_mid;
    double dt = 0.0;
    Index steps = 0;
    std::vector<double> times;
    std::vector<MethodResult> runs;  ///< runs[0] is the full-order model
    std::vector<MethodError> errors;
    Index probe_axial = 0, probe_transverse = 0;

    const MethodError& error(Method m) const {
        for (const auto& e : errors)
            if (e.method == m) return e;
        throw ContractError("comparison has no result for " + to_string(m));
    }
};

/// Runs the full model and every requested reduction (in parallel), then the error table.
inline ComparisonResult compare_methods(const BeamScenario& s, std::vector<Method> methods) {
    std::vector<Method> reduced;
    for (Method m : methods)
        if (m != Method::hfm && std::find(reduced.begin(), reduced.end(), m) == reduced.end()) reduced.push_back(m);
    const bool o1 = std::count(reduced.begin(), reduced.end(), Method::mms_o1) > 0;
    const bool oe = std::count(reduced.begin(), reduced.end(), Method::mms_oeps) > 0;

    auto hfm = std::async(std::launch::async, [&] { return run_hfm(s); });
    std::future<std::vector<MethodResult>> mms;
    if (o1 || oe) mms = std::async(std::launch::async, [&] { return run_mms(s, o1, oe); });
    std::vector<std::future<MethodResult>> consts;
    for (Method m : reduced)
        if (m == Method::modal || m == Method::modal_pod)
            consts.push_back(std::async(std::launch::async, [&s, m] { return run_constant_basis(s, m); }));

    ComparisonResult cr;
    cr.config = s.config;
    cr.omega_f = s.omega_f;
    cr.frequencies_mid = s.frequencies_mid;
    cr.dt = s.dt;
    cr.steps = s.steps;
    cr.probe_axial = s.probe_axial;
    cr.probe_transverse = s.probe_transverse;
    cr.runs.push_back(hfm.get());
    std::vector<MethodResult> others;
    if (mms.valid())
        for (auto& r : mms.get()) others.push_back(std::move(r));
    for (auto& f : consts) others.push_back(f.get());
    for (Method m : reduced)
        for (auto& r : others)
            if (r.method == m) cr.runs.push_back(std::move(r));
    for (const auto& t : cr.runs[0].times) cr.times.push_back(t * s.omega_f);

    const Matrix& ref = cr.runs[0].u;
    for (const auto& r : cr.runs) {
        MethodError e;
        e.method = r.method;
        e.basis_size = r.basis_size;
        e.uniform = error_uniform(ref, r.u);
        e.axial = error_uniform_row(ref, r.u, s.probe_axial);
        e.transverse = error_uniform_row(ref, r.u, s.probe_transverse);
        e.runtime_s = r.runtime_s;
        e.newton_iterations = r.newton_iterations;
        e.max_step_residual = r.max_step_residual;
        cr.errors.push_back(e);
    }
    return cr;
}

inline ComparisonResult compare_methods(const ScenarioConfig& c) {
    const BeamScenario s = setup_beam_scenario(c);
    return compare_methods(s, c.methods);
}

inline nlohmann::json summary_json(const ComparisonResult& cr) {
    nlohmann::json j;
    j["scenario"] = to_string(cr.config.scenario);
    j["eps"] = cr.config.eps;
    j["cycles"] = cr.config.cycle_count();
    j["steps_per_cycle"] = cr.config.steps_per_cycle;
    j["steps"] = cr.steps;
    j["dt"] = cr.dt;
    j["seed"] = cr.config.seed;
    j["omega_f"] = cr.omega_f;
    j["frequencies_mid"] = std::vector<double>(cr.frequencies_mid.data(), cr.frequencies_mid.data() + cr.frequencies_mid.size());
    j["pulse"] = {{"height", cr.config.pulse.height},
                  {"width", cr.config.pulse.width},
                  {"x0", cr.config.pulse.center0},
                  {"amplitude", cr.config.pulse.amplitude}};
    j["methods"] = nlohmann::json::array();
    for (const auto& e : cr.errors)
        j["methods"].push_back({{"method", to_string(e.method)},
                                {"basis_size", e.basis_size},
                                {"E", e.uniform},
                                {"E_probe_axial", e.axial},
                                {"E_probe_transverse", e.transverse},
                                {"runtime_s", e.runtime_s},
                                {"newton_iterations", e.newton_iterations},
                                {"max_step_residual", e.max_step_residual}});
    return j;
}

/// Writes displacements.csv, errors.csv and summary.json into `dir`.
inline void write_comparison(const ComparisonResult& cr, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> names;
    std::vector<Vector> series;
    for (const auto& r : cr.runs) {
        names.push_back(to_string(r.method) + "_axial");
        series.push_back(r.u.row(cr.probe_axial).transpose());
        names.push_back(to_string(r.method) + "_transverse");
        series.push_back(r.u.row(cr.probe_transverse).transpose());
    }
    write_csv(dir + "/displacements.csv", cr.times, names, series);

    names.clear();
    series.clear();
    for (size_t k = 1; k < cr.runs.size(); ++k) {
        const auto e = error_instant(cr.runs[0].u, cr.runs[k].u);
        names.push_back(to_string(cr.runs[k].method));
        series.push_back(Eigen::Map<const Vector>(e.value.data(), static_cast<Index>(e.value.size())));
    }
    if (!series.empty()) write_csv(dir + "/errors.csv", cr.times, names, series);

    std::ofstream js(dir + "/summary.json");
    js << summary_json(cr).dump(2) << '\n';
}

/// Fixed-width error table.
inline std::string format_table(const ComparisonResult& cr) {
    std::ostringstream o;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-10s %6s %12s %12s %12s %10s\n", "method", "m", "E [%]", "axial [%]", "transv [%]",
                  "time [s]");
    o << buf;
    for (const auto& e : cr.errors) {
        std::snprintf(buf, sizeof buf, "%-10s %6ld %12.4f %12.4f %12.4f %10.1f\n", to_string(e.method).c_str(),
                      static_cast<long>(e.basis_size), 100 * e.uniform, 100 * e.axial, 100 * e.transverse, e.runtime_s);
        o << buf;
    }
    return o.str();
}

// ---------------------------------------------------------------------------
// Two-DOF demo
// ---------------------------------------------------------------------------

struct TwoDofResult {
    double eps = 0.0;
    std::vector<double> times;  ///< t [s]
    Matrix u_full, u_rom;
    double uniform_error = 0.0;
    std::vector<double> temperature;
};

/// Full two-DOF response vs the 1-mode ROM (adaptive: lowest mode of K(T(t));
/// fixed: lowest mode at T(0)). T = T_max sin(eps t) unless a fixed temperature is given.
inline TwoDofResult scenario_twodof(const ScenarioConfig& c) {
    TwoDofParams p;
    p.law = c.twodof_law;
    const TwoDofModel model(p);
    const ThermalSchedule sched = c.twodof_fixed_temperature ? frozen_schedule(*c.twodof_fixed_temperature)
                                                             : sine_schedule(c.twodof_temperature_amplitude, c.eps);
    const double w = c.twodof_forcing_frequency;
    const LoadFunction load = [w](double t) { return Vector(Vector{{0.0, std::sin(w * t)}}); };
    NewmarkSettings ns;
    ns.dt = 2 * std::numbers::pi / (w * c.steps_per_cycle);
    const Index steps = static_cast<Index>(std::llround(c.cycle_count() * c.steps_per_cycle));
    const Vector z2 = Vector::Zero(2), z1 = Vector::Zero(1);

    FullSystem full(model, sched, load);
    const Trajectory tf = newmark_integrate(full, z2, z2, ns, steps);

    std::unique_ptr<BasisSource> src;
    if (c.twodof_adaptive) {
        src = std::make_unique<TwoDofBasisSource>(model, sched);
    } else {
        src = std::make_unique<ConstantBasisSource>(Matrix(model.first_mode(sched.theta(0.0))), z2);
    }
    MmsO1System rom(model, *src, sched, load);
    const Trajectory tr = newmark_integrate(rom, z1, z1, ns, steps);

    TwoDofResult r;
    r.eps = c.eps;
    r.times = tf.times;
    r.u_full = tf.u;
    r.u_rom = reconstruct_history(*src, sched, tr);
    r.uniform_error = error_uniform(r.u_full, r.u_rom);
    for (double t : r.times) r.temperature.push_back(sched.at_time(t));
    return r;
}

inline void write_twodof(const TwoDofResult& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const Index n = static_cast<Index>(r.times.size());
    write_csv(dir + "/twodof.csv", r.times,
              {"T", "full_x1", "full_x2", "rom_x1", "rom_x2"},
              {Eigen::Map<const Vector>(r.temperature.data(), n), r.u_full.row(0).transpose(), r.u_full.row(1).transpose(),
               r.u_rom.row(0).transpose(), r.u_rom.row(1).transpose()},
              "t");
    nlohmann::json j{{"scenario", "twodof"}, {"eps", r.eps}, {"samples", n}, {"E", r.uniform_error}};
    std::ofstream(dir + "/summary.json") << j.dump(2) << '\n';
}

}  // namespace mmsrom
