// paracav: command-line workbench for the confocal paraboloidal cavity.
//
// Subcommands: trajectory | poincare | orbit | spectrum | mode | selftest.
// Exit codes: 0 success, 2 configuration error, 3 numerical nonconvergence,
// 4 domain violation.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "paracav/actions.hpp"
#include "paracav/dynamics.hpp"
#include "paracav/errors.hpp"
#include "paracav/geometry.hpp"
#include "paracav/kummer.hpp"
#include "paracav/orbits.hpp"
#include "paracav/quadrature.hpp"
#include "paracav/rational.hpp"
#include "paracav/spectrum.hpp"
#include "workbench_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace paracav;
using io::format_number;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kUnitsNote =
    "units: natural (hbar = 1, 2M = 1); energies are k^2, lengths follow the "
    "cavity parameters (sigma, tau carry sqrt(length))";

struct ConfigError : Error {
    using Error::Error;
};

struct Tolerances {
    double drift_abort = 1e-6;
    double newton_tol = 1e-10;
    double series_tol = 1e-15;
    double quad_rel_tol = 1e-8;

    void apply(const std::vector<std::string>& overrides) {
        for (const std::string& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw ConfigError("--tol-override expects KEY=VAL, got: " + kv);
            const std::string key = kv.substr(0, eq);
            const double val = std::strtod(kv.c_str() + eq + 1, nullptr);
            if (key == "drift_abort") drift_abort = val;
            else if (key == "newton_tol") newton_tol = val;
            else if (key == "series_tol") series_tol = val;
            else if (key == "quad_rel_tol") quad_rel_tol = val;
            else throw ConfigError("unknown tolerance key: " + key);
        }
    }

    json echo() const {
        return {{"drift_abort", drift_abort},
                {"newton_tol", newton_tol},
                {"series_tol", series_tol},
                {"quad_rel_tol", quad_rel_tol}};
    }
};

struct CommonOptions {
    double sigma0 = 3.0;
    double tau0 = 2.0;
    double momentum = 1.0;
    std::string out_dir = ".";
    std::vector<std::string> formats = {"csv", "json"};
    std::string config_file;
    std::vector<std::string> tol_overrides;
    Tolerances tol;

    bool wants(const std::string& fmt) const {
        return std::find(formats.begin(), formats.end(), fmt) != formats.end();
    }
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--sigma0", opt.sigma0, "sigma wall parameter (> 0)");
    cmd->add_option("--tau0", opt.tau0, "tau wall parameter (> 0)");
    cmd->add_option("--P", opt.momentum, "momentum magnitude (classical runs)");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--format", opt.formats, "output formats: csv, json, svg")
        ->delimiter(',');
    cmd->add_option("--config", opt.config_file,
                    "JSON config file mirroring the flags (flags win)");
    cmd->add_option("--tol-override", opt.tol_overrides,
                    "tolerance override KEY=VAL (repeatable)");
}

// Fill options that were not given on the command line from a JSON config.
void merge_config(CLI::App* cmd, const std::string& path) {
    if (path.empty()) return;
    json cfg;
    try {
        cfg = json::parse(io::read_text(path));
    } catch (const std::exception& e) {
        throw ConfigError("config file: " + std::string(e.what()));
    }
    for (auto& [key, value] : cfg.items()) {
        CLI::Option* o = cmd->get_option_no_throw("--" + key);
        if (o == nullptr) throw ConfigError("config file: unknown key '" + key + "'");
        if (o->count() > 0) continue;  // flags take precedence
        std::vector<std::string> items;
        if (value.is_array())
            for (auto& v : value)
                items.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        else
            items.push_back(value.is_string() ? value.get<std::string>()
                                              : value.dump());
        o->add_result(items);
        o->run_callback();
    }
}

Cavity make_cavity(const CommonOptions& opt) {
    if (!(opt.sigma0 > 0) || !(opt.tau0 > 0))
        throw ConfigError("sigma0 and tau0 must be positive");
    return Cavity(opt.sigma0, opt.tau0);
}

json base_metadata(const std::string& command, const CommonOptions& opt,
                   double walltime_s) {
    return {{"tool", "paracav"},
            {"version", kVersion},
            {"command", command},
            {"units", kUnitsNote},
            {"cavity", {{"sigma0", opt.sigma0}, {"tau0", opt.tau0}}},
            {"tolerances", opt.tol.echo()},
            {"walltime_seconds", walltime_s}};
}

void ensure_out_dir(const CommonOptions& opt) {
    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + opt.out_dir);
}

std::string out_path(const CommonOptions& opt, const std::string& name) {
    return (fs::path(opt.out_dir) / name).string();
}

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

std::pair<double, double> parse_range(const std::string& text, const char* what) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ConfigError(std::string(what) + " expects LO:HI, got: " + text);
    return {std::strtod(text.substr(0, colon).c_str(), nullptr),
            std::strtod(text.c_str() + colon + 1, nullptr)};
}

std::pair<int, int> parse_grid(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos)
        throw ConfigError("--grid expects NxM, got: " + text);
    return {std::atoi(text.substr(0, x).c_str()), std::atoi(text.c_str() + x + 1)};
}

// Wall and caustic sections in the (rho, z) half-plane for figures.
std::vector<std::pair<double, double>> parabola_section(double w2, int sign,
                                                        double rho_max, int n = 80) {
    // x^2 = sign * 2 w2 z + w2^2  ->  z = (rho^2 - w2^2) / (sign 2 w2)
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i <= n; ++i) {
        const double rho = rho_max * i / n;
        pts.push_back({rho, (rho * rho - w2 * w2) / (sign * 2.0 * w2)});
    }
    return pts;
}

// ---------------------------------------------------------------------------
// trajectory
// ---------------------------------------------------------------------------

struct TrajectoryOptions {
    CommonOptions common;
    double alpha = 0.0;
    double beta = 1.0;
    int bounces = 200;
};

void cmd_trajectory(const TrajectoryOptions& opt) {
    Stopwatch watch;
    const Cavity cavity = make_cavity(opt.common);
    const AdmissibleTriangle tri = admissible_region(cavity);
    if (!tri.contains(opt.alpha, opt.beta))
        throw DomainError("(alpha, beta) outside the admissible triangle");
    if (opt.bounces < 1) throw ConfigError("--bounces must be >= 1");

    const MotionConstants mc{opt.common.momentum, opt.alpha, opt.beta};
    const CausticPair cp = caustics(opt.alpha, opt.beta);
    const PhaseState start = standard_start(cavity, mc);

    Trajectory traj;
    try {
        traj = simulate(cavity, start, opt.bounces, {opt.common.tol.drift_abort});
    } catch (const RimHit& e) {
        throw DomainError(std::string("trajectory meets the rim circle: ") + e.what());
    }

    ensure_out_dir(opt.common);
    io::CsvTable table;
    table.comments = {std::string("paracav ") + kVersion + " trajectory", kUnitsNote,
                      "config: sigma0=" + format_number(opt.common.sigma0) +
                          " tau0=" + format_number(opt.common.tau0) +
                          " alpha=" + format_number(opt.alpha) +
                          " beta=" + format_number(opt.beta) +
                          " P=" + format_number(opt.common.momentum) +
                          " bounces=" + std::to_string(opt.bounces),
                      "caustics: sigma_c=" + format_number(cp.sigma_c) +
                          " tau_c=" + format_number(cp.tau_c)};
    table.header = {"index",      "x",           "y",          "z",
                    "wall",       "path_length", "phi",        "drift_alpha",
                    "drift_beta", "drift_P"};
    const double scale = cavity.scale();
    for (size_t i = 0; i < traj.bounces.size(); ++i) {
        const BounceRecord& b = traj.bounces[i];
        table.rows.push_back(
            {std::to_string(i), format_number(b.point.x), format_number(b.point.y),
             format_number(b.point.z), wall_name(b.wall),
             format_number(b.cumulative_length), format_number(b.phi_unwrapped),
             format_number((b.constants.alpha - mc.alpha) / scale),
             format_number((b.constants.beta - mc.beta) / (scale * scale)),
             format_number((b.constants.P - mc.P) / mc.P)});
    }
    if (opt.common.wants("csv")) io::write_csv(out_path(opt.common, "trajectory.csv"), table);

    if (opt.common.wants("json")) {
        json meta = base_metadata("trajectory", opt.common, watch.seconds());
        meta["constants"] = {{"P", mc.P}, {"alpha", mc.alpha}, {"beta", mc.beta}};
        meta["caustics"] = {{"sigma_c", cp.sigma_c}, {"tau_c", cp.tau_c},
                            {"delta", cp.delta}};
        meta["max_relative_drift"] = traj.max_drift;
        meta["total_length"] = traj.total_length;
        meta["bounces"] = opt.bounces;
        io::write_text(out_path(opt.common, "trajectory_meta.json"), meta.dump(2) + "\n");
    }

    if (opt.common.wants("svg")) {
        io::SvgFigure fig(640, 480);
        // walls and caustics in the meridional half plane
        const double rho_max = cavity.rim_radius * 1.05;
        fig.add_polyline(parabola_section(cavity.sigma0 * cavity.sigma0, +1, rho_max),
                         "black", 1.5);
        fig.add_polyline(parabola_section(cavity.tau0 * cavity.tau0, -1, rho_max),
                         "black", 1.5);
        if (cp.sigma_c > 0)
            fig.add_polyline(parabola_section(cp.sigma_c * cp.sigma_c, +1, rho_max),
                             "steelblue", 1.0);
        if (cp.tau_c > 0)
            fig.add_polyline(parabola_section(cp.tau_c * cp.tau_c, -1, rho_max),
                             "darkorange", 1.0);
        std::vector<std::pair<double, double>> pts;
        pts.push_back({cylindrical_radius(start.position), start.position.z});
        for (const BounceRecord& b : traj.bounces)
            pts.push_back({cylindrical_radius(b.point), b.point.z});
        fig.add_polyline(pts, "crimson", 0.8);
        io::write_text(out_path(opt.common, "trajectory.svg"), fig.render());
    }
    std::cout << "trajectory: " << traj.bounces.size() << " bounces, max drift "
              << format_number(traj.max_drift) << "\n";
}

// ---------------------------------------------------------------------------
// poincare
// ---------------------------------------------------------------------------

struct PoincareOptions {
    CommonOptions common;
    std::string plane = "sigma";
    std::string field = "alpha";
    double fixed = 0.0;
    std::string qrange, prange;
    std::string grid = "200x201";
};

void cmd_poincare(const PoincareOptions& opt) {
    Stopwatch watch;
    const Cavity cavity = make_cavity(opt.common);
    if (opt.plane != "sigma" && opt.plane != "tau")
        throw ConfigError("--plane must be sigma or tau");
    if (opt.field != "alpha" && opt.field != "beta")
        throw ConfigError("--field must be alpha or beta");
    const SectionPlane plane =
        opt.plane == "sigma" ? SectionPlane::SigmaPlane : SectionPlane::TauPlane;
    const SolveFor field = opt.field == "alpha" ? SolveFor::Alpha : SolveFor::Beta;
    const double wall = plane == SectionPlane::SigmaPlane ? cavity.sigma0 : cavity.tau0;
    const double P = opt.common.momentum;

    double q_lo = 0.02 * wall, q_hi = wall;
    double p_lo = -1.5 * P * wall, p_hi = 1.5 * P * wall;
    if (!opt.qrange.empty()) std::tie(q_lo, q_hi) = parse_range(opt.qrange, "--qrange");
    if (!opt.prange.empty()) std::tie(p_lo, p_hi) = parse_range(opt.prange, "--prange");
    auto [nq, np] = parse_grid(opt.grid);
    if (nq < 2 || np < 2) throw ConfigError("--grid needs at least 2x2");

    const PoincareGrid grid =
        poincare_field(plane, field, opt.fixed, P, q_lo, q_hi, nq, p_lo, p_hi, np);

    ensure_out_dir(opt.common);
    if (opt.common.wants("csv")) {
        io::CsvTable table;
        table.comments = {std::string("paracav ") + kVersion + " poincare map",
                          kUnitsNote,
                          "field " + opt.field + " on the (" + opt.plane +
                              ", p_" + opt.plane + ") plane; fixed " +
                              (opt.field == "alpha" ? "beta" : "alpha") + " = " +
                              format_number(opt.fixed) +
                              ", P = " + format_number(P)};
        table.header = {opt.plane, "p_" + opt.plane, opt.field};
        for (size_t i = 0; i < grid.p.size(); ++i)
            for (size_t j = 0; j < grid.q.size(); ++j)
                table.rows.push_back({format_number(grid.q[j]),
                                      format_number(grid.p[i]),
                                      format_number(grid.values[i * grid.q.size() + j])});
        io::write_csv(out_path(opt.common, "poincare.csv"), table);
    }
    if (opt.common.wants("json")) {
        json meta = base_metadata("poincare", opt.common, watch.seconds());
        meta["plane"] = opt.plane;
        meta["field"] = opt.field;
        meta["fixed_constant"] = opt.fixed;
        meta["P"] = P;
        meta["grid"] = {{"nq", nq}, {"np", np}, {"q", {q_lo, q_hi}}, {"p", {p_lo, p_hi}}};
        io::write_text(out_path(opt.common, "poincare_meta.json"), meta.dump(2) + "\n");
    }
    if (opt.common.wants("svg")) {
        io::SvgFigure fig(640, 480);
        double vmin = 1e300, vmax = -1e300;
        for (double v : grid.values) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
        for (int level = 1; level <= 9; ++level) {
            const double value = vmin + (vmax - vmin) * level / 10.0;
            for (auto& seg : io::contour_lines(grid.q, grid.p, grid.values, value))
                fig.add_polyline(seg, "steelblue", 0.8);
        }
        io::write_text(out_path(opt.common, "poincare.svg"), fig.render());
    }
    std::cout << "poincare: " << nq << "x" << np << " grid written\n";
}

// ---------------------------------------------------------------------------
// orbit
// ---------------------------------------------------------------------------

struct OrbitOptions {
    CommonOptions common;
    std::vector<std::string> specs;
    int s = 0, t = 0, l = -1;  // single-spec alternative to --spec
};

void cmd_orbit(const OrbitOptions& opt_in) {
    Stopwatch watch;
    OrbitOptions opt = opt_in;
    const Cavity cavity = make_cavity(opt.common);
    if (opt.s > 0 && opt.t > 0 && opt.l >= 0)
        opt.specs.push_back(std::to_string(opt.s) + "," + std::to_string(opt.t) +
                            "," + std::to_string(opt.l));
    if (opt.specs.empty())
        throw ConfigError("an orbit spec is required: --spec s,t,l or --s/--t/--l");

    ensure_out_dir(opt.common);
    io::CsvTable table;
    table.comments = {std::string("paracav ") + kVersion + " periodic orbits",
                      kUnitsNote,
                      "cavity sigma0=" + format_number(cavity.sigma0) +
                          " tau0=" + format_number(cavity.tau0) +
                          " P=" + format_number(opt.common.momentum)};
    table.header = {"s",      "t",      "l",           "status",
                    "alpha",  "beta",   "residual_w",  "residual_theta",
                    "length", "arc_length", "closure_error", "azimuthal_advance",
                    "n_roots", "bounce_table"};

    json jroots = json::array();
    int solved = 0;
    for (const std::string& spec_text : opt.specs) {
        int s, t, l;
        if (std::sscanf(spec_text.c_str(), "%d,%d,%d", &s, &t, &l) != 3)
            throw ConfigError("--spec expects s,t,l integers, got: " + spec_text);
        OrbitSpec spec(s, t, l);

        std::vector<OrbitRoot> roots = solve_orbit_all(cavity, spec,
                                                       opt.common.momentum);
        json jentry = {{"s", s}, {"t", t}, {"l", l}, {"roots", json::array()}};
        for (const OrbitRoot& r : roots)
            jentry["roots"].push_back({{"alpha", r.constants.alpha},
                                       {"beta", r.constants.beta},
                                       {"residual_w", r.residual.r1},
                                       {"residual_theta", r.residual.r2},
                                       {"primitive", r.primitive},
                                       {"degenerate", r.degenerate}});

        std::string status = "no_solution";
        std::optional<PeriodicOrbit> orbit;
        MotionConstants used{opt.common.momentum, 0, 0};
        for (const OrbitRoot& r : roots) {
            try {
                orbit = build_orbit(cavity, spec, r.constants);
                used = r.constants;
                status = "ok";
                break;
            } catch (const ClosureFailure&) {
                status = "no_primitive_closure";
            }
        }

        if (orbit) {
            ++solved;
            const ClosureResidual res =
                closure_residual(cavity, used.alpha, used.beta, s, t, l);
            const std::string name = "orbit_s" + std::to_string(s) + "_t" +
                                     std::to_string(t) + "_l" + std::to_string(l) +
                                     ".csv";
            table.rows.push_back({std::to_string(s), std::to_string(t),
                                  std::to_string(l), status, format_number(used.alpha),
                                  format_number(used.beta), format_number(res.r1),
                                  format_number(res.r2), format_number(orbit->length),
                                  format_number(orbit->trajectory.total_length),
                                  format_number(orbit->closure_error),
                                  format_number(orbit->azimuthal_advance),
                                  std::to_string(roots.size()), name});
            // per-orbit bounce table
            io::CsvTable bounce;
            bounce.comments = {"orbit (" + std::to_string(s) + "," + std::to_string(t) +
                                   "," + std::to_string(l) + ") bounce sequence",
                               kUnitsNote};
            bounce.header = {"index", "x", "y", "z", "wall", "path_length"};
            const auto& bl = orbit->trajectory.bounces;
            for (size_t i = 0; i < bl.size(); ++i)
                bounce.rows.push_back({std::to_string(i), format_number(bl[i].point.x),
                                       format_number(bl[i].point.y),
                                       format_number(bl[i].point.z),
                                       wall_name(bl[i].wall),
                                       format_number(bl[i].cumulative_length)});
            if (opt.common.wants("csv")) io::write_csv(out_path(opt.common, name), bounce);
            jentry["orbit"] = {{"length", orbit->length},
                               {"arc_length", orbit->trajectory.total_length},
                               {"closure_error", orbit->closure_error},
                               {"sigma_bounces", orbit->sigma_bounces},
                               {"tau_bounces", orbit->tau_bounces},
                               {"azimuthal_advance", orbit->azimuthal_advance},
                               {"meridional", orbit->meridional},
                               {"bounce_table", name}};
        } else {
            table.rows.push_back({std::to_string(s), std::to_string(t),
                                  std::to_string(l), status, "", "", "", "", "", "", "",
                                  "", std::to_string(roots.size()), ""});
        }
        jentry["status"] = status;
        jroots.push_back(jentry);
    }

    if (opt.common.wants("csv")) io::write_csv(out_path(opt.common, "orbits.csv"), table);
    if (opt.common.wants("json")) {
        json meta = base_metadata("orbit", opt.common, watch.seconds());
        meta["specs"] = jroots;
        io::write_text(out_path(opt.common, "orbits.json"), meta.dump(2) + "\n");
    }
    std::cout << "orbit: " << solved << "/" << opt.specs.size() << " specs built\n";
    if (solved == 0)
        throw NoSolution("no requested orbit spec admits a primitive closed orbit");
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

struct SpectrumOptions {
    CommonOptions common;
    int m_max = 5;
    double k_max = 2.0249;
    bool skip_penetration = false;
    std::string ratio_range;  // switches to the deformation scan
    int ratio_samples = 9;
    int states_per_m = 4;
};

void cmd_spectrum_fixed(const SpectrumOptions& opt) {
    Stopwatch watch;
    const Cavity cavity = make_cavity(opt.common);
    if (!(opt.k_max > 0)) throw ConfigError("--kmax must be positive");
    if (opt.m_max < 0) throw ConfigError("--mmax must be >= 0");

    struct Row {
        EigenPair pair;
        QuantumConstants qc;
    };
    std::vector<Row> rows;
    std::vector<std::string> warnings;
    EigenSearchOptions search;
    search.newton_tol = opt.common.tol.newton_tol;
    for (int m = 0; m <= opt.m_max; ++m) {
        EigenSearchResult res = find_eigenpairs(cavity, m, opt.k_max, search);
        for (const std::string& w : res.warnings) warnings.push_back(w);
        for (const EigenPair& p : res.pairs) {
            Row row{p, quantum_constants(p)};
            if (!opt.skip_penetration)
                row.qc.penetration = penetration_ratio(normalize(p, cavity));
            rows.push_back(row);
        }
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.pair.k != b.pair.k ? a.pair.k < b.pair.k : a.pair.m < b.pair.m;
    });

    ensure_out_dir(opt.common);
    io::CsvTable table;
    table.comments = {std::string("paracav ") + kVersion + " Dirichlet spectrum",
                      kUnitsNote,
                      "cavity sigma0=" + format_number(cavity.sigma0) +
                          " tau0=" + format_number(cavity.tau0) +
                          " kmax=" + format_number(opt.k_max) +
                          " mmax=" + std::to_string(opt.m_max),
                      "labels (l, n) count interior zeros of S and T; m >= 0 rows "
                      "stand for the +-m degenerate pair"};
    table.header = {"l", "n", "m", "a", "k", "k2", "alpha", "beta", "penetration"};
    for (const Row& r : rows)
        table.rows.push_back(
            {std::to_string(r.pair.l), std::to_string(r.pair.n),
             std::to_string(r.pair.m), format_number(r.pair.a), format_number(r.pair.k),
             format_number(r.pair.k2()), format_number(r.qc.alpha_q),
             format_number(r.qc.beta_q), format_number(r.qc.penetration)});
    if (opt.common.wants("csv")) io::write_csv(out_path(opt.common, "spectrum.csv"), table);

    if (opt.common.wants("json")) {
        json meta = base_metadata("spectrum", opt.common, watch.seconds());
        meta["k_max"] = opt.k_max;
        meta["m_max"] = opt.m_max;
        meta["warnings"] = warnings;
        json jp = json::array();
        for (const Row& r : rows)
            jp.push_back({{"l", r.pair.l},
                          {"n", r.pair.n},
                          {"m", r.pair.m},
                          {"a", r.pair.a},
                          {"k", r.pair.k},
                          {"k2", r.pair.k2()},
                          {"alpha", r.qc.alpha_q},
                          {"beta", r.qc.beta_q},
                          {"C", r.qc.C_q},
                          {"penetration", r.qc.penetration}});
        meta["eigenpairs"] = jp;
        io::write_text(out_path(opt.common, "spectrum.json"), meta.dump(2) + "\n");
    }
    std::cout << "spectrum: " << rows.size() << " eigenpairs up to k = "
              << format_number(opt.k_max) << "\n";
}

void cmd_spectrum_deformation(const SpectrumOptions& opt) {
    Stopwatch watch;
    auto [lo, hi] = parse_range(opt.ratio_range, "--ratio-range");
    if (!(lo >= 1.0)) throw ConfigError("--ratio-range must start at >= 1");

    const DeformationScan scan = spectrum_vs_deformation(
        opt.common.tau0, lo, hi, opt.ratio_samples, opt.m_max, opt.states_per_m);

    ensure_out_dir(opt.common);
    if (opt.common.wants("csv")) {
        io::CsvTable table;
        table.comments = {std::string("paracav ") + kVersion +
                              " spectrum vs deformation sigma0/tau0",
                          kUnitsNote,
                          "fixed tau0=" + format_number(opt.common.tau0)};
        table.header = {"ratio", "l", "n", "m", "a", "k", "k2"};
        for (const DeformationRow& r : scan.rows)
            table.rows.push_back({format_number(r.ratio), std::to_string(r.l),
                                  std::to_string(r.n), std::to_string(r.m),
                                  format_number(r.a), format_number(r.k),
                                  format_number(r.k2)});
        io::write_csv(out_path(opt.common, "deformation.csv"), table);

        io::CsvTable cross;
        cross.comments = {"detected level crossings (secant-refined)", kUnitsNote};
        cross.header = {"l1", "n1", "m1", "l2", "n2", "m2", "ratio"};
        for (const LevelCrossing& c : scan.crossings)
            cross.rows.push_back({std::to_string(c.l1), std::to_string(c.n1),
                                  std::to_string(c.m1), std::to_string(c.l2),
                                  std::to_string(c.n2), std::to_string(c.m2),
                                  format_number(c.ratio)});
        io::write_csv(out_path(opt.common, "crossings.csv"), cross);
    }
    if (opt.common.wants("json")) {
        json meta = base_metadata("spectrum", opt.common, watch.seconds());
        meta["ratio_range"] = {lo, hi};
        meta["ratio_samples"] = opt.ratio_samples;
        meta["states_per_m"] = opt.states_per_m;
        meta["m_max"] = opt.m_max;
        meta["warnings"] = scan.warnings;
        json jc = json::array();
        for (const LevelCrossing& c : scan.crossings)
            jc.push_back({{"state1", {c.l1, c.n1, c.m1}},
                          {"state2", {c.l2, c.n2, c.m2}},
                          {"ratio", c.ratio}});
        meta["crossings"] = jc;
        io::write_text(out_path(opt.common, "deformation_meta.json"),
                       meta.dump(2) + "\n");
    }
    std::cout << "deformation scan: " << scan.rows.size() << " rows, "
              << scan.crossings.size() << " crossings\n";
}

void cmd_spectrum(const SpectrumOptions& opt) {
    if (!opt.ratio_range.empty())
        cmd_spectrum_deformation(opt);
    else
        cmd_spectrum_fixed(opt);
}

// ---------------------------------------------------------------------------
// mode
// ---------------------------------------------------------------------------

struct ModeOptions {
    CommonOptions common;
    int l = 0, n = 0, m = 0;
    std::string grid = "121x81";
    double k_max_hint = 0.0;
};

void cmd_mode(const ModeOptions& opt) {
    Stopwatch watch;
    const Cavity cavity = make_cavity(opt.common);
    if (opt.l < 0 || opt.n < 0) throw ConfigError("--l and --n must be >= 0");
    const int m = std::abs(opt.m);

    // grow k_max until the requested label appears
    double k_max = opt.k_max_hint > 0 ? opt.k_max_hint
                                      : 8.0 / std::sqrt(cavity.scale());
    std::optional<EigenPair> found;
    for (int attempt = 0; attempt < 8 && !found; ++attempt) {
        const EigenSearchResult res = find_eigenpairs(cavity, m, k_max, {});
        for (const EigenPair& p : res.pairs)
            if (p.l == opt.l && p.n == opt.n) {
                found = p;
                break;
            }
        k_max *= 1.5;
    }
    if (!found)
        throw NoSolution("mode (" + std::to_string(opt.l) + "," +
                         std::to_string(opt.n) + "," + std::to_string(opt.m) +
                         ") not found; try a larger --kmax-hint");

    const Eigenmode mode = normalize(*found, cavity);
    const QuantumConstants qc = quantum_constants(mode);
    const CausticPair cp = caustics(qc.alpha_q, qc.beta_q);
    const Correspondence corr = correspond(*found, cavity, 40);

    auto [ns, nt] = parse_grid(opt.grid);
    if (ns < 2 || nt < 2) throw ConfigError("--grid needs at least 2x2");

    ensure_out_dir(opt.common);
    const std::string stem = "mode_l" + std::to_string(opt.l) + "_n" +
                             std::to_string(opt.n) + "_m" + std::to_string(opt.m);
    if (opt.common.wants("csv")) {
        io::CsvTable table;
        table.comments = {std::string("paracav ") + kVersion + " eigenmode samples " +
                              "on the phi = 0 meridional half-plane",
                          kUnitsNote,
                          "pair: a=" + format_number(found->a) +
                              " k=" + format_number(found->k) +
                              " k2=" + format_number(found->k2()),
                          "caustics: sigma_c=" + format_number(cp.sigma_c) +
                              " tau_c=" + format_number(cp.tau_c)};
        table.header = {"sigma", "tau", "rho", "z", "re_psi", "abs2_psi"};
        for (int i = 0; i <= ns; ++i) {
            const double sigma = cavity.sigma0 * i / ns;
            for (int j = 0; j <= nt; ++j) {
                const double tau = cavity.tau0 * j / nt;
                const ParabolicPoint p{sigma, tau, 0.0};
                const Complex psi = eigenmode_eval(mode, p);
                const CartesianPoint c = to_cartesian(p);
                table.rows.push_back({format_number(sigma), format_number(tau),
                                      format_number(cylindrical_radius(c)),
                                      format_number(c.z), format_number(psi.real()),
                                      format_number(std::norm(psi))});
            }
        }
        io::write_csv(out_path(opt.common, stem + ".csv"), table);
    }
    if (opt.common.wants("json")) {
        json meta = base_metadata("mode", opt.common, watch.seconds());
        meta["pair"] = {{"l", found->l}, {"n", found->n}, {"m", found->m},
                        {"a", found->a}, {"k", found->k}, {"k2", found->k2()}};
        meta["normalization"] = mode.normalization;
        meta["constants"] = {{"alpha", qc.alpha_q},
                             {"beta", qc.beta_q},
                             {"C", qc.C_q},
                             {"Lz", qc.Lz_q},
                             {"penetration", qc.penetration}};
        meta["caustics"] = {{"sigma_c", cp.sigma_c}, {"tau_c", cp.tau_c}};
        meta["correspondence"] = {{"winding", corr.winding},
                                  {"s", corr.s},
                                  {"t", corr.t},
                                  {"l", corr.l},
                                  {"winding_residual", corr.winding_residual},
                                  {"closure_residual", corr.closure_residual},
                                  {"has_orbit", corr.has_orbit}};
        io::write_text(out_path(opt.common, stem + "_meta.json"), meta.dump(2) + "\n");
    }
    std::cout << "mode (" << found->l << "," << found->n << "," << found->m
              << "): k2 = " << format_number(found->k2())
              << ", penetration = " << format_number(qc.penetration) << "\n";
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

int cmd_selftest(const CommonOptions& common) {
    const Cavity cavity(3.0, 2.0);
    const AdmissibleTriangle tri = admissible_region(cavity);
    int failures = 0;
    auto report = [&](const char* name, bool ok, double achieved, double tol) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << "  achieved "
                  << format_number(achieved) << " (tolerance " << format_number(tol)
                  << ")\n";
        if (!ok) ++failures;
    };

    {  // closed form vs quadrature on an admissible grid
        double worst = 0;
        const int N = 20;
        for (int i = 1; i < N; ++i) {
            const double alpha = -9.0 + 13.0 * i / N;
            const double bmax = tri.beta_max(alpha);
            for (int j = 1; j < N; ++j) {
                const double beta = bmax * j / N * 0.98;
                worst = std::max(worst,
                                 std::abs(action_sigma_closed(3.0, alpha, beta) -
                                          action_sigma_quadrature(3.0, alpha, beta)));
            }
        }
        report("closed-form action vs quadrature", worst < 1e-9, worst, 1e-9);
    }
    {  // derivative identity
        const double h = 1e-5;
        const double fd = (action_sigma_quadrature(3.0, 1e-5 + h, 1.0) -
                           action_sigma_quadrature(3.0, 1e-5 - h, 1.0)) /
                          (2 * h);
        const double err =
            std::abs(dJ_dalpha(WallId::SigmaWall, cavity, 1e-5, 1.0) - fd);
        report("dJ/dalpha vs finite differences", err < 1e-6, err, 1e-6);
    }
    {  // specfun identities
        double worst = 0;
        for (int i = 0; i < 40; ++i) {
            const Complex a(0.3 + 0.11 * i, -1.0 + 0.05 * i);
            const Complex z(std::cos(1.7 * i) * 2.0 * i, std::sin(2.3 * i) * 2.0 * i);
            if (std::abs(z) > 79) continue;
            const Complex lhs = kummer_m(a, a, z);
            worst = std::max(worst, std::abs(lhs - std::exp(z)) / std::abs(std::exp(z)));
        }
        report("Kummer M(a,a,z) = exp(z)", worst < 1e-11, worst, 1e-11);
        const Complex w = whittaker_m(0.0, 0.5, Complex(1.0, 0.0));
        const double err = std::abs(w - 2.0 * std::sinh(0.5));
        report("Whittaker closed form", err < 1e-12, err, 1e-12);
    }
    {  // conservation along a long trajectory
        const MotionConstants mc{1.0, -1.3, 1.7};
        const Trajectory traj = simulate(cavity, standard_start(cavity, mc), 2000);
        report("conservation drift over 2000 bounces", traj.max_drift < 1e-9,
               traj.max_drift, 1e-9);
    }
    {  // axial orbit length
        const PeriodicOrbit orbit =
            build_orbit(cavity, {1, 1, 0}, solve_orbit(cavity, {1, 1, 0}));
        const double err = std::abs(orbit.length - 13.0);
        report("axis orbit length sigma0^2 + tau0^2", err < 1e-12, err, 1e-12);
    }
    {  // ground state of the reference cavity
        const EigenSearchResult res = find_eigenpairs(cavity, 0, 1.0, {});
        const bool ok = !res.pairs.empty() &&
                        std::abs(res.pairs[0].k2() - 0.5931) < 0.01;
        report("ground eigenvalue k2", ok, ok ? res.pairs[0].k2() : -1, 0.5931);
    }
    (void)common;
    return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("paracav ") + kVersion +
                 " - classical and quantum workbench for a particle in a "
                 "confocal paraboloidal cavity"};
    app.require_subcommand(1);

    TrajectoryOptions traj_opt;
    CLI::App* traj = app.add_subcommand(
        "trajectory", "simulate elastic bouncing for constants (alpha, beta)");
    add_common(traj, traj_opt.common);
    traj->add_option("--alpha", traj_opt.alpha, "third constant of motion (length)");
    traj->add_option("--beta", traj_opt.beta, "Lz^2/P^2 (length^2, >= 0)");
    traj->add_option("--bounces", traj_opt.bounces, "number of wall collisions");

    PoincareOptions poin_opt;
    CLI::App* poin = app.add_subcommand(
        "poincare", "evaluate alpha/beta phase-map fields on a section plane");
    add_common(poin, poin_opt.common);
    poin->add_option("--plane", poin_opt.plane, "section plane: sigma or tau");
    poin->add_option("--field", poin_opt.field, "field to solve for: alpha or beta");
    poin->add_option("--fixed", poin_opt.fixed,
                     "the held constant (beta for --field alpha, alpha otherwise)");
    poin->add_option("--qrange", poin_opt.qrange, "coordinate range LO:HI");
    poin->add_option("--prange", poin_opt.prange, "momentum range LO:HI");
    poin->add_option("--grid", poin_opt.grid, "grid size NQxNP");

    OrbitOptions orb_opt;
    CLI::App* orb = app.add_subcommand(
        "orbit", "solve and verify periodic orbits for indices (s,t,l)");
    add_common(orb, orb_opt.common);
    orb->add_option("--spec", orb_opt.specs, "orbit spec s,t,l (repeatable)");
    orb->add_option("--s", orb_opt.s, "sigma-wall bounce count (single spec)");
    orb->add_option("--t", orb_opt.t, "tau-wall bounce count (single spec)");
    orb->add_option("--l", orb_opt.l, "revolution count (single spec)");

    SpectrumOptions spec_opt;
    CLI::App* spec = app.add_subcommand(
        "spectrum", "Dirichlet eigenpairs, or a deformation scan with "
                    "--ratio-range");
    add_common(spec, spec_opt.common);
    spec->add_option("--mmax", spec_opt.m_max, "largest azimuthal number scanned");
    spec->add_option("--kmax", spec_opt.k_max, "wavenumber cutoff (fixed cavity)");
    spec->add_flag("--skip-penetration", spec_opt.skip_penetration,
                   "omit the penetration-ratio column");
    spec->add_option("--ratio-range", spec_opt.ratio_range,
                     "deformation scan range LO:HI of sigma0/tau0");
    spec->add_option("--ratio-samples", spec_opt.ratio_samples,
                     "number of deformation samples");
    spec->add_option("--states-per-m", spec_opt.states_per_m,
                     "states tracked per m in the deformation scan");

    ModeOptions mode_opt;
    CLI::App* mode = app.add_subcommand(
        "mode", "evaluate one eigenmode on a meridional grid");
    add_common(mode, mode_opt.common);
    mode->add_option("--l", mode_opt.l, "sigma node count");
    mode->add_option("--n", mode_opt.n, "tau node count");
    mode->add_option("--m", mode_opt.m, "azimuthal number");
    mode->add_option("--grid", mode_opt.grid, "sample grid NSxNT");
    mode->add_option("--kmax-hint", mode_opt.k_max_hint,
                     "initial wavenumber cutoff for the label search");

    CommonOptions self_opt;
    CLI::App* self = app.add_subcommand(
        "selftest", "run the built-in oracle suites and report tolerances");
    add_common(self, self_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (traj->parsed()) {
            merge_config(traj, traj_opt.common.config_file);
            traj_opt.common.tol.apply(traj_opt.common.tol_overrides);
            cmd_trajectory(traj_opt);
        } else if (poin->parsed()) {
            merge_config(poin, poin_opt.common.config_file);
            poin_opt.common.tol.apply(poin_opt.common.tol_overrides);
            cmd_poincare(poin_opt);
        } else if (orb->parsed()) {
            merge_config(orb, orb_opt.common.config_file);
            orb_opt.common.tol.apply(orb_opt.common.tol_overrides);
            cmd_orbit(orb_opt);
        } else if (spec->parsed()) {
            merge_config(spec, spec_opt.common.config_file);
            spec_opt.common.tol.apply(spec_opt.common.tol_overrides);
            cmd_spectrum(spec_opt);
        } else if (mode->parsed()) {
            merge_config(mode, mode_opt.common.config_file);
            mode_opt.common.tol.apply(mode_opt.common.tol_overrides);
            cmd_mode(mode_opt);
        } else if (self->parsed()) {
            return cmd_selftest(self_opt);
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 4;
    } catch (const NumericsError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
