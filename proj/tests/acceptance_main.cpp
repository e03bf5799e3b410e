// Acceptance suite for the paraboloidal-cavity workbench. Each criterion
// prints one PASS/FAIL line with the achieved numbers; the process exits
// nonzero if any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "paracav/actions.hpp"
#include "paracav/dynamics.hpp"
#include "paracav/errors.hpp"
#include "paracav/geometry.hpp"
#include "paracav/kummer.hpp"
#include "paracav/orbits.hpp"
#include "paracav/quadrature.hpp"
#include "paracav/spectrum.hpp"

#include "../tools/workbench_io.hpp"

namespace fs = std::filesystem;
using namespace paracav;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int g_failures = 0;

void report(int index, const std::string& name, bool pass,
            const std::string& detail) {
    std::printf("%s criterion %d: %s  [%s]\n", pass ? "PASS" : "FAIL", index,
                name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

std::mt19937_64 g_rng(0x5EED5EEDull);

double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g_rng);
}

// Reference eigenstate table for the (3,2) cavity: k^2, (l,n,m) as printed in
// the source material, alpha, beta, penetration ratio. Labels are matched
// separately from values (the value multiset is the binding contract).
struct TableRow {
    double k2;
    int l, n, m;
    double alpha, beta, pi;
};
const std::array<TableRow, 18> kReferenceTable = {{
    {0.59, 0, 0, 0, -1.17, 0.00, 0.06},
    {1.04, 0, 0, 1, -2.18, 0.96, 0.13},
    {1.48, 1, 0, 0, 0.04, 0.00, 0.01},
    {1.56, 0, 0, 2, -3.15, 2.56, 0.20},
    {1.71, 0, 2, 0, -4.28, 0.00, 0.25},
    {2.13, 1, 0, 1, -0.37, 0.47, 0.10},
    {2.16, 0, 0, 3, -4.09, 4.16, 0.31},
    {2.44, 0, 2, 1, -5.85, 0.41, 0.56},
    {2.78, 2, 0, 0, 1.02, 0.00, 0.27},
    {2.84, 0, 0, 4, -5.01, 5.64, 0.49},
    {2.87, 1, 0, 2, -0.91, 1.39, 0.13},
    {3.10, 1, 2, 0, -2.34, 0.00, 0.26},
    {3.25, 0, 1, 2, -7.24, 1.23, 0.88},
    {3.38, 0, 1, 0, -7.90, 0.00, 0.96},
    {3.59, 0, 0, 5, -5.93, 6.97, 0.73},
    {3.61, 2, 0, 1, 1.03, 0.28, 0.22},
    {3.69, 1, 0, 3, -1.51, 2.44, 0.17},
    {4.09, 1, 2, 1, -3.52, 0.24, 0.45},
}};

struct SpectrumRow {
    int l, n, m;
    double k2, alpha, beta, pi;
    bool used = false;
};

std::vector<SpectrumRow> run_spectrum_command(const fs::path& dir) {
    fs::create_directories(dir);
    const std::string cmd = std::string(PARACAV_CLI_PATH) +
                            " spectrum --sigma0 3 --tau0 2 --mmax 5 --kmax 2.0249 "
                            "--out " +
                            dir.string() + " > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0)
        throw Error("spectrum command failed");
    const io::CsvTable table = io::read_csv((dir / "spectrum.csv").string());
    std::vector<SpectrumRow> rows;
    for (const auto& r : table.rows)
        rows.push_back({std::stoi(r[0]), std::stoi(r[1]), std::stoi(r[2]),
                        std::stod(r[5]), std::stod(r[6]), std::stod(r[7]),
                        std::stod(r[8])});
    return rows;
}

// ---------------------------------------------------------------------------

void criterion_1_and_2() {
    Stopwatch watch;
    std::vector<SpectrumRow> rows;
    const fs::path dir = fs::temp_directory_path() / "paracav_acceptance_spectrum";
    try {
        rows = run_spectrum_command(dir);
    } catch (const std::exception& e) {
        report(1, "reference-table reproduction", false, e.what());
        report(2, "beta identity audit", false, "spectrum run failed");
        return;
    }

    // criterion 1: every reference row matches a distinct computed row
    int matched = 0;
    double worst_k2 = 0, worst_alpha = 0, worst_beta = 0, worst_pi = 0;
    int label_mismatches = 0;
    for (const TableRow& want : kReferenceTable) {
        SpectrumRow* best = nullptr;
        for (SpectrumRow& got : rows) {
            if (got.used) continue;
            if (std::abs(got.k2 - want.k2) > 0.01) continue;
            if (std::abs(got.alpha - want.alpha) > 0.02) continue;
            if (std::abs(got.beta - want.beta) > 0.02) continue;
            if (std::abs(got.pi - want.pi) > 0.02) continue;
            if (got.m != want.m) continue;
            best = &got;
            break;
        }
        if (best) {
            best->used = true;
            ++matched;
            worst_k2 = std::max(worst_k2, std::abs(best->k2 - want.k2));
            worst_alpha = std::max(worst_alpha, std::abs(best->alpha - want.alpha));
            worst_beta = std::max(worst_beta, std::abs(best->beta - want.beta));
            worst_pi = std::max(worst_pi, std::abs(best->pi - want.pi));
            if (best->l != want.l || best->n != want.n) ++label_mismatches;
        }
    }
    std::ostringstream detail;
    detail << matched << "/18 rows matched; worst |dk2| = " << worst_k2
           << ", |dalpha| = " << worst_alpha << ", |dbeta| = " << worst_beta
           << ", |dPi| = " << worst_pi << "; node-count labels differ from the "
           << "printed ones on " << label_mismatches << " rows; runtime "
           << watch.seconds() << " s";
    report(1, "reference-table reproduction (18 rows, +-0.01/0.02/0.02/0.02)",
           matched == 18 && watch.seconds() < 120.0, detail.str());

    // criterion 2: beta = m^2/k^2 exactly, and equals the table to rounding
    double worst_exact = 0, worst_round = 0;
    for (const SpectrumRow& got : rows) {
        if (got.m == 0) {
            worst_exact = std::max(worst_exact, std::abs(got.beta));
            continue;
        }
        const double expect = static_cast<double>(got.m) * got.m / got.k2;
        worst_exact =
            std::max(worst_exact, std::abs(got.beta - expect) / expect);
    }
    for (const TableRow& want : kReferenceTable) {
        if (want.m == 0) continue;
        // identify the matching computed row by k2 again
        for (const SpectrumRow& got : rows)
            if (got.m == want.m && std::abs(got.k2 - want.k2) <= 0.01)
                worst_round = std::max(worst_round, std::abs(got.beta - want.beta));
    }
    std::ostringstream d2;
    d2 << "max relative |beta - m^2/k^2| = " << worst_exact
       << "; max |beta - table| = " << worst_round;
    report(2, "internal beta identity (m^2/k^2, table rounding)",
           worst_exact < 1e-12 && worst_round < 0.01, d2.str());
}

void criterion_3() {
    Stopwatch watch;
    // crossing of (0,0,2) and (1,0,0) under deformation at fixed tau0 = 1
    bool crossing_ok = false;
    double crossing_ratio = 0;
    std::string scan_error;
    try {
        const DeformationScan scan =
            spectrum_vs_deformation(1.0, 1.15, 1.35, 5, 2, 4);
        for (const LevelCrossing& c : scan.crossings) {
            const bool pair_a = c.l1 == 0 && c.n1 == 0 && c.m1 == 2 && c.l2 == 1 &&
                                c.n2 == 0 && c.m2 == 0;
            const bool pair_b = c.l1 == 1 && c.n1 == 0 && c.m1 == 0 && c.l2 == 0 &&
                                c.n2 == 0 && c.m2 == 2;
            if ((pair_a || pair_b) && std::abs(c.ratio - 1.25) <= 0.05) {
                crossing_ok = true;
                crossing_ratio = c.ratio;
            }
        }
    } catch (const std::exception& e) {
        scan_error = e.what();
    }

    // symmetric cavity: (l,n) swap degeneracy at ratio 1
    double worst_swap = 1e300;
    try {
        const Cavity sym(1.0, 1.0);
        const EigenSearchResult res = find_eigenpairs(sym, 0, 11.0, {});
        worst_swap = 0;
        int pairs_checked = 0;
        for (const EigenPair& p : res.pairs) {
            if (p.l >= p.n) continue;
            for (const EigenPair& q : res.pairs)
                if (q.l == p.n && q.n == p.l) {
                    worst_swap = std::max(worst_swap,
                                          std::abs(q.k2() - p.k2()) / p.k2());
                    ++pairs_checked;
                }
        }
        if (pairs_checked == 0) worst_swap = 1e300;
    } catch (const std::exception&) {
    }

    // +-m degeneracy is structural: the solver sees |m| only
    const Cavity cav(3.0, 2.0);
    const EigenSearchResult plus = find_eigenpairs(cav, 1, 1.1, {});
    const EigenSearchResult minus = find_eigenpairs(cav, -1, 1.1, {});
    const bool pm_ok = !plus.pairs.empty() && plus.pairs.size() == minus.pairs.size() &&
                       plus.pairs[0].k == minus.pairs[0].k;

    std::ostringstream detail;
    detail << "crossing at ratio " << crossing_ratio << " (target 1.25 +- 0.05)"
           << (scan_error.empty() ? "" : " [scan error: " + scan_error + "]")
           << "; max symmetric-swap energy split " << worst_swap
           << "; +-m identical: " << (pm_ok ? "yes" : "no") << "; runtime "
           << watch.seconds() << " s";
    report(3, "deformation degeneracies", crossing_ok && worst_swap < 1e-8 && pm_ok,
           detail.str());
}

void criterion_4() {
    Stopwatch watch;
    double worst_closed = 0, worst_dalpha = 0, worst_dbeta = 0;
    for (const auto& [s0, t0] : std::vector<std::pair<double, double>>{{3, 2}, {1, 1}}) {
        const Cavity cavity(s0, t0);
        const AdmissibleTriangle tri = admissible_region(cavity);
        const int N = 50;
        for (int i = 1; i <= N; ++i) {
            const double alpha =
                -s0 * s0 + (t0 * t0 + s0 * s0) * (i - 0.5) / N;
            const double bmax = tri.beta_max(alpha);
            for (int j = 1; j <= N; ++j) {
                const double beta = bmax * (j - 0.5) / N;
                const double closed = action_sigma_closed(s0, alpha, beta);
                const double quad = action_sigma_quadrature(s0, alpha, beta);
                worst_closed = std::max(worst_closed, std::abs(closed - quad));
            }
        }
        // derivative identities on a coarser sub-grid
        for (int i = 1; i <= 4; ++i) {
            const double alpha = -s0 * s0 + (t0 * t0 + s0 * s0) * i / 5.0;
            const double bmax = tri.beta_max(alpha);
            for (int j = 1; j <= 4; ++j) {
                const double beta = bmax * j / 5.0;
                const double h = 1e-5;
                const double fd_a = (action_sigma_quadrature(s0, alpha + h, beta) -
                                     action_sigma_quadrature(s0, alpha - h, beta)) /
                                    (2 * h);
                worst_dalpha = std::max(
                    worst_dalpha,
                    std::abs(dJ_dalpha(WallId::SigmaWall, cavity, alpha, beta) - fd_a));
                const double hb = 1e-6 * std::max(beta, 1.0);
                const double fd_b = (action_sigma_quadrature(s0, alpha, beta + hb) -
                                     action_sigma_quadrature(s0, alpha, beta - hb)) /
                                    (2 * hb);
                const double via_theta =
                    -theta_sigma(cavity, alpha, beta) / (2.0 * std::sqrt(beta));
                worst_dbeta = std::max(worst_dbeta, std::abs(via_theta - fd_b));
            }
        }
    }
    std::ostringstream detail;
    detail << "max |closed - quadrature| = " << worst_closed
           << " (tol 1e-9); max dJ/dalpha error = " << worst_dalpha
           << ", dJ/dbeta (theta route) error = " << worst_dbeta
           << " (tol 1e-6); runtime " << watch.seconds() << " s";
    report(4, "closed-form action certification (50x50, two cavities)",
           worst_closed < 1e-9 && worst_dalpha < 1e-6 && worst_dbeta < 1e-6 &&
               watch.seconds() < 60.0,
           detail.str());
}

void criterion_5() {
    Stopwatch watch;
    const Cavity cavity(3.0, 2.0);
    const AdmissibleTriangle tri = admissible_region(cavity);
    double worst_drift = 0, worst_violation = 0;
    int runs = 0;
    std::string error;
    try {
        while (runs < 20) {
            const double alpha = uniform(-8.9, 3.9);
            const double bmax = tri.beta_max(alpha);
            const double beta = uniform(0.02, 0.95) * bmax;
            if (!tri.contains(alpha, beta, -1e-9)) continue;
            ++runs;
            const MotionConstants mc{1.0, alpha, beta};
            const CausticPair cp = caustics(alpha, beta);
            const Trajectory traj =
                simulate(cavity, standard_start(cavity, mc), 10000);
            worst_drift = std::max(worst_drift, traj.max_drift);
            // sample each segment interior for caustic violations
            CartesianPoint prev = traj.initial.position;
            int step = 0;
            for (const BounceRecord& b : traj.bounces) {
                if (step++ % 5 == 0) {
                    for (int k = 1; k < 8; ++k) {
                        const CartesianPoint mid =
                            prev + (b.point - prev) * (k / 8.0);
                        const ParabolicPoint q = to_parabolic(mid);
                        worst_violation = std::max(worst_violation, cp.sigma_c - q.sigma);
                        worst_violation = std::max(worst_violation, cp.tau_c - q.tau);
                    }
                }
                prev = b.point;
            }
        }
    } catch (const std::exception& e) {
        error = e.what();
    }
    std::ostringstream detail;
    detail << runs << " runs x 10^4 bounces; max relative drift = " << worst_drift
           << " (tol 1e-9); max caustic violation = " << worst_violation
           << " (tol 1e-9)" << (error.empty() ? "" : "; error: " + error)
           << "; runtime " << watch.seconds() << " s";
    report(5, "conservation suite", error.empty() && worst_drift < 1e-9 &&
                                        worst_violation < 1e-9,
           detail.str());
}

void criterion_6() {
    Stopwatch watch;
    const Cavity cavity(3.0, 2.0);
    int admitted = 0, verified = 0;
    double worst_closure = 0, worst_length = 0, worst_phi = 0;
    std::ostringstream specs;
    bool axis_ok = false;
    std::string error;
    try {
        for (int total = 2; total <= 7; ++total) {
            for (int s = 1; s < total; ++s) {
                const int t = total - s;
                for (int l = 0; l <= lmax(s, t); ++l) {
                    const std::vector<OrbitRoot> roots =
                        solve_orbit_all(cavity, {s, t, l});
                    bool has_primitive = false;
                    for (const OrbitRoot& r : roots)
                        if (r.primitive) has_primitive = true;
                    if (!has_primitive) continue;
                    ++admitted;
                    specs << "(" << s << "," << t << "," << l << ") ";

                    PeriodicOrbit orbit =
                        build_orbit(cavity, {s, t, l}, solve_orbit(cavity, {s, t, l}));
                    bool ok = orbit.closure_error < 1e-6 * cavity.scale() &&
                              orbit.sigma_bounces == s && orbit.tau_bounces == t;
                    worst_closure = std::max(worst_closure, orbit.closure_error);
                    if (l > 0) {
                        const double dphi =
                            std::abs(orbit.azimuthal_advance - kTwoPi * l);
                        worst_phi = std::max(worst_phi, dphi);
                        ok = ok && dphi < 1e-6;
                    } else {
                        ok = ok && orbit.meridional;
                    }
                    const double rel_len =
                        std::abs(orbit.length - orbit.trajectory.total_length) /
                        orbit.length;
                    worst_length = std::max(worst_length, rel_len);
                    ok = ok && rel_len < 1e-8;
                    if (ok) ++verified;

                    if (s == 1 && t == 1 && l == 0)
                        axis_ok = std::abs(orbit.length - 13.0) < 1e-12;
                }
            }
        }
    } catch (const std::exception& e) {
        error = e.what();
    }
    std::ostringstream detail;
    detail << verified << "/" << admitted << " admitted specs verified: " << specs.str()
           << "; worst closure = " << worst_closure
           << ", worst |L - arc|/L = " << worst_length
           << ", worst |dphi - 2 pi l| = " << worst_phi
           << "; L(1,1,0) = 13 exact: " << (axis_ok ? "yes" : "no")
           << (error.empty() ? "" : "; error: " + error) << "; runtime "
           << watch.seconds() << " s";
    report(6, "periodic-orbit closure (s+t <= 7)",
           error.empty() && admitted > 0 && verified == admitted && axis_ok,
           detail.str());
}

struct OracleRow {
    std::array<double, 2> a, b, z, value;
};

const std::vector<OracleRow>& kummer_oracle() {
    static const std::vector<OracleRow> rows =
#include "data/kummer_oracle.inc"
        ;
    return rows;
}

const std::vector<OracleRow>& whittaker_oracle() {
    static const std::vector<OracleRow> rows =
#include "data/whittaker_oracle.inc"
        ;
    return rows;
}

void criterion_7() {
    Stopwatch watch;
    auto cplx = [](const std::array<double, 2>& p) { return Complex{p[0], p[1]}; };
    double worst_k = 0, worst_w = 0;
    for (const OracleRow& row : kummer_oracle()) {
        const Complex got = kummer_m(cplx(row.a), cplx(row.b), cplx(row.z));
        worst_k = std::max(worst_k, std::abs(got - cplx(row.value)) /
                                        std::abs(cplx(row.value)));
    }
    for (const OracleRow& row : whittaker_oracle()) {
        const Complex got = whittaker_m(cplx(row.a), cplx(row.b), cplx(row.z));
        worst_w = std::max(worst_w, std::abs(got - cplx(row.value)) /
                                        std::abs(cplx(row.value)));
    }

    double worst_transform = 0, worst_expz = 0;
    for (int i = 0; i < 300; ++i) {
        const Complex a{uniform(-4, 4), uniform(-4, 4)};
        const Complex b{uniform(0.5, 5), uniform(-2, 2)};
        const double r = uniform(0, 70), th = uniform(0, kTwoPi);
        const Complex z{r * std::cos(th), r * std::sin(th)};
        const Complex lhs = kummer_m(a, b, z);
        const Complex rhs = std::exp(z) * kummer_m(b - a, b, -z);
        worst_transform =
            std::max(worst_transform, std::abs(lhs - rhs) /
                                          std::max(std::abs(lhs), 1e-300));
        const Complex diag = kummer_m(a, a, z);
        worst_expz = std::max(worst_expz, std::abs(diag - std::exp(z)) /
                                              std::abs(std::exp(z)));
    }

    // realness of the radial combination over a parameter sweep
    double worst_im = 0;
    for (int i = 0; i < 200; ++i) {
        const double k = uniform(0.2, 2.2);
        const double a = uniform(-5, 5);
        const int m = static_cast<int>(uniform(0, 4));
        const double sigma = uniform(0, 3.0);
        const Complex z{0.0, k * sigma * sigma};
        const Complex w = std::exp(-0.5 * z) *
                          kummer_m(Complex(0.5 * m + 0.5, a / (2 * k)),
                                   Complex(m + 1.0), z);
        worst_im = std::max(worst_im,
                            std::abs(w.imag()) / std::max(std::abs(w.real()), 1.0));
    }

    std::ostringstream detail;
    detail << "oracle (1000+1000 pts): kummer " << worst_k << " (tol 1e-12), "
           << "whittaker " << worst_w << " (tol 1e-11); transform " << worst_transform
           << ", M(a,a,z)=e^z " << worst_expz << " (tol 1e-11); realness "
           << worst_im << " (tol 1e-9); runtime " << watch.seconds() << " s";
    report(7, "special-function certification",
           worst_k < 1e-12 && worst_w < 1e-11 && worst_transform < 1e-11 &&
               worst_expz < 1e-11 && worst_im < 1e-9,
           detail.str());
}

void criterion_8() {
    Stopwatch watch;
    const Cavity cavity(3.0, 2.0);
    double worst_offdiag = 0, worst_diag = 0;
    std::string error;
    try {
        for (int m = 0; m <= 2; ++m) {
            double k_max = 2.0;
            std::vector<EigenPair> pairs;
            for (int grow = 0; grow < 8; ++grow) {
                EigenSearchOptions opts;
                opts.refinement_guard = false;
                pairs = find_eigenpairs(cavity, m, k_max, opts).pairs;
                if (pairs.size() >= 10) break;
                k_max *= 1.35;
            }
            if (pairs.size() < 10) throw Error("fewer than 10 modes found");
            pairs.resize(10);
            std::vector<Eigenmode> modes;
            for (const EigenPair& p : pairs) modes.push_back(normalize(p, cavity));
            for (size_t i = 0; i < modes.size(); ++i) {
                for (size_t j = i; j < modes.size(); ++j) {
                    const double g = std::abs(inner_product(modes[i], modes[j]));
                    if (i == j)
                        worst_diag = std::max(worst_diag, std::abs(g - 1.0));
                    else
                        worst_offdiag = std::max(worst_offdiag, g);
                }
            }
        }
    } catch (const std::exception& e) {
        error = e.what();
    }
    std::ostringstream detail;
    detail << "10 modes per m in {0,1,2}; max off-diagonal = " << worst_offdiag
           << " (tol 1e-5), max |diagonal - 1| = " << worst_diag
           << " (tol 1e-6)" << (error.empty() ? "" : "; error: " + error)
           << "; runtime " << watch.seconds() << " s";
    report(8, "orthonormality of the Gram matrix",
           error.empty() && worst_offdiag < 1e-5 && worst_diag < 1e-6, detail.str());
}

void criterion_9() {
    Stopwatch watch;
    const Cavity cavity(3.0, 2.0);
    double worst_const = 0;
    std::string error;
    try {
        for (int run = 0; run < 6; ++run) {
            const double alpha = uniform(-8.5, 3.5);
            const MotionConstants mc{1.0, alpha, 0.0};
            const double expect = alpha;  // planar constant / P^2
            const Trajectory traj = simulate(cavity, standard_start(cavity, mc), 1000);
            CartesianPoint prev = traj.initial.position;
            for (size_t i = 0; i < traj.bounces.size(); ++i) {
                const BounceRecord& b = traj.bounces[i];
                if (i % 37 == 0) {
                    // mid-segment state keeps the incoming momentum
                    const CartesianPoint mid = prev + (b.point - prev) * 0.5;
                    const double value = planar_constant({mid, b.momentum_in});
                    worst_const = std::max(worst_const, std::abs(value - expect));
                }
                prev = b.point;
            }
        }
    } catch (const std::exception& e) {
        error = e.what();
    }

    // beta = 0 Poincare grid vs the planar formula
    double worst_grid = 0;
    const PoincareGrid grid = poincare_field(SectionPlane::TauPlane, SolveFor::Alpha,
                                             0.0, 1.7, 0.05, 2.0, 60, -3, 3, 61);
    for (size_t i = 0; i < grid.p.size(); ++i)
        for (size_t j = 0; j < grid.q.size(); ++j) {
            const double expect =
                grid.q[j] * grid.q[j] - grid.p[i] * grid.p[i] / (1.7 * 1.7);
            worst_grid = std::max(worst_grid,
                                  std::abs(grid.values[i * grid.q.size() + j] - expect));
        }

    std::ostringstream detail;
    detail << "max |planar constant - alpha P^2| = " << worst_const
           << " (tol 1e-9); max poincare grid deviation = " << worst_grid
           << " (tol 1e-12)" << (error.empty() ? "" : "; error: " + error)
           << "; runtime " << watch.seconds() << " s";
    report(9, "planar-billiard reduction",
           error.empty() && worst_const < 1e-9 && worst_grid < 1e-12, detail.str());
}

}  // namespace

int main() {
    std::printf("paracav acceptance suite\n");
    criterion_1_and_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("%s: %d criterion failure(s)\n", g_failures == 0 ? "OK" : "FAILED",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
