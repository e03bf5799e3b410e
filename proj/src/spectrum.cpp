#include "paracav/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <tuple>

#include "paracav/actions.hpp"
#include "paracav/errors.hpp"
#include "paracav/quadrature.hpp"
#include "paracav/rational.hpp"

namespace paracav {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double radial_S(double sigma, double a, double k, int m_abs,
                const SpecFunDomain& dom) {
    if (!(k > 0)) throw DomainError("radial_S: k must be positive");
    if (sigma < 0) throw DomainError("radial_S: sigma must be nonnegative");
    m_abs = std::abs(m_abs);
    if (sigma == 0.0) return m_abs == 0 ? 1.0 : 0.0;
    const double mu = 0.5 * m_abs;
    const Complex z(0.0, k * sigma * sigma);
    const Complex am(mu + 0.5, a / (2.0 * k));
    const Complex val = std::exp(-0.5 * z) * kummer_m(am, Complex(2.0 * mu + 1.0), z, dom);
    // self-conjugate combination: the imaginary part is pure rounding noise.
    // The envelope starts at val = 1 for sigma = 0, so the interval maximum of
    // |Re| is 1 and the realness bound compares against that scale.
    if (std::abs(val.imag()) > 1e-9 * std::max(std::abs(val.real()), 1.0))
        throw NumericsError("radial_S: imaginary part exceeded the realness bound");
    return std::pow(sigma, m_abs) * val.real();
}

double radial_T(double tau, double a, double k, int m_abs, const SpecFunDomain& dom) {
    return radial_S(tau, -a, k, m_abs, dom);
}

std::pair<double, double> boundary_residuals(double a, double k, const Cavity& cavity,
                                             int m) {
    return {radial_S(cavity.sigma0, a, k, m), radial_T(cavity.tau0, a, k, m)};
}

namespace {

int count_interior_nodes(double wall, double a, double k, int m_abs) {
    // ~20 samples per radial oscillation; phase grows like k w^2 / 2
    const int n = 64 + 20 * static_cast<int>(std::ceil(k * wall * wall / std::numbers::pi));
    int count = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (int i = 1; i < n; ++i) {
        const double v = radial_S(wall * i / n, a, k, m_abs);
        if (v == 0.0) continue;
        if (have_prev && v * prev < 0) ++count;
        prev = v;
        have_prev = true;
    }
    return count;
}

struct RawRoot {
    double a, k;
};

// Damped 2D Newton on the Dirichlet residuals with finite-difference Jacobian.
bool refine_root(const Cavity& cavity, int m, double& a, double& k, double k_cap,
                 double tol) {
    auto F = [&](double aa, double kk) {
        return boundary_residuals(aa, kk, cavity, m);
    };
    for (int it = 0; it < 80; ++it) {
        if (!(k > 1e-8)) return false;
        const auto [f1, f2] = F(a, k);
        const double ha = 1e-7 * std::max(std::abs(a), 0.1);
        const double hk = 1e-7 * std::max(k, 0.1);
        const auto [f1pa, f2pa] = F(a + ha, k);
        const auto [f1ma, f2ma] = F(a - ha, k);
        const auto [f1pk, f2pk] = F(a, k + hk);
        const auto [f1mk, f2mk] = F(a, k - hk);
        const double j11 = (f1pa - f1ma) / (2 * ha), j12 = (f1pk - f1mk) / (2 * hk);
        const double j21 = (f2pa - f2ma) / (2 * ha), j22 = (f2pk - f2mk) / (2 * hk);
        const double det = j11 * j22 - j12 * j21;
        if (det == 0 || !std::isfinite(det)) return false;
        const double da = (f1 * j22 - f2 * j12) / det;
        const double dk = (f2 * j11 - f1 * j21) / det;
        const double n0 = std::abs(f1) + std::abs(f2);
        double lam = 1.0;
        double na = a, nk = k;
        for (int b = 0; b < 30; ++b, lam *= 0.5) {
            na = a - lam * da;
            nk = k - lam * dk;
            if (nk <= 1e-8 || nk > 2.0 * k_cap) continue;
            const auto [g1, g2] = F(na, nk);
            if (std::abs(g1) + std::abs(g2) < n0) break;
        }
        a = na;
        k = nk;
        if (std::abs(da * lam) + std::abs(dk * lam) < 1e-13 * std::max(1.0, k)) break;
    }
    const auto [f1, f2] = F(a, k);
    return std::abs(f1) < tol && std::abs(f2) < tol;
}

std::vector<RawRoot> scan_roots(const Cavity& cavity, int m, double k_max,
                                int k_samples, int a_samples, double tol) {
    std::vector<RawRoot> roots;
    const double s02 = cavity.sigma0 * cavity.sigma0;
    const double t02 = cavity.tau0 * cavity.tau0;
    const double k_min = k_max / k_samples;

    std::vector<double> prev_f1, prev_f2, prev_a;
    double prev_k = 0;
    for (int ik = 0; ik < k_samples; ++ik) {
        const double k = k_min + (k_max - k_min) * ik / (k_samples - 1.0);
        std::vector<double> f1(a_samples), f2(a_samples), av(a_samples);
        // Oscillation band: a Dirichlet zero of S needs the radial coefficient
        // k^2 w^2 - m^2/w^2 + 2a to be positive at the wall (it increases in
        // w), and likewise for T with a -> -a. Roots cannot exist outside
        // this strip; scan it with a 5% margin.
        double a_lo = 0.5 * (m * m / s02 - k * k * s02);
        double a_hi = 0.5 * (k * k * t02 - m * m / t02);
        if (a_hi <= a_lo) continue;
        const double pad = 0.05 * (a_hi - a_lo);
        a_lo -= pad;
        a_hi += pad;
        for (int ia = 0; ia < a_samples; ++ia) {
            av[ia] = a_lo + (a_hi - a_lo) * ia / (a_samples - 1.0);
            const auto [r1, r2] = boundary_residuals(av[ia], k, cavity, m);
            f1[ia] = r1;
            f2[ia] = r2;
        }
        if (!prev_f1.empty()) {
            for (int ia = 0; ia + 1 < a_samples; ++ia) {
                const double c1[4] = {prev_f1[ia], prev_f1[ia + 1], f1[ia], f1[ia + 1]};
                const double c2[4] = {prev_f2[ia], prev_f2[ia + 1], f2[ia], f2[ia + 1]};
                auto sign_change = [](const double* c) {
                    bool pos = false, neg = false;
                    for (int i = 0; i < 4; ++i) (c[i] >= 0 ? pos : neg) = true;
                    return pos && neg;
                };
                if (!sign_change(c1) || !sign_change(c2)) continue;
                double a = 0.25 * (prev_a[ia] + prev_a[ia + 1] + av[ia] + av[ia + 1]);
                double k_guess = 0.5 * (prev_k + k);
                if (refine_root(cavity, m, a, k_guess, k_max, tol)) {
                    if (k_guess > 0 && k_guess <= k_max * (1 + 1e-12))
                        roots.push_back({a, k_guess});
                }
            }
        }
        prev_f1 = std::move(f1);
        prev_f2 = std::move(f2);
        prev_a = std::move(av);
        prev_k = k;
    }

    // dedup by relative (a, k) separation
    std::sort(roots.begin(), roots.end(),
              [](const RawRoot& x, const RawRoot& y) { return x.k < y.k; });
    std::vector<RawRoot> unique;
    for (const RawRoot& r : roots) {
        bool dup = false;
        for (const RawRoot& u : unique)
            if (std::abs(r.k - u.k) < 1e-8 * std::max(1.0, u.k) &&
                std::abs(r.a - u.a) < 1e-8 * std::max(1.0, std::abs(u.a)))
                dup = true;
        if (!dup) unique.push_back(r);
    }
    return unique;
}

}  // namespace

EigenSearchResult find_eigenpairs(const Cavity& cavity, int m, double k_max,
                                  const EigenSearchOptions& opts) {
    if (!(k_max > 0)) throw DomainError("find_eigenpairs: k_max must be positive");
    m = std::abs(m);
    EigenSearchResult result;

    std::vector<RawRoot> roots = scan_roots(cavity, m, k_max, opts.k_samples,
                                            opts.a_samples, opts.newton_tol);
    if (opts.refinement_guard) {
        const std::vector<RawRoot> fine =
            scan_roots(cavity, m, k_max, 2 * opts.k_samples, 2 * opts.a_samples,
                       opts.newton_tol);
        if (fine.size() != roots.size()) {
            result.warnings.push_back(
                "GridTooCoarse: refined scan found " + std::to_string(fine.size()) +
                " roots vs " + std::to_string(roots.size()) + "; using refined set");
            roots = fine;
        }
    }

    for (const RawRoot& r : roots) {
        EigenPair p;
        p.m = m;
        p.a = r.a;
        p.k = r.k;
        p.l = count_interior_nodes(cavity.sigma0, r.a, r.k, m);
        p.n = count_interior_nodes(cavity.tau0, -r.a, r.k, m);
        result.pairs.push_back(p);
    }
    std::sort(result.pairs.begin(), result.pairs.end(),
              [](const EigenPair& x, const EigenPair& y) { return x.k < y.k; });
    return result;
}

namespace {

// Converged Gauss-Legendre integral of f over [a, b]: doubles the order until
// the change is below rel_tol.
double converged_gl(const std::function<double(double)>& f, double a, double b,
                    double rel_tol, int n0, const char* what) {
    double prev = integrate_gl(f, a, b, n0);
    for (int n = 2 * n0; n <= 4096; n *= 2) {
        const double cur = integrate_gl(f, a, b, n);
        if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), 1e-300))
            return cur;
        prev = cur;
    }
    throw QuadratureNotConverged(std::string(what) + ": quadrature did not settle");
}

// The four 1D building blocks of every volume integral of S^2 T^2:
// integral S^2 sigma dsigma, S^2 sigma^3 dsigma over [lo, hi] (same for T).
struct RadialMoments {
    double m1;  // weight q
    double m3;  // weight q^3
};

RadialMoments radial_moments(double lo, double hi, double a, double k, int m_abs,
                             double rel_tol) {
    if (hi <= lo) return {0.0, 0.0};
    auto f1 = [&](double q) {
        const double s = radial_S(q, a, k, m_abs);
        return s * s * q;
    };
    auto f3 = [&](double q) {
        const double s = radial_S(q, a, k, m_abs);
        return s * s * q * q * q;
    };
    const int n0 = 64 + 8 * static_cast<int>(std::ceil(k * hi * hi));
    return {converged_gl(f1, lo, hi, rel_tol, n0, "radial moment"),
            converged_gl(f3, lo, hi, rel_tol, n0, "radial moment")};
}

double mode_volume_integral(const Cavity& cavity, const EigenPair& p,
                            double rel_tol) {
    const RadialMoments S = radial_moments(0, cavity.sigma0, p.a, p.k, p.m, rel_tol);
    const RadialMoments T = radial_moments(0, cavity.tau0, -p.a, p.k, p.m, rel_tol);
    return kTwoPi * (S.m3 * T.m1 + S.m1 * T.m3);
}

}  // namespace

Eigenmode normalize(const EigenPair& pair, const Cavity& cavity) {
    const double integral = mode_volume_integral(cavity, pair, 1e-8);
    if (!(integral > 0))
        throw QuadratureNotConverged("normalize: nonpositive norm integral");
    return {pair, cavity, 1.0 / std::sqrt(integral)};
}

Complex eigenmode_eval(const Eigenmode& mode, const ParabolicPoint& p) {
    if (p.sigma > mode.cavity.sigma0 || p.tau > mode.cavity.tau0) return {0.0, 0.0};
    const double radial = radial_S(p.sigma, mode.pair.a, mode.pair.k, mode.pair.m) *
                          radial_T(p.tau, mode.pair.a, mode.pair.k, mode.pair.m);
    const double arg = mode.pair.m * p.phi;
    return mode.normalization * radial * Complex(std::cos(arg), std::sin(arg));
}

Complex inner_product(const Eigenmode& m1, const Eigenmode& m2) {
    if (m1.pair.m != m2.pair.m) return {0.0, 0.0};  // phi integral vanishes
    const Cavity& cav = m1.cavity;
    const double rel_tol = 1e-8;
    auto moments = [&](double wall, double a1, double a2, double k1, double k2,
                       int m) {
        auto f1 = [&](double q) {
            return radial_S(q, a1, k1, m) * radial_S(q, a2, k2, m) * q;
        };
        auto f3 = [&](double q) {
            return radial_S(q, a1, k1, m) * radial_S(q, a2, k2, m) * q * q * q;
        };
        const int n0 =
            64 + 8 * static_cast<int>(std::ceil(std::max(k1, k2) * wall * wall));
        return RadialMoments{converged_gl(f1, 0, wall, rel_tol, n0, "inner product"),
                             converged_gl(f3, 0, wall, rel_tol, n0, "inner product")};
    };
    const int m = m1.pair.m;
    const RadialMoments S =
        moments(cav.sigma0, m1.pair.a, m2.pair.a, m1.pair.k, m2.pair.k, m);
    const RadialMoments T =
        moments(cav.tau0, -m1.pair.a, -m2.pair.a, m1.pair.k, m2.pair.k, m);
    const double value = kTwoPi * m1.normalization * m2.normalization *
                         (S.m3 * T.m1 + S.m1 * T.m3);
    return {value, 0.0};
}

QuantumConstants quantum_constants(const EigenPair& p) {
    const double beta = static_cast<double>(p.m) * p.m / (p.k * p.k);
    return {2.0 * p.a / p.k, beta, 2.0 * p.k * p.a, p.m,
            std::numeric_limits<double>::quiet_NaN()};
}

QuantumConstants quantum_constants(const Eigenmode& mode) {
    QuantumConstants qc = quantum_constants(mode.pair);
    qc.penetration = penetration_ratio(mode);
    return qc;
}

double penetration_ratio(const Eigenmode& mode) {
    const Cavity& cav = mode.cavity;
    const EigenPair& p = mode.pair;
    const QuantumConstants qc = quantum_constants(p);
    const CausticPair cp = caustics(qc.alpha_q, qc.beta_q);
    const double sc = std::min(cp.sigma_c, cav.sigma0);
    const double tc = std::min(cp.tau_c, cav.tau0);
    const double rel_tol = 1e-8;

    // separable pieces split at the caustics so no panel straddles the kink
    const RadialMoments S_in = radial_moments(0, sc, p.a, p.k, p.m, rel_tol);
    const RadialMoments S_out = radial_moments(sc, cav.sigma0, p.a, p.k, p.m, rel_tol);
    const RadialMoments T_in = radial_moments(0, tc, -p.a, p.k, p.m, rel_tol);
    const RadialMoments T_out =
        radial_moments(tc, cav.tau0, -p.a, p.k, p.m, rel_tol);

    const RadialMoments S_all{S_in.m1 + S_out.m1, S_in.m3 + S_out.m3};
    const RadialMoments T_all{T_in.m1 + T_out.m1, T_in.m3 + T_out.m3};

    auto cross = [](const RadialMoments& A, const RadialMoments& B) {
        return A.m3 * B.m1 + A.m1 * B.m3;
    };
    const double whole = cross(S_all, T_all);
    // forbidden = {sigma < sc} + {tau < tc} - overlap
    const double forbidden =
        cross(S_in, T_all) + cross(S_all, T_in) - cross(S_in, T_in);
    return std::clamp(forbidden / whole, 0.0, 1.0);
}

namespace {

// Lowest `count` eigenpairs for one m, growing k_max until enough are found.
std::vector<EigenPair> lowest_pairs(const Cavity& cavity, int m, int count,
                                    std::vector<std::string>& warnings) {
    // dimensional guess: k ~ sqrt(E); the ground state scales like 1/scale
    double k_max = 4.0 / std::sqrt(cavity.scale()) * 2.0;
    EigenSearchOptions opts;
    opts.refinement_guard = false;
    for (int attempt = 0; attempt < 8; ++attempt) {
        EigenSearchResult r = find_eigenpairs(cavity, m, k_max, opts);
        for (auto& w : r.warnings) warnings.push_back(w);
        if (static_cast<int>(r.pairs.size()) >= count) {
            r.pairs.resize(count);
            return r.pairs;
        }
        k_max *= 1.5;
    }
    throw NoSolution("spectrum_vs_deformation: could not collect the requested "
                     "number of states");
}

}  // namespace

DeformationScan spectrum_vs_deformation(double tau0, double ratio_min,
                                        double ratio_max, int n_samples, int m_max,
                                        int states_per_m) {
    if (n_samples < 2) throw DomainError("spectrum_vs_deformation: need >= 2 samples");
    if (!(ratio_min > 0) || !(ratio_max > ratio_min))
        throw DomainError("spectrum_vs_deformation: bad ratio range");
    DeformationScan scan;

    struct Key {
        int l, n, m;
        bool operator<(const Key& o) const {
            return std::tie(l, n, m) < std::tie(o.l, o.n, o.m);
        }
        bool operator==(const Key& o) const {
            return l == o.l && n == o.n && m == o.m;
        }
    };
    std::vector<std::map<Key, double>> energies(n_samples);
    std::vector<double> ratios(n_samples);

    for (int i = 0; i < n_samples; ++i) {
        const double ratio = ratio_min + (ratio_max - ratio_min) * i / (n_samples - 1.0);
        ratios[i] = ratio;
        const Cavity cavity(ratio * tau0, tau0);
        for (int m = 0; m <= m_max; ++m) {
            const std::vector<EigenPair> pairs =
                lowest_pairs(cavity, m, states_per_m, scan.warnings);
            for (const EigenPair& p : pairs) {
                scan.rows.push_back({ratio, p.l, p.n, p.m, p.a, p.k, p.k2()});
                energies[i][{p.l, p.n, p.m}] = p.k2();
            }
        }
    }

    // crossings: a sign change of E1 - E2 between consecutive samples, refined
    // by secant steps on the ratio
    std::vector<Key> keys;
    for (const auto& [key, val] : energies[0]) keys.push_back(key);

    auto energy_at = [&](const Key& key, double ratio) {
        const Cavity cavity(ratio * tau0, tau0);
        std::vector<std::string> tmp;
        const std::vector<EigenPair> pairs =
            lowest_pairs(cavity, key.m, states_per_m, tmp);
        for (const EigenPair& p : pairs)
            if (p.l == key.l && p.n == key.n) return p.k2();
        throw NoSolution("spectrum_vs_deformation: state lost during refinement");
    };

    for (size_t x = 0; x < keys.size(); ++x) {
        for (size_t y = x + 1; y < keys.size(); ++y) {
            for (int i = 0; i + 1 < n_samples; ++i) {
                const auto ax = energies[i].find(keys[x]);
                const auto ay = energies[i].find(keys[y]);
                const auto bx = energies[i + 1].find(keys[x]);
                const auto by = energies[i + 1].find(keys[y]);
                if (ax == energies[i].end() || ay == energies[i].end() ||
                    bx == energies[i + 1].end() || by == energies[i + 1].end())
                    continue;
                const double d0 = ax->second - ay->second;
                const double d1 = bx->second - by->second;
                if (d0 == 0 || d1 == 0 || d0 * d1 > 0) continue;
                // linear-interpolation estimate, then secant refinement; a
                // refinement hiccup falls back to the estimate
                double r1 = ratios[i] - d0 * (ratios[i + 1] - ratios[i]) / (d1 - d0);
                try {
                    double r0 = ratios[i], f0 = d0, f1;
                    f1 = energy_at(keys[x], r1) - energy_at(keys[y], r1);
                    for (int it = 0; it < 12 && std::abs(r1 - r0) > 1e-4; ++it) {
                        const double rm = r1 - f1 * (r1 - r0) / (f1 - f0);
                        const double fm =
                            energy_at(keys[x], rm) - energy_at(keys[y], rm);
                        r0 = r1;
                        f0 = f1;
                        r1 = rm;
                        f1 = fm;
                        if (fm == 0) break;
                    }
                } catch (const std::exception& e) {
                    scan.warnings.push_back(
                        std::string("crossing refinement fell back to the "
                                    "interpolated estimate: ") + e.what());
                }
                scan.crossings.push_back({keys[x].l, keys[x].n, keys[x].m, keys[y].l,
                                          keys[y].n, keys[y].m, r1});
            }
        }
    }
    return scan;
}

Correspondence correspond(const EigenPair& pair, const Cavity& cavity,
                          int max_denominator) {
    Correspondence c;
    const QuantumConstants qc = quantum_constants(pair);
    c.constants = {pair.k, qc.alpha_q, qc.beta_q};
    c.winding = winding_number(cavity, qc.alpha_q, qc.beta_q);

    const AdmissibleTriangle tri = admissible_region(cavity);
    const double margin = 1e-9 * cavity.scale();
    c.has_orbit = tri.contains(qc.alpha_q, qc.beta_q, margin);
    if (!c.has_orbit) {
        c.s = c.t = c.l = 0;
        c.winding_residual = c.closure_residual = 0;
        return c;
    }
    const Fraction frac = best_rational(c.winding, max_denominator);
    c.s = static_cast<int>(frac.num);
    c.t = static_cast<int>(frac.den);
    c.winding_residual = c.winding - frac.value();
    const double g = c.s * theta_sigma(cavity, qc.alpha_q, qc.beta_q) +
                     c.t * theta_tau(cavity, qc.alpha_q, qc.beta_q);
    const int l = std::clamp(static_cast<int>(std::lround(g)), 0, (c.s + c.t) / 2);
    c.l = l;
    c.closure_residual = g - l;
    return c;
}

}  // namespace paracav
