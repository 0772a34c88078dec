#include "wpmub/mub.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace wpmub {

namespace {

double positive_mod(double x, double m) {
    double r = std::fmod(x, m);
    return r < 0 ? r + m : r;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// r(theta) and dr/dtheta at fixed retardation, Bloch form.
struct PlateCurve {
    double s2;   // sin^2(delta/2)
    double sd;   // sin(delta)

    explicit PlateCurve(double delta_rad)
        : s2(std::sin(delta_rad / 2) * std::sin(delta_rad / 2)), sd(std::sin(delta_rad)) {}

    Eigen::Vector3d r(double th) const {
        double st = std::sin(2 * th);
        return {s2 * std::sin(4 * th), -sd * st, 1.0 - 2.0 * s2 * st * st};
    }
    Eigen::Vector3d dr(double th) const {
        return {4 * s2 * std::cos(4 * th), -2 * sd * std::cos(2 * th), -4 * s2 * std::sin(4 * th)};
    }
};

// Levenberg-Marquardt on the three pairwise dot products over
// (theta1, theta2, theta3). Returns the final squared residual norm.
double lm_minimize(const PlateCurve& pc, Eigen::Vector3d& t) {
    constexpr int pairs[3][2] = {{0, 1}, {1, 2}, {0, 2}};
    auto residuals = [&](const Eigen::Vector3d& th, Eigen::Vector3d& f, Eigen::Matrix3d* J) {
        Eigen::Vector3d r[3], dr[3];
        for (int i = 0; i < 3; ++i) {
            r[i] = pc.r(th[i]);
            if (J) dr[i] = pc.dr(th[i]);
        }
        for (int k = 0; k < 3; ++k) {
            int a = pairs[k][0], b = pairs[k][1];
            f[k] = r[a].dot(r[b]);
            if (J) {
                J->row(k).setZero();
                (*J)(k, a) = dr[a].dot(r[b]);
                (*J)(k, b) = r[a].dot(dr[b]);
            }
        }
    };

    Eigen::Vector3d f;
    Eigen::Matrix3d J;
    residuals(t, f, &J);
    double cost = f.squaredNorm();
    double lambda = 1e-3;
    for (int iter = 0; iter < 300 && cost > 1e-24; ++iter) {
        Eigen::Matrix3d H = J.transpose() * J + lambda * Eigen::Matrix3d::Identity();
        Eigen::Vector3d step = H.ldlt().solve(-J.transpose() * f);
        if (!step.allFinite() || step.norm() < 1e-15) break;
        Eigen::Vector3d t_new = t + step;
        Eigen::Vector3d f_new;
        residuals(t_new, f_new, nullptr);
        double cost_new = f_new.squaredNorm();
        if (cost_new < cost) {
            t = t_new;
            cost = cost_new;
            residuals(t, f, &J);
            lambda = std::max(lambda / 3.0, 1e-12);
        } else {
            lambda *= 4.0;
            if (lambda > 1e12) break;
        }
    }
    return cost;
}

struct StartResult {
    double cost;
    Eigen::Vector3d t;
};

StartResult run_start(const PlateCurve& pc, std::uint64_t seed, int index) {
    std::mt19937_64 rng(splitmix64(seed ^ (0xA5A5A5A5ULL + static_cast<std::uint64_t>(index))));
    std::uniform_real_distribution<double> u(0.0, pi);
    Eigen::Vector3d t{u(rng), u(rng), u(rng)};
    double cost = lm_minimize(pc, t);
    return {cost, t};
}

MubTriple make_triple(Angle phase, std::array<double, 3> deg) {
    std::sort(deg.begin(), deg.end());
    MubTriple out;
    out.phase = phase;
    for (int i = 0; i < 3; ++i) out.thetas[i] = Angle::degrees(deg[i]);
    double res = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            res = std::max(res, std::abs(unbiasedness_defect(phase, out.thetas[a], out.thetas[b])));
    out.residual = res;
    return out;
}

} // namespace

double unbiasedness_defect(Angle phase, Angle thetaA, Angle thetaB) {
    return bloch_from_single_waveplate(thetaA, phase).dot(bloch_from_single_waveplate(thetaB, phase));
}

bool two_mub_feasible(Angle phase) {
    double d = phase.mod360().deg();
    return d >= 45.0 - 1e-12 && d <= 315.0 + 1e-12;
}

MubPair two_mub_angles(Angle phase) {
    if (!two_mub_feasible(phase))
        throw std::domain_error(
            "two_mub_angles: phase (mod 360) outside the feasible window [45, 315] degrees");
    double d = phase.mod360().rad();
    double arg = 0.5 * std::sqrt(2.0 - std::sqrt(2.0)) / std::sin(d / 2);
    double t1 = 0.5 * std::asin(std::min(arg, 1.0));
    MubPair out;
    out.phase = phase.mod360();
    out.theta1 = Angle::radians(t1).mod180();
    out.theta2 = Angle::radians(-t1).mod180();
    out.defect = unbiasedness_defect(out.phase, out.theta1, out.theta2);
    return out;
}

double frame_potential(Angle phase, int starts, std::uint64_t seed) {
    if (starts < 1) throw std::invalid_argument("frame_potential: starts must be >= 1");
    PlateCurve pc(phase.rad());
    double best = 3.0;
    for (int i = 0; i < starts; ++i) {
        best = std::min(best, run_start(pc, seed, i).cost);
        if (best < 1e-20) break;
    }
    return best;
}

std::array<std::array<double, 3>, 4> symmetry_orbit_deg(const std::array<double, 3>& thetas_deg) {
    auto canon = [](std::array<double, 3> t) {
        for (double& x : t) x = positive_mod(x, 180.0);
        std::sort(t.begin(), t.end());
        return t;
    };
    std::array<std::array<double, 3>, 4> orbit;
    orbit[0] = canon(thetas_deg);
    std::array<double, 3> a, b, c;
    for (int i = 0; i < 3; ++i) {
        a[i] = 90.0 - thetas_deg[i];
        b[i] = 90.0 + thetas_deg[i];
        c[i] = 180.0 - thetas_deg[i];
    }
    orbit[1] = canon(a);
    orbit[2] = canon(b);
    orbit[3] = canon(c);
    return orbit;
}

std::vector<SolutionFamily> solve_complete_mub(Angle phase, int starts, std::uint64_t seed) {
    if (starts < 1) throw std::invalid_argument("solve_complete_mub: starts must be >= 1");
    PlateCurve pc(phase.rad());

    std::vector<std::array<double, 3>> canonical; // family representatives
    for (int i = 0; i < starts; ++i) {
        StartResult sr = run_start(pc, seed, i);
        if (sr.cost > tol.zero_tol * tol.zero_tol) continue;
        std::array<double, 3> deg;
        for (int k = 0; k < 3; ++k) deg[k] = Angle::radians(sr.t[k]).mod180().deg();
        auto orbit = symmetry_orbit_deg(deg);
        std::array<double, 3> rep = *std::min_element(orbit.begin(), orbit.end());
        bool dup = false;
        for (const auto& known : canonical) {
            double diff = 0.0;
            for (int k = 0; k < 3; ++k) diff = std::max(diff, std::abs(known[k] - rep[k]));
            if (diff < tol.dedup_deg) { dup = true; break; }
        }
        if (!dup) canonical.push_back(rep);
    }
    std::sort(canonical.begin(), canonical.end());

    std::vector<SolutionFamily> families;
    for (const auto& rep : canonical) {
        auto orbit = symmetry_orbit_deg(rep);
        SolutionFamily fam;
        fam.base = make_triple(phase.mod360(), orbit[0]);
        if (fam.base.residual > tol.mub_residual) continue;
        for (int i = 1; i < 4; ++i) fam.images.push_back(make_triple(phase.mod360(), orbit[i]));
        families.push_back(std::move(fam));
    }
    return families;
}

PhaseScan scan_phase_window(Angle lo, Angle hi, Angle step, int starts, std::uint64_t seed) {
    if (!(lo.deg() < hi.deg()) || !(step.deg() > 0))
        throw std::invalid_argument("scan_phase_window: need lo < hi and step > 0");

    PhaseScan scan;
    const double lo_d = lo.deg(), hi_d = hi.deg(), st = step.deg();
    int n = static_cast<int>(std::floor((hi_d - lo_d) / st + 0.5)) + 1;
    auto phi = [&](double d) { return frame_potential(Angle::degrees(d), starts, seed); };
    std::vector<bool> feasible(n);
    for (int i = 0; i < n; ++i) {
        double d = std::min(lo_d + i * st, hi_d);
        double p = phi(d);
        scan.grid.emplace_back(d, p);
        feasible[i] = p < tol.zero_tol;
    }

    // Bisect an edge between an infeasible and a feasible phase to 0.05 deg.
    auto refine = [&](double bad, double good) {
        while (std::abs(good - bad) > 0.05) {
            double mid = 0.5 * (good + bad);
            (phi(mid) < tol.zero_tol ? good : bad) = mid;
        }
        return 0.5 * (good + bad);
    };

    for (int i = 0; i < n;) {
        if (!feasible[i]) { ++i; continue; }
        int j = i;
        while (j + 1 < n && feasible[j + 1]) ++j;
        PhaseWindow w;
        w.lo_deg = (i == 0) ? scan.grid[0].first
                            : refine(scan.grid[i - 1].first, scan.grid[i].first);
        w.hi_deg = (j == n - 1) ? scan.grid[n - 1].first
                                : refine(scan.grid[j + 1].first, scan.grid[j].first);
        scan.windows.push_back(w);
        i = j + 1;
    }
    return scan;
}

std::vector<double> quartic_roots() {
    // 3x^4 + 4x + 2 = 0, monic form x^4 + (4/3)x + (2/3) = 0.
    Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
    companion(1, 0) = companion(2, 1) = companion(3, 2) = 1.0;
    companion(0, 3) = -2.0 / 3.0;
    companion(1, 3) = -4.0 / 3.0;
    Eigen::EigenSolver<Eigen::Matrix4d> es(companion);
    std::vector<double> roots;
    for (int i = 0; i < 4; ++i) {
        auto ev = es.eigenvalues()[i];
        if (std::abs(ev.imag()) > 1e-8) continue;
        double x = ev.real();
        // Newton polish to drive the residual below 1e-12.
        for (int k = 0; k < 5; ++k) {
            double f = 3 * x * x * x * x + 4 * x + 2;
            double df = 12 * x * x * x + 4;
            x -= f / df;
        }
        roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<MubTriple> intersection_solutions() {
    std::vector<MubTriple> out;

    // delta = 120: theta = (0, arccos(-1/3)/4, arccos(-1/3)/4 + 90).
    double t2 = 0.25 * std::acos(-1.0 / 3.0) * 180.0 / pi;
    out.push_back(make_triple(Angle::degrees(120.0), {0.0, t2, t2 + 90.0}));

    // The other two intersections follow from the quartic in x = cos(delta),
    // with sin^2(2 theta1) = x^2 / (2(1 - x^2)).
    auto roots = quartic_roots(); // ascending: -0.7854, -0.5923
    auto from_root = [](double x) {
        double delta = std::acos(x) * 180.0 / pi;
        double y = std::sqrt(x * x / (2.0 * (1.0 - x * x)));
        double t1 = 0.5 * std::asin(y) * 180.0 / pi;
        return std::pair<double, double>{delta, t1};
    };
    {
        auto [delta, t1] = from_root(roots[1]); // 126.32: theta2 = 45, theta1 + theta3 = 90
        out.push_back(make_triple(Angle::degrees(delta), {t1, 45.0, 90.0 - t1}));
    }
    {
        auto [delta, t1] = from_root(roots[0]); // 141.76: theta1 + theta2 = 90, theta3 = 135
        out.push_back(make_triple(Angle::degrees(delta), {t1, 90.0 - t1, 135.0}));
    }
    return out;
}

} // namespace wpmub
