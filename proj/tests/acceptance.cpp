// Acceptance suite: one pass/fail line per criterion. Optional argv[1] is
// the path to the wpmub CLI binary (used by the determinism criterion).

#include "wpmub/error_model.hpp"
#include "wpmub/mub.hpp"
#include "wpmub/tomography.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

using namespace wpmub;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail = "") {
    std::printf("%s  criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++failures;
}

Angle deg(double d) { return Angle::degrees(d); }

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

void criterion_1_phase_window() {
    auto t0 = std::chrono::steady_clock::now();
    auto scan = scan_phase_window(deg(0), deg(360), deg(0.5), 100, 1);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    bool pass = scan.windows.size() == 2;
    if (pass) {
        pass = std::abs(scan.windows[0].lo_deg - 111.5) <= 0.2 &&
               std::abs(scan.windows[0].hi_deg - 141.7) <= 0.2 &&
               std::abs(scan.windows[1].lo_deg - 218.3) <= 0.2 &&
               std::abs(scan.windows[1].hi_deg - 248.5) <= 0.2;
    }
    std::string detail = "windows:";
    for (const auto& w : scan.windows) detail += fmt(" [%.2f, %.2f]", w.lo_deg, w.hi_deg);
    detail += fmt(", %.1f s", secs);
    report(1, "phase-window reproduction (0.5 deg scan, bisection refinement)",
           pass && secs < 60.0, detail);
}

void criterion_2_canonical_solution() {
    auto fams = solve_complete_mub(deg(120), 150, 1);
    bool angles_ok = false;
    for (const auto& fam : fams) {
        std::vector<MubTriple> all{fam.base};
        all.insert(all.end(), fam.images.begin(), fam.images.end());
        for (const auto& t : all)
            if (std::abs(t.thetas[0].deg() - 0.0) < 0.01 &&
                std::abs(t.thetas[1].deg() - 27.37) < 0.01 &&
                std::abs(t.thetas[2].deg() - 117.37) < 0.01)
                angles_ok = true;
    }
    double t0 = 0.25 * std::acos(-1.0 / 3.0);
    bool bloch_ok =
        (bloch_from_single_waveplate(Angle::radians(0), deg(120)) - BlochVector(0, 0, 1)).norm() <
            1e-9 &&
        (bloch_from_single_waveplate(Angle::radians(t0), deg(120)) -
         BlochVector(1, -1, 0).normalized()).norm() < 1e-9 &&
        (bloch_from_single_waveplate(Angle::radians(t0 + pi / 2), deg(120)) -
         BlochVector(1, 1, 0).normalized()).norm() < 1e-9;
    report(2, "canonical TWP solution (0, 27.37, 117.37) and its Bloch triad",
           angles_ok && bloch_ok);
}

void criterion_3_quartic_anchors() {
    auto roots = quartic_roots();
    bool ok = roots.size() == 2 && std::abs(roots[0] + 0.7854) <= 1e-4 &&
              std::abs(roots[1] + 0.5923) <= 1e-4;
    for (double x : roots) ok = ok && std::abs(3 * x * x * x * x + 4 * x + 2) <= 1e-10;

    auto sols = intersection_solutions();
    ok = ok && sols.size() == 3;
    if (ok) {
        ok = std::abs(sols[1].phase.deg() - 126.32) < 0.01 &&
             std::abs(sols[1].thetas[0].deg() - 15.66) < 0.01 &&
             std::abs(sols[1].thetas[1].deg() - 45.0) < 1e-9 &&
             std::abs(sols[1].thetas[2].deg() - 74.34) < 0.01 &&
             std::abs(sols[2].phase.deg() - 141.76) < 0.01 &&
             std::abs(sols[2].thetas[0].deg() - 31.90) < 0.01 &&
             std::abs(sols[2].thetas[1].deg() - 58.10) < 0.01 &&
             std::abs(sols[2].thetas[2].deg() - 135.0) < 1e-9;
        for (const auto& t : sols) ok = ok && t.residual <= 1e-9;
    }
    report(3, "quartic roots and analytic intersection triples", ok);
}

void criterion_4_budget_anchors() {
    auto b120 = single_plate_mub_budget(deg(120));
    bool ok = std::abs(b120.coeff("phase") - 4.0 / 3.0) < 1e-12 &&
              std::abs(b120.coeff("axis") - 32.0) < 1e-12;
    auto blo = single_plate_mub_budget(deg(111.5));
    auto bhi = single_plate_mub_budget(deg(141.7));
    ok = ok && std::abs(blo.coeff("phase") - 1.16) <= 0.01 &&
         std::abs(blo.coeff("axis") - 28.80) <= 0.01 &&
         std::abs(bhi.coeff("phase") - 2.60) <= 0.01 &&
         std::abs(bhi.coeff("axis") - 38.83) <= 0.01;

    auto bq = qwp_hwp_mub_budget(MeasurementSetting::qwp_hwp_pauli().qh);
    ok = ok && std::abs(bq.coeff("h") - 48.0) < 1e-12 && std::abs(bq.coeff("q") - 20.0) < 1e-12 &&
         std::abs(bq.coeff("phase_h") - 1.0) < 1e-12 && std::abs(bq.coeff("phase_q") - 1.0) < 1e-12;

    Uncertainty u;
    u.d_phase = u.d_axis = u.d_phase_q = u.d_phase_h = u.d_q = u.d_h = 0.01;
    double ratio = b120.total(u) /
                   qwp_hwp_mub_budget(MeasurementSetting::qwp_hwp_pauli().qh, true).total(u);
    ok = ok && ratio >= 0.45 && ratio <= 0.55;
    report(4, "error-budget anchors and factor-two ratio", ok, fmt("ratio %.4f", ratio));
}

void criterion_5_jacobian_oracle() {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0, 360);
    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
        MeasurementSetting s =
            i % 2 == 0 ? MeasurementSetting::single_plate(
                             deg(u(rng)), {deg(u(rng)), deg(u(rng)), deg(u(rng))})
                       : MeasurementSetting::qwp_hwp({{{deg(u(rng)), deg(u(rng))},
                                                       {deg(u(rng)), deg(u(rng))},
                                                       {deg(u(rng)), deg(u(rng))}}});
        for (Param p : s.params()) {
            auto an = s.jacobian(p);
            const double h = 1e-6;
            ParamOffsets plus, minus;
            plus.set(p, h);
            minus.set(p, -h);
            auto bp = s.bases_with_offsets(plus);
            auto bm = s.bases_with_offsets(minus);
            for (int j = 0; j < 3; ++j) {
                BlochVector fd = (bp[j] - bm[j]) / (2 * h);
                double denom = std::max(an[j].squaredNorm(), 1.0);
                if (std::abs(an[j].squaredNorm() - fd.squaredNorm()) / denom > 1e-6) ok = false;
            }
        }
    }
    report(5, "analytic derivative norms vs central finite differences (1e3 settings)", ok);
}

void criterion_6_per_state_budgets() {
    const double p = 0.92;
    std::array<BlochVector, 3> states = {BlochVector(0, 0, 1), BlochVector(1, 0, 0),
                                         BlochVector(0, 1, 0)};
    auto twp = MeasurementSetting::twp();
    auto qh = MeasurementSetting::qwp_hwp_pauli();
    double twp_axis = 0, twp_phase = 0, qh_axis = 0, qh_phase = 0;
    for (const auto& s : states) {
        auto bt = state_estimation_budget(bloch_to_density(p * s), twp);
        twp_axis += bt.coeff("axis");
        twp_phase += bt.coeff("phase");
        auto bq = state_estimation_budget(bloch_to_density(p * s), qh);
        qh_axis += bq.coeff("q") + bq.coeff("h");
        qh_phase += bq.coeff("phase_q") + bq.coeff("phase_h");
    }
    bool ok = std::abs(twp_axis - 16 * p * p) < 1e-9 &&
              std::abs(twp_phase - 2.0 / 3.0 * p * p) < 1e-9 &&
              std::abs(qh_axis - 34 * p * p) < 1e-9 && std::abs(qh_phase - 1.0 * p * p) < 1e-9;
    report(6, "per-state estimation budgets sum to the section-4.1 totals", ok);
}

void criterion_7_simulation_vs_first_order() {
    std::vector<double> offsets;
    for (int i = -5; i <= 5; ++i)
        if (i != 0) offsets.push_back(i * 0.002);

    bool ok = true;
    std::string detail;
    for (char name : {'H', 'D', 'R'}) {
        Eigen::Matrix2cd rho = named_state(name, 0.92);
        for (const auto& setting :
             {MeasurementSetting::twp(), MeasurementSetting::qwp_hwp_pauli()}) {
            for (Param p : setting.params()) {
                double fitted =
                    quadratic_fit_origin(systematic_error_curve(rho, setting, p, offsets));
                double want = state_estimation_budget(rho, setting).coeff(param_name(p));
                if (want < 1e-12) {
                    // a vanishing first-order coefficient leaves only the
                    // quartic tail; just check the fit stays small
                    if (fitted > 1e-2) ok = false;
                    continue;
                }
                if (std::abs(fitted - want) / want > 0.05) {
                    ok = false;
                    detail += fmt(" dev %.3f", std::abs(fitted - want) / want);
                }
            }
        }
    }
    report(7, "exact-statistics curves match the first-order model within 5%", ok, detail);
}

void criterion_8_two_qubit_gap() {
    std::vector<double> offsets;
    for (int i = 1; i <= 5; ++i) offsets.push_back(i * 0.004);
    auto singlet = singlet_state();
    auto fits_t = two_qubit_experiment(singlet, MeasurementSetting::twp(),
                                       MeasurementSetting::twp(), offsets);
    auto fits_q = two_qubit_experiment(singlet, MeasurementSetting::qwp_hwp_pauli(),
                                       MeasurementSetting::qwp_hwp_pauli(), offsets);
    double c_t = fits_t[0].fitted, c_h = 0, c_q = 0;
    for (const auto& f : fits_q) (f.plate == Param::h ? c_h : c_q) = f.fitted;
    double ratio = c_t / (c_h + c_q);

    bool ok = std::abs(c_t - 6.9) / 6.9 <= 0.15 && std::abs(c_h - 10.5) / 10.5 <= 0.15 &&
              std::abs(c_q - 4.6) / 4.6 <= 0.15 && ratio >= 0.4 && ratio <= 0.6;
    std::string detail =
        fmt("fitted t %.2f, h %.2f", c_t, c_h) + fmt(", q %.2f, ratio %.3f", c_q, ratio);
    if (!ok)
        detail += " | DISCREPANCY REPORT: fitted coefficients differ from the reference "
                  "(10.5, 4.6, 6.9) by more than 15%; the gap size depends on the estimator";
    report(8, "two-qubit positivity-gap coefficients and TWP:QWP-HWP ratio", ok, detail);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_9_determinism(const char* cli) {
    if (!cli) {
        report(9, "manifest replay determinism (needs CLI path as argv[1])", false, "skipped");
        return;
    }
    fs::path dir = fs::temp_directory_path() / ("wpmub_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::string out = (dir / "scan").string();
    std::string cmd = std::string(cli) +
                      " scan --lo 118 --hi 122 --step 1 --starts 40 --seed 6 --out " + out +
                      " > /dev/null 2>&1";
    bool ok = WEXITSTATUS(std::system(cmd.c_str())) == 0;
    std::string csv = slurp(out + ".csv"), js = slurp(out + ".json");
    std::string replay = std::string(cli) + " replay --manifest " + out + ".manifest.json" +
                         " > /dev/null 2>&1";
    ok = ok && WEXITSTATUS(std::system(replay.c_str())) == 0;
    ok = ok && slurp(out + ".csv") == csv && slurp(out + ".json") == js;
    fs::remove_all(dir);
    report(9, "replaying a manifest reproduces byte-identical outputs", ok);
}

void criterion_10_property_suites() {
    bool ok = true;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0, 360);

    // unitarity
    for (int i = 0; i < 1000; ++i)
        ok = ok && is_unitary(waveplate_unitary(deg(u(rng)), deg(u(rng))));

    // Bloch symmetries: 180-degree period, odd/even components
    for (double d : {45.0, 120.0, 141.76, 270.0})
        for (int i = 0; i < 180; ++i) {
            BlochVector r = bloch_from_single_waveplate(deg(i), deg(d));
            BlochVector rp = bloch_from_single_waveplate(deg(i + 180.0), deg(d));
            BlochVector rm = bloch_from_single_waveplate(deg(-i), deg(d));
            ok = ok && (r - rp).norm() < 1e-12 && std::abs(r[0] + rm[0]) < 1e-12 &&
                 std::abs(r[1] + rm[1]) < 1e-12 && std::abs(r[2] - rm[2]) < 1e-12;
        }

    // frame-potential mirror symmetry on a coarse grid
    for (int d = 10; d < 180; d += 10)
        ok = ok &&
             std::abs(frame_potential(deg(d), 30, 2) - frame_potential(deg(360 - d), 30, 2)) <
                 2e-9;

    // triad Gram checks on solver output
    for (double d : {115.0, 120.0, 135.0})
        for (const auto& fam : solve_complete_mub(deg(d), 100, 3)) {
            std::vector<MubTriple> all{fam.base};
            all.insert(all.end(), fam.images.begin(), fam.images.end());
            for (const auto& t : all) ok = ok && t.residual <= 1e-9;
        }

    // projection idempotence and contraction
    std::normal_distribution<double> n;
    for (int i = 0; i < 200; ++i) {
        Eigen::Matrix4cd g;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) g(a, b) = std::complex<double>(n(rng), n(rng));
        Eigen::Matrix4cd herm = 0.5 * (g + g.adjoint());
        herm -= ((herm.trace().real() - 1.0) / 4.0) * Eigen::Matrix4cd::Identity();
        Eigen::MatrixXcd proj = project_to_physical(herm);
        Eigen::Matrix4cd target = singlet_state(0.3);
        ok = ok && (project_to_physical(proj) - proj).cwiseAbs().maxCoeff() < 1e-10 &&
             hs_error(proj, target) <= hs_error(herm, target) + 1e-12;
    }

    report(10, "property suites (unitarity, symmetries, Gram, projection)", ok);
}

} // namespace

int main(int argc, char** argv) {
    criterion_1_phase_window();
    criterion_2_canonical_solution();
    criterion_3_quartic_anchors();
    criterion_4_budget_anchors();
    criterion_5_jacobian_oracle();
    criterion_6_per_state_budgets();
    criterion_7_simulation_vs_first_order();
    criterion_8_two_qubit_gap();
    criterion_9_determinism(argc > 1 ? argv[1] : nullptr);
    criterion_10_property_suites();
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
