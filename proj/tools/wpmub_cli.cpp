// Command-line front end: phase scans, complete-MUB solutions, error
// budgets and tomography simulations as reproducible batch runs.
//
// Angles in flags and outputs are degrees; uncertainties and offset sweeps
// are radians. Every command writes a manifest next to its outputs;
// `wpmub replay --manifest <file>` re-runs it and verifies the checksums.

#include "wpmub/error_model.hpp"
#include "wpmub/mub.hpp"
#include "wpmub/tomography.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;
using namespace wpmub;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

// Fixed 12-significant-digit formatting keeps outputs byte-stable.
std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << data;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("WPMUB_SEED")) return std::strtoull(env, nullptr, 10);
    return 1;
}

struct Outputs {
    std::vector<std::pair<std::string, std::string>> files; // (path, content)

    void add(const std::string& path, const std::string& content) {
        files.emplace_back(path, content);
    }
};

void finish_run(const std::string& command, const std::vector<std::string>& argv,
                const json& params, const std::string& out_prefix, Outputs& outputs) {
    json manifest;
    manifest["command"] = command;
    manifest["version"] = kVersion;
    manifest["argv"] = argv;
    manifest["parameters"] = params;
    manifest["outputs"] = json::array();
    for (const auto& [path, content] : outputs.files) {
        write_file(path, content);
        char sum[32];
        std::snprintf(sum, sizeof(sum), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(content)));
        manifest["outputs"].push_back({{"path", path}, {"fnv1a64", sum}});
    }
    write_file(out_prefix + ".manifest.json", manifest.dump(2) + "\n");
}

MeasurementSetting parse_setting(const std::string& spec, int starts, std::uint64_t seed) {
    if (spec == "twp") return MeasurementSetting::twp();
    if (spec == "qwp-hwp") return MeasurementSetting::qwp_hwp_pauli();
    if (spec.rfind("single:", 0) == 0) {
        double phase = std::stod(spec.substr(7));
        auto fams = solve_complete_mub(Angle::degrees(phase), starts, seed);
        if (fams.empty())
            throw std::domain_error("no complete MUB at phase " + num(phase) + " degrees");
        return MeasurementSetting::single_plate(Angle::degrees(phase), fams[0].base.thetas);
    }
    throw CLI::ValidationError("--setting", "expected twp, qwp-hwp or single:<phase_deg>");
}

Eigen::Matrix2cd parse_state(const std::string& spec) {
    auto colon = spec.find(':');
    char name = spec.empty() ? 'H' : spec[0];
    double p = colon == std::string::npos ? 1.0 : std::stod(spec.substr(colon + 1));
    return named_state(name, p);
}

Param parse_plate(const std::string& name) {
    for (Param p : {Param::phase, Param::axis, Param::phase_q, Param::phase_h, Param::q, Param::h})
        if (param_name(p) == name) return p;
    throw CLI::ValidationError("--plate", "expected one of phase axis phase_q phase_h q h");
}

std::vector<double> parse_sweep(const std::string& spec) {
    double lo, hi;
    int n;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 || n < 2)
        throw CLI::ValidationError("--sweep", "expected lo:hi:n with n >= 2");
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * i / (n - 1);
    return xs;
}

json triple_json(const MubTriple& t) {
    return {{"phase_deg", t.phase.deg()},
            {"thetas_deg", {t.thetas[0].deg(), t.thetas[1].deg(), t.thetas[2].deg()}},
            {"residual", t.residual}};
}

json budget_json(const ErrorBudget& b) {
    json coeffs = json::object();
    for (const auto& [name, c] : b.coeffs) coeffs[name] = c;
    return coeffs;
}

int run(const std::vector<std::string>& argv);

int cmd_scan(const std::vector<std::string>& argv, double lo, double hi, double step, int starts,
             std::uint64_t seed, const std::string& out) {
    auto scan = scan_phase_window(Angle::degrees(lo), Angle::degrees(hi), Angle::degrees(step),
                                  starts, seed);
    std::string csv = "phase_deg,frame_potential\n";
    for (auto [d, p] : scan.grid) csv += num(d) + "," + num(p) + "\n";

    json windows = json::array();
    for (const auto& w : scan.windows)
        windows.push_back({{"lo_deg", w.lo_deg}, {"hi_deg", w.hi_deg}});
    json result = {{"windows", windows},
                   {"status", scan.windows.empty() ? "no window found" : "ok"}};

    Outputs outputs;
    outputs.add(out + ".csv", csv);
    outputs.add(out + ".json", result.dump(2) + "\n");
    finish_run("scan", argv,
               {{"lo", lo}, {"hi", hi}, {"step", step}, {"starts", starts}, {"seed", seed}},
               out, outputs);
    return 0;
}

int cmd_solve(const std::vector<std::string>& argv, double phase, int starts, std::uint64_t seed,
              const std::string& out) {
    auto families = solve_complete_mub(Angle::degrees(phase), starts, seed);
    json fams = json::array();
    for (const auto& f : families) {
        json images = json::array();
        for (const auto& t : f.images) images.push_back(triple_json(t));
        fams.push_back({{"base", triple_json(f.base)}, {"images", images}});
    }
    json result = {{"phase_deg", phase},
                   {"status", families.empty() ? "infeasible" : "ok"},
                   {"families", fams}};
    Outputs outputs;
    outputs.add(out + ".json", result.dump(2) + "\n");
    finish_run("solve", argv, {{"phase", phase}, {"starts", starts}, {"seed", seed}}, out,
               outputs);
    return 0;
}

int cmd_budget(const std::vector<std::string>& argv, const std::string& setting_spec,
               const std::string& state_spec, double d_axis, double d_phase, bool averaged,
               std::uint64_t seed, const std::string& out) {
    json result;
    result["setting"] = setting_spec;
    try {
        ErrorBudget budget;
        if (!state_spec.empty()) {
            auto setting = parse_setting(setting_spec, 100, seed);
            budget = state_estimation_budget(parse_state(state_spec), setting);
            result["state"] = state_spec;
        } else if (setting_spec == "qwp-hwp") {
            budget = qwp_hwp_mub_budget(MeasurementSetting::qwp_hwp_pauli().qh, averaged);
        } else if (setting_spec == "twp") {
            budget = single_plate_mub_budget(Angle::degrees(120));
        } else if (setting_spec.rfind("single:", 0) == 0) {
            budget = single_plate_mub_budget(Angle::degrees(std::stod(setting_spec.substr(7))));
        } else {
            throw CLI::ValidationError("--setting", "expected twp, qwp-hwp or single:<phase_deg>");
        }
        result["status"] = "ok";
        result["coefficients"] = budget_json(budget);
        if (d_axis > 0 || d_phase > 0) {
            Uncertainty u;
            u.d_axis = u.d_q = u.d_h = d_axis;
            u.d_phase = u.d_phase_q = u.d_phase_h = d_phase;
            result["uncertainty_rad"] = {{"d_axis", d_axis}, {"d_phase", d_phase}};
            result["total"] = budget.total(u);
        }
    } catch (const std::domain_error& e) {
        result["status"] = "infeasible";
        result["detail"] = e.what();
    }
    Outputs outputs;
    outputs.add(out + ".json", result.dump(2) + "\n");
    finish_run("budget", argv,
               {{"setting", setting_spec},
                {"state", state_spec},
                {"d_axis", d_axis},
                {"d_phase", d_phase},
                {"averaged", averaged}},
               out, outputs);
    return 0;
}

int cmd_simulate(const std::vector<std::string>& argv, int qubits,
                 const std::string& setting_spec, const std::string& plate_spec,
                 const std::string& sweep_spec, const std::string& state_spec,
                 std::int64_t photons, int trials, bool exact, std::uint64_t seed,
                 const std::string& out) {
    auto setting = parse_setting(setting_spec, 100, seed);
    Param plate = parse_plate(plate_spec);
    std::vector<double> offsets = parse_sweep(sweep_spec);

    std::string csv;
    json fit = json::object();
    if (qubits == 1) {
        Eigen::Matrix2cd state = parse_state(state_spec.empty() ? "H:0.92" : state_spec);
        auto curve = systematic_error_curve(state, setting, plate, offsets);
        double fitted = quadratic_fit_origin(curve);
        double first_order = state_estimation_budget(state, setting).coeff(param_name(plate));
        fit = {{"plate", plate_spec},
               {"fitted_coefficient", fitted},
               {"first_order_coefficient", first_order}};
        if (exact) {
            csv = "offset_rad,hs_error\n";
            for (auto [x, y] : curve) csv += num(x) + "," + num(y) + "\n";
        } else {
            TomographyConfig cfg;
            cfg.n_qubits = 1;
            cfg.state = state;
            cfg.setting1 = setting;
            cfg.photons_per_basis = photons / 3;
            cfg.trials = trials;
            cfg.seed = seed;
            cfg.statistics = Statistics::sampled;
            csv = "offset_rad,mean_hs_error,std_hs_error\n";
            for (const auto& mc : monte_carlo(cfg, plate, offsets))
                csv += num(mc.offset) + "," + num(mc.mean) + "," + num(mc.stddev) + "\n";
        }
    } else if (qubits == 2) {
        Eigen::Matrix4cd state = singlet_state(
            state_spec.empty() ? 1.0 : std::stod(state_spec.substr(state_spec.find(':') + 1)));
        auto curve = systematic_error_curve_two_qubit(state, setting, setting, plate, offsets);
        auto fits = two_qubit_experiment(state, setting, setting, offsets);
        for (const auto& f : fits) {
            if (f.plate != plate) continue;
            fit = {{"plate", plate_spec},
                   {"fitted_coefficient_per_photon", f.fitted},
                   {"first_order_coefficient_per_photon", f.first_order}};
            // reference values of the singlet sweeps, with the positivity gap
            double target = 0;
            if (plate == Param::axis) target = 6.9;
            if (plate == Param::h) target = 10.5;
            if (plate == Param::q) target = 4.6;
            if (target > 0) {
                fit["reference_coefficient"] = target;
                double rel = std::abs(f.fitted - target) / target;
                fit["relative_deviation"] = rel;
                if (rel > 0.15)
                    fit["discrepancy"] =
                        "fitted coefficient outside 15% of the reference; the gap is "
                        "estimator-dependent";
            }
        }
        if (exact) {
            csv = "offset_rad,hs_error\n";
            for (auto [x, y] : curve) csv += num(x) + "," + num(y) + "\n";
        } else {
            TomographyConfig cfg;
            cfg.n_qubits = 2;
            cfg.state = state;
            cfg.setting1 = setting;
            cfg.setting2 = setting;
            cfg.photons_per_basis = photons / 9;
            cfg.trials = trials;
            cfg.seed = seed;
            cfg.statistics = Statistics::sampled;
            csv = "offset_rad,mean_hs_error,std_hs_error\n";
            for (const auto& mc : monte_carlo(cfg, plate, offsets))
                csv += num(mc.offset) + "," + num(mc.mean) + "," + num(mc.stddev) + "\n";
        }
    } else {
        throw CLI::ValidationError("--qubits", "expected 1 or 2");
    }

    Outputs outputs;
    outputs.add(out + ".csv", csv);
    outputs.add(out + ".json", fit.dump(2) + "\n");
    finish_run("simulate", argv,
               {{"qubits", qubits},
                {"setting", setting_spec},
                {"plate", plate_spec},
                {"sweep", sweep_spec},
                {"state", state_spec},
                {"photons", photons},
                {"trials", trials},
                {"exact", exact},
                {"seed", seed}},
               out, outputs);
    return 0;
}

int cmd_replay(const std::string& manifest_path) {
    json manifest = json::parse(read_file(manifest_path));
    std::vector<std::string> argv = manifest["argv"].get<std::vector<std::string>>();
    int rc = run(argv);
    if (rc != 0) return rc;
    for (const auto& o : manifest["outputs"]) {
        std::string path = o["path"];
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(read_file(path))));
        if (std::string(buf) != o["fnv1a64"].get<std::string>()) {
            std::fprintf(stderr, "replay: checksum mismatch for %s\n", path.c_str());
            return kExitNumeric;
        }
    }
    return 0;
}

int run(const std::vector<std::string>& argv) {
    CLI::App app{"Mutually unbiased bases from a single wave plate: solver, "
                 "error budgets and tomography simulation"};
    app.require_subcommand(1);

    double lo = 0, hi = 360, step = 1, phase = 120;
    int starts = 100, trials = 100, qubits = 1;
    std::uint64_t seed = default_seed();
    std::int64_t photons = 3000000;
    std::string out = "wpmub_out", setting_spec = "twp", state_spec, plate_spec = "axis";
    std::string sweep_spec = "-0.02:0.02:11", manifest_path;
    double d_axis = 0, d_phase = 0;
    bool exact = false, averaged = false;

    auto* scan = app.add_subcommand("scan", "Frame-potential scan over retardation phases");
    scan->add_option("--lo", lo, "Scan start, degrees")->capture_default_str();
    scan->add_option("--hi", hi, "Scan end, degrees")->capture_default_str();
    scan->add_option("--step", step, "Grid step, degrees")->capture_default_str();
    scan->add_option("--starts", starts, "Multi-start count per phase")->capture_default_str();
    scan->add_option("--seed", seed, "RNG seed (default from WPMUB_SEED)");
    scan->add_option("--out", out, "Output path prefix")->capture_default_str();

    auto* solve = app.add_subcommand("solve", "Complete-MUB rotation angles at one phase");
    solve->add_option("--phase", phase, "Retardation, degrees")->capture_default_str();
    solve->add_option("--starts", starts, "Multi-start count")->capture_default_str();
    solve->add_option("--seed", seed, "RNG seed");
    solve->add_option("--out", out, "Output path prefix")->capture_default_str();

    auto* budget = app.add_subcommand("budget", "First-order systematic error budgets");
    budget->add_option("--setting", setting_spec, "twp | qwp-hwp | single:<phase_deg>")
        ->capture_default_str();
    budget->add_option("--state", state_spec, "Named state <H|V|D|A|R|L>:<p> for estimation budgets");
    budget->add_option("--d-axis", d_axis, "Axis uncertainty, radians");
    budget->add_option("--d-phase", d_phase, "Retardation uncertainty, radians");
    budget->add_flag("--averaged", averaged, "Average the HWP-phase coefficient over angles");
    budget->add_option("--seed", seed, "RNG seed");
    budget->add_option("--out", out, "Output path prefix")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Tomography simulation sweeps");
    simulate->add_option("--qubits", qubits, "1 or 2")->capture_default_str();
    simulate->add_option("--setting", setting_spec, "twp | qwp-hwp | single:<phase_deg>")
        ->capture_default_str();
    simulate->add_option("--plate", plate_spec, "Swept parameter: axis phase q h phase_q phase_h")
        ->capture_default_str();
    simulate->add_option("--sweep", sweep_spec, "Offset sweep lo:hi:n, radians")
        ->capture_default_str();
    simulate->add_option("--state", state_spec, "Named state <name>:<p>; 2-qubit: singlet:<p>");
    simulate->add_option("--photons", photons, "Total photon budget (split across settings)")
        ->capture_default_str();
    simulate->add_option("--trials", trials, "Monte-Carlo trials")->capture_default_str();
    simulate->add_flag("--exact", exact, "Infinite statistics (no sampling)");
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_option("--out", out, "Output path prefix")->capture_default_str();

    auto* replay = app.add_subcommand("replay", "Re-run a manifest and verify checksums");
    replay->add_option("--manifest", manifest_path, "Manifest file")->required();

    try {
        std::vector<const char*> cargv;
        cargv.push_back("wpmub");
        for (const auto& a : argv) cargv.push_back(a.c_str());
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (scan->parsed()) return cmd_scan(argv, lo, hi, step, starts, seed, out);
        if (solve->parsed()) return cmd_solve(argv, phase, starts, seed, out);
        if (budget->parsed())
            return cmd_budget(argv, setting_spec, state_spec, d_axis, d_phase, averaged, seed, out);
        if (simulate->parsed())
            return cmd_simulate(argv, qubits, setting_spec, plate_spec, sweep_spec, state_spec,
                                photons, trials, exact, seed, out);
        if (replay->parsed()) return cmd_replay(manifest_path);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
    return kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args);
}
