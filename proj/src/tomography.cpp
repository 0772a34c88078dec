#include "wpmub/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace wpmub {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Exact Bernoulli counting; portable across platforms, unlike
// std::binomial_distribution.
std::int64_t binomial_draw(std::mt19937_64& rng, std::int64_t n, double p) {
    if (p <= 0) return 0;
    if (p >= 1) return n;
    std::int64_t k = 0;
    for (std::int64_t i = 0; i < n; ++i)
        if (uniform01(rng) < p) ++k;
    return k;
}

const Eigen::Matrix2cd& sigma(int k) {
    static const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    switch (k) {
        case 1: return pauli_x;
        case 2: return pauli_y;
        case 3: return pauli_z;
        default: return id;
    }
}

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return m;
}

// 36x15 design matrix of the two-qubit product-MUB inversion. Unknowns:
// s1 (3), s2 (3), correlation tensor T row-major (9).
Eigen::MatrixXd two_qubit_design(const std::array<BlochVector, 3>& b1,
                                 const std::array<BlochVector, 3>& b2) {
    Eigen::MatrixXd a(36, 15);
    int row = 0;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            for (int oa = 0; oa < 2; ++oa)
                for (int ob = 0; ob < 2; ++ob, ++row) {
                    double sa = oa == 0 ? 1.0 : -1.0;
                    double sb = ob == 0 ? 1.0 : -1.0;
                    for (int m = 0; m < 3; ++m) {
                        a(row, m) = 0.25 * sa * b1[j][m];
                        a(row, 3 + m) = 0.25 * sb * b2[k][m];
                        for (int n = 0; n < 3; ++n)
                            a(row, 6 + 3 * m + n) = 0.25 * sa * sb * b1[j][m] * b2[k][n];
                    }
                }
    return a;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(master ^ splitmix64(a)) ^ splitmix64(b + 0x517CC1B727220A95ULL));
}

Eigen::MatrixXd CountRecord::frequencies() const {
    Eigen::MatrixXd f = table;
    for (int i = 0; i < f.rows(); ++i) {
        double s = f.row(i).sum();
        if (s > 0) f.row(i) /= s;
    }
    return f;
}

std::array<BlochVector, 3> realized_bases(const MeasurementSetting& setting,
                                          const ParamOffsets& offsets) {
    return setting.bases_with_offsets(offsets);
}

CountRecord outcome_probabilities(const Eigen::Matrix2cd& state,
                                  const std::array<BlochVector, 3>& bases) {
    CountRecord rec;
    rec.n_qubits = 1;
    rec.exact = true;
    rec.table.resize(3, 2);
    for (int j = 0; j < 3; ++j) {
        auto [pp, pm] = projectors_from_bloch(bases[j]);
        rec.table(j, 0) = (state * pp).trace().real();
        rec.table(j, 1) = (state * pm).trace().real();
    }
    return rec;
}

CountRecord outcome_probabilities(const Eigen::Matrix4cd& state,
                                  const std::array<BlochVector, 3>& bases1,
                                  const std::array<BlochVector, 3>& bases2) {
    CountRecord rec;
    rec.n_qubits = 2;
    rec.exact = true;
    rec.table.resize(9, 4);
    for (int j = 0; j < 3; ++j) {
        auto pj = projectors_from_bloch(bases1[j]);
        for (int k = 0; k < 3; ++k) {
            auto pk = projectors_from_bloch(bases2[k]);
            const Eigen::Matrix2cd* a[2] = {&pj.first, &pj.second};
            const Eigen::Matrix2cd* b[2] = {&pk.first, &pk.second};
            for (int oa = 0; oa < 2; ++oa)
                for (int ob = 0; ob < 2; ++ob)
                    rec.table(3 * j + k, 2 * oa + ob) =
                        (state * kron2(*a[oa], *b[ob])).trace().real();
        }
    }
    return rec;
}

CountRecord sample_counts(const CountRecord& probs, std::int64_t photons_per_basis,
                          std::uint64_t seed) {
    if (photons_per_basis < 1)
        throw std::invalid_argument("sample_counts: photons_per_basis must be >= 1");
    CountRecord rec = probs;
    rec.exact = false;
    rec.photons_per_basis = static_cast<double>(photons_per_basis);
    for (int i = 0; i < probs.table.rows(); ++i) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        std::int64_t remaining = photons_per_basis;
        double prob_left = 1.0;
        for (int c = 0; c < probs.table.cols(); ++c) {
            if (c + 1 == probs.table.cols()) {
                rec.table(i, c) = static_cast<double>(remaining);
                break;
            }
            double p = prob_left > 0 ? std::clamp(probs.table(i, c) / prob_left, 0.0, 1.0) : 0.0;
            std::int64_t k = binomial_draw(rng, remaining, p);
            rec.table(i, c) = static_cast<double>(k);
            remaining -= k;
            prob_left -= probs.table(i, c);
        }
    }
    return rec;
}

Eigen::MatrixXcd linear_inversion(const CountRecord& record,
                                  const std::array<BlochVector, 3>& nominal) {
    if (record.n_qubits != 1) throw std::invalid_argument("linear_inversion: expected qubit record");
    Eigen::Matrix3d design;
    for (int j = 0; j < 3; ++j) design.row(j) = nominal[j].transpose();
    if (std::abs(design.determinant()) < 1e-9)
        throw std::invalid_argument("linear_inversion: singular design matrix");
    Eigen::MatrixXd f = record.frequencies();
    Eigen::Vector3d m;
    for (int j = 0; j < 3; ++j) m[j] = f(j, 0) - f(j, 1);
    BlochVector s = design.colPivHouseholderQr().solve(m);
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Identity() * 0.5;
    for (int k = 0; k < 3; ++k) rho += 0.5 * s[k] * sigma(k + 1);
    return rho;
}

Eigen::MatrixXcd linear_inversion(const CountRecord& record,
                                  const std::array<BlochVector, 3>& nominal1,
                                  const std::array<BlochVector, 3>& nominal2) {
    if (record.n_qubits != 2) throw std::invalid_argument("linear_inversion: expected pair record");
    Eigen::MatrixXd a = two_qubit_design(nominal1, nominal2);
    Eigen::MatrixXd f = record.frequencies();
    Eigen::VectorXd rhs(36);
    for (int row = 0; row < 9; ++row)
        for (int c = 0; c < 4; ++c) rhs[4 * row + c] = f(row, c) - 0.25;
    Eigen::VectorXd x = a.colPivHouseholderQr().solve(rhs);

    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Identity() * 0.25;
    for (int m = 0; m < 3; ++m) {
        rho += 0.25 * x[m] * kron2(sigma(m + 1), sigma(0));
        rho += 0.25 * x[3 + m] * kron2(sigma(0), sigma(m + 1));
        for (int n = 0; n < 3; ++n)
            rho += 0.25 * x[6 + 3 * m + n] * kron2(sigma(m + 1), sigma(n + 1));
    }
    return rho;
}

Eigen::MatrixXcd project_to_physical(const Eigen::MatrixXcd& h) {
    Eigen::MatrixXcd sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym);
    Eigen::VectorXd lam = es.eigenvalues();
    const int d = static_cast<int>(lam.size());

    // Euclidean projection of the spectrum onto the unit simplex.
    std::vector<double> sorted(lam.data(), lam.data() + d);
    std::sort(sorted.rbegin(), sorted.rend());
    double cum = 0, theta = 0;
    int k = 0;
    for (int i = 0; i < d; ++i) {
        cum += sorted[i];
        double t = (cum - 1.0) / (i + 1);
        if (sorted[i] - t > 0) {
            theta = t;
            k = i + 1;
        }
    }
    (void)k;
    Eigen::VectorXd proj(d);
    for (int i = 0; i < d; ++i) proj[i] = std::max(lam[i] - theta, 0.0);
    return es.eigenvectors() * proj.asDiagonal() * es.eigenvectors().adjoint();
}

std::vector<std::pair<double, double>> systematic_error_curve(
    const Eigen::Matrix2cd& state, const MeasurementSetting& setting, Param plate,
    const std::vector<double>& offsets_rad, bool project) {
    auto nominal = setting.bases();
    std::vector<std::pair<double, double>> curve;
    curve.reserve(offsets_rad.size());
    for (double off : offsets_rad) {
        ParamOffsets po;
        po.set(plate, off);
        auto probs = outcome_probabilities(state, setting.bases_with_offsets(po));
        Eigen::MatrixXcd est = linear_inversion(probs, nominal);
        if (project) est = project_to_physical(est);
        curve.emplace_back(off, hs_error(est, state));
    }
    return curve;
}

std::vector<std::pair<double, double>> systematic_error_curve_two_qubit(
    const Eigen::Matrix4cd& state, const MeasurementSetting& setting1,
    const MeasurementSetting& setting2, Param plate, const std::vector<double>& offsets_rad,
    bool project) {
    auto nominal1 = setting1.bases();
    auto nominal2 = setting2.bases();
    std::vector<std::pair<double, double>> curve;
    curve.reserve(offsets_rad.size());
    for (double off : offsets_rad) {
        ParamOffsets po;
        po.set(plate, off);
        auto probs = outcome_probabilities(state, setting1.bases_with_offsets(po), nominal2);
        Eigen::MatrixXcd est = linear_inversion(probs, nominal1, nominal2);
        if (project) est = project_to_physical(est);
        curve.emplace_back(off, hs_error(est, state));
    }
    return curve;
}

double quadratic_fit_origin(const std::vector<std::pair<double, double>>& curve) {
    double num = 0, den = 0;
    for (auto [x, y] : curve) {
        num += y * x * x;
        den += x * x * x * x;
    }
    if (den == 0) throw std::invalid_argument("quadratic_fit_origin: all offsets are zero");
    return num / den;
}

std::vector<SweepFit> two_qubit_experiment(const Eigen::Matrix4cd& state,
                                           const MeasurementSetting& setting1,
                                           const MeasurementSetting& setting2,
                                           const std::vector<double>& offsets_rad) {
    std::vector<Param> angle_params;
    for (Param p : setting1.params())
        if (p == Param::axis || p == Param::q || p == Param::h) angle_params.push_back(p);

    // Werner mixing weight of the supplied state (p = 1 for the singlet).
    double p_mix = std::sqrt(std::max(
        (4.0 * (state * state).trace().real() - 1.0) / 3.0, 0.0));

    std::vector<SweepFit> fits;
    for (Param p : angle_params) {
        auto curve = systematic_error_curve_two_qubit(state, setting1, setting2, p, offsets_rad);
        SweepFit fit;
        fit.plate = p;
        fit.fitted = quadratic_fit_origin(curve);
        ErrorBudget budget;
        if (setting1.kind == MeasurementSetting::Kind::single_plate)
            budget = single_plate_mub_budget(setting1.phase);
        else
            budget = qwp_hwp_mub_budget(setting1.qh);
        fit.first_order = 0.25 * p_mix * p_mix * budget.coeff(param_name(p));
        fits.push_back(fit);
    }
    return fits;
}

std::vector<MonteCarloPoint> monte_carlo(const TomographyConfig& config, Param plate,
                                         const std::vector<double>& offsets_rad) {
    if (config.statistics != Statistics::sampled)
        throw std::invalid_argument("monte_carlo: requires sampled statistics");
    if (config.trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");

    std::vector<MonteCarloPoint> out;
    for (std::size_t pt = 0; pt < offsets_rad.size(); ++pt) {
        ParamOffsets po = config.offsets1;
        po.set(plate, offsets_rad[pt]);

        CountRecord probs;
        std::array<BlochVector, 3> nominal1 = config.setting1.bases();
        std::array<BlochVector, 3> nominal2{};
        if (config.n_qubits == 1) {
            probs = outcome_probabilities(Eigen::Matrix2cd(config.state),
                                          config.setting1.bases_with_offsets(po));
        } else {
            nominal2 = config.setting2.bases();
            probs = outcome_probabilities(Eigen::Matrix4cd(config.state),
                                          config.setting1.bases_with_offsets(po),
                                          config.setting2.bases_with_offsets(config.offsets2));
        }

        std::vector<double> errs(config.trials);
        for (int t = 0; t < config.trials; ++t) {
            auto counts = sample_counts(probs, config.photons_per_basis,
                                        derive_seed(config.seed, pt, static_cast<std::uint64_t>(t)));
            Eigen::MatrixXcd est = config.n_qubits == 1
                                       ? linear_inversion(counts, nominal1)
                                       : linear_inversion(counts, nominal1, nominal2);
            errs[t] = hs_error(project_to_physical(est), config.state);
        }
        MonteCarloPoint mc;
        mc.offset = offsets_rad[pt];
        mc.mean = std::accumulate(errs.begin(), errs.end(), 0.0) / config.trials;
        double ss = 0;
        for (double e : errs) ss += (e - mc.mean) * (e - mc.mean);
        mc.stddev = config.trials > 1 ? std::sqrt(ss / (config.trials - 1)) : 0.0;
        out.push_back(mc);
    }
    return out;
}

Eigen::Matrix2cd named_state(char name, double p) {
    if (p < 0 || p > 1) throw std::invalid_argument("named_state: p must be in [0, 1]");
    BlochVector r;
    switch (name) {
        case 'H': r = {0, 0, 1}; break;
        case 'V': r = {0, 0, -1}; break;
        case 'D': r = {1, 0, 0}; break;
        case 'A': r = {-1, 0, 0}; break;
        case 'R': r = {0, 1, 0}; break;
        case 'L': r = {0, -1, 0}; break;
        default: throw std::invalid_argument("named_state: expected one of H V D A R L");
    }
    return bloch_to_density(p * r);
}

Eigen::Matrix4cd singlet_state(double p) {
    if (p < 0 || p > 1) throw std::invalid_argument("singlet_state: p must be in [0, 1]");
    Eigen::Vector4cd psi;
    psi << 0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0;
    return p * (psi * psi.adjoint()) + (1 - p) * 0.25 * Eigen::Matrix4cd::Identity();
}

} // namespace wpmub
