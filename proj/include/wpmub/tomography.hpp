#pragma once

#include "wpmub/error_model.hpp"

#include <cstdint>
#include <vector>

// End-to-end tomography simulation: counts from true states under possibly
// miscalibrated bases, linear-inversion reconstruction with a positivity
// projection, and the resulting systematic error.

namespace wpmub {

enum class Statistics { exact, sampled };

// Per-setting outcome table: 3 rows x 2 columns for a qubit, 9 rows x 4
// columns for a photon pair. Entries are probabilities (exact) or counts.
struct CountRecord {
    int n_qubits = 1;
    bool exact = true;
    Eigen::MatrixXd table;
    double photons_per_basis = 0;

    Eigen::MatrixXd frequencies() const; // rows normalized to 1
};

struct TomographyConfig {
    int n_qubits = 1;
    Eigen::MatrixXcd state;        // 2x2 or 4x4 density matrix
    MeasurementSetting setting1;
    MeasurementSetting setting2;   // two-qubit: photon 2 (defaults to setting1)
    ParamOffsets offsets1;         // miscalibration of photon-1 plates
    ParamOffsets offsets2;
    std::int64_t photons_per_basis = 1'000'000;
    int trials = 100;
    std::uint64_t seed = 1;
    Statistics statistics = Statistics::exact;
};

// Deterministic sub-seed rule: trial (a, b) of a master seed is reproducible
// in isolation regardless of execution order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

std::array<BlochVector, 3> realized_bases(const MeasurementSetting& setting,
                                          const ParamOffsets& offsets);

// Born-rule probabilities of a qubit state under three bases.
CountRecord outcome_probabilities(const Eigen::Matrix2cd& state,
                                  const std::array<BlochVector, 3>& bases);
// Two-qubit probabilities under the 9 product-basis settings.
CountRecord outcome_probabilities(const Eigen::Matrix4cd& state,
                                  const std::array<BlochVector, 3>& bases1,
                                  const std::array<BlochVector, 3>& bases2);

// Binomial (qubit) or multinomial (pair) draws per setting row.
CountRecord sample_counts(const CountRecord& probs, std::int64_t photons_per_basis,
                          std::uint64_t seed);

// Unconstrained tomographic inversion against the nominal bases. The output
// is Hermitian with unit trace but may have negative eigenvalues.
Eigen::MatrixXcd linear_inversion(const CountRecord& record,
                                  const std::array<BlochVector, 3>& nominal);
Eigen::MatrixXcd linear_inversion(const CountRecord& record,
                                  const std::array<BlochVector, 3>& nominal1,
                                  const std::array<BlochVector, 3>& nominal2);

// Closest density matrix in Hilbert-Schmidt norm: eigenvalues projected onto
// the probability simplex.
Eigen::MatrixXcd project_to_physical(const Eigen::MatrixXcd& h);

// Infinite-statistics systematic error sweep for one miscalibration
// parameter: probabilities under realized bases, inversion against nominal
// bases, positivity projection, then tr(rho_hat - rho)^2.
std::vector<std::pair<double, double>> systematic_error_curve(
    const Eigen::Matrix2cd& state, const MeasurementSetting& setting, Param plate,
    const std::vector<double>& offsets_rad, bool project = true);

// Same pipeline for a photon pair, offsets applied to photon 1's plates.
std::vector<std::pair<double, double>> systematic_error_curve_two_qubit(
    const Eigen::Matrix4cd& state, const MeasurementSetting& setting1,
    const MeasurementSetting& setting2, Param plate, const std::vector<double>& offsets_rad,
    bool project = true);

// Least-squares quadratic-through-origin coefficient of y vs x^2.
double quadratic_fit_origin(const std::vector<std::pair<double, double>>& curve);

struct SweepFit {
    Param plate;
    double fitted;      // coefficient of (offset)^2 from the simulated curve
    double first_order; // unconstrained first-order prediction
};

// Fits hs_error vs offset^2 for each angle parameter of the two-qubit
// setting (offsets on photon 1), with the Werner first-order reference.
std::vector<SweepFit> two_qubit_experiment(const Eigen::Matrix4cd& state,
                                           const MeasurementSetting& setting1,
                                           const MeasurementSetting& setting2,
                                           const std::vector<double>& offsets_rad);

struct MonteCarloPoint {
    double offset = 0;
    double mean = 0;
    double stddev = 0;
};

// Sampled-statistics trials at each offset of `plate`; reports mean and
// sample standard deviation of the reconstruction error.
std::vector<MonteCarloPoint> monte_carlo(const TomographyConfig& config, Param plate,
                                         const std::vector<double>& offsets_rad);

// Named pure states mixed with identity: rho = p |phi><phi| + (1-p) I/2.
Eigen::Matrix2cd named_state(char name, double p);
// Werner singlet: p |psi-><psi-| + (1-p) I/4.
Eigen::Matrix4cd singlet_state(double p = 1.0);

} // namespace wpmub
