#pragma once

#include "wpmub/bloch.hpp"

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// First-order propagation of wave-plate parameter uncertainties into the
// systematic error of realized MUB and of estimated states.

namespace wpmub {

// The miscalibration parameters of a setting. Each entry is a shared offset:
// an axis error moves all three rotation positions of the same physical
// plate together.
enum class Param { phase, axis, phase_q, phase_h, q, h };

std::string_view param_name(Param p);

struct Uncertainty {
    double d_phase = 0;   // single plate: retardation (rad)
    double d_axis = 0;    // single plate: optic axis (rad)
    double d_phase_q = 0; // QWP retardation
    double d_phase_h = 0; // HWP retardation
    double d_q = 0;       // QWP axis
    double d_h = 0;       // HWP axis

    double get(Param p) const;
};

struct ParamOffsets {
    double phase = 0, axis = 0, phase_q = 0, phase_h = 0, q = 0, h = 0;

    double get(Param p) const;
    void set(Param p, double v);
};

struct MeasurementSetting {
    enum class Kind { single_plate, qwp_hwp };

    Kind kind = Kind::single_plate;
    Angle phase;                                 // single_plate retardation
    std::array<Angle, 3> axes{};                 // single_plate rotation angles
    std::array<std::pair<Angle, Angle>, 3> qh{}; // qwp_hwp (q, h) per basis

    // TWP at 120 degrees with rotation angles (0, arccos(-1/3)/4, +90).
    static MeasurementSetting twp();
    static MeasurementSetting single_plate(Angle phase, const std::array<Angle, 3>& axes);
    // Pauli realization (45, 22.5), (0, 22.5), (0, 0).
    static MeasurementSetting qwp_hwp_pauli();
    static MeasurementSetting qwp_hwp(const std::array<std::pair<Angle, Angle>, 3>& qh);

    // The miscalibration parameters this setting has.
    std::vector<Param> params() const;

    // Nominal basis Bloch vectors.
    std::array<BlochVector, 3> bases() const;

    // Basis Bloch vectors at nominal-plus-offset parameters.
    std::array<BlochVector, 3> bases_with_offsets(const ParamOffsets& off) const;

    // Analytic d r^j / d xi for a shared offset of parameter p.
    std::array<BlochVector, 3> jacobian(Param p) const;

    // Max deviation of the basis Gram matrix from identity.
    double gram_defect() const;
};

struct ErrorBudget {
    std::vector<std::pair<std::string, double>> coeffs; // (param name, coefficient)

    double coeff(std::string_view name) const;
    // Quadratic form: sum of coeff * (uncertainty)^2.
    double total(const Uncertainty& u) const;
};

// (||dr/d_phase||^2, ||dr/d_axis||^2) for one single-plate basis.
std::pair<double, double> single_plate_derivative_norms(Angle axis, Angle phase);

// MUB-realization budget of the single-plate setting:
// (1/sin^2(delta)) (d_phase)^2 + (48 sin^2(delta/2) - 4) (d_axis)^2.
// Throws std::domain_error outside the complete-MUB phase window.
ErrorBudget single_plate_mub_budget(Angle phase);

// MUB-realization budget of the QWP-HWP setting. The HWP-phase coefficient
// depends on the chosen angles (sum of sin^2(2h)); with averaged_hwp_phase
// it is replaced by the uniform-angle average 3/2.
ErrorBudget qwp_hwp_mub_budget(const std::array<std::pair<Angle, Angle>, 3>& qh,
                               bool averaged_hwp_phase = false);

// Per-parameter coefficients of tr(rho - rho_hat)^2 for estimating `state`
// with the given complete-MUB setting: 1/2 * sum_j (dr^j/dxi . s)^2 per xi.
ErrorBudget state_estimation_budget(const Eigen::Matrix2cd& state,
                                    const MeasurementSetting& setting);

double state_estimation_error(const Eigen::Matrix2cd& state, const MeasurementSetting& setting,
                              const Uncertainty& u);

// Werner-state two-qubit error: p^2 (eps1^2 + eps2^2) / 4.
double werner_two_qubit_error(double p, double eps1_sq, double eps2_sq);

} // namespace wpmub
