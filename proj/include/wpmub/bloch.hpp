#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

// Exact polarization algebra: wave-plate unitaries, Bloch-vector maps,
// density matrices, projectors and the Hilbert-Schmidt error metric.

namespace wpmub {

struct Tolerances {
    double algebraic = 1e-12;   // unitarity, Hermiticity, trace checks
    double psd_slack = 1e-10;   // eigenvalue slack for density matrices
    double mub_residual = 1e-9; // pairwise-orthogonality residual of a MUB triple
    double zero_tol = 1e-9;     // "frame potential vanishes" threshold
    double dedup_deg = 0.05;    // angle dedup resolution for solver output
};

inline constexpr Tolerances tol{};

constexpr double pi = 3.14159265358979323846;

// Angles are degrees at every external interface, radians internally.
class Angle {
  public:
    Angle() = default;
    static Angle degrees(double d) { return Angle(d * pi / 180.0); }
    static Angle radians(double r) { return Angle(r); }
    double deg() const { return rad_ * 180.0 / pi; }
    double rad() const { return rad_; }

    // Wave-plate optic axes are physically equivalent mod 180 degrees.
    Angle mod180() const;
    // Retardation phases are equivalent mod 360 degrees.
    Angle mod360() const;

  private:
    explicit Angle(double r) : rad_(r) {}
    double rad_ = 0.0;
};

using Unitary2 = Eigen::Matrix2cd;
using BlochVector = Eigen::Vector3d;

extern const Eigen::Matrix2cd pauli_x;
extern const Eigen::Matrix2cd pauli_y;
extern const Eigen::Matrix2cd pauli_z;

// Jones matrix of a wave plate with retardation `phase` whose optic axis is
// rotated by `axis` from horizontal.
Unitary2 waveplate_unitary(Angle axis, Angle phase);

bool is_unitary(const Unitary2& u, double eps = tol.algebraic);

// Bloch vector of the basis realized by a single wave plate in front of a
// PBS: the image of (0,0,1) under the plate.
BlochVector bloch_from_single_waveplate(Angle axis, Angle phase);

// Bloch vector realized by the QWP-HWP setting at optic-axis angles (q, h).
BlochVector bloch_from_qwp_hwp(Angle q, Angle h);

// Bloch image of sigma_z under conjugation by an arbitrary unitary.
BlochVector bloch_from_unitary(const Unitary2& u);

// The two rank-1 projectors (I +- r.sigma)/2 of a unit Bloch vector.
// Throws std::invalid_argument for non-unit r.
std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> projectors_from_bloch(const BlochVector& r);

// tr[(a-b)^2] for equal-dimension Hermitian matrices.
double hs_error(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

Eigen::Matrix2cd bloch_to_density(const BlochVector& r);
BlochVector density_to_bloch(const Eigen::Matrix2cd& rho);

bool is_density_matrix(const Eigen::MatrixXcd& rho,
                       double eps = tol.algebraic,
                       double psd_slack = tol.psd_slack);

} // namespace wpmub
