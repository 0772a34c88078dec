#include "wpmub/bloch.hpp"

#include <cmath>
#include <stdexcept>

namespace wpmub {

namespace {
double positive_mod(double x, double m) {
    double r = std::fmod(x, m);
    return r < 0 ? r + m : r;
}
} // namespace

Angle Angle::mod180() const { return Angle(positive_mod(rad_, pi)); }
Angle Angle::mod360() const { return Angle(positive_mod(rad_, 2 * pi)); }

const Eigen::Matrix2cd pauli_x = [] {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}();
const Eigen::Matrix2cd pauli_y = [] {
    Eigen::Matrix2cd m;
    m << 0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0;
    return m;
}();
const Eigen::Matrix2cd pauli_z = [] {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}();

Unitary2 waveplate_unitary(Angle axis, Angle phase) {
    const double th = axis.rad();
    const std::complex<double> e = std::exp(std::complex<double>(0, phase.rad()));
    const double c = std::cos(th), s = std::sin(th);
    const double s2 = std::sin(2 * th);
    Unitary2 u;
    u << c * c + e * s * s, 0.5 * (1.0 - e) * s2,
         0.5 * (1.0 - e) * s2, s * s + e * c * c;
    return u;
}

bool is_unitary(const Unitary2& u, double eps) {
    Eigen::Matrix2cd g = u.adjoint() * u;
    if ((g - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > eps) return false;
    return std::abs(std::abs(u.determinant()) - 1.0) <= eps;
}

BlochVector bloch_from_single_waveplate(Angle axis, Angle phase) {
    const double th = axis.rad(), d = phase.rad();
    const double sd2 = std::sin(d / 2);
    return {sd2 * sd2 * std::sin(4 * th),
            -std::sin(d) * std::sin(2 * th),
            1.0 - 2.0 * sd2 * sd2 * std::sin(2 * th) * std::sin(2 * th)};
}

BlochVector bloch_from_qwp_hwp(Angle q, Angle h) {
    const double qq = q.rad(), hh = h.rad();
    const double phi = 4 * hh - 2 * qq;
    return {std::sin(2 * qq) * std::cos(phi), std::sin(phi), std::cos(2 * qq) * std::cos(phi)};
}

BlochVector bloch_from_unitary(const Unitary2& u) {
    Eigen::Matrix2cd m = u * pauli_z * u.adjoint();
    return {0.5 * (m * pauli_x).trace().real(),
            0.5 * (m * pauli_y).trace().real(),
            0.5 * (m * pauli_z).trace().real()};
}

std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> projectors_from_bloch(const BlochVector& r) {
    if (std::abs(r.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("projectors_from_bloch: Bloch vector must be unit norm");
    Eigen::Matrix2cd rs = r.x() * pauli_x + r.y() * pauli_y + r.z() * pauli_z;
    Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    return {0.5 * (id + rs), 0.5 * (id - rs)};
}

double hs_error(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("hs_error: dimension mismatch");
    Eigen::MatrixXcd d = a - b;
    return (d * d).trace().real();
}

Eigen::Matrix2cd bloch_to_density(const BlochVector& r) {
    return 0.5 * (Eigen::Matrix2cd::Identity() + r.x() * pauli_x + r.y() * pauli_y + r.z() * pauli_z);
}

BlochVector density_to_bloch(const Eigen::Matrix2cd& rho) {
    return {(rho * pauli_x).trace().real(),
            (rho * pauli_y).trace().real(),
            (rho * pauli_z).trace().real()};
}

bool is_density_matrix(const Eigen::MatrixXcd& rho, double eps, double psd_slack) {
    if (rho.rows() != rho.cols()) return false;
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > eps) return false;
    if (std::abs(rho.trace().real() - 1.0) > eps) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    return es.eigenvalues().minCoeff() >= -psd_slack;
}

} // namespace wpmub
