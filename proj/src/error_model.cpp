#include "wpmub/error_model.hpp"

#include <cmath>
#include <stdexcept>

namespace wpmub {

namespace {

// d/dtheta of the wave-plate Jones matrix.
Eigen::Matrix2cd waveplate_dU_daxis(Angle axis, Angle phase) {
    const double th = axis.rad();
    const std::complex<double> one_minus_e =
        1.0 - std::exp(std::complex<double>(0, phase.rad()));
    Eigen::Matrix2cd m;
    m << -std::sin(2 * th), std::cos(2 * th), std::cos(2 * th), std::sin(2 * th);
    return one_minus_e * m;
}

// d/ddelta of the wave-plate Jones matrix.
Eigen::Matrix2cd waveplate_dU_dphase(Angle axis, Angle phase) {
    const double th = axis.rad();
    const std::complex<double> ie = std::complex<double>(0, 1) *
                                    std::exp(std::complex<double>(0, phase.rad()));
    const double c = std::cos(th), s = std::sin(th);
    Eigen::Matrix2cd m;
    m << s * s, -0.5 * std::sin(2 * th), -0.5 * std::sin(2 * th), c * c;
    return ie * m;
}

// d r / d xi from U and dU/dxi: r_k = Re tr(sigma_k dU sigma_z U^dag).
BlochVector bloch_derivative(const Eigen::Matrix2cd& u, const Eigen::Matrix2cd& du) {
    Eigen::Matrix2cd a = du * pauli_z * u.adjoint();
    return {(pauli_x * a).trace().real(), (pauli_y * a).trace().real(),
            (pauli_z * a).trace().real()};
}

// Complete-MUB phase windows, padded by the paper's 0.1-degree quote
// resolution so the quoted endpoints 111.5 and 141.7 are accepted.
bool complete_mub_phase(Angle phase) {
    double d = phase.mod360().deg();
    auto in = [d](double lo, double hi) { return d >= lo && d <= hi; };
    return in(111.4, 141.9) || in(360.0 - 141.9, 360.0 - 111.4);
}

} // namespace

std::string_view param_name(Param p) {
    switch (p) {
        case Param::phase: return "phase";
        case Param::axis: return "axis";
        case Param::phase_q: return "phase_q";
        case Param::phase_h: return "phase_h";
        case Param::q: return "q";
        case Param::h: return "h";
    }
    return "?";
}

double Uncertainty::get(Param p) const {
    switch (p) {
        case Param::phase: return d_phase;
        case Param::axis: return d_axis;
        case Param::phase_q: return d_phase_q;
        case Param::phase_h: return d_phase_h;
        case Param::q: return d_q;
        case Param::h: return d_h;
    }
    return 0;
}

double ParamOffsets::get(Param p) const {
    switch (p) {
        case Param::phase: return phase;
        case Param::axis: return axis;
        case Param::phase_q: return phase_q;
        case Param::phase_h: return phase_h;
        case Param::q: return q;
        case Param::h: return h;
    }
    return 0;
}

void ParamOffsets::set(Param p, double v) {
    switch (p) {
        case Param::phase: phase = v; break;
        case Param::axis: axis = v; break;
        case Param::phase_q: phase_q = v; break;
        case Param::phase_h: phase_h = v; break;
        case Param::q: q = v; break;
        case Param::h: h = v; break;
    }
}

MeasurementSetting MeasurementSetting::twp() {
    double t0 = 0.25 * std::acos(-1.0 / 3.0);
    return single_plate(Angle::degrees(120.0),
                        {Angle::radians(0.0), Angle::radians(t0), Angle::radians(t0 + pi / 2)});
}

MeasurementSetting MeasurementSetting::single_plate(Angle phase,
                                                    const std::array<Angle, 3>& axes) {
    MeasurementSetting s;
    s.kind = Kind::single_plate;
    s.phase = phase.mod360();
    s.axes = axes;
    return s;
}

MeasurementSetting MeasurementSetting::qwp_hwp_pauli() {
    return qwp_hwp({{{Angle::degrees(45), Angle::degrees(22.5)},
                     {Angle::degrees(0), Angle::degrees(22.5)},
                     {Angle::degrees(0), Angle::degrees(0)}}});
}

MeasurementSetting MeasurementSetting::qwp_hwp(
    const std::array<std::pair<Angle, Angle>, 3>& qh) {
    MeasurementSetting s;
    s.kind = Kind::qwp_hwp;
    s.qh = qh;
    return s;
}

std::vector<Param> MeasurementSetting::params() const {
    if (kind == Kind::single_plate) return {Param::phase, Param::axis};
    return {Param::phase_q, Param::phase_h, Param::q, Param::h};
}

std::array<BlochVector, 3> MeasurementSetting::bases() const {
    return bases_with_offsets({});
}

std::array<BlochVector, 3> MeasurementSetting::bases_with_offsets(const ParamOffsets& off) const {
    std::array<BlochVector, 3> out;
    for (int j = 0; j < 3; ++j) {
        if (kind == Kind::single_plate) {
            out[j] = bloch_from_single_waveplate(Angle::radians(axes[j].rad() + off.axis),
                                                 Angle::radians(phase.rad() + off.phase));
        } else {
            Eigen::Matrix2cd uq =
                waveplate_unitary(Angle::radians(qh[j].first.rad() + off.q),
                                  Angle::radians(pi / 2 + off.phase_q));
            Eigen::Matrix2cd uh =
                waveplate_unitary(Angle::radians(qh[j].second.rad() + off.h),
                                  Angle::radians(pi + off.phase_h));
            out[j] = bloch_from_unitary(uq * uh);
        }
    }
    return out;
}

std::array<BlochVector, 3> MeasurementSetting::jacobian(Param p) const {
    std::array<BlochVector, 3> out;
    for (int j = 0; j < 3; ++j) {
        if (kind == Kind::single_plate) {
            const double th = axes[j].rad(), d = phase.rad();
            const double s2 = std::sin(d / 2) * std::sin(d / 2);
            switch (p) {
                case Param::axis:
                    out[j] = {4 * s2 * std::cos(4 * th), -2 * std::sin(d) * std::cos(2 * th),
                              -4 * s2 * std::sin(4 * th)};
                    break;
                case Param::phase:
                    out[j] = {0.5 * std::sin(d) * std::sin(4 * th),
                              -std::cos(d) * std::sin(2 * th),
                              -std::sin(d) * std::sin(2 * th) * std::sin(2 * th)};
                    break;
                default:
                    throw std::invalid_argument("jacobian: parameter not in this setting");
            }
        } else {
            Angle q = qh[j].first, h = qh[j].second;
            Angle dq = Angle::radians(pi / 2), dh = Angle::radians(pi);
            Eigen::Matrix2cd uq = waveplate_unitary(q, dq);
            Eigen::Matrix2cd uh = waveplate_unitary(h, dh);
            Eigen::Matrix2cd du;
            switch (p) {
                case Param::q: du = waveplate_dU_daxis(q, dq) * uh; break;
                case Param::h: du = uq * waveplate_dU_daxis(h, dh); break;
                case Param::phase_q: du = waveplate_dU_dphase(q, dq) * uh; break;
                case Param::phase_h: du = uq * waveplate_dU_dphase(h, dh); break;
                default:
                    throw std::invalid_argument("jacobian: parameter not in this setting");
            }
            out[j] = bloch_derivative(uq * uh, du);
        }
    }
    return out;
}

double MeasurementSetting::gram_defect() const {
    auto b = bases();
    double worst = 0;
    for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c)
            worst = std::max(worst, std::abs(b[a].dot(b[c]) - (a == c ? 1.0 : 0.0)));
    return worst;
}

double ErrorBudget::coeff(std::string_view name) const {
    for (const auto& [n, c] : coeffs)
        if (n == name) return c;
    throw std::out_of_range("ErrorBudget: no coefficient named " + std::string(name));
}

double ErrorBudget::total(const Uncertainty& u) const {
    double sum = 0;
    for (const auto& [n, c] : coeffs) {
        double d = 0;
        if (n == "phase") d = u.d_phase;
        else if (n == "axis") d = u.d_axis;
        else if (n == "phase_q") d = u.d_phase_q;
        else if (n == "phase_h") d = u.d_phase_h;
        else if (n == "q") d = u.d_q;
        else if (n == "h") d = u.d_h;
        sum += c * d * d;
    }
    return sum;
}

std::pair<double, double> single_plate_derivative_norms(Angle axis, Angle phase) {
    const double th = axis.rad(), d = phase.rad();
    const double s2t = std::sin(2 * th) * std::sin(2 * th);
    const double sd2 = std::sin(d / 2);
    return {s2t, 16 * sd2 * sd2 - 4 * std::sin(d) * std::sin(d) * s2t};
}

ErrorBudget single_plate_mub_budget(Angle phase) {
    if (!complete_mub_phase(phase))
        throw std::domain_error(
            "single_plate_mub_budget: phase does not admit a complete MUB "
            "(feasible window [111.5, 141.7] degrees or its mirror about 180)");
    const double d = phase.rad();
    const double sd = std::sin(d), sd2 = std::sin(d / 2);
    ErrorBudget b;
    b.coeffs = {{"phase", 1.0 / (sd * sd)}, {"axis", 48 * sd2 * sd2 - 4}};
    return b;
}

ErrorBudget qwp_hwp_mub_budget(const std::array<std::pair<Angle, Angle>, 3>& qh,
                               bool averaged_hwp_phase) {
    auto setting = MeasurementSetting::qwp_hwp(qh);
    if (setting.gram_defect() > tol.mub_residual)
        throw std::invalid_argument("qwp_hwp_mub_budget: angles do not realize a complete MUB");
    auto bases = setting.bases();
    double coeff_q = 0, coeff_phase_q = 0, coeff_phase_h = 0;
    for (int j = 0; j < 3; ++j) {
        double r2 = bases[j][1];
        coeff_q += 8 - 4 * r2 * r2;
        coeff_phase_q += r2 * r2;
        double s2h = std::sin(2 * qh[j].second.rad());
        coeff_phase_h += s2h * s2h;
    }
    if (averaged_hwp_phase) coeff_phase_h = 1.5;
    ErrorBudget b;
    b.coeffs = {{"h", 48.0},
                {"q", coeff_q},
                {"phase_h", coeff_phase_h},
                {"phase_q", coeff_phase_q}};
    return b;
}

ErrorBudget state_estimation_budget(const Eigen::Matrix2cd& state,
                                    const MeasurementSetting& setting) {
    if (setting.gram_defect() > tol.mub_residual)
        throw std::invalid_argument("state_estimation_budget: setting is not a complete MUB");
    if (!is_density_matrix(state, 1e-9, 1e-9))
        throw std::invalid_argument("state_estimation_budget: state is not a density matrix");
    BlochVector s = density_to_bloch(state);
    ErrorBudget b;
    for (Param p : setting.params()) {
        auto dr = setting.jacobian(p);
        double c = 0;
        for (int j = 0; j < 3; ++j) {
            double proj = dr[j].dot(s);
            c += proj * proj;
        }
        b.coeffs.emplace_back(std::string(param_name(p)), 0.5 * c);
    }
    return b;
}

double state_estimation_error(const Eigen::Matrix2cd& state, const MeasurementSetting& setting,
                              const Uncertainty& u) {
    return state_estimation_budget(state, setting).total(u);
}

double werner_two_qubit_error(double p, double eps1_sq, double eps2_sq) {
    if (p < 0 || p > 1) throw std::invalid_argument("werner_two_qubit_error: p must be in [0, 1]");
    if (eps1_sq < 0 || eps2_sq < 0)
        throw std::invalid_argument("werner_two_qubit_error: eps^2 must be nonnegative");
    return 0.25 * p * p * (eps1_sq + eps2_sq);
}

} // namespace wpmub
