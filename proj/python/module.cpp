#include "wpmub/error_model.hpp"
#include "wpmub/mub.hpp"
#include "wpmub/tomography.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace wpmub;

namespace {

py::dict triple_dict(const MubTriple& t) {
    py::dict d;
    d["phase_deg"] = t.phase.deg();
    d["thetas_deg"] = py::make_tuple(t.thetas[0].deg(), t.thetas[1].deg(), t.thetas[2].deg());
    d["residual"] = t.residual;
    return d;
}

py::dict budget_dict(const ErrorBudget& b) {
    py::dict d;
    for (const auto& [name, c] : b.coeffs) d[py::str(name)] = c;
    return d;
}

MeasurementSetting setting_from_name(const std::string& name) {
    if (name == "twp") return MeasurementSetting::twp();
    if (name == "qwp-hwp") return MeasurementSetting::qwp_hwp_pauli();
    throw std::invalid_argument("unknown setting: " + name);
}

} // namespace

PYBIND11_MODULE(_wpmub, m) {
    m.doc() = "single-wave-plate mutually unbiased bases: solver, error model, tomography";

    m.def("waveplate_unitary",
          [](double theta_deg, double phase_deg) {
              return Eigen::Matrix2cd(
                  waveplate_unitary(Angle::degrees(theta_deg), Angle::degrees(phase_deg)));
          },
          py::arg("theta_deg"), py::arg("phase_deg"));

    m.def("bloch_from_single_waveplate",
          [](double theta_deg, double phase_deg) {
              Eigen::Vector3d r = bloch_from_single_waveplate(Angle::degrees(theta_deg),
                                                              Angle::degrees(phase_deg));
              return r;
          },
          py::arg("theta_deg"), py::arg("phase_deg"));

    m.def("unbiasedness_defect",
          [](double t1_deg, double t2_deg, double phase_deg) {
              return unbiasedness_defect(Angle::degrees(phase_deg), Angle::degrees(t1_deg),
                                         Angle::degrees(t2_deg));
          },
          py::arg("theta1_deg"), py::arg("theta2_deg"), py::arg("phase_deg"));

    m.def("two_mub_angles",
          [](double phase_deg) {
              auto p = two_mub_angles(Angle::degrees(phase_deg));
              return py::make_tuple(p.theta1.deg(), p.theta2.deg());
          },
          py::arg("phase_deg"));

    m.def("frame_potential",
          [](double phase_deg, int starts, std::uint64_t seed) {
              return frame_potential(Angle::degrees(phase_deg), starts, seed);
          },
          py::arg("phase_deg"), py::arg("starts") = 100, py::arg("seed") = 1);

    m.def("solve_complete_mub",
          [](double phase_deg, int starts, std::uint64_t seed) {
              py::list out;
              for (const auto& fam : solve_complete_mub(Angle::degrees(phase_deg), starts, seed)) {
                  py::dict d;
                  d["base"] = triple_dict(fam.base);
                  py::list im;
                  for (const auto& t : fam.images) im.append(triple_dict(t));
                  d["images"] = im;
                  out.append(d);
              }
              return out;
          },
          py::arg("phase_deg"), py::arg("starts") = 150, py::arg("seed") = 1);

    m.def("scan_phase_window",
          [](double lo_deg, double hi_deg, double step_deg, int starts, std::uint64_t seed) {
              auto scan = scan_phase_window(Angle::degrees(lo_deg), Angle::degrees(hi_deg),
                                            Angle::degrees(step_deg), starts, seed);
              py::list windows;
              for (const auto& w : scan.windows)
                  windows.append(py::make_tuple(w.lo_deg, w.hi_deg));
              py::list grid;
              for (const auto& [ph, pot] : scan.grid) grid.append(py::make_tuple(ph, pot));
              py::dict d;
              d["windows"] = windows;
              d["grid"] = grid;
              return d;
          },
          py::arg("lo_deg"), py::arg("hi_deg"), py::arg("step_deg") = 0.5,
          py::arg("starts") = 100, py::arg("seed") = 1);

    m.def("single_plate_mub_budget",
          [](double phase_deg) {
              return budget_dict(single_plate_mub_budget(Angle::degrees(phase_deg)));
          },
          py::arg("phase_deg"));

    m.def("qwp_hwp_mub_budget", [](bool averaged_hwp_phase) {
        return budget_dict(
            qwp_hwp_mub_budget(MeasurementSetting::qwp_hwp_pauli().qh, averaged_hwp_phase));
    }, py::arg("averaged_hwp_phase") = false);

    m.def("state_estimation_budget",
          [](const Eigen::Matrix2cd& rho, const std::string& setting) {
              return budget_dict(state_estimation_budget(rho, setting_from_name(setting)));
          },
          py::arg("rho"), py::arg("setting"));

    m.def("named_state",
          [](const std::string& name, double p) {
              if (name.size() != 1) throw std::invalid_argument("state name must be one letter");
              return Eigen::Matrix2cd(named_state(name[0], p));
          },
          py::arg("name"), py::arg("p") = 1.0);

    m.def("singlet_state", [](double p) { return Eigen::Matrix4cd(singlet_state(p)); },
          py::arg("p") = 1.0);

    m.def("linear_inversion_single",
          [](const Eigen::Matrix2cd& rho, const std::string& setting, std::uint64_t photons,
             std::uint64_t seed) {
              auto s = setting_from_name(setting);
              auto counts = sample_counts(outcome_probabilities(rho, s.bases()),
                                          static_cast<std::int64_t>(photons), seed);
              return Eigen::Matrix2cd(linear_inversion(counts, s.bases()));
          },
          py::arg("rho"), py::arg("setting"), py::arg("photons") = 100000, py::arg("seed") = 1);

    m.def("project_to_physical",
          [](const Eigen::MatrixXcd& rho) { return Eigen::MatrixXcd(project_to_physical(rho)); },
          py::arg("rho"));
}
