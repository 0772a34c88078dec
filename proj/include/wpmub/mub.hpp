#pragma once

#include "wpmub/bloch.hpp"

#include <array>
#include <cstdint>
#include <vector>

// Finds phases and rotation angles at which a single wave plate realizes
// two or three mutually unbiased bases.

namespace wpmub {

struct MubPair {
    Angle phase;
    Angle theta1, theta2;
    double defect = 0.0; // residual r(theta1).r(theta2)
};

struct MubTriple {
    Angle phase;
    std::array<Angle, 3> thetas; // in [0, 180) deg, ascending
    double residual = 0.0;       // max |r_i.r_j| over the three pairs
};

// One solution class: a canonical triple plus its three symmetry images
// (theta -> 90-theta, 90+theta, 180-theta, reduced mod 180).
struct SolutionFamily {
    MubTriple base;
    std::vector<MubTriple> images;
};

struct PhaseWindow {
    double lo_deg = 0.0;
    double hi_deg = 0.0;
};

struct PhaseScan {
    std::vector<std::pair<double, double>> grid; // (phase_deg, frame_potential)
    std::vector<PhaseWindow> windows;            // feasible windows, refined to 0.05 deg
};

// r(thetaA).r(thetaB) at the given retardation.
double unbiasedness_defect(Angle phase, Angle thetaA, Angle thetaB);

// True iff the plate can realize at least two MUB: delta mod 360 in [45, 315].
bool two_mub_feasible(Angle phase);

// Closed-form symmetric pair theta2 = -theta1 with r3 = sqrt(2)/2 for both
// bases. Throws std::domain_error outside the [45, 315] degree window.
MubPair two_mub_angles(Angle phase);

// Minimized sum of the three squared pairwise Bloch dot products over
// (theta1, theta2, theta3). Multi-start local least squares; deterministic
// for a fixed seed regardless of scheduling.
double frame_potential(Angle phase, int starts = 100, std::uint64_t seed = 1);

// All solution classes of the complete-MUB condition at this phase,
// deduplicated under the symmetry group. Empty if the frame potential does
// not vanish.
std::vector<SolutionFamily> solve_complete_mub(Angle phase, int starts = 100,
                                               std::uint64_t seed = 1);

// Grid scan of the frame potential with bisection refinement of every
// feasible-window edge to 0.05 degrees.
PhaseScan scan_phase_window(Angle lo, Angle hi, Angle step, int starts = 100,
                            std::uint64_t seed = 1);

// Real roots of 3x^4 + 4x + 2 = 0 (companion-matrix eigenvalues), ascending.
std::vector<double> quartic_roots();

// The three analytic intersection triples at delta = 120, 126.32 and
// 141.76 degrees.
std::vector<MubTriple> intersection_solutions();

// The four members of the symmetry orbit of a triple (base first),
// each reduced mod 180 and sorted ascending.
std::array<std::array<double, 3>, 4> symmetry_orbit_deg(const std::array<double, 3>& thetas_deg);

} // namespace wpmub
