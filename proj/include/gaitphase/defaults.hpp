#pragma once

#include <array>
#include <cstddef>

#include "gaitphase/impedance.hpp"

namespace gaitphase {
namespace defaults {

// Approximate able-bodied slow-walking ankle references on a 1 % grid,
// digitized and smoothed from published gait-lab averages. Dorsiflexion
// positive. Power is tau * dtheta/dt at the stated stride period.
inline constexpr double kReferenceStridePeriodS = 1.8;

inline constexpr std::array<double, 101> kReferenceTheta = {
    0, -0.941, -1.788, -2.5, -3.168, -3.816, -4.306, -4.5,
    -4.389, -4.098, -3.693, -3.239, -2.8, -2.352, -1.84, -1.284,
    -0.702, -0.113, 0.463, 1.007, 1.5, 1.955, 2.397, 2.826,
    3.243, 3.648, 4.041, 4.423, 4.793, 5.152, 5.5, 5.837,
    6.164, 6.481, 6.79, 7.09, 7.383, 7.67, 7.951, 8.228,
    8.5, 8.799, 9.129, 9.453, 9.731, 9.926, 10, 9.917,
    9.694, 9.375, 9, 8.463, 7.664, 6.659, 5.5, 3.991,
    2.026, -0.201, -2.5, -4.956, -7.653, -10.399, -13, -15.91,
    -18.733, -20, -19.777, -19.22, -18.5, -17.358, -15.658, -13.755,
    -12, -10.379, -8.711, -7.104, -5.664, -4.5, -3.558, -2.717,
    -1.975, -1.336, -0.8, -0.303, 0.182, 0.599, 0.89, 1,
    0.995, 0.982, 0.961, 0.933, 0.9, 0.823, 0.688, 0.534,
    0.4, 0.291, 0.188, 0.091, 0,
};

inline constexpr std::array<double, 101> kReferenceTau = {
    0, 0.03, 0.054, 0.07, 0.08, 0.087, 0.09, 0.081,
    0.059, 0.03, 0, -0.031, -0.067, -0.106, -0.145, -0.18,
    -0.212, -0.243, -0.273, -0.303, -0.331, -0.36, -0.389, -0.419,
    -0.449, -0.48, -0.512, -0.544, -0.576, -0.609, -0.642, -0.676,
    -0.711, -0.746, -0.782, -0.82, -0.86, -0.902, -0.945, -0.989,
    -1.034, -1.078, -1.12, -1.166, -1.218, -1.271, -1.32, -1.361,
    -1.39, -1.4, -1.385, -1.347, -1.3, -1.236, -1.148, -1.05,
    -0.939, -0.812, -0.68, -0.541, -0.4, -0.262, -0.14, -0.05,
    0, 0, 0, 0, 0, 0, 0, 0,
    0, 0, 0, 0, 0, 0, 0, 0,
    0, 0, 0, 0, 0, 0, 0, 0,
    0, 0, 0, 0, 0, 0, 0, 0,
    0, 0, 0, 0, 0,
};

inline constexpr std::array<double, 101> kReferencePower = {
    0, -0.026, -0.0408, -0.0468, -0.051, -0.048, -0.0298, -0.0033,
    0.0115, 0.0101, 0, -0.0134, -0.0288, -0.0493, -0.0751, -0.0993,
    -0.1204, -0.1372, -0.1482, -0.1523, -0.1521, -0.1566, -0.1643, -0.1719,
    -0.1789, -0.1857, -0.1924, -0.1983, -0.2036, -0.2087, -0.2132, -0.2176,
    -0.222, -0.2264, -0.2309, -0.2357, -0.2418, -0.2484, -0.2556, -0.2632,
    -0.2862, -0.3287, -0.3551, -0.3403, -0.2793, -0.1658, 0.0058, 0.2019,
    0.3652, 0.471, 0.6124, 0.8725, 1.137, 1.2967, 1.4849, 1.7685,
    1.9084, 1.7817, 1.5676, 1.3516, 1.0555, 0.6792, 0.3741, 0.139,
    0, 0, 0, 0, 0, 0, 0, 0,
    0, 0, 0, 0, 0, 0, 0, 0,
    0, 0, 0, 0, 0, 0, 0, 0,
    0, 0, 0, 0, 0, 0, 0, 0,
    0, 0, 0, 0, 0,
};

inline impedance::ReferenceTrajectories reference_trajectories() {
  impedance::ReferenceTrajectories r;
  r.stride_period_s = kReferenceStridePeriodS;
  for (std::size_t i = 0; i < kReferenceTheta.size(); ++i) {
    r.s.push_back(static_cast<double>(i));
    r.theta.push_back(kReferenceTheta[i]);
    r.tau.push_back(kReferenceTau[i]);
    r.power.push_back(kReferencePower[i]);
  }
  return r;
}

inline constexpr int kProfileVersion = 1;

/// Stiffness: flat through loading response, linear rise over mid-stance,
/// flat through push-off and early swing, linear return in late swing.
inline impedance::KnotTable pvic_stiffness() {
  return {{0.0, 10.0, 45.0, 85.0, 100.0}, {0.04, 0.04, 0.11, 0.11, 0.04}};
}

/// Damping: one peak for early-stance shock absorption, one in late swing.
inline impedance::KnotTable pvic_damping() {
  return {{0.0, 4.0, 12.0, 70.0, 85.0, 95.0, 100.0},
          {0.0015, 0.003, 0.0005, 0.0005, 0.003, 0.0015, 0.0015}};
}

inline impedance::ProfileDesign pvic_design() {
  return {pvic_stiffness(), pvic_damping(), impedance::kDefaultThetaMax};
}

inline impedance::ImpedanceProfile pvic_profile() {
  return impedance::design_pvic_profile(reference_trajectories(), pvic_design());
}

}  // namespace defaults
}  // namespace gaitphase
