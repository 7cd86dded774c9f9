#pragma once

#include <cstdint>
#include <vector>

#include "qmr/group_actions.hpp"

namespace qmr {

/// Boundary sample for one elevator query: uniform points on S^1 plus points
/// at log-spaced distances from p on both sides, including r/2 and r/4.
std::vector<Vec> elevator_sample(const Vec& p, double r, double L, std::size_t global_count,
                                 std::uint64_t seed);

struct ElevatorCertificate {
    Vec p;
    double r = 0.0, L = 2.0;
    Mobius g;
    std::size_t x2 = 0, x3 = 0;       ///< sample indices of the chosen points
    double d12 = 0.0, d13 = 0.0;      ///< their actual distances from p
    double separation = 0.0;          ///< min pairwise distance of g x1, g x2, g x3
    std::size_t sample_size = 0;
    std::size_t candidates = 0;

    // Fitted constants (smallest values making each property hold on the sample).
    double C_i = 1.0;    ///< r d <= C d' and d' <= C d / r on all pairs (at least 1)
    double C_ii = 1.0;   ///< d / (C r) <= d' <= C d / r on pairs in B(p, r)
    double c_iii = 0.0;  ///< min d(g x, g y) over x in B(p, r/2), y outside B(p, r)
    double omega_iv = 0.0;  ///< L diam g(Z \ B(p, L r)); 0 when that set is empty
    bool far_empty = false;
    double far_diameter = 0.0;
};

/// Elevator recipe on the H^2 model: pick x2, x3 near r/2 and r/4, move the
/// point at depth log(4/r) on the ray towards p back to the fundamental tile by
/// greedy generator descent, then search a word ball around the result. The
/// chosen g minimizes max(C_i, C_ii, 1/c_iii, omega_iv) on the sample; the
/// triple separation it achieves is recorded.
ElevatorCertificate conformal_elevator(const GroupActionModel& model, const std::vector<Vec>& sample,
                                       std::size_t p_index, double r, double L,
                                       std::size_t word_budget = 3);

/// Evaluates the four property constants for a given g.
void certify_elevator(const GroupActionModel& model, const std::vector<Vec>& sample,
                      std::size_t p_index, ElevatorCertificate& cert);

}  // namespace qmr
