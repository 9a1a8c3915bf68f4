#pragma once

#include <cstddef>
#include <vector>

#include "xkm/cut.hpp"

namespace xkm::detail {

/// l-infinity nearest active centroid to `from` on the requested side of the
/// cut; ties go to the lowest index.
std::size_t nearest_on_side(const Subproblem& sub, Coords from, std::size_t jstar, double theta, bool left);

/// Splits `sub` (with its states replaced by `updated`) into the two children.
void split_children(const Subproblem& sub, std::vector<PointState> updated, std::size_t jstar, double theta,
                    CutOutcome& out);

inline bool is_separated(const Subproblem& sub, std::size_t local, std::size_t jstar, double theta) {
    bool x_left = sub.point(local)[jstar] <= theta;
    bool s_left = sub.centroid(sub.states[local].sigma)[jstar] <= theta;
    return x_left != s_left;
}

}  // namespace xkm::detail
