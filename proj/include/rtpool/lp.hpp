#pragma once

#include <array>
#include <vector>

#include "rtpool/geometry.hpp"

namespace rtpool {

/// Max-margin witness program: variables are a witness point p in R^d and a
/// free margin t, one constraint per (inside x, outside y) pair:
///     2 (y - x) . p + t <= |y|^2 - |x|^2
/// maximizing t. A positive optimum certifies a sphere strictly separating
/// the inside points from the outside points around p.
struct WitnessLP {
    int dim = 0;
    std::vector<std::array<double, 3>> normals;  // row i holds 2 (y - x)
    std::vector<double> rhs;                     // |y|^2 - |x|^2

    int constraint_count() const { return static_cast<int>(rhs.size()); }
};

struct LPResult {
    double optimum = 0.0;                       // +infinity when unbounded
    std::array<double, 3> witness{0.0, 0.0, 0.0};
    bool unbounded = false;
};

/// Constraints separating q from its complement in the cloud.
WitnessLP make_witness_lp(const PointCloud& cloud, const SubsetKey& q);

/// Union of both subsets' constraint sets on a shared witness and margin;
/// its weak feasibility (optimum >= 0) tests cell intersection.
WitnessLP make_joint_witness_lp(const PointCloud& cloud, const SubsetKey& q1, const SubsetKey& q2);

/// Dense tableau simplex with Bland's anti-cycling rule. Free variables are
/// split into positive parts; a margin shift makes the slack basis feasible,
/// so no phase-1 is needed. Throws IterationCapExceeded past
/// 10 * (constraints + variables) pivots.
LPResult lp_maximize_margin(const WitnessLP& lp);

}  // namespace rtpool
