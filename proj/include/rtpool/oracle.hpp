#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rtpool/clustering.hpp"
#include "rtpool/lp.hpp"
#include "rtpool/tiling.hpp"

namespace rtpool {

/// Margin below which an LP optimum does not certify a full-dimensional
/// cell; scales with squared diameter because margins live in squared
/// distance units.
inline double lp_epsilon(const PointCloud& cloud) {
    return 1e-9 * cloud.diameter * cloud.diameter;
}

/// True when q is cut out by a sphere with everything else strictly outside,
/// i.e. the witness LP reaches a strictly positive margin.
bool separable(const PointCloud& cloud, const SubsetKey& q);

/// True when the two subsets' order-k cells intersect (weak feasibility of
/// the joint witness program; closed cells may touch on boundaries).
bool cells_intersect(const PointCloud& cloud, const SubsetKey& q1, const SubsetKey& q2);

struct TheoremReport {
    std::string theorem;    // "theorem1", "theorem2", "theorem3"
    std::string instance;   // cloud descriptor plus level pair
    bool pass = true;
    bool informational = false;  // recorded observations that cannot fail
    std::vector<std::string> counterexamples;
    std::vector<std::string> notes;
};

/// Checks on one subset pair that tiling co-membership agrees with the
/// existence of a witness circumsphere enclosing the intersection and
/// carrying the union; the sphere side re-enumerates circumspheres directly
/// from the cloud.
TheoremReport check_theorem1(const RhomboidTiling& tiling, const SubsetKey& q,
                             const SubsetKey& q_prime);

/// Step-size cases over the full cluster matrix (d = 3 only): delta > 4
/// forces a zero matrix; delta in {1,2} clusters every fine vertex; delta = 1
/// additionally makes every registered containment pair positive. The
/// delta in {3,4} band only reports unclustered vertices informationally.
TheoremReport check_theorem2(const RhomboidTiling& tiling, int k1, int k2);

/// Weight bounds (d = 3 only): subset-forcing and count caps for large
/// steps, the cap for non-contained pairs, and monotonicity in the overlap.
TheoremReport check_theorem3(const RhomboidTiling& tiling, int k1, int k2);

/// All k-subsets accepted by the separability oracle, in lexicographic
/// order. Exhaustive (C(n,k) programs); intended for n <= 12.
std::vector<SubsetKey> oracle_vertices(const PointCloud& cloud, int k,
                                       Exec exec = Exec::Parallel);

/// Edges of the order-k complex per the oracle: pairs of accepted vertices
/// differing by one swap whose cells intersect. Pads match slice() ids when
/// the vertex sets agree.
std::vector<std::pair<int, int>> oracle_edges(const PointCloud& cloud,
                                              const std::vector<SubsetKey>& vertices,
                                              Exec exec = Exec::Parallel);

}  // namespace rtpool
