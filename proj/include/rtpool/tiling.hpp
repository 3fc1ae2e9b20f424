#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rtpool/geometry.hpp"
#include "rtpool/matrix.hpp"
#include "rtpool/parallel.hpp"
#include "rtpool/subset.hpp"

namespace rtpool {

/// One maximal cell of the tiling: the circumsphere of a (d+1)-subset
/// together with the points it strictly encloses. Spans combinatorial
/// levels |in_set| .. |in_set| + d + 1.
struct Rhomboid {
    SubsetKey in_set;
    SubsetKey on_set;  // size d+1
    Sphere sphere;
    int id = -1;
    std::uint64_t in_mask = 0;
    std::uint64_t on_mask = 0;

    /// True when the level-k vertex Q lies in this cell: in <= Q <= in|on.
    bool contains(std::uint64_t q_mask) const {
        return is_subset(in_mask, q_mask) && is_subset(q_mask, in_mask | on_mask);
    }
};

/// Vertex and edge set of the order-k complex realized by slicing the tiling.
struct DelaunaySlice {
    int k = 0;
    std::vector<SubsetKey> vertices;           // registry order
    std::vector<std::pair<int, int>> edges;    // vertex-id pairs, first < second
};

struct LiftedVertex {
    std::array<double, 4> coordinates{0.0, 0.0, 0.0, 0.0};  // (sum of Q, -k), d first entries used
};

/// Binary rhomboid-by-vertex membership at one level.
struct IncidenceMatrix {
    int k = 0;
    IntMatrix entries;  // rows: rhomboid ids, cols: slice-k vertex ids
};

/// All maximal rhomboids whose inside set has at most max_order points, plus
/// per-level vertex registries for k = 1..max_order. Construction order is
/// deterministic: rhomboids sorted by on_set, vertices sorted lexicographically.
class RhomboidTiling {
public:
    const PointCloud& cloud() const { return cloud_; }
    int max_order() const { return max_order_; }
    const std::vector<Rhomboid>& rhomboids() const { return rhomboids_; }

    int vertex_count(int k) const { return static_cast<int>(vertices_at(k).size()); }
    const std::vector<SubsetKey>& vertices_at(int k) const;

    /// Dense id of a registered subset at level |Q|; throws UnknownVertex.
    int vertex_id(const SubsetKey& q) const;
    bool has_vertex(const SubsetKey& q) const;

    /// Slice-k vertex ids contributed by one rhomboid (subsets of on_set of
    /// size k - |in_set| joined with in_set), empty when k is out of span.
    std::vector<int> level_vertex_ids(const Rhomboid& r, int k) const;

    friend RhomboidTiling build_tiling(const PointCloud& cloud, int max_order, Exec exec);

private:
    PointCloud cloud_;
    int max_order_ = 0;
    std::vector<Rhomboid> rhomboids_;
    std::vector<std::vector<SubsetKey>> registry_;                     // [k-1]
    std::vector<std::unordered_map<std::uint64_t, int>> vertex_index_; // [k-1] mask -> id
};

/// Enumerates all C(n, d+1) circumspheres and keeps those enclosing at most
/// max_order points. Requires a validated cloud with d+2 <= n <= 64.
RhomboidTiling build_tiling(const PointCloud& cloud, int max_order, Exec exec = Exec::Parallel);

DelaunaySlice slice(const RhomboidTiling& tiling, int k);

/// Eq.-style lifting of a subset: (coordinate-wise sum over Q, -|Q|).
LiftedVertex embed_vertex(const PointCloud& cloud, const SubsetKey& q);

IncidenceMatrix incidence_matrix(const RhomboidTiling& tiling, int k);

/// Number of maximal rhomboids containing both subsets' vertices.
std::int64_t co_membership_weight(const RhomboidTiling& tiling, const SubsetKey& q,
                                  const SubsetKey& q_prime);

}  // namespace rtpool
