#pragma once

#include <vector>

#include "rtpool/matrix.hpp"
#include "rtpool/tiling.hpp"

namespace rtpool {

/// Co-membership counts between two slice levels. Rows index coarse
/// (level k2) vertices, columns index fine (level k1) vertices, so that
/// pooling is a plain left-multiplication onto fine features.
struct ClusterMatrix {
    int fine_level = 0;
    int coarse_level = 0;
    IntMatrix counts;
};

struct NormalizedClusterMatrix {
    int fine_level = 0;
    int coarse_level = 0;
    Matrix weights;  // nonzero rows sum to 1; all-zero rows stay zero
};

enum class GraphKind { Delaunay, Generated };

/// Underlying adjacency used for feature updates at one pooling level.
struct LevelGraph {
    int k = 0;
    GraphKind kind = GraphKind::Delaunay;
    Matrix adjacency;  // symmetric binary, zero diagonal

    int vertex_count() const { return adjacency.rows(); }
};

struct HierarchySchedule {
    int delta_k = 1;
    int layers = 1;

    int max_order() const { return delta_k * layers + 1; }
    /// Orders l*delta_k + 1 for l = 0..layers.
    std::vector<int> orders() const {
        std::vector<int> o;
        for (int l = 0; l <= layers; ++l) o.push_back(l * delta_k + 1);
        return o;
    }
};

/// Per-layer pooling matrices and underlying graphs, plus the input graph
/// over the order-1 singletons.
struct PoolingHierarchy {
    HierarchySchedule schedule;
    bool degenerate = false;  // n < d+2 fallback: one uniform cluster
    LevelGraph input_graph;   // G_0
    std::vector<NormalizedClusterMatrix> matrices;  // one per layer
    std::vector<LevelGraph> graphs;                 // G_1 .. G_L
};

/// (I_k2)^T * I_k1 accumulated rhomboid by rhomboid; entry (i, j) equals the
/// number of maximal rhomboids containing both the j-th fine and the i-th
/// coarse vertex.
ClusterMatrix cluster_matrix(const RhomboidTiling& tiling, int k1, int k2,
                             Exec exec = Exec::Parallel);

NormalizedClusterMatrix normalize_rows(const ClusterMatrix& c);

/// Z = C_hat * H.
Matrix pool_features(const NormalizedClusterMatrix& c_hat, const Matrix& features,
                     Exec exec = Exec::Parallel);

LevelGraph delaunay_graph(const DelaunaySlice& s);

/// Connects two slice vertices exactly when some input-graph edge has one
/// endpoint in each subset; overlap alone adds nothing unless
/// connect_overlaps is set.
LevelGraph generated_graph(const DelaunaySlice& s, const LevelGraph& initial_graph,
                           bool connect_overlaps = false);

/// Builds the full schedule: tiling at K = delta_k * layers + 1, one
/// normalized matrix and one underlying graph per layer. Falls back to a
/// single uniform cluster when the cloud is too small to triangulate.
PoolingHierarchy build_hierarchy(const PointCloud& cloud, const LevelGraph& initial_graph,
                                 const HierarchySchedule& schedule, GraphKind kind,
                                 bool connect_overlaps = false, Exec exec = Exec::Parallel);

}  // namespace rtpool
