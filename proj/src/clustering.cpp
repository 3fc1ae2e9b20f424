#include "rtpool/clustering.hpp"

#include <cmath>

namespace rtpool {

namespace {

void accumulate_range(const RhomboidTiling& tiling, int k1, int k2, std::int64_t* acc, int cols,
                      std::size_t r0, std::size_t r1) {
    const auto& rhomboids = tiling.rhomboids();
    for (std::size_t i = r0; i < r1; ++i) {
        const Rhomboid& r = rhomboids[i];
        std::vector<int> fine = tiling.level_vertex_ids(r, k1);
        if (fine.empty()) continue;
        std::vector<int> coarse = tiling.level_vertex_ids(r, k2);
        for (int ci : coarse)
            for (int fj : fine) acc[static_cast<std::size_t>(ci) * cols + fj] += 1;
    }
}

}  // namespace

ClusterMatrix cluster_matrix(const RhomboidTiling& tiling, int k1, int k2, Exec exec) {
    if (k1 < 1 || k2 <= k1 || k2 > tiling.max_order())
        throw OrderOutOfRange("cluster_matrix needs 1 <= k1 < k2 <= " +
                              std::to_string(tiling.max_order()));
    ClusterMatrix m;
    m.fine_level = k1;
    m.coarse_level = k2;
    const int rows = tiling.vertex_count(k2);
    const int cols = tiling.vertex_count(k1);
    m.counts = IntMatrix(rows, cols, 0);
    const std::size_t total = tiling.rhomboids().size();

    if (exec == Exec::Parallel) {
#ifdef _OPENMP
        // Integer accumulation is exact, so per-thread buffers reduced in any
        // order reproduce the serial result.
#pragma omp parallel
        {
            std::vector<std::int64_t> local(static_cast<std::size_t>(rows) * cols, 0);
#pragma omp for schedule(static)
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(total); ++i)
                accumulate_range(tiling, k1, k2, local.data(), cols, i, i + 1);
#pragma omp critical
            {
                auto& global = m.counts.data();
                for (std::size_t idx = 0; idx < local.size(); ++idx) global[idx] += local[idx];
            }
        }
#else
        accumulate_range(tiling, k1, k2, m.counts.data().data(), cols, 0, total);
#endif
    } else {
        accumulate_range(tiling, k1, k2, m.counts.data().data(), cols, 0, total);
    }
    return m;
}

NormalizedClusterMatrix normalize_rows(const ClusterMatrix& c) {
    NormalizedClusterMatrix out;
    out.fine_level = c.fine_level;
    out.coarse_level = c.coarse_level;
    out.weights = Matrix(c.counts.rows(), c.counts.cols(), 0.0);
    for (int i = 0; i < c.counts.rows(); ++i) {
        std::int64_t sum = 0;
        for (int j = 0; j < c.counts.cols(); ++j) sum += c.counts(i, j);
        if (sum == 0) continue;
        const double inv = 1.0 / static_cast<double>(sum);
        for (int j = 0; j < c.counts.cols(); ++j)
            out.weights(i, j) = static_cast<double>(c.counts(i, j)) * inv;
    }
    return out;
}

Matrix pool_features(const NormalizedClusterMatrix& c_hat, const Matrix& features, Exec exec) {
    if (c_hat.weights.cols() != features.rows())
        throw ShapeMismatch("pool_features: matrix has " + std::to_string(c_hat.weights.cols()) +
                            " columns but features have " + std::to_string(features.rows()) + " rows");
    return matmul(c_hat.weights, features, exec);
}

LevelGraph delaunay_graph(const DelaunaySlice& s) {
    LevelGraph g;
    g.k = s.k;
    g.kind = GraphKind::Delaunay;
    const int n = static_cast<int>(s.vertices.size());
    g.adjacency = Matrix(n, n, 0.0);
    for (auto [a, b] : s.edges) {
        g.adjacency(a, b) = 1.0;
        g.adjacency(b, a) = 1.0;
    }
    return g;
}

LevelGraph generated_graph(const DelaunaySlice& s, const LevelGraph& initial_graph,
                           bool connect_overlaps) {
    LevelGraph g;
    g.k = s.k;
    g.kind = GraphKind::Generated;
    const int n = static_cast<int>(s.vertices.size());
    g.adjacency = Matrix(n, n, 0.0);

    const Matrix& a0 = initial_graph.adjacency;
    std::vector<std::uint64_t> masks(n);
    for (int i = 0; i < n; ++i) {
        for (int p : s.vertices[i])
            if (p >= a0.rows())
                throw ShapeMismatch("generated_graph: initial graph has " +
                                    std::to_string(a0.rows()) + " vertices, subset uses index " +
                                    std::to_string(p));
        masks[i] = s.vertices[i].mask();
    }

    std::vector<std::pair<int, int>> base_edges;
    for (int p = 0; p < a0.rows(); ++p)
        for (int q = p + 1; q < a0.cols(); ++q)
            if (a0(p, q) != 0.0) base_edges.emplace_back(p, q);

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            bool adjacent = false;
            if (connect_overlaps && (masks[i] & masks[j]) != 0) adjacent = true;
            for (std::size_t e = 0; !adjacent && e < base_edges.size(); ++e) {
                auto [p, q] = base_edges[e];
                const bool pi = masks[i] >> p & 1, qi = masks[i] >> q & 1;
                const bool pj = masks[j] >> p & 1, qj = masks[j] >> q & 1;
                adjacent = (pi && qj) || (qi && pj);
            }
            if (adjacent) {
                g.adjacency(i, j) = 1.0;
                g.adjacency(j, i) = 1.0;
            }
        }
    }
    return g;
}

PoolingHierarchy build_hierarchy(const PointCloud& cloud, const LevelGraph& initial_graph,
                                 const HierarchySchedule& schedule, GraphKind kind,
                                 bool connect_overlaps, Exec exec) {
    if (schedule.delta_k < 1 || schedule.layers < 1)
        throw InvariantViolation("hierarchy schedule needs delta_k >= 1 and layers >= 1");
    if (initial_graph.adjacency.rows() != cloud.size())
        throw ShapeMismatch("initial graph has " + std::to_string(initial_graph.adjacency.rows()) +
                            " vertices for a cloud of " + std::to_string(cloud.size()));

    PoolingHierarchy h;
    h.schedule = schedule;
    h.input_graph = initial_graph;
    h.input_graph.k = 1;

    if (cloud.size() < cloud.dim + 2) {
        // Too small to triangulate: one uniform cluster, one isolated vertex.
        h.degenerate = true;
        NormalizedClusterMatrix c;
        c.fine_level = 1;
        c.coarse_level = schedule.delta_k + 1;
        c.weights = Matrix(1, cloud.size(), 1.0 / cloud.size());
        h.matrices.push_back(std::move(c));
        LevelGraph g;
        g.k = schedule.delta_k + 1;
        g.kind = kind;
        g.adjacency = Matrix(1, 1, 0.0);
        h.graphs.push_back(std::move(g));
        return h;
    }

    RhomboidTiling tiling = build_tiling(cloud, schedule.max_order(), exec);
    for (int l = 0; l < schedule.layers; ++l) {
        const int k1 = l * schedule.delta_k + 1;
        const int k2 = (l + 1) * schedule.delta_k + 1;
        h.matrices.push_back(normalize_rows(cluster_matrix(tiling, k1, k2, exec)));
        DelaunaySlice sl = slice(tiling, k2);
        h.graphs.push_back(kind == GraphKind::Delaunay
                               ? delaunay_graph(sl)
                               : generated_graph(sl, initial_graph, connect_overlaps));
    }
    return h;
}

}  // namespace rtpool
