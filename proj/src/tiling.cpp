#include "rtpool/tiling.hpp"

#include <algorithm>
#include <exception>
#include <set>

namespace rtpool {

namespace {

std::vector<std::vector<int>> all_combinations(int n, int r) {
    std::vector<std::vector<int>> out;
    if (r > n) return out;
    std::vector<int> comb(r);
    for (int i = 0; i < r; ++i) comb[i] = i;
    while (true) {
        out.push_back(comb);
        int pos = r - 1;
        while (pos >= 0 && comb[pos] == n - 1 - (r - 1 - pos)) --pos;
        if (pos < 0) break;
        ++comb[pos];
        for (int i = pos + 1; i < r; ++i) comb[i] = comb[i - 1] + 1;
    }
    return out;
}

struct Candidate {
    bool keep = false;
    Sphere sphere;
    std::uint64_t in_mask = 0;
};

Candidate evaluate_candidate(const PointCloud& cloud, const std::vector<int>& on, int max_order) {
    Candidate c;
    SubsetKey key(on);
    Sphere s = circumsphere(cloud, key);
    // Cheap reject before the full partition: more than max_order enclosed
    // points can never contribute to slices 1..max_order.
    if (count_inside_capped(cloud, s, max_order) > max_order) return c;
    SpherePartition part = classify(cloud, s);
    if (part.on.mask() != key.mask())
        throw GeneralPositionViolation("circumsphere of " + key.to_string() +
                                       " carries on-set " + part.on.to_string());
    c.keep = true;
    c.sphere = s;
    c.in_mask = part.inside.mask();
    return c;
}

}  // namespace

const std::vector<SubsetKey>& RhomboidTiling::vertices_at(int k) const {
    if (k < 1 || k > max_order_) throw OrderOutOfRange("order " + std::to_string(k) +
                                                       " outside 1.." + std::to_string(max_order_));
    return registry_[k - 1];
}

int RhomboidTiling::vertex_id(const SubsetKey& q) const {
    int k = q.size();
    if (k < 1 || k > max_order_) throw OrderOutOfRange("order " + std::to_string(k) +
                                                       " outside 1.." + std::to_string(max_order_));
    auto it = vertex_index_[k - 1].find(q.mask());
    if (it == vertex_index_[k - 1].end())
        throw UnknownVertex("subset " + q.to_string() + " not registered at level " + std::to_string(k));
    return it->second;
}

bool RhomboidTiling::has_vertex(const SubsetKey& q) const {
    int k = q.size();
    if (k < 1 || k > max_order_) return false;
    return vertex_index_[k - 1].count(q.mask()) > 0;
}

std::vector<int> RhomboidTiling::level_vertex_ids(const Rhomboid& r, int k) const {
    std::vector<int> ids;
    const int base = r.in_set.size();
    const int j = k - base;
    const int on_sz = r.on_set.size();
    if (k < 1 || k > max_order_ || j < 0 || j > on_sz) return ids;
    // Choose j of the on-points; bit tricks over the (d+1)-element on set.
    for (std::uint32_t pick = 0; pick < (1u << on_sz); ++pick) {
        if (__builtin_popcount(pick) != j) continue;
        std::uint64_t mask = r.in_mask;
        for (int b = 0; b < on_sz; ++b)
            if (pick >> b & 1) mask |= 1ULL << r.on_set[b];
        ids.push_back(vertex_index_[k - 1].at(mask));
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

RhomboidTiling build_tiling(const PointCloud& cloud, int max_order, Exec exec) {
    const int d = cloud.dim;
    const int n = cloud.size();
    if (n < d + 2)
        throw TooFewPoints("build_tiling needs at least d+2 = " + std::to_string(d + 2) +
                           " points, got " + std::to_string(n));
    if (n > 64) throw TooManyPoints("build_tiling supports at most 64 points, got " + std::to_string(n));
    if (max_order < 1) throw OrderOutOfRange("max_order must be >= 1");

    // Lexicographic enumeration fixes rhomboid ids independent of scheduling.
    const std::vector<std::vector<int>> combos = all_combinations(n, d + 1);
    std::vector<Candidate> cands(combos.size());

    if (exec == Exec::Parallel) {
#ifdef _OPENMP
        std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 64)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(combos.size()); ++i) {
            try {
                cands[i] = evaluate_candidate(cloud, combos[i], max_order);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
#else
        for (std::size_t i = 0; i < combos.size(); ++i)
            cands[i] = evaluate_candidate(cloud, combos[i], max_order);
#endif
    } else {
        for (std::size_t i = 0; i < combos.size(); ++i)
            cands[i] = evaluate_candidate(cloud, combos[i], max_order);
    }

    RhomboidTiling t;
    t.cloud_ = cloud;
    t.max_order_ = max_order;
    t.registry_.resize(max_order);
    t.vertex_index_.resize(max_order);

    for (std::size_t i = 0; i < combos.size(); ++i) {
        if (!cands[i].keep) continue;
        Rhomboid r;
        r.on_set = SubsetKey(combos[i]);
        r.on_mask = r.on_set.mask();
        r.in_mask = cands[i].in_mask;
        r.in_set = SubsetKey::from_mask(r.in_mask);
        r.sphere = cands[i].sphere;
        r.id = static_cast<int>(t.rhomboids_.size());
        t.rhomboids_.push_back(std::move(r));
    }

    // Per-level registries: collect every subset a rhomboid realizes at that
    // level, dedupe, sort lexicographically, assign dense ids.
    for (int k = 1; k <= max_order; ++k) {
        std::set<SubsetKey> seen;
        for (const Rhomboid& r : t.rhomboids_) {
            const int base = r.in_set.size();
            const int j = k - base;
            const int on_sz = r.on_set.size();
            if (j < 0 || j > on_sz) continue;
            for (std::uint32_t pick = 0; pick < (1u << on_sz); ++pick) {
                if (__builtin_popcount(pick) != j) continue;
                std::uint64_t mask = r.in_mask;
                for (int b = 0; b < on_sz; ++b)
                    if (pick >> b & 1) mask |= 1ULL << r.on_set[b];
                seen.insert(SubsetKey::from_mask(mask));
            }
        }
        auto& reg = t.registry_[k - 1];
        reg.assign(seen.begin(), seen.end());
        for (std::size_t i = 0; i < reg.size(); ++i)
            t.vertex_index_[k - 1].emplace(reg[i].mask(), static_cast<int>(i));
    }
    return t;
}

DelaunaySlice slice(const RhomboidTiling& tiling, int k) {
    if (k < 1 || k > tiling.max_order())
        throw OrderOutOfRange("slice order " + std::to_string(k) + " outside 1.." +
                              std::to_string(tiling.max_order()));
    DelaunaySlice s;
    s.k = k;
    s.vertices = tiling.vertices_at(k);

    // Edges join level-k vertices of a common rhomboid whose subsets differ
    // by one swap (|Q1 & Q2| = k-1), the hypersimplex-slice rule.
    std::set<std::pair<int, int>> edges;
    const auto& reg = tiling.vertices_at(k);
    for (const Rhomboid& r : tiling.rhomboids()) {
        std::vector<int> ids = tiling.level_vertex_ids(r, k);
        for (std::size_t a = 0; a < ids.size(); ++a) {
            const std::uint64_t ma = reg[ids[a]].mask();
            for (std::size_t b = a + 1; b < ids.size(); ++b) {
                const std::uint64_t mb = reg[ids[b]].mask();
                if (__builtin_popcountll(ma & mb) == k - 1)
                    edges.emplace(std::min(ids[a], ids[b]), std::max(ids[a], ids[b]));
            }
        }
    }
    s.edges.assign(edges.begin(), edges.end());
    return s;
}

LiftedVertex embed_vertex(const PointCloud& cloud, const SubsetKey& q) {
    if (q.empty()) throw InvariantViolation("embed_vertex: empty subset");
    LiftedVertex v;
    for (int i : q)
        for (int a = 0; a < cloud.dim; ++a) v.coordinates[a] += cloud.points[i][a];
    v.coordinates[cloud.dim] = -static_cast<double>(q.size());
    return v;
}

IncidenceMatrix incidence_matrix(const RhomboidTiling& tiling, int k) {
    if (k < 1 || k > tiling.max_order())
        throw OrderOutOfRange("incidence order " + std::to_string(k) + " outside 1.." +
                              std::to_string(tiling.max_order()));
    IncidenceMatrix m;
    m.k = k;
    m.entries = IntMatrix(static_cast<int>(tiling.rhomboids().size()), tiling.vertex_count(k));
    for (const Rhomboid& r : tiling.rhomboids())
        for (int id : tiling.level_vertex_ids(r, k)) m.entries(r.id, id) = 1;
    return m;
}

std::int64_t co_membership_weight(const RhomboidTiling& tiling, const SubsetKey& q,
                                  const SubsetKey& q_prime) {
    if (!tiling.has_vertex(q))
        throw UnknownVertex("subset " + q.to_string() + " not registered");
    if (!tiling.has_vertex(q_prime))
        throw UnknownVertex("subset " + q_prime.to_string() + " not registered");
    const std::uint64_t a = q.mask(), b = q_prime.mask();
    std::int64_t count = 0;
    for (const Rhomboid& r : tiling.rhomboids())
        if (r.contains(a) && r.contains(b)) ++count;
    return count;
}

}  // namespace rtpool
