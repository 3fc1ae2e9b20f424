#include "rtpool/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace rtpool {

namespace {

std::string instance_tag(const RhomboidTiling& tiling, int k1, int k2) {
    return "n=" + std::to_string(tiling.cloud().size()) + " d=" +
           std::to_string(tiling.cloud().dim) + " k1=" + std::to_string(k1) +
           " k2=" + std::to_string(k2);
}

}  // namespace

bool separable(const PointCloud& cloud, const SubsetKey& q) {
    if (q.empty() || q.size() > cloud.size())
        throw InvariantViolation("separable expects 1 <= |Q| <= n");
    LPResult r = lp_maximize_margin(make_witness_lp(cloud, q));
    if (r.unbounded) return true;
    return r.optimum > lp_epsilon(cloud);
}

bool cells_intersect(const PointCloud& cloud, const SubsetKey& q1, const SubsetKey& q2) {
    if (q1.size() != q2.size())
        throw InvariantViolation("cells_intersect expects equal-size subsets");
    LPResult r = lp_maximize_margin(make_joint_witness_lp(cloud, q1, q2));
    if (r.unbounded) return true;
    return r.optimum > -lp_epsilon(cloud);
}

TheoremReport check_theorem1(const RhomboidTiling& tiling, const SubsetKey& q,
                             const SubsetKey& q_prime) {
    if (q.size() >= q_prime.size())
        throw InvariantViolation("check_theorem1 expects |Q| < |Q'|");
    TheoremReport rep;
    rep.theorem = "theorem1";
    rep.instance = instance_tag(tiling, q.size(), q_prime.size()) + " Q=" + q.to_string() +
                   " Q'=" + q_prime.to_string();

    const bool tiling_side = co_membership_weight(tiling, q, q_prime) > 0;

    // Sphere side: re-enumerate circumspheres straight from the cloud and
    // look for one with In <= Q & Q' and Q | Q' <= In | On.
    const PointCloud& cloud = tiling.cloud();
    const int d = cloud.dim;
    const int n = cloud.size();
    const std::uint64_t inter = q.mask() & q_prime.mask();
    const std::uint64_t uni = q.mask() | q_prime.mask();
    bool sphere_side = false;
    std::vector<int> comb(d + 1);
    for (int i = 0; i <= d; ++i) comb[i] = i;
    while (!sphere_side) {
        Sphere s = circumsphere(cloud, SubsetKey(comb));
        SpherePartition part = classify(cloud, s);
        const std::uint64_t in_mask = part.inside.mask();
        const std::uint64_t on_mask = part.on.mask();
        if (is_subset(in_mask, inter) && is_subset(uni, in_mask | on_mask)) sphere_side = true;
        int pos = d;
        while (pos >= 0 && comb[pos] == n - 1 - (d - pos)) --pos;
        if (pos < 0) break;
        ++comb[pos];
        for (int i = pos + 1; i <= d; ++i) comb[i] = comb[i - 1] + 1;
    }

    if (tiling_side != sphere_side) {
        rep.pass = false;
        rep.counterexamples.push_back("co-membership=" + std::to_string(tiling_side) +
                                      " witness-sphere=" + std::to_string(sphere_side));
    }
    return rep;
}

TheoremReport check_theorem2(const RhomboidTiling& tiling, int k1, int k2) {
    if (tiling.cloud().dim != 3)
        throw InvariantViolation("check_theorem2 applies to d = 3");
    TheoremReport rep;
    rep.theorem = "theorem2";
    rep.instance = instance_tag(tiling, k1, k2);
    const int delta = k2 - k1;
    ClusterMatrix m = cluster_matrix(tiling, k1, k2);

    if (delta > 4) {
        for (int i = 0; i < m.counts.rows() && rep.pass; ++i)
            for (int j = 0; j < m.counts.cols(); ++j)
                if (m.counts(i, j) != 0) {
                    rep.pass = false;
                    rep.counterexamples.push_back(
                        "nonzero entry at coarse " + tiling.vertices_at(k2)[i].to_string() +
                        ", fine " + tiling.vertices_at(k1)[j].to_string());
                    break;
                }
        return rep;
    }

    std::vector<int> unclustered;
    for (int j = 0; j < m.counts.cols(); ++j) {
        bool any = false;
        for (int i = 0; i < m.counts.rows(); ++i)
            if (m.counts(i, j) > 0) {
                any = true;
                break;
            }
        if (!any) unclustered.push_back(j);
    }

    if (delta <= 2) {
        for (int j : unclustered) {
            rep.pass = false;
            rep.counterexamples.push_back("fine vertex " + tiling.vertices_at(k1)[j].to_string() +
                                          " belongs to no cluster");
        }
    } else {
        // delta in {3, 4}: unclustered vertices are possible; only observe.
        rep.informational = true;
        for (int j : unclustered)
            rep.notes.push_back("unclustered fine vertex " +
                                tiling.vertices_at(k1)[j].to_string());
    }

    if (delta == 1) {
        const auto& fine = tiling.vertices_at(k1);
        const auto& coarse = tiling.vertices_at(k2);
        for (int i = 0; i < static_cast<int>(coarse.size()); ++i) {
            const std::uint64_t cm = coarse[i].mask();
            for (int j = 0; j < static_cast<int>(fine.size()); ++j) {
                if (!is_subset(fine[j].mask(), cm)) continue;
                if (m.counts(i, j) <= 0) {
                    rep.pass = false;
                    rep.counterexamples.push_back("containment pair " + fine[j].to_string() +
                                                  " in " + coarse[i].to_string() +
                                                  " has zero weight");
                }
            }
        }
    }
    return rep;
}

TheoremReport check_theorem3(const RhomboidTiling& tiling, int k1, int k2) {
    if (tiling.cloud().dim != 3)
        throw InvariantViolation("check_theorem3 applies to d = 3");
    TheoremReport rep;
    rep.theorem = "theorem3";
    rep.instance = instance_tag(tiling, k1, k2);
    const int delta = k2 - k1;
    ClusterMatrix m = cluster_matrix(tiling, k1, k2);
    const auto& fine = tiling.vertices_at(k1);
    const auto& coarse = tiling.vertices_at(k2);

    for (int i = 0; i < m.counts.rows(); ++i) {
        const std::uint64_t cm = coarse[i].mask();
        std::vector<int> members;
        for (int j = 0; j < m.counts.cols(); ++j)
            if (m.counts(i, j) > 0) members.push_back(j);

        for (int j : members) {
            const std::int64_t w = m.counts(i, j);
            const bool contained = is_subset(fine[j].mask(), cm);
            if (delta >= 3 && delta <= 4) {
                if (!contained) {
                    rep.pass = false;
                    rep.counterexamples.push_back("delta=" + std::to_string(delta) + " member " +
                                                  fine[j].to_string() + " not inside " +
                                                  coarse[i].to_string());
                }
                if (w > 5 - delta) {
                    rep.pass = false;
                    rep.counterexamples.push_back("weight " + std::to_string(w) + " exceeds " +
                                                  std::to_string(5 - delta) + " for " +
                                                  fine[j].to_string());
                }
            }
            if (!contained && w > 3 - delta) {
                rep.pass = false;
                rep.counterexamples.push_back("non-contained pair " + fine[j].to_string() + ", " +
                                              coarse[i].to_string() + " has weight " +
                                              std::to_string(w) + " > " + std::to_string(3 - delta));
            }
        }

        // Monotonicity in the overlap with the coarse subset.
        for (int a : members) {
            const std::uint64_t ia = fine[a].mask() & cm;
            for (int b : members) {
                if (a == b) continue;
                const std::uint64_t ib = fine[b].mask() & cm;
                if (ia != ib && is_subset(ia, ib) && m.counts(i, a) > m.counts(i, b)) {
                    rep.pass = false;
                    rep.counterexamples.push_back(
                        "overlap-monotonicity broken at coarse " + coarse[i].to_string() + ": N(" +
                        fine[a].to_string() + ")=" + std::to_string(m.counts(i, a)) + " > N(" +
                        fine[b].to_string() + ")=" + std::to_string(m.counts(i, b)));
                }
            }
        }
    }
    return rep;
}

std::vector<SubsetKey> oracle_vertices(const PointCloud& cloud, int k, Exec exec) {
    const int n = cloud.size();
    if (k < 1 || k > n) throw OrderOutOfRange("oracle_vertices order out of range");

    std::vector<std::vector<int>> combos;
    std::vector<int> comb(k);
    for (int i = 0; i < k; ++i) comb[i] = i;
    while (true) {
        combos.push_back(comb);
        int pos = k - 1;
        while (pos >= 0 && comb[pos] == n - 1 - (k - 1 - pos)) --pos;
        if (pos < 0) break;
        ++comb[pos];
        for (int i = pos + 1; i < k; ++i) comb[i] = comb[i - 1] + 1;
    }

    std::vector<std::uint8_t> accept(combos.size(), 0);
    auto body = [&](std::size_t i) { accept[i] = separable(cloud, SubsetKey(combos[i])) ? 1 : 0; };
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
        std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(combos.size()); ++i) {
            try {
                body(i);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
#else
        for (std::size_t i = 0; i < combos.size(); ++i) body(i);
#endif
    } else {
        for (std::size_t i = 0; i < combos.size(); ++i) body(i);
    }

    std::vector<SubsetKey> out;
    for (std::size_t i = 0; i < combos.size(); ++i)
        if (accept[i]) out.emplace_back(combos[i]);
    return out;  // lexicographic because the enumeration is
}

std::vector<std::pair<int, int>> oracle_edges(const PointCloud& cloud,
                                              const std::vector<SubsetKey>& vertices,
                                              Exec exec) {
    const int k = vertices.empty() ? 0 : vertices[0].size();
    std::vector<std::pair<int, int>> candidates;
    for (int a = 0; a < static_cast<int>(vertices.size()); ++a)
        for (int b = a + 1; b < static_cast<int>(vertices.size()); ++b)
            if (__builtin_popcountll(vertices[a].mask() & vertices[b].mask()) == k - 1)
                candidates.emplace_back(a, b);

    std::vector<std::uint8_t> accept(candidates.size(), 0);
    auto body = [&](std::size_t i) {
        accept[i] = cells_intersect(cloud, vertices[candidates[i].first],
                                    vertices[candidates[i].second])
                        ? 1
                        : 0;
    };
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
        std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(candidates.size()); ++i) {
            try {
                body(i);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
#else
        for (std::size_t i = 0; i < candidates.size(); ++i) body(i);
#endif
    } else {
        for (std::size_t i = 0; i < candidates.size(); ++i) body(i);
    }

    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (accept[i]) out.push_back(candidates[i]);
    return out;
}

}  // namespace rtpool
