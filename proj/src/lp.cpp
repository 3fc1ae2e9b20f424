#include "rtpool/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rtpool {

namespace {

void append_pair_constraints(const PointCloud& cloud, const SubsetKey& q, WitnessLP& lp) {
    const int d = cloud.dim;
    const std::uint64_t qm = q.mask();
    for (int x = 0; x < cloud.size(); ++x) {
        if (!(qm >> x & 1)) continue;
        const Point& px = cloud.points[x];
        double nx = 0.0;
        for (int a = 0; a < d; ++a) nx += px[a] * px[a];
        for (int y = 0; y < cloud.size(); ++y) {
            if (qm >> y & 1) continue;
            const Point& py = cloud.points[y];
            std::array<double, 3> row{0.0, 0.0, 0.0};
            double ny = 0.0;
            for (int a = 0; a < d; ++a) {
                row[a] = 2.0 * (py[a] - px[a]);
                ny += py[a] * py[a];
            }
            lp.normals.push_back(row);
            lp.rhs.push_back(ny - nx);
        }
    }
}

}  // namespace

WitnessLP make_witness_lp(const PointCloud& cloud, const SubsetKey& q) {
    WitnessLP lp;
    lp.dim = cloud.dim;
    append_pair_constraints(cloud, q, lp);
    return lp;
}

WitnessLP make_joint_witness_lp(const PointCloud& cloud, const SubsetKey& q1, const SubsetKey& q2) {
    WitnessLP lp;
    lp.dim = cloud.dim;
    append_pair_constraints(cloud, q1, lp);
    append_pair_constraints(cloud, q2, lp);
    return lp;
}

LPResult lp_maximize_margin(const WitnessLP& lp) {
    const int d = lp.dim;
    const int m = lp.constraint_count();
    LPResult res;
    if (m == 0) {
        // No complement points: any sphere works and the margin is unbounded.
        res.optimum = std::numeric_limits<double>::infinity();
        res.unbounded = true;
        return res;
    }

    // Shift t = s + t0 with t0 = min(rhs) - 1 so the all-slack basis is
    // feasible, then split the free variables: z = (p+, p-, s+, s-).
    double t0 = *std::min_element(lp.rhs.begin(), lp.rhs.end()) - 1.0;

    const int nv = 2 * d + 2;
    const int cols = nv + m + 1;  // structurals, slacks, rhs
    std::vector<std::vector<double>> tab(m + 1, std::vector<double>(cols, 0.0));
    for (int i = 0; i < m; ++i) {
        for (int a = 0; a < d; ++a) {
            tab[i][a] = lp.normals[i][a];
            tab[i][d + a] = -lp.normals[i][a];
        }
        tab[i][2 * d] = 1.0;
        tab[i][2 * d + 1] = -1.0;
        tab[i][nv + i] = 1.0;
        tab[i][cols - 1] = lp.rhs[i] - t0;
    }
    // Objective row carries negated reduced costs for maximize s = s+ - s-.
    tab[m][2 * d] = -1.0;
    tab[m][2 * d + 1] = 1.0;

    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = nv + i;

    const double red_eps = 1e-10;
    const double piv_eps = 1e-11;
    const int cap = 10 * (m + d + 1);

    for (int iter = 0;; ++iter) {
        if (iter > cap)
            throw IterationCapExceeded("simplex exceeded " + std::to_string(cap) + " pivots");

        // Bland: entering = smallest column with negative reduced cost.
        int enter = -1;
        for (int j = 0; j < nv + m; ++j) {
            if (tab[m][j] < -red_eps) {
                enter = j;
                break;
            }
        }
        if (enter < 0) break;  // optimal

        // Leaving row: minimum ratio, ties by smallest basic variable.
        int leave = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < m; ++i) {
            if (tab[i][enter] <= piv_eps) continue;
            double ratio = tab[i][cols - 1] / tab[i][enter];
            if (leave < 0 || ratio < best_ratio - 1e-15 ||
                (std::abs(ratio - best_ratio) <= 1e-15 && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave < 0) {
            res.optimum = std::numeric_limits<double>::infinity();
            res.unbounded = true;
            return res;
        }

        // Pivot.
        double pivot = tab[leave][enter];
        for (int j = 0; j < cols; ++j) tab[leave][j] /= pivot;
        for (int i = 0; i <= m; ++i) {
            if (i == leave) continue;
            double f = tab[i][enter];
            if (f == 0.0) continue;
            for (int j = 0; j < cols; ++j) tab[i][j] -= f * tab[leave][j];
        }
        basis[leave] = enter;
    }

    std::vector<double> z(nv, 0.0);
    for (int i = 0; i < m; ++i)
        if (basis[i] < nv) z[basis[i]] = tab[i][cols - 1];

    res.optimum = t0 + (z[2 * d] - z[2 * d + 1]);
    for (int a = 0; a < d; ++a) res.witness[a] = z[a] - z[d + a];
    return res;
}

}  // namespace rtpool
