#include "rtpool/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "rtpool/rng.hpp"

namespace rtpool {

namespace {

double det2(const double m[2][2]) {
    return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

double det3(const double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double det4(const double m[4][4]) {
    double acc = 0.0;
    for (int c = 0; c < 4; ++c) {
        double sub[3][3];
        for (int i = 1; i < 4; ++i) {
            int sc = 0;
            for (int j = 0; j < 4; ++j) {
                if (j == c) continue;
                sub[i - 1][sc++] = m[i][j];
            }
        }
        double cof = m[0][c] * det3(sub);
        acc += (c % 2 == 0) ? cof : -cof;
    }
    return acc;
}

double ipow(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

}  // namespace

PointCloud PointCloud::create(int dim, std::vector<Point> pts) {
    if (dim != 2 && dim != 3) throw InvariantViolation("PointCloud dimension must be 2 or 3");
    for (auto& p : pts)
        for (int a = dim; a < 3; ++a) p[a] = 0.0;
    PointCloud c;
    c.dim = dim;
    c.points = std::move(pts);
    if (!c.points.empty()) {
        Point lo = c.points[0], hi = c.points[0];
        for (const auto& p : c.points) {
            for (int a = 0; a < dim; ++a) {
                lo[a] = std::min(lo[a], p[a]);
                hi[a] = std::max(hi[a], p[a]);
            }
        }
        double s = 0.0;
        for (int a = 0; a < dim; ++a) s += (hi[a] - lo[a]) * (hi[a] - lo[a]);
        c.diameter = std::sqrt(s);
    }
    return c;
}

double squared_distance(const Point& a, const Point& b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double distance(const Point& a, const Point& b, int dim) {
    return std::sqrt(squared_distance(a, b, dim));
}

Sphere circumsphere(const PointCloud& cloud, const SubsetKey& simplex) {
    const int d = cloud.dim;
    if (simplex.size() != d + 1)
        throw InvariantViolation("circumsphere expects a subset of size d+1");

    // Center c solves 2 (p_i - p_0) . c = |p_i|^2 - |p_0|^2, i = 1..d.
    const Point& p0 = cloud.points[simplex[0]];
    double a[3][3] = {};
    double rhs[3] = {};
    for (int i = 1; i <= d; ++i) {
        const Point& pi = cloud.points[simplex[i]];
        double norm_diff = 0.0;
        for (int j = 0; j < d; ++j) {
            double u = pi[j] - p0[j];
            a[i - 1][j] = 2.0 * u;
            norm_diff += u * (pi[j] + p0[j]);
        }
        rhs[i - 1] = norm_diff;
    }

    // Gaussian elimination with partial pivoting; the pivot product tracks
    // the determinant for the degeneracy test.
    double det_scale = 1.0;
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            std::swap(rhs[piv], rhs[col]);
            det_scale = -det_scale;
        }
        det_scale *= a[col][col];
        if (a[col][col] == 0.0) break;
        for (int r = col + 1; r < d; ++r) {
            double f = a[r][col] / a[col][col];
            for (int cc = col; cc < d; ++cc) a[r][cc] -= f * a[col][cc];
            rhs[r] -= f * rhs[col];
        }
    }
    // |det| of the 2x scaled system is 2^d * affine determinant.
    double affine_det = det_scale / ipow(2.0, d);
    if (std::abs(affine_det) <= kTauGp * ipow(cloud.diameter, d))
        throw DegenerateSimplex("circumsphere: affinely dependent simplex " + simplex.to_string());

    Point c{0.0, 0.0, 0.0};
    for (int r = d - 1; r >= 0; --r) {
        double s = rhs[r];
        for (int cc = r + 1; cc < d; ++cc) s -= a[r][cc] * c[cc];
        c[r] = s / a[r][r];
    }

    Sphere s;
    s.center = c;
    s.radius = distance(c, p0, d);
    return s;
}

SpherePartition classify(const PointCloud& cloud, const Sphere& sphere) {
    const double band = kTauOn * cloud.diameter;
    std::vector<int> in, on, out;
    for (int i = 0; i < cloud.size(); ++i) {
        double dist = distance(cloud.points[i], sphere.center, cloud.dim);
        if (std::abs(dist - sphere.radius) <= band)
            on.push_back(i);
        else if (dist < sphere.radius - band)
            in.push_back(i);
        else
            out.push_back(i);
    }
    return SpherePartition{SubsetKey(std::move(in)), SubsetKey(std::move(on)), SubsetKey(std::move(out))};
}

int count_inside_capped(const PointCloud& cloud, const Sphere& sphere, int cap) {
    const double band = kTauOn * cloud.diameter;
    const double lim = sphere.radius - band;
    const double lim2 = lim > 0.0 ? lim * lim : -1.0;
    int count = 0;
    for (int i = 0; i < cloud.size(); ++i) {
        if (squared_distance(cloud.points[i], sphere.center, cloud.dim) < lim2) {
            if (++count > cap) return cap + 1;
        }
    }
    return count;
}

GeneralPositionReport validate_general_position(const PointCloud& cloud) {
    const int d = cloud.dim;
    const int n = cloud.size();
    GeneralPositionReport report;

    const double dup_tol2 = kTauGp * cloud.diameter * kTauGp * cloud.diameter;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (squared_distance(cloud.points[i], cloud.points[j], d) <= dup_tol2)
                report.violations.push_back({ViolationKind::Duplicate, SubsetKey{i, j}});

    // Affine dependence over (d+1)-subsets.
    const double affine_tol = kTauGp * ipow(cloud.diameter, d);
    std::vector<int> comb(d + 1);
    auto affine_dependent = [&](const std::vector<int>& s) {
        double det;
        if (d == 2) {
            double m[2][2];
            for (int i = 1; i <= 2; ++i)
                for (int j = 0; j < 2; ++j)
                    m[i - 1][j] = cloud.points[s[i]][j] - cloud.points[s[0]][j];
            det = det2(m);
        } else {
            double m[3][3];
            for (int i = 1; i <= 3; ++i)
                for (int j = 0; j < 3; ++j)
                    m[i - 1][j] = cloud.points[s[i]][j] - cloud.points[s[0]][j];
            det = det3(m);
        }
        return std::abs(det) <= affine_tol;
    };
    if (n >= d + 1) {
        for (int i = 0; i <= d; ++i) comb[i] = i;
        while (true) {
            if (affine_dependent(comb))
                report.violations.push_back({ViolationKind::AffinelyDependent, SubsetKey(comb)});
            int pos = d;
            while (pos >= 0 && comb[pos] == n - 1 - (d - pos)) --pos;
            if (pos < 0) break;
            ++comb[pos];
            for (int i = pos + 1; i <= d; ++i) comb[i] = comb[i - 1] + 1;
        }
    }

    // Co-sphericity over (d+2)-subsets via the translated lifted determinant:
    // rows (q_i - q_0, |q_i - q_0|^2).
    const double sphere_tol = kTauGp * ipow(cloud.diameter, d + 2);
    auto lifted_row = [&](const std::vector<int>& s, int i, double* row) {
        const Point& q0 = cloud.points[s[0]];
        const Point& qi = cloud.points[s[i]];
        double norm = 0.0;
        for (int j = 0; j < d; ++j) {
            double u = qi[j] - q0[j];
            row[j] = u;
            norm += u * u;
        }
        row[d] = norm;
    };
    auto co_spherical = [&](const std::vector<int>& s) {
        double det;
        if (d == 2) {
            double m[3][3];
            for (int i = 1; i <= 3; ++i) lifted_row(s, i, m[i - 1]);
            det = det3(m);
        } else {
            double m[4][4];
            for (int i = 1; i <= 4; ++i) lifted_row(s, i, m[i - 1]);
            det = det4(m);
        }
        return std::abs(det) <= sphere_tol;
    };
    if (n >= d + 2) {
        std::vector<int> c2(d + 2);
        for (int i = 0; i <= d + 1; ++i) c2[i] = i;
        while (true) {
            if (co_spherical(c2))
                report.violations.push_back({ViolationKind::CoSpherical, SubsetKey(c2)});
            int pos = d + 1;
            while (pos >= 0 && c2[pos] == n - 1 - (d + 1 - pos)) --pos;
            if (pos < 0) break;
            ++c2[pos];
            for (int i = pos + 1; i <= d + 1; ++i) c2[i] = c2[i - 1] + 1;
        }
    }

    return report;
}

PointCloud jitter(const PointCloud& cloud, std::uint64_t seed, double magnitude) {
    if (!(magnitude > 0.0)) throw InvariantViolation("jitter magnitude must be positive");
    double mag = magnitude;
    for (int round = 0; round < 8; ++round, mag *= 2.0) {
        std::vector<Point> pts = cloud.points;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (int a = 0; a < cloud.dim; ++a) {
                double u = to_unit_double(splitmix64(hash_mix(seed, static_cast<std::uint64_t>(round),
                                                              static_cast<std::uint64_t>(i),
                                                              static_cast<std::uint64_t>(a))));
                pts[i][a] += (2.0 * u - 1.0) * mag;
            }
        }
        PointCloud candidate = PointCloud::create(cloud.dim, std::move(pts));
        if (validate_general_position(candidate).ok()) return candidate;
    }
    throw JitterFailed("jitter: still degenerate after 8 magnitude-doubling rounds");
}

}  // namespace rtpool
