#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rtpool/subset.hpp"

namespace rtpool {

/// Relative tolerance for "on the sphere" classification, scaled by the
/// cloud diameter.
inline constexpr double kTauOn = 1e-9;
/// Relative tolerance for the general-position determinant tests.
inline constexpr double kTauGp = 1e-9;

using Point = std::array<double, 3>;  // unused axes stay exactly 0

/// Immutable indexed point set in R^2 or R^3.
struct PointCloud {
    int dim = 0;
    std::vector<Point> points;
    double diameter = 0.0;  // bounding-box diagonal

    int size() const { return static_cast<int>(points.size()); }

    static PointCloud create(int dim, std::vector<Point> pts);
};

struct Sphere {
    Point center{0.0, 0.0, 0.0};
    double radius = 0.0;
};

/// Disjoint cover of all point indices relative to one sphere.
struct SpherePartition {
    SubsetKey inside;
    SubsetKey on;
    SubsetKey outside;
};

enum class ViolationKind { Duplicate, AffinelyDependent, CoSpherical };

struct Violation {
    ViolationKind kind;
    SubsetKey subset;
};

struct GeneralPositionReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

double squared_distance(const Point& a, const Point& b, int dim);
double distance(const Point& a, const Point& b, int dim);

/// Circumsphere of d+1 affinely independent points. Throws DegenerateSimplex
/// when the defining linear system is singular within tolerance.
Sphere circumsphere(const PointCloud& cloud, const SubsetKey& simplex);

/// Partition of the whole cloud against a sphere. Total: every index lands in
/// exactly one of inside/on/outside using the tau_on * diameter band.
SpherePartition classify(const PointCloud& cloud, const Sphere& sphere);

/// Counts points strictly inside the sphere, stopping early once the count
/// exceeds `cap` (used by the tiling cutoff filter). Returns cap+1 on abort.
int count_inside_capped(const PointCloud& cloud, const Sphere& sphere, int cap);

/// Exhaustive determinant-based general position test: affine dependence over
/// all (d+1)-subsets, co-sphericity over all (d+2)-subsets, duplicates over
/// pairs. Violations are data, not errors.
GeneralPositionReport validate_general_position(const PointCloud& cloud);

/// Deterministic jitter repair: perturbs each coordinate by a counter-based
/// pseudo-random offset in [-magnitude, magnitude], doubling the magnitude
/// for up to 8 rounds until validation passes. Throws JitterFailed otherwise.
PointCloud jitter(const PointCloud& cloud, std::uint64_t seed, double magnitude);

}  // namespace rtpool
