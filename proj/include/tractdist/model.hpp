#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tractdist {

/// A point (or displacement) in millimeters.
struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Point3&, const Point3&) = default;

    Point3& operator+=(const Point3& o) noexcept { x += o.x; y += o.y; z += o.z; return *this; }
    Point3& operator-=(const Point3& o) noexcept { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Point3& operator*=(double k) noexcept { x *= k; y *= k; z *= k; return *this; }

    friend Point3 operator+(Point3 a, const Point3& b) noexcept { return a += b; }
    friend Point3 operator-(Point3 a, const Point3& b) noexcept { return a -= b; }
    friend Point3 operator*(Point3 a, double k) noexcept { return a *= k; }
    friend Point3 operator*(double k, Point3 a) noexcept { return a *= k; }
};

using Vec3 = Point3;

inline double dot(const Vec3& a, const Vec3& b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double squared_norm(const Vec3& a) noexcept { return dot(a, a); }
inline double norm(const Vec3& a) noexcept { return std::sqrt(squared_norm(a)); }

inline double squared_distance(const Point3& a, const Point3& b) noexcept {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

inline double distance(const Point3& a, const Point3& b) noexcept { return std::sqrt(squared_distance(a, b)); }

inline bool is_finite(const Point3& p) noexcept {
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

/// An immutable polyline of at least two points with no consecutive duplicates.
class Streamline {
public:
    /// Collapses consecutive duplicates. Throws NonFiniteCoordinate or
    /// FewerThanTwoDistinctPoints.
    static Streamline build(std::span<const Point3> raw_points);
    static Streamline build(std::initializer_list<Point3> raw_points) {
        return build(std::span<const Point3>(raw_points.begin(), raw_points.size()));
    }

    [[nodiscard]] std::span<const Point3> points() const noexcept { return points_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] const Point3& operator[](std::size_t i) const noexcept { return points_[i]; }
    [[nodiscard]] const Point3& front() const noexcept { return points_.front(); }
    [[nodiscard]] const Point3& back() const noexcept { return points_.back(); }

    [[nodiscard]] double arc_length() const noexcept;

    friend bool operator==(const Streamline&, const Streamline&) = default;

private:
    explicit Streamline(std::vector<Point3> points) : points_(std::move(points)) {}

    std::vector<Point3> points_;
};

/// Resamples to exactly `m` points equally spaced by arc length; the first and
/// last points are kept exactly. Throws InvalidResampleCount if m < 2.
///
/// The raw variant may return consecutive coincident points when the curve
/// closes on itself (e.g. a there-and-back streamline resampled to 2 points);
/// `resample` rejects that case with FewerThanTwoDistinctPoints.
std::vector<Point3> resample_points(const Streamline& s, std::size_t m);
Streamline resample(const Streamline& s, std::size_t m);

/// Reverses the point order.
Streamline flip(const Streamline& s);

/// Indexed collection of streamlines. Indices are stable for the object's lifetime.
///
/// `voxel_size` and `origin` travel with the tractogram through the TRGX header
/// and describe the grid it was produced on.
struct Tractogram {
    std::vector<Streamline> streamlines;
    double voxel_size = 1.25;
    Point3 origin{};

    [[nodiscard]] std::size_t size() const noexcept { return streamlines.size(); }
    [[nodiscard]] bool empty() const noexcept { return streamlines.empty(); }
    [[nodiscard]] const Streamline& operator[](std::size_t i) const noexcept { return streamlines[i]; }
};

/// A sorted, duplicate-free set of streamline indices into one tractogram.
class BundleRef {
public:
    BundleRef() = default;

    /// Sorts and deduplicates `indices`. Throws IndexOutOfRange when any index
    /// is >= tractogram_size.
    BundleRef(std::string tractogram_id, std::vector<std::size_t> indices, std::size_t tractogram_size);

    [[nodiscard]] const std::string& tractogram_id() const noexcept { return tractogram_id_; }
    [[nodiscard]] std::span<const std::size_t> indices() const noexcept { return indices_; }
    [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
    [[nodiscard]] bool empty() const noexcept { return indices_.empty(); }
    [[nodiscard]] bool contains(std::size_t index) const noexcept;

    friend bool operator==(const BundleRef&, const BundleRef&) = default;

private:
    std::string tractogram_id_;
    std::vector<std::size_t> indices_;
};

}  // namespace tractdist
