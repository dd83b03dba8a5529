#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tractdist/model.hpp"

namespace tractdist {

/// One configured streamline distance.
///
/// `points` is only meaningful for MDF and `sigma` (mm) only for PDM and
/// VARIFOLDS. Construct through the named factories, which validate.
struct DistanceKind {
    enum class Tag { MC, SC, LC, MDF, PDM, VARIFOLDS };

    Tag tag = Tag::MC;
    std::size_t points = 0;
    double sigma = 0.0;

    static DistanceKind mc() { return {Tag::MC, 0, 0.0}; }
    static DistanceKind sc() { return {Tag::SC, 0, 0.0}; }
    static DistanceKind lc() { return {Tag::LC, 0, 0.0}; }
    static DistanceKind mdf(std::size_t m);
    static DistanceKind pdm(double sigma);
    static DistanceKind varifolds(double sigma);

    /// Parses the canonical form (`mc`, `mdf-20`, `pdm-42.0`, `var-42.0`, ...).
    /// Throws UnknownKind or InvalidParameter.
    static DistanceKind parse(std::string_view text);

    /// Canonical name; sigma is rendered with one decimal when that is exact,
    /// otherwise with the shortest round-tripping representation.
    [[nodiscard]] std::string name() const;

    [[nodiscard]] bool is_mdf() const noexcept { return tag == Tag::MDF; }
    /// PDM and varifolds are norms in a kernel space and obey the triangle inequality.
    [[nodiscard]] bool is_metric() const noexcept { return tag == Tag::PDM || tag == Tag::VARIFOLDS; }

    friend bool operator==(const DistanceKind&, const DistanceKind&) = default;
};

/// The eight configurations compared in the benchmark, in table order.
std::vector<DistanceKind> default_kinds();

struct SegmentDescriptor {
    Point3 center;
    Vec3 tangent;
};

/// Average over the points of `a` of the distance to the closest point of `b`.
double mean_closest_asym(const Streamline& a, const Streamline& b);

double d_mc(const Streamline& a, const Streamline& b);
double d_sc(const Streamline& a, const Streamline& b);
double d_lc(const Streamline& a, const Streamline& b);

/// Minimum average direct-flip distance after resampling both to `m` points.
double d_mdf(const Streamline& a, const Streamline& b, std::size_t m);

/// Gaussian kernel exp(-|x - y|^2 / sigma^2).
double gaussian_kernel(const Point3& x, const Point3& y, double sigma);

/// Normalized point-cloud inner product, in (0, 1].
double pdm_inner(const Streamline& a, const Streamline& b, double sigma);
double d_pdm(const Streamline& a, const Streamline& b, double sigma);

std::vector<SegmentDescriptor> segments(const Streamline& s);
double varifolds_inner(const Streamline& a, const Streamline& b, double sigma);
double d_varifolds(const Streamline& a, const Streamline& b, double sigma);

/// A streamline with the per-kind data a distance needs precomputed (resampled
/// points for MDF, segments and self inner products for the kernel distances).
///
/// Evaluating against prepared operands gives bitwise the same value as
/// `distance()`, which prepares both operands on every call.
class PreparedStreamline {
public:
    PreparedStreamline(const DistanceKind& kind, const Streamline& s);

    [[nodiscard]] const DistanceKind& kind() const noexcept { return kind_; }

private:
    friend double distance(const PreparedStreamline& a, const PreparedStreamline& b);

    DistanceKind kind_;
    std::vector<Point3> points_;  // resampled for MDF
    std::vector<SegmentDescriptor> segments_;
    std::vector<double> tangent_norms_;
    double self_inner_ = 0.0;
};

/// Distance between two operands prepared for the same kind. Throws KindMismatch otherwise.
double distance(const PreparedStreamline& a, const PreparedStreamline& b);

/// Uniform dispatch over the distance configurations.
double distance(const DistanceKind& kind, const Streamline& a, const Streamline& b);

}  // namespace tractdist
