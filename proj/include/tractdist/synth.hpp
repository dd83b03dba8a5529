#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tractdist/model.hpp"

namespace tractdist {

/// Parametric bundle centerline.
///
/// Arc: circle of `radius` around `center` in the plane spanned by `axis_u`
/// and `axis_v`, from `start_deg` to `end_deg`. Helix: around `center` along
/// +z with `radius`, `pitch` mm per turn and `turns` turns. Polyline: the
/// `control_points` joined by straight segments.
struct Centerline {
    enum class Shape { Arc, Helix, Polyline };

    Shape shape = Shape::Arc;
    Point3 center{};
    double radius = 30.0;
    double start_deg = 0.0;
    double end_deg = 180.0;
    Vec3 axis_u{1.0, 0.0, 0.0};
    Vec3 axis_v{0.0, 1.0, 0.0};
    double pitch = 10.0;
    double turns = 1.0;
    std::vector<Point3> control_points;
};

struct BundleSpec {
    Centerline centerline;
    std::size_t streamline_count = 80;
    double radial_jitter_sigma = 2.0;
    std::size_t min_points = 20;
    std::size_t max_points = 60;
    std::uint64_t rng_seed = 0;

    /// Throws InvalidSpec.
    void validate() const;
};

struct SyntheticSubject {
    Tractogram tractogram;
    std::map<std::string, BundleRef> truth;
};

/// Dense polyline sampling of a centerline.
std::vector<Point3> centerline_points(const Centerline& c, std::size_t samples = 256);

/// Generates bundles in name order, followed by `noise_streamline_count`
/// random smooth curves inside the bundles' bounding box.
///
/// A bundle streamline is the centerline resampled to a point count drawn from
/// [min_points, max_points], shifted by one isotropic Gaussian offset of std
/// `radial_jitter_sigma`, plus per-point Gaussian noise of std jitter / 10.
/// Deterministic in (specs, noise count, global_seed). Throws InvalidSpec.
SyntheticSubject generate_subject(const std::map<std::string, BundleSpec>& specs,
                                  std::size_t noise_streamline_count, std::uint64_t global_seed);

/// Smoothly displaces every streamline: the offset varies linearly along the
/// arc between two Gaussian vectors of std `displacement_sigma`. Bundle
/// indices are unchanged.
SyntheticSubject perturb_subject(const SyntheticSubject& subject, double displacement_sigma, std::uint64_t seed);

/// The three-bundle layout used by the benchmark drivers.
std::map<std::string, BundleSpec> default_benchmark_specs();
inline constexpr std::size_t kDefaultNoiseStreamlines = 60;
inline constexpr double kDefaultDisplacementSigma = 1.0;

/// `count` perturbed copies of the default benchmark subject.
std::vector<SyntheticSubject> default_benchmark_subjects(std::size_t count, std::uint64_t seed);

}  // namespace tractdist
