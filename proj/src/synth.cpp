#include "tractdist/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tractdist/error.hpp"
#include "tractdist/random.hpp"

namespace tractdist {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

Streamline bezier(const Point3& p0, const Point3& p1, const Point3& p2, std::size_t count) {
    std::vector<Point3> pts(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        const double u = 1.0 - t;
        pts[i] = p0 * (u * u) + p1 * (2.0 * u * t) + p2 * (t * t);
    }
    return Streamline::build(pts);
}

}  // namespace

void BundleSpec::validate() const {
    if (streamline_count < 1) {
        throw Error(Errc::InvalidSpec, "bundle needs at least one streamline");
    }
    if (!(radial_jitter_sigma >= 0.0) || !std::isfinite(radial_jitter_sigma)) {
        throw Error(Errc::InvalidSpec, "jitter must be finite and >= 0");
    }
    if (min_points < 2 || max_points < min_points) {
        throw Error(Errc::InvalidSpec, "point count range must satisfy 2 <= min <= max");
    }
    switch (centerline.shape) {
        case Centerline::Shape::Arc:
            if (!(centerline.radius > 0.0) || centerline.start_deg == centerline.end_deg) {
                throw Error(Errc::InvalidSpec, "arc needs a positive radius and a non-empty angle range");
            }
            if (!(norm(centerline.axis_u) > 0.0) || !(norm(centerline.axis_v) > 0.0)) {
                throw Error(Errc::InvalidSpec, "arc plane axes must be non-zero");
            }
            break;
        case Centerline::Shape::Helix:
            if (!(centerline.radius > 0.0) || !(centerline.turns > 0.0)) {
                throw Error(Errc::InvalidSpec, "helix needs a positive radius and turn count");
            }
            break;
        case Centerline::Shape::Polyline:
            try {
                (void)Streamline::build(centerline.control_points);
            } catch (const Error& e) {
                throw Error(Errc::InvalidSpec, std::string("polyline centerline: ") + e.what());
            }
            break;
    }
}

std::vector<Point3> centerline_points(const Centerline& c, std::size_t samples) {
    std::vector<Point3> pts;
    if (c.shape == Centerline::Shape::Polyline) {
        return resample_points(Streamline::build(c.control_points), samples);
    }
    pts.reserve(samples);
    const Vec3 u = c.axis_u * (1.0 / norm(c.axis_u));
    const Vec3 v = c.axis_v * (1.0 / norm(c.axis_v));
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(samples - 1);
        if (c.shape == Centerline::Shape::Arc) {
            const double angle = (c.start_deg + t * (c.end_deg - c.start_deg)) * kDegToRad;
            pts.push_back(c.center + u * (c.radius * std::cos(angle)) + v * (c.radius * std::sin(angle)));
        } else {
            const double angle = 2.0 * std::numbers::pi * c.turns * t;
            pts.push_back(c.center + Point3{c.radius * std::cos(angle), c.radius * std::sin(angle),
                                            c.pitch * c.turns * t});
        }
    }
    return pts;
}

SyntheticSubject generate_subject(const std::map<std::string, BundleSpec>& specs,
                                  std::size_t noise_streamline_count, std::uint64_t global_seed) {
    if (specs.empty()) {
        throw Error(Errc::InvalidSpec, "at least one bundle spec is required");
    }
    for (const auto& [name, spec] : specs) {
        if (name.empty()) {
            throw Error(Errc::InvalidSpec, "bundle names must be non-empty");
        }
        spec.validate();
    }

    SyntheticSubject subject;
    std::vector<Streamline>& out = subject.tractogram.streamlines;
    std::map<std::string, std::vector<std::size_t>> members;

    std::size_t min_pts = std::numeric_limits<std::size_t>::max();
    std::size_t max_pts = 0;
    for (const auto& [name, spec] : specs) {
        min_pts = std::min(min_pts, spec.min_points);
        max_pts = std::max(max_pts, spec.max_points);

        Rng rng(splitmix64(global_seed ^ splitmix64(spec.rng_seed) ^ fnv1a(name)));
        const Streamline center = Streamline::build(centerline_points(spec.centerline));
        const double sigma = spec.radial_jitter_sigma;
        for (std::size_t k = 0; k < spec.streamline_count; ++k) {
            const auto count = static_cast<std::size_t>(rng.between(spec.min_points, spec.max_points));
            std::vector<Point3> pts = resample_points(center, count);
            const Vec3 offset = rng.normal_vec(sigma);
            for (Point3& p : pts) {
                p += offset + rng.normal_vec(sigma / 10.0);
            }
            members[name].push_back(out.size());
            out.push_back(Streamline::build(pts));
        }
    }

    Point3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity()};
    Point3 hi = lo * -1.0;
    for (const Streamline& s : out) {
        for (const Point3& p : s.points()) {
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
        }
    }
    Rng noise_rng(splitmix64(global_seed ^ 0x6e6f697365ULL));
    auto random_point = [&] {
        return Point3{noise_rng.uniform(lo.x, hi.x), noise_rng.uniform(lo.y, hi.y), noise_rng.uniform(lo.z, hi.z)};
    };
    for (std::size_t k = 0; k < noise_streamline_count; ++k) {
        const Point3 p0 = random_point();
        const Point3 p1 = random_point();
        Point3 p2 = random_point();
        const auto count = static_cast<std::size_t>(noise_rng.between(min_pts, max_pts));
        if (p2 == p0) {
            p2 += Point3{1.0, 0.0, 0.0};
        }
        out.push_back(bezier(p0, p1, p2, count));
    }

    const std::size_t n = out.size();
    for (auto& [name, indices] : members) {
        subject.truth.emplace(name, BundleRef(name, std::move(indices), n));
    }
    return subject;
}

SyntheticSubject perturb_subject(const SyntheticSubject& subject, double displacement_sigma, std::uint64_t seed) {
    if (!(displacement_sigma >= 0.0) || !std::isfinite(displacement_sigma)) {
        throw Error(Errc::InvalidSpec, "displacement sigma must be finite and >= 0");
    }
    if (displacement_sigma == 0.0) {
        return subject;
    }
    SyntheticSubject out;
    out.tractogram.voxel_size = subject.tractogram.voxel_size;
    out.tractogram.origin = subject.tractogram.origin;
    out.truth = subject.truth;
    out.tractogram.streamlines.reserve(subject.tractogram.size());

    Rng rng(splitmix64(seed ^ 0x7065727475726200ULL));
    for (const Streamline& s : subject.tractogram.streamlines) {
        const Vec3 start = rng.normal_vec(displacement_sigma);
        const Vec3 end = rng.normal_vec(displacement_sigma);
        const auto pts = s.points();
        const double total = s.arc_length();
        std::vector<Point3> moved(pts.begin(), pts.end());
        double walked = 0.0;
        for (std::size_t i = 0; i < moved.size(); ++i) {
            if (i > 0) {
                walked += distance(pts[i - 1], pts[i]);
            }
            const double t = total > 0.0 ? walked / total : 0.0;
            moved[i] += start * (1.0 - t) + end * t;
        }
        out.tractogram.streamlines.push_back(Streamline::build(moved));
    }
    return out;
}

std::map<std::string, BundleSpec> default_benchmark_specs() {
    std::map<std::string, BundleSpec> specs;

    BundleSpec arc;
    arc.centerline.shape = Centerline::Shape::Arc;
    arc.centerline.center = {0.0, 0.0, 0.0};
    arc.centerline.radius = 40.0;
    arc.centerline.start_deg = 20.0;
    arc.centerline.end_deg = 160.0;
    arc.centerline.axis_u = {1.0, 0.0, 0.0};
    arc.centerline.axis_v = {0.0, 0.0, 1.0};
    arc.rng_seed = 1;
    specs.emplace("arc", arc);

    BundleSpec helix;
    helix.centerline.shape = Centerline::Shape::Helix;
    helix.centerline.center = {0.0, 40.0, -30.0};
    helix.centerline.radius = 12.0;
    helix.centerline.pitch = 30.0;
    helix.centerline.turns = 1.5;
    helix.rng_seed = 2;
    specs.emplace("helix", helix);

    BundleSpec hook;
    hook.centerline.shape = Centerline::Shape::Polyline;
    hook.centerline.control_points = {{-50.0, -40.0, -20.0}, {-10.0, -45.0, -15.0}, {25.0, -35.0, 0.0},
                                      {35.0, -15.0, 10.0}};
    hook.rng_seed = 3;
    specs.emplace("hook", hook);

    return specs;
}

std::vector<SyntheticSubject> default_benchmark_subjects(std::size_t count, std::uint64_t seed) {
    const SyntheticSubject base = generate_subject(default_benchmark_specs(), kDefaultNoiseStreamlines, seed);
    std::vector<SyntheticSubject> subjects;
    subjects.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        subjects.push_back(perturb_subject(base, kDefaultDisplacementSigma, splitmix64(seed + k + 1)));
    }
    return subjects;
}

}  // namespace tractdist
