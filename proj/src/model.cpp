#include "tractdist/model.hpp"

#include <algorithm>

#include "tractdist/error.hpp"

namespace tractdist {

Streamline Streamline::build(std::span<const Point3> raw_points) {
    std::vector<Point3> points;
    points.reserve(raw_points.size());
    for (const Point3& p : raw_points) {
        if (!is_finite(p)) {
            throw Error(Errc::NonFiniteCoordinate, "streamline point has a NaN or infinite coordinate");
        }
        if (points.empty() || points.back() != p) {
            points.push_back(p);
        }
    }
    if (points.size() < 2) {
        throw Error(Errc::FewerThanTwoDistinctPoints,
                    "streamline needs at least two distinct points, got " + std::to_string(points.size()));
    }
    return Streamline(std::move(points));
}

double Streamline::arc_length() const noexcept {
    double total = 0.0;
    for (std::size_t i = 1; i < points_.size(); ++i) {
        total += distance(points_[i - 1], points_[i]);
    }
    return total;
}

std::vector<Point3> resample_points(const Streamline& s, std::size_t m) {
    if (m < 2) {
        throw Error(Errc::InvalidResampleCount, "resample count must be >= 2, got " + std::to_string(m));
    }
    const auto pts = s.points();

    std::vector<double> cumulative(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        cumulative[i] = cumulative[i - 1] + distance(pts[i - 1], pts[i]);
    }
    const double total = cumulative.back();

    std::vector<Point3> out;
    out.reserve(m);
    out.push_back(pts.front());

    std::size_t seg = 1;  // current segment is [seg - 1, seg]
    for (std::size_t k = 1; k + 1 < m; ++k) {
        const double target = total * static_cast<double>(k) / static_cast<double>(m - 1);
        while (seg + 1 < pts.size() && cumulative[seg] < target) {
            ++seg;
        }
        const double seg_len = cumulative[seg] - cumulative[seg - 1];
        const double t = seg_len > 0.0 ? std::clamp((target - cumulative[seg - 1]) / seg_len, 0.0, 1.0) : 0.0;
        out.push_back(pts[seg - 1] + (pts[seg] - pts[seg - 1]) * t);
    }
    out.push_back(pts.back());
    return out;
}

Streamline resample(const Streamline& s, std::size_t m) {
    return Streamline::build(resample_points(s, m));
}

Streamline flip(const Streamline& s) {
    std::vector<Point3> reversed(s.points().rbegin(), s.points().rend());
    return Streamline::build(reversed);
}

BundleRef::BundleRef(std::string tractogram_id, std::vector<std::size_t> indices, std::size_t tractogram_size)
    : tractogram_id_(std::move(tractogram_id)), indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
    if (!indices_.empty() && indices_.back() >= tractogram_size) {
        throw Error(Errc::IndexOutOfRange, "bundle index " + std::to_string(indices_.back()) +
                                               " out of range for tractogram of size " +
                                               std::to_string(tractogram_size));
    }
}

bool BundleRef::contains(std::size_t index) const noexcept {
    return std::binary_search(indices_.begin(), indices_.end(), index);
}

}  // namespace tractdist
