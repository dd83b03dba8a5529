#include "tractdist/distances.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <limits>
#include <system_error>
#include <tuple>

#include "tractdist/error.hpp"

namespace tractdist {

namespace {

void require_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw Error(Errc::InvalidParameter, "kernel bandwidth sigma must be positive and finite");
    }
}

std::string format_sigma(double sigma) {
    const double tenths = sigma * 10.0;
    if (std::nearbyint(tenths) == tenths && std::abs(tenths) < 1e15) {
        char buf[64];
        const int n = std::snprintf(buf, sizeof buf, "%.1f", sigma);
        return std::string(buf, static_cast<std::size_t>(n));
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, sigma);
    return std::string(buf, res.ptr);
}

double parse_positive_real(std::string_view text, std::string_view what) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw Error(Errc::UnknownKind, "cannot parse " + std::string(what) + " parameter '" + std::string(text) + "'");
    }
    require_sigma(value);
    return value;
}

// Both directed mean-of-closest values from one pass over the point pairs.
struct ClosestMeans {
    double a_to_b;
    double b_to_a;
};

ClosestMeans closest_means(std::span<const Point3> a, std::span<const Point3> b) {
    std::vector<double> col_min(b.size(), std::numeric_limits<double>::infinity());
    double a_sum = 0.0;
    for (const Point3& pa : a) {
        double row_min = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double d2 = squared_distance(pa, b[j]);
            row_min = std::min(row_min, d2);
            col_min[j] = std::min(col_min[j], d2);
        }
        a_sum += std::sqrt(row_min);
    }
    double b_sum = 0.0;
    for (const double d2 : col_min) {
        b_sum += std::sqrt(d2);
    }
    return {a_sum / static_cast<double>(a.size()), b_sum / static_cast<double>(b.size())};
}

double mdf_resampled(std::span<const Point3> a, std::span<const Point3> b) {
    const std::size_t m = a.size();
    double direct = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        direct += distance(a[i], b[i]);
    }
    // Mirrored terms are added in pairs so that swapping a and b gives the same sum.
    double flipped = 0.0;
    for (std::size_t i = 0, j = m - 1; i <= j; ++i, --j) {
        flipped += i == j ? distance(a[i], b[j]) : distance(a[i], b[j]) + distance(a[j], b[i]);
        if (j == 0) break;
    }
    return std::min(direct, flipped) / static_cast<double>(m);
}

double pdm_cross(std::span<const Point3> a, std::span<const Point3> b, double sigma) {
    const double inv_s2 = 1.0 / (sigma * sigma);
    double sum = 0.0;
    for (const Point3& pa : a) {
        for (const Point3& pb : b) {
            sum += std::exp(-squared_distance(pa, pb) * inv_s2);
        }
    }
    return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double varifolds_cross(std::span<const SegmentDescriptor> a, std::span<const double> a_norms,
                       std::span<const SegmentDescriptor> b, std::span<const double> b_norms, double sigma) {
    const double inv_s2 = 1.0 / (sigma * sigma);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double center_k = std::exp(-squared_distance(a[i].center, b[j].center) * inv_s2);
            const double c = dot(a[i].tangent, b[j].tangent);
            // K_n |n_i| |n_j| = (n_i . n_j)^2 / (|n_i| |n_j|)
            sum += center_k * (c * c) / (a_norms[i] * b_norms[j]);
        }
    }
    return sum;
}

std::vector<double> tangent_norms(std::span<const SegmentDescriptor> segs) {
    std::vector<double> out(segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i) {
        out[i] = norm(segs[i].tangent);
    }
    return out;
}

bool point_less(const Point3& p, const Point3& q) {
    return std::tie(p.x, p.y, p.z) < std::tie(q.x, q.y, q.z);
}

// Kernel sums do not depend on element order, so operands are kept sorted and
// the cross sum always runs over the operands in the same order. This makes
// d(a, b) == d(b, a) and d(a, flip(a)) == 0 hold exactly rather than up to
// summation rounding.
std::vector<Point3> sorted_points(std::span<const Point3> pts) {
    std::vector<Point3> out(pts.begin(), pts.end());
    std::sort(out.begin(), out.end(), point_less);
    return out;
}

std::vector<SegmentDescriptor> canonical_segments(const Streamline& s) {
    auto segs = segments(s);
    for (auto& seg : segs) {
        const Vec3& t = seg.tangent;
        const double lead = t.x != 0.0 ? t.x : (t.y != 0.0 ? t.y : t.z);
        if (lead < 0.0) seg.tangent = Vec3{} - seg.tangent;
    }
    std::sort(segs.begin(), segs.end(), [](const SegmentDescriptor& p, const SegmentDescriptor& q) {
        if (p.center == q.center) return point_less(p.tangent, q.tangent);
        return point_less(p.center, q.center);
    });
    return segs;
}

bool points_before(std::span<const Point3> a, std::span<const Point3> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), point_less);
}

bool segments_before(std::span<const SegmentDescriptor> a, std::span<const SegmentDescriptor> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [](const SegmentDescriptor& p, const SegmentDescriptor& q) {
                                            if (p.center == q.center) return point_less(p.tangent, q.tangent);
                                            return point_less(p.center, q.center);
                                        });
}

double pdm_cross_ordered(std::span<const Point3> a, std::span<const Point3> b, double sigma) {
    return points_before(b, a) ? pdm_cross(b, a, sigma) : pdm_cross(a, b, sigma);
}

double varifolds_cross_ordered(std::span<const SegmentDescriptor> a, std::span<const double> a_norms,
                               std::span<const SegmentDescriptor> b, std::span<const double> b_norms, double sigma) {
    return segments_before(b, a) ? varifolds_cross(b, b_norms, a, a_norms, sigma)
                                 : varifolds_cross(a, a_norms, b, b_norms, sigma);
}

double kernel_distance(double aa, double bb, double ab) {
    return std::sqrt(std::max(0.0, aa + bb - 2.0 * ab));
}

}  // namespace

DistanceKind DistanceKind::mdf(std::size_t m) {
    if (m < 2) {
        throw Error(Errc::InvalidResampleCount, "MDF needs at least 2 points, got " + std::to_string(m));
    }
    return {Tag::MDF, m, 0.0};
}

DistanceKind DistanceKind::pdm(double sigma) {
    require_sigma(sigma);
    return {Tag::PDM, 0, sigma};
}

DistanceKind DistanceKind::varifolds(double sigma) {
    require_sigma(sigma);
    return {Tag::VARIFOLDS, 0, sigma};
}

DistanceKind DistanceKind::parse(std::string_view text) {
    if (text == "mc") return mc();
    if (text == "sc") return sc();
    if (text == "lc") return lc();
    if (text.starts_with("mdf-")) {
        const std::string_view arg = text.substr(4);
        std::size_t m = 0;
        const auto res = std::from_chars(arg.data(), arg.data() + arg.size(), m);
        if (arg.empty() || res.ec != std::errc{} || res.ptr != arg.data() + arg.size()) {
            throw Error(Errc::UnknownKind, "cannot parse MDF point count in '" + std::string(text) + "'");
        }
        return mdf(m);
    }
    if (text.starts_with("pdm-")) return pdm(parse_positive_real(text.substr(4), "pdm"));
    if (text.starts_with("var-")) return varifolds(parse_positive_real(text.substr(4), "var"));
    throw Error(Errc::UnknownKind, "unknown distance kind '" + std::string(text) + "'");
}

std::string DistanceKind::name() const {
    switch (tag) {
        case Tag::MC: return "mc";
        case Tag::SC: return "sc";
        case Tag::LC: return "lc";
        case Tag::MDF: return "mdf-" + std::to_string(points);
        case Tag::PDM: return "pdm-" + format_sigma(sigma);
        case Tag::VARIFOLDS: return "var-" + format_sigma(sigma);
    }
    return "?";
}

std::vector<DistanceKind> default_kinds() {
    return {DistanceKind::mc(),       DistanceKind::sc(),       DistanceKind::lc(),
            DistanceKind::mdf(12),    DistanceKind::mdf(20),    DistanceKind::mdf(32),
            DistanceKind::pdm(42.0),  DistanceKind::varifolds(42.0)};
}

double mean_closest_asym(const Streamline& a, const Streamline& b) {
    return closest_means(a.points(), b.points()).a_to_b;
}

double d_mc(const Streamline& a, const Streamline& b) {
    const auto [ab, ba] = closest_means(a.points(), b.points());
    return (ab + ba) / 2.0;
}

double d_sc(const Streamline& a, const Streamline& b) {
    const auto [ab, ba] = closest_means(a.points(), b.points());
    return std::min(ab, ba);
}

double d_lc(const Streamline& a, const Streamline& b) {
    const auto [ab, ba] = closest_means(a.points(), b.points());
    return std::max(ab, ba);
}

double d_mdf(const Streamline& a, const Streamline& b, std::size_t m) {
    if (m < 2) {
        throw Error(Errc::InvalidResampleCount, "MDF needs at least 2 points, got " + std::to_string(m));
    }
    const auto ra = resample_points(a, m);
    const auto rb = resample_points(b, m);
    return mdf_resampled(ra, rb);
}

double gaussian_kernel(const Point3& x, const Point3& y, double sigma) {
    return std::exp(-squared_distance(x, y) / (sigma * sigma));
}

double pdm_inner(const Streamline& a, const Streamline& b, double sigma) {
    require_sigma(sigma);
    return pdm_cross_ordered(sorted_points(a.points()), sorted_points(b.points()), sigma);
}

double d_pdm(const Streamline& a, const Streamline& b, double sigma) {
    require_sigma(sigma);
    const auto pa = sorted_points(a.points());
    const auto pb = sorted_points(b.points());
    return kernel_distance(pdm_cross(pa, pa, sigma), pdm_cross(pb, pb, sigma), pdm_cross_ordered(pa, pb, sigma));
}

std::vector<SegmentDescriptor> segments(const Streamline& s) {
    const auto pts = s.points();
    std::vector<SegmentDescriptor> out;
    out.reserve(pts.size() - 1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        out.push_back({(pts[i] + pts[i + 1]) * 0.5, pts[i + 1] - pts[i]});
    }
    return out;
}

double varifolds_inner(const Streamline& a, const Streamline& b, double sigma) {
    require_sigma(sigma);
    const auto sa = canonical_segments(a);
    const auto sb = canonical_segments(b);
    return varifolds_cross_ordered(sa, tangent_norms(sa), sb, tangent_norms(sb), sigma);
}

double d_varifolds(const Streamline& a, const Streamline& b, double sigma) {
    require_sigma(sigma);
    const auto sa = canonical_segments(a);
    const auto sb = canonical_segments(b);
    const auto na = tangent_norms(sa);
    const auto nb = tangent_norms(sb);
    return kernel_distance(varifolds_cross(sa, na, sa, na, sigma), varifolds_cross(sb, nb, sb, nb, sigma),
                           varifolds_cross_ordered(sa, na, sb, nb, sigma));
}

PreparedStreamline::PreparedStreamline(const DistanceKind& kind, const Streamline& s) : kind_(kind) {
    switch (kind.tag) {
        case DistanceKind::Tag::MC:
        case DistanceKind::Tag::SC:
        case DistanceKind::Tag::LC:
            points_.assign(s.points().begin(), s.points().end());
            break;
        case DistanceKind::Tag::MDF:
            points_ = resample_points(s, kind.points);
            break;
        case DistanceKind::Tag::PDM:
            require_sigma(kind.sigma);
            points_ = sorted_points(s.points());
            self_inner_ = pdm_cross(points_, points_, kind.sigma);
            break;
        case DistanceKind::Tag::VARIFOLDS:
            require_sigma(kind.sigma);
            segments_ = canonical_segments(s);
            tangent_norms_ = tangent_norms(segments_);
            self_inner_ = varifolds_cross(segments_, tangent_norms_, segments_, tangent_norms_, kind.sigma);
            break;
    }
}

double distance(const PreparedStreamline& a, const PreparedStreamline& b) {
    if (!(a.kind_ == b.kind_)) {
        throw Error(Errc::KindMismatch, "operands prepared for " + a.kind_.name() + " and " + b.kind_.name());
    }
    const DistanceKind& kind = a.kind_;
    switch (kind.tag) {
        case DistanceKind::Tag::MC: {
            const auto [ab, ba] = closest_means(a.points_, b.points_);
            return (ab + ba) / 2.0;
        }
        case DistanceKind::Tag::SC: {
            const auto [ab, ba] = closest_means(a.points_, b.points_);
            return std::min(ab, ba);
        }
        case DistanceKind::Tag::LC: {
            const auto [ab, ba] = closest_means(a.points_, b.points_);
            return std::max(ab, ba);
        }
        case DistanceKind::Tag::MDF:
            return mdf_resampled(a.points_, b.points_);
        case DistanceKind::Tag::PDM:
            return kernel_distance(a.self_inner_, b.self_inner_, pdm_cross_ordered(a.points_, b.points_, kind.sigma));
        case DistanceKind::Tag::VARIFOLDS:
            return kernel_distance(a.self_inner_, b.self_inner_,
                                   varifolds_cross_ordered(a.segments_, a.tangent_norms_, b.segments_, b.tangent_norms_,
                                                   kind.sigma));
    }
    return 0.0;
}

double distance(const DistanceKind& kind, const Streamline& a, const Streamline& b) {
    switch (kind.tag) {
        case DistanceKind::Tag::MC: return d_mc(a, b);
        case DistanceKind::Tag::SC: return d_sc(a, b);
        case DistanceKind::Tag::LC: return d_lc(a, b);
        case DistanceKind::Tag::MDF: return d_mdf(a, b, kind.points);
        case DistanceKind::Tag::PDM: return d_pdm(a, b, kind.sigma);
        case DistanceKind::Tag::VARIFOLDS: return d_varifolds(a, b, kind.sigma);
    }
    return 0.0;
}

}  // namespace tractdist
