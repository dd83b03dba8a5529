#pragma once

// Reference implementations used only by tests. They follow the textbook
// definitions with plain loops and share no code with the library's kernels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "tractdist/model.hpp"
#include "tractdist/random.hpp"

namespace oracle {

using tractdist::Point3;
using tractdist::Streamline;

inline double euclid(const Point3& a, const Point3& b) {
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

inline double mean_closest(const Streamline& a, const Streamline& b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size(); ++j) {
            best = std::min(best, euclid(a[i], b[j]));
        }
        total += best;
    }
    return total / static_cast<double>(a.size());
}

inline double mc(const Streamline& a, const Streamline& b) { return (mean_closest(a, b) + mean_closest(b, a)) / 2; }
inline double sc(const Streamline& a, const Streamline& b) { return std::min(mean_closest(a, b), mean_closest(b, a)); }
inline double lc(const Streamline& a, const Streamline& b) { return std::max(mean_closest(a, b), mean_closest(b, a)); }

/// Locates each arc-length checkpoint by scanning segments from the start.
inline std::vector<Point3> arc_walk(const Streamline& s, std::size_t m) {
    double total = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) total += euclid(s[i - 1], s[i]);
    std::vector<Point3> out;
    for (std::size_t k = 0; k < m; ++k) {
        const double target = total * static_cast<double>(k) / static_cast<double>(m - 1);
        double walked = 0.0;
        Point3 p = s.back();
        for (std::size_t i = 1; i < s.size(); ++i) {
            const double len = euclid(s[i - 1], s[i]);
            if (walked + len >= target) {
                const double t = (target - walked) / len;
                p = {s[i - 1].x + t * (s[i].x - s[i - 1].x), s[i - 1].y + t * (s[i].y - s[i - 1].y),
                     s[i - 1].z + t * (s[i].z - s[i - 1].z)};
                break;
            }
            walked += len;
        }
        out.push_back(p);
    }
    out.front() = s.front();
    out.back() = s.back();
    return out;
}

inline double mdf(const Streamline& a, const Streamline& b, std::size_t m) {
    const auto ra = arc_walk(a, m);
    const auto rb = arc_walk(b, m);
    double direct = 0.0;
    double flipped = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        direct += euclid(ra[i], rb[i]);
        flipped += euclid(ra[i], rb[m - 1 - i]);
    }
    return std::min(direct / static_cast<double>(m), flipped / static_cast<double>(m));
}

inline double gauss(const Point3& x, const Point3& y, double sigma) {
    const double d = euclid(x, y);
    return std::exp(-(d * d) / (sigma * sigma));
}

inline double pdm_inner(const Streamline& a, const Streamline& b, double sigma) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            sum += gauss(a[i], b[j], sigma);
        }
    }
    return sum / static_cast<double>(a.size() * b.size());
}

inline double pdm(const Streamline& a, const Streamline& b, double sigma) {
    const double sq = pdm_inner(a, a, sigma) + pdm_inner(b, b, sigma) - 2 * pdm_inner(a, b, sigma);
    return std::sqrt(std::max(0.0, sq));
}

inline double var_inner(const Streamline& a, const Streamline& b, double sigma) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        const Point3 pi{(a[i].x + a[i + 1].x) / 2, (a[i].y + a[i + 1].y) / 2, (a[i].z + a[i + 1].z) / 2};
        const Point3 ni{a[i + 1].x - a[i].x, a[i + 1].y - a[i].y, a[i + 1].z - a[i].z};
        const double li = euclid(a[i], a[i + 1]);
        for (std::size_t j = 0; j + 1 < b.size(); ++j) {
            const Point3 pj{(b[j].x + b[j + 1].x) / 2, (b[j].y + b[j + 1].y) / 2, (b[j].z + b[j + 1].z) / 2};
            const Point3 nj{b[j + 1].x - b[j].x, b[j + 1].y - b[j].y, b[j + 1].z - b[j].z};
            const double lj = euclid(b[j], b[j + 1]);
            const double cosine = (ni.x * nj.x + ni.y * nj.y + ni.z * nj.z) / (li * lj);
            sum += gauss(pi, pj, sigma) * cosine * cosine * li * lj;
        }
    }
    return sum;
}

inline double varifolds(const Streamline& a, const Streamline& b, double sigma) {
    const double sq = var_inner(a, a, sigma) + var_inner(b, b, sigma) - 2 * var_inner(a, b, sigma);
    return std::sqrt(std::max(0.0, sq));
}

/// Index and distance of the closest row by linear scan; ties to the lowest index.
inline std::pair<std::size_t, double> linear_nn(const std::vector<double>& rows, std::size_t dim,
                                                const std::vector<double>& q) {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r * dim < rows.size(); ++r) {
        double d2 = 0.0;
        for (std::size_t a = 0; a < dim; ++a) {
            const double diff = q[a] - rows[r * dim + a];
            d2 += diff * diff;
        }
        if (d2 < best_d2) {
            best_d2 = d2;
            best = r;
        }
    }
    return {best, std::sqrt(best_d2)};
}

inline std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = (static_cast<double>(i) + static_cast<double>(j)) / 2.0;
        i = j + 1;
    }
    return r;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(b.size());
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    return pearson(average_ranks(a), average_ranks(b));
}

/// Random smooth streamline with a point count in [lo, hi].
inline Streamline random_streamline(tractdist::Rng& rng, std::size_t lo = 5, std::size_t hi = 30,
                                    double step = 2.0) {
    const auto n = static_cast<std::size_t>(rng.between(lo, hi));
    std::vector<Point3> pts;
    Point3 p{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20)};
    Point3 dir = rng.normal_vec(1.0);
    for (std::size_t i = 0; i < n; ++i) {
        pts.push_back(p);
        dir += rng.normal_vec(0.5);
        p += dir * (step / tractdist::norm(dir));
    }
    return Streamline::build(pts);
}

/// Rotation about a random unit axis (Rodrigues) followed by a translation.
struct RigidMotion {
    double r[3][3];
    Point3 t;

    static RigidMotion random(tractdist::Rng& rng) {
        Point3 k = rng.normal_vec(1.0);
        k *= 1.0 / tractdist::norm(k);
        const double th = rng.uniform(0.0, 6.283185307179586);
        const double c = std::cos(th), s = std::sin(th), v = 1 - c;
        RigidMotion m{};
        m.r[0][0] = c + k.x * k.x * v;       m.r[0][1] = k.x * k.y * v - k.z * s; m.r[0][2] = k.x * k.z * v + k.y * s;
        m.r[1][0] = k.y * k.x * v + k.z * s; m.r[1][1] = c + k.y * k.y * v;       m.r[1][2] = k.y * k.z * v - k.x * s;
        m.r[2][0] = k.z * k.x * v - k.y * s; m.r[2][1] = k.z * k.y * v + k.x * s; m.r[2][2] = c + k.z * k.z * v;
        m.t = {rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)};
        return m;
    }

    Streamline apply(const Streamline& s) const {
        std::vector<Point3> out;
        for (const Point3& p : s.points()) {
            out.push_back({r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z + t.x,
                           r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z + t.y,
                           r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z + t.z});
        }
        return Streamline::build(out);
    }
};

}  // namespace oracle
