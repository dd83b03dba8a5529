#include "tractdist/embedding.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "tractdist/error.hpp"
#include "tractdist/parallel.hpp"
#include "tractdist/random.hpp"

namespace tractdist {

namespace {

std::vector<std::size_t> draw_subset(std::size_t n, std::size_t k, std::uint64_t seed) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    if (k < n) {
        Rng rng(seed);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
    }
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace

PrototypeSet select_prototypes_sff(const Tractogram& t, const DistanceKind& kind, std::size_t d,
                                   std::size_t subset_size, std::uint64_t rng_seed) {
    if (d == 0) {
        throw Error(Errc::InvalidParameter, "prototype count must be >= 1");
    }
    if (d > t.size()) {
        throw Error(Errc::TooManyPrototypes, "requested " + std::to_string(d) + " prototypes from a tractogram of " +
                                                 std::to_string(t.size()) + " streamlines");
    }
    if (subset_size < d) {
        throw Error(Errc::InvalidParameter, "SFF subset size must be >= prototype count");
    }

    const std::vector<std::size_t> candidates = draw_subset(t.size(), std::min(subset_size, t.size()), rng_seed);
    const std::size_t n = candidates.size();

    std::vector<PreparedStreamline> prepared;
    prepared.reserve(n);
    for (const std::size_t idx : candidates) {
        prepared.emplace_back(kind, t[idx]);
    }

    // Full symmetric matrix from the upper triangle.
    std::vector<double> dist(n * n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            dist[i * n + j] = distance(prepared[i], prepared[j]);
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            dist[j * n + i] = dist[i * n + j];
        }
    }

    std::size_t first = 0;
    double best_total = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            total += dist[i * n + j];
        }
        if (total > best_total) {
            best_total = total;
            first = i;
        }
    }

    std::vector<bool> chosen(n, false);
    std::vector<double> min_dist(dist.begin() + static_cast<std::ptrdiff_t>(first * n),
                                 dist.begin() + static_cast<std::ptrdiff_t>((first + 1) * n));
    chosen[first] = true;

    PrototypeSet out{{candidates[first]}, kind};
    while (out.indices.size() < d) {
        std::size_t pick = n;
        double best = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!chosen[j] && min_dist[j] > best) {
                best = min_dist[j];
                pick = j;
            }
        }
        chosen[pick] = true;
        out.indices.push_back(candidates[pick]);
        for (std::size_t j = 0; j < n; ++j) {
            min_dist[j] = std::min(min_dist[j], dist[pick * n + j]);
        }
    }
    return out;
}

PrototypeEmbedder::PrototypeEmbedder(const PrototypeSet& protos, const Tractogram& source, const DistanceKind& kind)
    : kind_(kind) {
    if (!(protos.kind == kind)) {
        throw Error(Errc::KindMismatch,
                    "prototypes selected with " + protos.kind.name() + " cannot embed with " + kind.name());
    }
    prepared_.reserve(protos.size());
    for (const std::size_t idx : protos.indices) {
        if (idx >= source.size()) {
            throw Error(Errc::IndexOutOfRange, "prototype index " + std::to_string(idx) + " out of range");
        }
        prepared_.emplace_back(kind, source[idx]);
    }
}

void PrototypeEmbedder::embed_into(const Streamline& s, std::span<double> out) const {
    if (out.size() != prepared_.size()) {
        throw Error(Errc::DimensionMismatch, "output row has the wrong dimension");
    }
    const PreparedStreamline query(kind_, s);
    for (std::size_t j = 0; j < prepared_.size(); ++j) {
        out[j] = distance(query, prepared_[j]);
    }
}

DissimilarityVector PrototypeEmbedder::operator()(const Streamline& s) const {
    DissimilarityVector out(prepared_.size());
    embed_into(s, out);
    return out;
}

DissimilarityVector embed(const Streamline& s, const PrototypeSet& protos, const Tractogram& source,
                          const DistanceKind& kind) {
    return PrototypeEmbedder(protos, source, kind)(s);
}

EmbeddedTractogram embed_tractogram(const Tractogram& t, const PrototypeSet& protos, const Tractogram& source,
                                    const DistanceKind& kind) {
    const PrototypeEmbedder embedder(protos, source, kind);
    EmbeddedTractogram out;
    out.rows = t.size();
    out.cols = protos.size();
    out.values.assign(out.rows * out.cols, 0.0);
    out.prototypes = protos;
    out.kind = kind;
    parallel_for(t.size(), [&](std::size_t i) {
        embedder.embed_into(t[i], std::span<double>(out.values).subspan(i * out.cols, out.cols));
    });
    return out;
}

}  // namespace tractdist
