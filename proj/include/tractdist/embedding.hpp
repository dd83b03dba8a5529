#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tractdist/distances.hpp"
#include "tractdist/model.hpp"

namespace tractdist {

/// Prototype streamlines (indices into a source tractogram) and the distance
/// they were selected with.
struct PrototypeSet {
    std::vector<std::size_t> indices;
    DistanceKind kind;

    [[nodiscard]] std::size_t size() const noexcept { return indices.size(); }
    friend bool operator==(const PrototypeSet&, const PrototypeSet&) = default;
};

using DissimilarityVector = std::vector<double>;

/// Row-major N x d matrix of dissimilarity vectors.
struct EmbeddedTractogram {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    PrototypeSet prototypes;
    DistanceKind kind;

    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return std::span<const double>(values).subspan(i * cols, cols);
    }
    friend bool operator==(const EmbeddedTractogram&, const EmbeddedTractogram&) = default;
};

inline constexpr std::size_t kDefaultPrototypes = 40;
inline constexpr std::size_t kDefaultSubsetSize = 2000;

struct EmbeddingParams {
    std::size_t prototypes = kDefaultPrototypes;
    std::size_t subset_size = kDefaultSubsetSize;
    std::uint64_t seed = 42;
};

/// Subset farthest-first selection.
///
/// A uniform random subset of min(subset_size, N) candidates is drawn with
/// `rng_seed`. The first prototype is the candidate with the largest total
/// distance to the other candidates; every later one maximizes the minimum
/// distance to those already chosen. Ties go to the lowest streamline index.
///
/// Throws TooManyPrototypes when d > N and InvalidParameter when d == 0 or
/// subset_size < d.
PrototypeSet select_prototypes_sff(const Tractogram& t, const DistanceKind& kind, std::size_t d,
                                   std::size_t subset_size, std::uint64_t rng_seed);

/// Maps streamlines to their distances from a fixed set of prototypes, with the
/// prototypes prepared once.
class PrototypeEmbedder {
public:
    /// Throws KindMismatch if `kind` differs from the kind the prototypes were selected with.
    PrototypeEmbedder(const PrototypeSet& protos, const Tractogram& source, const DistanceKind& kind);

    [[nodiscard]] DissimilarityVector operator()(const Streamline& s) const;
    void embed_into(const Streamline& s, std::span<double> out) const;

    [[nodiscard]] std::size_t dimension() const noexcept { return prepared_.size(); }
    [[nodiscard]] const DistanceKind& kind() const noexcept { return kind_; }

private:
    DistanceKind kind_;
    std::vector<PreparedStreamline> prepared_;
};

DissimilarityVector embed(const Streamline& s, const PrototypeSet& protos, const Tractogram& source,
                          const DistanceKind& kind);

/// Embeds every streamline of `t`; rows are computed in parallel and the result
/// does not depend on the thread count.
EmbeddedTractogram embed_tractogram(const Tractogram& t, const PrototypeSet& protos, const Tractogram& source,
                                    const DistanceKind& kind);

}  // namespace tractdist
