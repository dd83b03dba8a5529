#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "tractdist/ann.hpp"
#include "tractdist/distances.hpp"
#include "tractdist/embedding.hpp"
#include "tractdist/model.hpp"

namespace tractdist {

/// Everything needed to answer nearest-neighbor queries against one target
/// tractogram for one distance kind.
struct TargetIndex {
    PrototypeSet prototypes;
    EmbeddedTractogram embedded;
    KdTree tree;
};

/// Selects prototypes on `target`, embeds it and builds the tree.
TargetIndex build_target_index(const Tractogram& target, const DistanceKind& kind, const EmbeddingParams& params);

struct QueryMatch {
    std::size_t example_index = 0;
    std::size_t target_index = 0;
    double embedded_distance = 0.0;

    friend bool operator==(const QueryMatch&, const QueryMatch&) = default;
};

struct SegmentationResult {
    DistanceKind kind;
    std::size_t prototype_count = 0;
    BundleRef example;
    BundleRef predicted;
    /// Target index -> number of example streamlines whose neighbor it is.
    std::map<std::size_t, std::size_t> multiplicity;
    /// One entry per example streamline, ordered by example index.
    std::vector<QueryMatch> per_query;
};

/// Nearest-neighbor transfer of an example bundle onto a target tractogram.
///
/// Each example streamline is embedded against the target's prototypes and
/// matched to its nearest target row in embedded space. The predicted bundle is
/// the set of matched target indices.
///
/// Throws EmptyExampleBundle, KindMismatch (kind differs from the embedding's)
/// or DimensionMismatch (tree built over a different dimension).
SegmentationResult segment(const BundleRef& example, const Tractogram& example_tractogram,
                           const EmbeddedTractogram& target_embedded, const KdTree& target_tree,
                           const Tractogram& protos_source, const DistanceKind& kind,
                           const std::string& target_id = {});

SegmentationResult segment(const BundleRef& example, const Tractogram& example_tractogram,
                           const TargetIndex& target, const Tractogram& target_tractogram,
                           const DistanceKind& kind, const std::string& target_id = {});

struct VoxelGrid {
    Point3 origin{};
    double voxel_size = 1.25;

    /// Throws InvalidParameter unless voxel_size is positive and finite.
    void validate() const;
};

using Voxel = std::array<std::int64_t, 3>;
using VoxelSet = std::set<Voxel>;

Voxel voxel_of(const Point3& p, const VoxelGrid& grid);

/// Voxels touched by a streamline sampled every voxel_size / 2 of arc length,
/// both endpoints included.
VoxelSet voxelize(const Streamline& s, const VoxelGrid& grid);
VoxelSet voxelize(const BundleRef& b, const Tractogram& t, const VoxelGrid& grid);

/// Dice similarity coefficient. Throws BothEmpty when both sets are empty.
double dsc(const VoxelSet& a, const VoxelSet& b);

}  // namespace tractdist
