#include "tractdist/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

#include "tractdist/error.hpp"
#include "tractdist/parallel.hpp"

namespace tractdist {

TargetIndex build_target_index(const Tractogram& target, const DistanceKind& kind, const EmbeddingParams& params) {
    PrototypeSet protos = select_prototypes_sff(target, kind, params.prototypes, params.subset_size, params.seed);
    EmbeddedTractogram embedded = embed_tractogram(target, protos, target, kind);
    KdTree tree(embedded);
    return TargetIndex{std::move(protos), std::move(embedded), std::move(tree)};
}

SegmentationResult segment(const BundleRef& example, const Tractogram& example_tractogram,
                           const EmbeddedTractogram& target_embedded, const KdTree& target_tree,
                           const Tractogram& protos_source, const DistanceKind& kind, const std::string& target_id) {
    if (example.empty()) {
        throw Error(Errc::EmptyExampleBundle, "example bundle has no streamlines");
    }
    if (!(kind == target_embedded.kind) || !(kind == target_embedded.prototypes.kind)) {
        throw Error(Errc::KindMismatch,
                    "query kind " + kind.name() + " differs from target embedding kind " + target_embedded.kind.name());
    }
    if (target_tree.dimension() != target_embedded.cols) {
        throw Error(Errc::DimensionMismatch, "k-d tree dimension differs from the target embedding");
    }
    if (example.indices().back() >= example_tractogram.size()) {
        throw Error(Errc::IndexOutOfRange, "example bundle refers past the end of its tractogram");
    }

    const PrototypeEmbedder embedder(target_embedded.prototypes, protos_source, kind);
    const auto indices = example.indices();

    SegmentationResult result;
    result.kind = kind;
    result.prototype_count = target_embedded.cols;
    result.example = example;
    result.per_query.resize(indices.size());

    parallel_for(indices.size(), [&](std::size_t q) {
        const DissimilarityVector v = embedder(example_tractogram[indices[q]]);
        const NearestResult nn = target_tree.nearest(v);
        result.per_query[q] = QueryMatch{indices[q], nn.id, nn.distance};
    });

    std::vector<std::size_t> hits;
    hits.reserve(result.per_query.size());
    for (const QueryMatch& m : result.per_query) {
        ++result.multiplicity[m.target_index];
        hits.push_back(m.target_index);
    }
    result.predicted = BundleRef(target_id, std::move(hits), target_embedded.rows);
    return result;
}

SegmentationResult segment(const BundleRef& example, const Tractogram& example_tractogram,
                           const TargetIndex& target, const Tractogram& target_tractogram,
                           const DistanceKind& kind, const std::string& target_id) {
    return segment(example, example_tractogram, target.embedded, target.tree, target_tractogram, kind, target_id);
}

void VoxelGrid::validate() const {
    if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
        throw Error(Errc::InvalidParameter, "voxel size must be positive and finite");
    }
    if (!is_finite(origin)) {
        throw Error(Errc::NonFiniteCoordinate, "voxel grid origin is not finite");
    }
}

Voxel voxel_of(const Point3& p, const VoxelGrid& grid) {
    return {static_cast<std::int64_t>(std::floor((p.x - grid.origin.x) / grid.voxel_size)),
            static_cast<std::int64_t>(std::floor((p.y - grid.origin.y) / grid.voxel_size)),
            static_cast<std::int64_t>(std::floor((p.z - grid.origin.z) / grid.voxel_size))};
}

VoxelSet voxelize(const Streamline& s, const VoxelGrid& grid) {
    grid.validate();
    const double step = grid.voxel_size / 2.0;
    const auto pts = s.points();

    VoxelSet out;
    out.insert(voxel_of(pts.front(), grid));

    // Walk the polyline continuously: `next` is the arc position of the next
    // sample measured from the start of the current segment.
    double next = step;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const Vec3 dir = pts[i] - pts[i - 1];
        const double len = norm(dir);
        while (next <= len) {
            out.insert(voxel_of(pts[i - 1] + dir * (next / len), grid));
            next += step;
        }
        next -= len;
    }
    out.insert(voxel_of(pts.back(), grid));
    return out;
}

VoxelSet voxelize(const BundleRef& b, const Tractogram& t, const VoxelGrid& grid) {
    VoxelSet out;
    for (const std::size_t idx : b.indices()) {
        if (idx >= t.size()) {
            throw Error(Errc::IndexOutOfRange, "bundle index " + std::to_string(idx) + " out of range");
        }
        out.merge(voxelize(t[idx], grid));
    }
    return out;
}

double dsc(const VoxelSet& a, const VoxelSet& b) {
    if (a.empty() && b.empty()) {
        throw Error(Errc::BothEmpty, "Dice coefficient of two empty voxel sets is undefined");
    }
    std::size_t shared = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++shared;
            ++ia;
            ++ib;
        }
    }
    return 2.0 * static_cast<double>(shared) / static_cast<double>(a.size() + b.size());
}

}  // namespace tractdist
