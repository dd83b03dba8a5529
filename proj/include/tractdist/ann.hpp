#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tractdist {

struct EmbeddedTractogram;

struct NearestResult {
    std::size_t id = 0;
    double distance = 0.0;
    /// Tree nodes touched by the query (diagnostic).
    std::size_t visited_nodes = 0;
};

/// Exact Euclidean 1-NN index over fixed-dimension vectors.
///
/// Nodes split at the median of the axis with the widest spread until a leaf
/// holds at most `kLeafSize` points. Immutable after construction, so any
/// number of threads may query concurrently.
class KdTree {
public:
    static constexpr std::size_t kLeafSize = 16;

    /// `vectors` is row-major, N rows of `dimension` values. Throws EmptyInput
    /// when N == 0 and DimensionMismatch when sizes disagree or a value is not finite.
    KdTree(std::span<const double> vectors, std::size_t dimension, std::span<const std::size_t> ids);

    /// Indexes all rows of an embedding with ids 0..N-1.
    explicit KdTree(const EmbeddedTractogram& embedded);

    /// Closest stored vector; equal distances resolve to the lowest id.
    /// Throws DimensionMismatch.
    [[nodiscard]] NearestResult nearest(std::span<const double> query) const;

    [[nodiscard]] std::size_t dimension() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
    [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }
    /// Levels from root to deepest leaf; a single leaf has depth 1.
    [[nodiscard]] std::size_t depth() const noexcept { return depth_; }

private:
    struct Node {
        std::size_t begin = 0;
        std::size_t end = 0;
        std::size_t axis = 0;
        double split = 0.0;
        // Children are absent for leaves.
        std::size_t left = 0;
        std::size_t right = 0;
        bool leaf = true;
    };

    std::size_t build_node(std::size_t begin, std::size_t end, std::size_t level);
    void search(std::size_t node, std::span<const double> query, NearestResult& best, double& best_d2) const;

    std::size_t dim_ = 0;
    std::vector<double> points_;     // permuted copy, row-major
    std::vector<std::size_t> ids_;  // id of each permuted row
    std::vector<Node> nodes_;
    std::size_t depth_ = 0;
};

}  // namespace tractdist
