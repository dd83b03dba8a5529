#include "tractdist/ann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "tractdist/embedding.hpp"
#include "tractdist/error.hpp"

namespace tractdist {

KdTree::KdTree(std::span<const double> vectors, std::size_t dimension, std::span<const std::size_t> ids)
    : dim_(dimension) {
    if (ids.empty()) {
        throw Error(Errc::EmptyInput, "cannot build a k-d tree from zero vectors");
    }
    if (dimension == 0 || vectors.size() != ids.size() * dimension) {
        throw Error(Errc::DimensionMismatch, "expected " + std::to_string(ids.size()) + " rows of dimension " +
                                                 std::to_string(dimension) + ", got " +
                                                 std::to_string(vectors.size()) + " values");
    }
    if (!std::all_of(vectors.begin(), vectors.end(), [](double v) { return std::isfinite(v); })) {
        throw Error(Errc::DimensionMismatch, "k-d tree input contains non-finite values");
    }

    const std::size_t n = ids.size();
    ids_.assign(ids.begin(), ids.end());
    points_.assign(vectors.begin(), vectors.end());
    nodes_.reserve(2 * (n / kLeafSize + 1));
    build_node(0, n, 1);
}

KdTree::KdTree(const EmbeddedTractogram& embedded)
    : KdTree(embedded.values, embedded.cols, [&] {
          std::vector<std::size_t> ids(embedded.rows);
          std::iota(ids.begin(), ids.end(), std::size_t{0});
          return ids;
      }()) {}

std::size_t KdTree::build_node(std::size_t begin, std::size_t end, std::size_t level) {
    const std::size_t index = nodes_.size();
    nodes_.push_back(Node{begin, end});
    depth_ = std::max(depth_, level);
    const std::size_t n = end - begin;
    if (n <= kLeafSize) {
        return index;
    }

    std::size_t axis = 0;
    double widest = -1.0;
    for (std::size_t a = 0; a < dim_; ++a) {
        double lo = points_[begin * dim_ + a];
        double hi = lo;
        for (std::size_t r = begin + 1; r < end; ++r) {
            const double v = points_[r * dim_ + a];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > widest) {
            widest = hi - lo;
            axis = a;
        }
    }

    // Order rows of [begin, end) by (coordinate on axis, id) and split at the median.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), begin);
    const std::size_t half = n / 2;
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half), order.end(),
                     [&](std::size_t l, std::size_t r) {
                         const double vl = points_[l * dim_ + axis];
                         const double vr = points_[r * dim_ + axis];
                         return vl < vr || (vl == vr && ids_[l] < ids_[r]);
                     });
    std::vector<double> rows(n * dim_);
    std::vector<std::size_t> row_ids(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::copy_n(points_.begin() + static_cast<std::ptrdiff_t>(order[k] * dim_), dim_,
                    rows.begin() + static_cast<std::ptrdiff_t>(k * dim_));
        row_ids[k] = ids_[order[k]];
    }
    std::copy(rows.begin(), rows.end(), points_.begin() + static_cast<std::ptrdiff_t>(begin * dim_));
    std::copy(row_ids.begin(), row_ids.end(), ids_.begin() + static_cast<std::ptrdiff_t>(begin));

    const std::size_t mid = begin + half;
    nodes_[index].leaf = false;
    nodes_[index].axis = axis;
    nodes_[index].split = points_[mid * dim_ + axis];
    const std::size_t left = build_node(begin, mid, level + 1);
    const std::size_t right = build_node(mid, end, level + 1);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
}

NearestResult KdTree::nearest(std::span<const double> query) const {
    if (query.size() != dim_) {
        throw Error(Errc::DimensionMismatch, "query has dimension " + std::to_string(query.size()) +
                                                 ", tree has " + std::to_string(dim_));
    }
    NearestResult best;
    best.id = ids_.front();
    double best_d2 = std::numeric_limits<double>::infinity();
    search(0, query, best, best_d2);
    best.distance = std::sqrt(best_d2);
    return best;
}

void KdTree::search(std::size_t node_index, std::span<const double> query, NearestResult& best,
                    double& best_d2) const {
    const Node& node = nodes_[node_index];
    ++best.visited_nodes;
    if (node.leaf) {
        for (std::size_t r = node.begin; r < node.end; ++r) {
            const double* row = points_.data() + r * dim_;
            double d2 = 0.0;
            for (std::size_t a = 0; a < dim_; ++a) {
                const double diff = query[a] - row[a];
                d2 += diff * diff;
            }
            if (d2 < best_d2 || (d2 == best_d2 && ids_[r] < best.id)) {
                best_d2 = d2;
                best.id = ids_[r];
            }
        }
        return;
    }
    const double diff = query[node.axis] - node.split;
    const std::size_t near = diff < 0.0 ? node.left : node.right;
    const std::size_t far = diff < 0.0 ? node.right : node.left;
    search(near, query, best, best_d2);
    // Equal bounds are still explored so a lower id at the same distance wins.
    if (diff * diff <= best_d2) {
        search(far, query, best, best_d2);
    }
}

}  // namespace tractdist
