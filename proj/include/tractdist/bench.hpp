#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tractdist/distances.hpp"
#include "tractdist/embedding.hpp"
#include "tractdist/segmentation.hpp"
#include "tractdist/synth.hpp"

namespace tractdist {

/// (example subject, target subject) index pair.
using SubjectPair = std::pair<std::size_t, std::size_t>;

/// Every ordered pair of distinct subjects, optionally with self pairs.
std::vector<SubjectPair> all_ordered_pairs(std::size_t subject_count, bool include_self = false);

struct AgreementMatrix {
    std::vector<DistanceKind> kinds;
    std::vector<double> freq;  // row-major K x K
    std::size_t query_count = 0;

    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return freq[i * kinds.size() + j]; }
};

struct DscCell {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, 0 for a single trial
    std::size_t trials = 0;
};

struct DscTable {
    std::vector<DistanceKind> kinds;
    /// Bundle name -> one cell per kind, aligned with `kinds`.
    std::map<std::string, std::vector<DscCell>> rows;

    /// Mean over bundles of the per-bundle mean, for column `k`.
    [[nodiscard]] double column_mean(std::size_t k) const;
};

struct TimingRow {
    DistanceKind kind;
    std::size_t pair_count = 0;
    double wall_seconds = 0.0;
    double pairs_per_second = 0.0;
};

struct ExperimentResult {
    DscTable dsc;
    AgreementMatrix agreement;
};

/// Runs nearest-neighbor segmentation of every truth bundle of the example
/// subject onto the target subject, for every pair and kind, through the
/// embedding + k-d tree pipeline. Target indices are built once per
/// (target, kind). Throws NoQueries if no example streamline is queried.
ExperimentResult run_experiment(const std::vector<SyntheticSubject>& subjects, const std::vector<SubjectPair>& pairs,
                                const std::vector<DistanceKind>& kinds, const VoxelGrid& grid,
                                const EmbeddingParams& params);

DscTable run_dsc_experiment(const std::vector<SyntheticSubject>& subjects, const std::vector<SubjectPair>& pairs,
                            const std::vector<DistanceKind>& kinds, const VoxelGrid& grid,
                            const EmbeddingParams& params);

/// Fraction of queries for which each pair of kinds picked the same target streamline.
AgreementMatrix run_agreement(const std::vector<SyntheticSubject>& subjects, const std::vector<SubjectPair>& pairs,
                              const std::vector<DistanceKind>& kinds, const EmbeddingParams& params);

struct TimingParams {
    std::size_t pair_count = 90000;
    std::size_t min_points = 20;
    std::size_t max_points = 100;
    std::size_t repetitions = 5;
    std::uint64_t seed = 42;
};

/// Random smooth streamlines of realistic length for timing runs.
std::vector<Streamline> timing_streamlines(std::size_t count, std::size_t min_points, std::size_t max_points,
                                           std::uint64_t seed);

/// Median wall time over repetitions of `pair_count` direct distance
/// evaluations per kind. Single-threaded.
std::vector<TimingRow> run_timing(const std::vector<DistanceKind>& kinds, const TimingParams& params);

/// Wall time of the full pipeline (prototype selection, embedding, tree build
/// and segmentation of every truth bundle) for one subject pair, per kind.
std::vector<TimingRow> run_pipeline_timing(const SyntheticSubject& example, const SyntheticSubject& target,
                                           const std::vector<DistanceKind>& kinds, const EmbeddingParams& params);

void write_dsc_csv(std::ostream& os, const DscTable& table);
void write_timing_csv(std::ostream& os, const std::vector<TimingRow>& rows);
void write_agreement_csv(std::ostream& os, const AgreementMatrix& m);

}  // namespace tractdist
