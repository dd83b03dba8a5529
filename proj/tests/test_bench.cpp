#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "support/oracles.hpp"
#include "tractdist/bench.hpp"
#include "tractdist/error.hpp"

using namespace tractdist;

namespace {

template <class F>
Errc error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return Errc::IoError;
}

std::vector<SyntheticSubject> small_subjects(std::size_t n) {
    auto specs = default_benchmark_specs();
    for (auto& [name, spec] : specs) spec.streamline_count = 25;
    const auto base = generate_subject(specs, 20, 3);
    std::vector<SyntheticSubject> out;
    for (std::size_t k = 0; k < n; ++k) out.push_back(perturb_subject(base, 1.0, 100 + k));
    return out;
}

const EmbeddingParams kSmall{20, 2000, 42};

}  // namespace

TEST_CASE("ordered pairs") {
    CHECK(all_ordered_pairs(3).size() == 6);
    CHECK(all_ordered_pairs(3, true).size() == 9);
    CHECK(all_ordered_pairs(1).empty());
    for (const auto& [a, b] : all_ordered_pairs(4)) CHECK(a != b);
}

TEST_CASE("DSC table shape, self pairs and order invariance") {
    const auto subjects = small_subjects(3);
    const std::vector<DistanceKind> kinds{DistanceKind::mc(), DistanceKind::mdf(12), DistanceKind::pdm(42.0)};
    const VoxelGrid grid{{0, 0, 0}, 1.25};

    const auto self = run_dsc_experiment(subjects, {{1, 1}}, kinds, grid, kSmall);
    CHECK(self.rows.size() == 3);
    for (const auto& [name, cells] : self.rows) {
        REQUIRE(cells.size() == kinds.size());
        for (const auto& c : cells) {
            CHECK(c.mean == 1.0);
            CHECK(c.std == 0.0);
            CHECK(c.trials == 1);
        }
    }

    auto pairs = all_ordered_pairs(3);
    const auto forward = run_dsc_experiment(subjects, pairs, kinds, grid, kSmall);
    std::reverse(pairs.begin(), pairs.end());
    const auto backward = run_dsc_experiment(subjects, pairs, kinds, grid, kSmall);
    for (const auto& [name, cells] : forward.rows) {
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            CHECK(cells[k].mean == backward.rows.at(name)[k].mean);
            CHECK(cells[k].std == backward.rows.at(name)[k].std);
            CHECK(cells[k].trials == 6);
            CHECK(cells[k].mean > 0.0);
            CHECK(cells[k].mean <= 1.0);
        }
    }
    double col = 0;
    for (const auto& [name, cells] : forward.rows) col += cells[1].mean;
    CHECK(forward.column_mean(1) == doctest::Approx(col / 3));
}

TEST_CASE("agreement matrix") {
    const auto subjects = small_subjects(2);
    const std::vector<DistanceKind> kinds{DistanceKind::mc(), DistanceKind::mdf(12), DistanceKind::mdf(20),
                                          DistanceKind::varifolds(42.0)};
    const auto m = run_agreement(subjects, all_ordered_pairs(2), kinds, kSmall);
    CHECK(m.query_count == 2 * 75);
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        CHECK(m.at(i, i) == 1.0);
        for (std::size_t j = 0; j < kinds.size(); ++j) {
            CHECK(m.at(i, j) == m.at(j, i));
            CHECK(m.at(i, j) >= 0.0);
            CHECK(m.at(i, j) <= 1.0);
            // Values are match counts over the query count.
            const double scaled = m.at(i, j) * static_cast<double>(m.query_count);
            CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-9));
        }
    }
}

TEST_CASE("forced agreement on a two-streamline target") {
    SyntheticSubject s;
    s.tractogram.streamlines = {Streamline::build({{0, 0, 0}, {10, 0, 0}, {20, 0, 0}}),
                                Streamline::build({{0, 80, 0}, {10, 80, 5}, {20, 80, 0}})};
    s.truth.emplace("b", BundleRef("b", {0}, 2));
    const auto kinds = default_kinds();
    const auto m = run_agreement({s, s}, all_ordered_pairs(2), kinds, EmbeddingParams{2, 2000, 1});
    CHECK(m.query_count == 2);
    for (std::size_t i = 0; i < kinds.size(); ++i)
        for (std::size_t j = 0; j < kinds.size(); ++j) CHECK(m.at(i, j) == 1.0);

    CHECK(error_of([&] { (void)run_agreement({s, s}, {}, kinds, EmbeddingParams{2, 2000, 1}); }) == Errc::NoQueries);
}

TEST_CASE("timing") {
    const auto pool = timing_streamlines(50, 20, 100, 7);
    REQUIRE(pool.size() == 50);
    for (const auto& s : pool) {
        CHECK(s.size() >= 20);
        CHECK(s.size() <= 100);
    }
    CHECK(timing_streamlines(50, 20, 100, 7) == pool);

    TimingParams params;
    params.pair_count = 200;
    params.repetitions = 3;
    const std::vector<DistanceKind> kinds{DistanceKind::mdf(12), DistanceKind::mc()};
    const auto rows = run_timing(kinds, params);
    REQUIRE(rows.size() == 2);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].kind == kinds[k]);
        CHECK(rows[k].pair_count == 200);
        CHECK(rows[k].wall_seconds > 0.0);
        CHECK(rows[k].pairs_per_second == doctest::Approx(200.0 / rows[k].wall_seconds));
    }

    const auto subjects = small_subjects(2);
    const auto pipeline = run_pipeline_timing(subjects[0], subjects[1], kinds, kSmall);
    REQUIRE(pipeline.size() == 2);
    CHECK(pipeline[0].pair_count == 75);
}

TEST_CASE("csv output") {
    DscTable t;
    t.kinds = {DistanceKind::mc(), DistanceKind::pdm(42.0)};
    t.rows["arc"] = {{0.9, 0.01, 4}, {0.85, 0.02, 4}};
    std::ostringstream dsc;
    write_dsc_csv(dsc, t);
    std::istringstream lines(dsc.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "bundle,kind,mean_dsc,std_dsc,n");
    std::getline(lines, line);
    CHECK(line.rfind("arc,mc,0.9", 0) == 0);
    std::getline(lines, line);
    CHECK(line.rfind("arc,pdm-42.0,0.85", 0) == 0);

    std::ostringstream timing;
    write_timing_csv(timing, {{DistanceKind::mdf(12), 10, 0.5, 20}});
    CHECK(timing.str().rfind("kind,pairs,seconds,pairs_per_sec\nmdf-12,10,0.5,20", 0) == 0);

    AgreementMatrix m;
    m.kinds = {DistanceKind::mc(), DistanceKind::sc()};
    m.freq = {1, 0.25, 0.25, 1};
    m.query_count = 4;
    std::ostringstream agree;
    write_agreement_csv(agree, m);
    CHECK(agree.str() == "kind,mc,sc\nmc,1,0.25\nsc,0.25,1\n");
}
