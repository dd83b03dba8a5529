#include "tractdist/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "tractdist/error.hpp"
#include "tractdist/random.hpp"

namespace tractdist {

namespace {

using Clock = std::chrono::steady_clock;

struct TrialKey {
    std::size_t example_subject;
    std::size_t target_subject;
    friend auto operator<=>(const TrialKey&, const TrialKey&) = default;
};

DscCell summarize(const std::map<TrialKey, double>& values) {
    DscCell cell;
    cell.trials = values.size();
    if (values.empty()) {
        return cell;
    }
    double sum = 0.0;
    for (const auto& [key, v] : values) {
        sum += v;
    }
    cell.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (const auto& [key, v] : values) {
            sq += (v - cell.mean) * (v - cell.mean);
        }
        cell.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
    }
    return cell;
}

std::string format_real(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

}  // namespace

std::vector<SubjectPair> all_ordered_pairs(std::size_t subject_count, bool include_self) {
    std::vector<SubjectPair> pairs;
    for (std::size_t a = 0; a < subject_count; ++a) {
        for (std::size_t b = 0; b < subject_count; ++b) {
            if (a != b || include_self) {
                pairs.emplace_back(a, b);
            }
        }
    }
    return pairs;
}

double DscTable::column_mean(std::size_t k) const {
    if (rows.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& [bundle, cells] : rows) {
        sum += cells[k].mean;
    }
    return sum / static_cast<double>(rows.size());
}

ExperimentResult run_experiment(const std::vector<SyntheticSubject>& subjects, const std::vector<SubjectPair>& pairs,
                                const std::vector<DistanceKind>& kinds, const VoxelGrid& grid,
                                const EmbeddingParams& params) {
    grid.validate();
    for (const auto& [a, b] : pairs) {
        if (a >= subjects.size() || b >= subjects.size()) {
            throw Error(Errc::IndexOutOfRange, "subject pair refers to a missing subject");
        }
    }

    // Queries in a fixed order: pair, then bundle name, then example index.
    std::size_t query_count = 0;
    for (const auto& [a, b] : pairs) {
        for (const auto& [name, bundle] : subjects[a].truth) {
            if (subjects[b].truth.contains(name)) {
                query_count += bundle.size();
            }
        }
    }
    if (query_count == 0) {
        throw Error(Errc::NoQueries, "experiment has no example streamlines to query");
    }

    const std::size_t k_count = kinds.size();
    std::vector<std::vector<std::size_t>> choices(k_count, std::vector<std::size_t>(query_count));
    std::map<std::string, std::vector<std::map<TrialKey, double>>> dsc_values;

    std::map<std::pair<std::size_t, std::size_t>, VoxelSet> truth_voxels;  // (subject, bundle ordinal)

    for (std::size_t k = 0; k < k_count; ++k) {
        std::map<std::size_t, TargetIndex> indices;
        std::size_t q = 0;
        for (const auto& [a, b] : pairs) {
            auto it = indices.find(b);
            if (it == indices.end()) {
                it = indices.emplace(b, build_target_index(subjects[b].tractogram, kinds[k], params)).first;
            }
            const TargetIndex& target = it->second;
            for (const auto& [name, bundle] : subjects[a].truth) {
                const auto truth_it = subjects[b].truth.find(name);
                if (truth_it == subjects[b].truth.end()) {
                    continue;
                }
                const SegmentationResult res =
                    segment(bundle, subjects[a].tractogram, target, subjects[b].tractogram, kinds[k], name);
                for (const QueryMatch& m : res.per_query) {
                    choices[k][q++] = m.target_index;
                }
                const VoxelSet predicted = voxelize(res.predicted, subjects[b].tractogram, grid);
                const VoxelSet truth = voxelize(truth_it->second, subjects[b].tractogram, grid);
                auto& per_kind = dsc_values[name];
                per_kind.resize(k_count);
                per_kind[k][TrialKey{a, b}] = dsc(predicted, truth);
            }
        }
    }

    ExperimentResult result;
    result.dsc.kinds = kinds;
    for (const auto& [name, per_kind] : dsc_values) {
        std::vector<DscCell> cells;
        cells.reserve(k_count);
        for (const auto& values : per_kind) {
            cells.push_back(summarize(values));
        }
        result.dsc.rows.emplace(name, std::move(cells));
    }

    AgreementMatrix& agree = result.agreement;
    agree.kinds = kinds;
    agree.query_count = query_count;
    agree.freq.assign(k_count * k_count, 0.0);
    for (std::size_t i = 0; i < k_count; ++i) {
        agree.freq[i * k_count + i] = 1.0;
        for (std::size_t j = i + 1; j < k_count; ++j) {
            std::size_t same = 0;
            for (std::size_t q = 0; q < query_count; ++q) {
                same += choices[i][q] == choices[j][q] ? 1 : 0;
            }
            const double f = static_cast<double>(same) / static_cast<double>(query_count);
            agree.freq[i * k_count + j] = f;
            agree.freq[j * k_count + i] = f;
        }
    }
    return result;
}

DscTable run_dsc_experiment(const std::vector<SyntheticSubject>& subjects, const std::vector<SubjectPair>& pairs,
                            const std::vector<DistanceKind>& kinds, const VoxelGrid& grid,
                            const EmbeddingParams& params) {
    return run_experiment(subjects, pairs, kinds, grid, params).dsc;
}

AgreementMatrix run_agreement(const std::vector<SyntheticSubject>& subjects, const std::vector<SubjectPair>& pairs,
                              const std::vector<DistanceKind>& kinds, const EmbeddingParams& params) {
    return run_experiment(subjects, pairs, kinds, VoxelGrid{}, params).agreement;
}

std::vector<Streamline> timing_streamlines(std::size_t count, std::size_t min_points, std::size_t max_points,
                                           std::uint64_t seed) {
    if (min_points < 2 || max_points < min_points) {
        throw Error(Errc::InvalidParameter, "timing point range must satisfy 2 <= min <= max");
    }
    Rng rng(seed);
    std::vector<Streamline> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto n = static_cast<std::size_t>(rng.between(min_points, max_points));
        // Persistent random walk with ~2 mm steps starting inside a 60 mm cube.
        std::vector<Point3> pts;
        pts.reserve(n);
        Point3 p{rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0)};
        Vec3 dir = rng.normal_vec(1.0);
        for (std::size_t j = 0; j < n; ++j) {
            pts.push_back(p);
            dir += rng.normal_vec(0.3);
            const double len = norm(dir);
            dir = len > 0.0 ? dir * (1.0 / len) : Vec3{1.0, 0.0, 0.0};
            p += dir * 2.0;
        }
        out.push_back(Streamline::build(pts));
    }
    return out;
}

std::vector<TimingRow> run_timing(const std::vector<DistanceKind>& kinds, const TimingParams& params) {
    if (params.pair_count < 1 || params.repetitions < 1) {
        throw Error(Errc::InvalidParameter, "timing needs at least one pair and one repetition");
    }
    // Pairs are drawn from a bounded pool of streamlines so memory stays flat.
    const std::size_t pool_size = std::min<std::size_t>(2 * params.pair_count, 2000);
    const std::vector<Streamline> pool =
        timing_streamlines(pool_size, params.min_points, params.max_points, params.seed);
    std::vector<std::pair<std::size_t, std::size_t>> pairs(params.pair_count);
    Rng rng(splitmix64(params.seed));
    for (auto& [i, j] : pairs) {
        i = static_cast<std::size_t>(rng.below(pool_size));
        j = static_cast<std::size_t>(rng.below(pool_size));
    }

    // Repetitions are interleaved across kinds so transient machine load
    // affects every kind alike.
    std::vector<std::vector<double>> seconds(kinds.size());
    volatile double sink = 0.0;
    for (std::size_t r = 0; r < params.repetitions; ++r) {
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            double acc = 0.0;
            const auto start = Clock::now();
            for (const auto& [i, j] : pairs) {
                acc += distance(kinds[k], pool[i], pool[j]);
            }
            const auto stop = Clock::now();
            sink = sink + acc;
            seconds[k].push_back(std::chrono::duration<double>(stop - start).count());
        }
    }

    std::vector<TimingRow> rows;
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        std::vector<double>& s = seconds[k];
        std::sort(s.begin(), s.end());
        const double median = s.size() % 2 == 1 ? s[s.size() / 2] : 0.5 * (s[s.size() / 2 - 1] + s[s.size() / 2]);
        const double wall = std::max(median, 1e-9);
        rows.push_back(TimingRow{kinds[k], params.pair_count, wall, static_cast<double>(params.pair_count) / wall});
    }
    return rows;
}

std::vector<TimingRow> run_pipeline_timing(const SyntheticSubject& example, const SyntheticSubject& target,
                                           const std::vector<DistanceKind>& kinds, const EmbeddingParams& params) {
    std::vector<TimingRow> rows;
    for (const DistanceKind& kind : kinds) {
        std::size_t queries = 0;
        const auto start = Clock::now();
        const TargetIndex index = build_target_index(target.tractogram, kind, params);
        for (const auto& [name, bundle] : example.truth) {
            queries += segment(bundle, example.tractogram, index, target.tractogram, kind, name).per_query.size();
        }
        const double wall = std::max(std::chrono::duration<double>(Clock::now() - start).count(), 1e-9);
        rows.push_back(TimingRow{kind, std::max<std::size_t>(queries, 1), wall,
                                 static_cast<double>(std::max<std::size_t>(queries, 1)) / wall});
    }
    return rows;
}

void write_dsc_csv(std::ostream& os, const DscTable& table) {
    os << "bundle,kind,mean_dsc,std_dsc,n\n";
    for (const auto& [bundle, cells] : table.rows) {
        for (std::size_t k = 0; k < table.kinds.size(); ++k) {
            os << bundle << ',' << table.kinds[k].name() << ',' << format_real(cells[k].mean) << ','
               << format_real(cells[k].std) << ',' << cells[k].trials << '\n';
        }
    }
}

void write_timing_csv(std::ostream& os, const std::vector<TimingRow>& rows) {
    os << "kind,pairs,seconds,pairs_per_sec\n";
    for (const TimingRow& r : rows) {
        os << r.kind.name() << ',' << r.pair_count << ',' << format_real(r.wall_seconds) << ','
           << format_real(r.pairs_per_second) << '\n';
    }
}

void write_agreement_csv(std::ostream& os, const AgreementMatrix& m) {
    os << "kind";
    for (const DistanceKind& k : m.kinds) {
        os << ',' << k.name();
    }
    os << '\n';
    for (std::size_t i = 0; i < m.kinds.size(); ++i) {
        os << m.kinds[i].name();
        for (std::size_t j = 0; j < m.kinds.size(); ++j) {
            os << ',' << format_real(m.at(i, j));
        }
        os << '\n';
    }
}

}  // namespace tractdist
