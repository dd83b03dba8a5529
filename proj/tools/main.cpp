#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "tractdist/bench.hpp"
#include "tractdist/error.hpp"
#include "tractdist/io.hpp"
#include "tractdist/parallel.hpp"
#include "tractdist/random.hpp"

namespace fs = std::filesystem;
using namespace tractdist;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitContract = 4;

struct Globals {
    std::uint64_t seed = 42;
    std::size_t threads = 0;
    double sigma = 42.0;
    std::size_t prototypes = kDefaultPrototypes;
    double voxel_size = 1.25;
    std::string out;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// "pdm" and "var" take their bandwidth from --sigma; anything else must be canonical.
DistanceKind kind_from(const std::string& text, double sigma) {
    if (text == "pdm") return DistanceKind::pdm(sigma);
    if (text == "var" || text == "varifolds") return DistanceKind::varifolds(sigma);
    try {
        return DistanceKind::parse(text);
    } catch (const Error& e) {
        throw UsageError(std::string("--kind: ") + e.what());
    }
}

std::vector<DistanceKind> kinds_from(const std::string& list, double sigma) {
    if (list == "all") {
        auto kinds = default_kinds();
        for (auto& k : kinds) {
            if (k.tag == DistanceKind::Tag::PDM) k = DistanceKind::pdm(sigma);
            if (k.tag == DistanceKind::Tag::VARIFOLDS) k = DistanceKind::varifolds(sigma);
        }
        return kinds;
    }
    std::vector<DistanceKind> kinds;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) kinds.push_back(kind_from(item, sigma));
    }
    if (kinds.empty()) throw UsageError("no distance kinds given");
    return kinds;
}

std::vector<std::size_t> index_list(const std::string& text, std::size_t bound) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t v = 0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
            throw UsageError("bad index '" + item + "'");
        }
        if (v >= bound) {
            throw Error(Errc::IndexOutOfRange, "index " + item + " outside tractogram of " + std::to_string(bound));
        }
        out.push_back(v);
    }
    return out;
}

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i;
    return out;
}

void emit(const Globals& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
    } else {
        io::write_text(g.out, text);
    }
}

std::string format_real(double v) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

EmbeddingParams embedding_params(const Globals& g) {
    EmbeddingParams p;
    p.prototypes = g.prototypes;
    p.seed = g.seed;
    return p;
}

// --- subcommands -----------------------------------------------------------

struct SynthArgs {
    std::string spec;
    std::string dir = ".";
    std::string name = "subject";
    bool builtin = false;
};

int run_synth(const Globals& g, const SynthArgs& a) {
    io::SynthSpec spec;
    if (a.builtin) {
        spec.bundles = default_benchmark_specs();
        spec.noise_streamlines = kDefaultNoiseStreamlines;
    } else {
        if (a.spec.empty()) throw UsageError("synth needs a spec file or --builtin");
        spec = io::read_synth_spec(a.spec);
    }
    SyntheticSubject subject = generate_subject(spec.bundles, spec.noise_streamlines, g.seed);
    if (spec.perturb_sigma > 0.0) {
        subject = perturb_subject(subject, spec.perturb_sigma, splitmix64(g.seed));
    }
    subject.tractogram.voxel_size = spec.voxel_size;

    fs::create_directories(a.dir);
    const std::string trgx_name = a.name + ".trgx";
    io::write_tractogram(subject.tractogram, fs::path(a.dir) / trgx_name);
    for (const auto& [bundle, ref] : subject.truth) {
        const BundleRef named(trgx_name, {ref.indices().begin(), ref.indices().end()}, subject.tractogram.size());
        io::write_bundle(named, bundle, fs::path(a.dir) / (a.name + "." + bundle + ".json"));
    }
    std::cerr << "wrote " << subject.tractogram.size() << " streamlines and " << subject.truth.size()
              << " bundles to " << a.dir << "\n";
    return 0;
}

struct DistArgs {
    std::string a;
    std::string b;
    std::string kind;
    std::string rows;
    std::string cols;
};

int run_dist(const Globals& g, const DistArgs& d) {
    const Tractogram ta = io::read_tractogram(d.a);
    const Tractogram tb = d.b.empty() ? ta : io::read_tractogram(d.b);
    const DistanceKind kind = kind_from(d.kind, g.sigma);
    const auto rows = d.rows.empty() ? all_indices(ta.size()) : index_list(d.rows, ta.size());
    const auto cols = d.cols.empty() ? all_indices(tb.size()) : index_list(d.cols, tb.size());

    std::vector<PreparedStreamline> prepared_cols;
    prepared_cols.reserve(cols.size());
    for (const auto j : cols) prepared_cols.emplace_back(kind, tb[j]);
    std::vector<double> matrix(rows.size() * cols.size());
    parallel_for(rows.size(), [&](std::size_t r) {
        const PreparedStreamline p(kind, ta[rows[r]]);
        for (std::size_t c = 0; c < cols.size(); ++c) matrix[r * cols.size() + c] = distance(p, prepared_cols[c]);
    });

    std::ostringstream os;
    os << "index";
    for (const auto j : cols) os << ',' << j;
    os << '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
        os << rows[r];
        for (std::size_t c = 0; c < cols.size(); ++c) os << ',' << format_real(matrix[r * cols.size() + c]);
        os << '\n';
    }
    emit(g, os.str());
    return 0;
}

struct EmbedArgs {
    std::string input;
    std::string kind;
    std::size_t subset = kDefaultSubsetSize;
};

int run_embed(const Globals& g, const EmbedArgs& e) {
    if (g.out.empty()) throw UsageError("embed needs --out <file.embd>");
    const Tractogram t = io::read_tractogram(e.input);
    const DistanceKind kind = kind_from(e.kind, g.sigma);
    const auto protos = select_prototypes_sff(t, kind, g.prototypes, std::max(e.subset, g.prototypes), g.seed);
    io::write_embedding(embed_tractogram(t, protos, t, kind), g.out);
    return 0;
}

struct SegmentArgs {
    std::string example;
    std::string bundle;
    std::string target;
    std::string target_embedding;
    std::string kind;
};

int run_segment(const Globals& g, const SegmentArgs& s) {
    const Tractogram example = io::read_tractogram(s.example);
    const Tractogram target = io::read_tractogram(s.target);
    const auto named = io::read_bundle(s.bundle, example.size());
    const DistanceKind kind = kind_from(s.kind, g.sigma);
    const std::string target_id = fs::path(s.target).filename().string();

    SegmentationResult result;
    if (s.target_embedding.empty()) {
        const TargetIndex index = build_target_index(target, kind, embedding_params(g));
        result = segment(named.bundle, example, index, target, kind, target_id);
    } else {
        const EmbeddedTractogram embedded = io::read_embedding(s.target_embedding);
        if (!(embedded.kind == kind)) {
            throw Error(Errc::KindMismatch,
                        "embedding was built with " + embedded.kind.name() + ", requested " + kind.name());
        }
        if (embedded.rows != target.size()) {
            throw Error(Errc::HeaderMismatch, "embedding has " + std::to_string(embedded.rows) +
                                                  " rows but the target holds " + std::to_string(target.size()) +
                                                  " streamlines");
        }
        const KdTree tree(embedded);
        result = segment(named.bundle, example, embedded, tree, target, kind, target_id);
    }
    emit(g, io::encode_segmentation(result));
    return 0;
}

struct DscArgs {
    std::string a;
    std::string b;
    std::string tractogram;
};

int run_dsc(const Globals& g, const DscArgs& d) {
    const Tractogram t = io::read_tractogram(d.tractogram);
    const VoxelGrid grid{t.origin, g.voxel_size};
    grid.validate();
    const BundleRef a = io::read_index_set(d.a, t.size());
    const BundleRef b = io::read_index_set(d.b, t.size());
    emit(g, format_real(dsc(voxelize(a, t, grid), voxelize(b, t, grid))) + "\n");
    return 0;
}

struct BenchArgs {
    std::string mode = "dsc";
    std::size_t subjects = 5;
    std::string kinds = "all";
    std::size_t pairs = 90000;
    std::size_t repetitions = 5;
    bool pipeline = false;
};

std::vector<SyntheticSubject> bench_subjects(const Globals& g, std::size_t count) {
    if (count < 2) throw UsageError("need at least 2 subjects");
    return default_benchmark_subjects(count, g.seed);
}

int run_agreement_cmd(const Globals& g, const BenchArgs& b) {
    const auto subjects = bench_subjects(g, b.subjects);
    const auto m =
        run_agreement(subjects, all_ordered_pairs(subjects.size()), kinds_from(b.kinds, g.sigma), embedding_params(g));
    std::ostringstream os;
    write_agreement_csv(os, m);
    emit(g, os.str());
    return 0;
}

int run_bench(const Globals& g, const BenchArgs& b) {
    const auto kinds = kinds_from(b.kinds, g.sigma);
    std::ostringstream os;
    if (b.mode == "dsc") {
        const auto subjects = bench_subjects(g, b.subjects);
        const VoxelGrid grid{{}, g.voxel_size};
        write_dsc_csv(os, run_dsc_experiment(subjects, all_ordered_pairs(subjects.size()), kinds, grid,
                                             embedding_params(g)));
    } else if (b.mode == "timing") {
        if (b.pipeline) {
            const auto subjects = bench_subjects(g, 2);
            write_timing_csv(os, run_pipeline_timing(subjects[0], subjects[1], kinds, embedding_params(g)));
        } else {
            TimingParams p;
            p.pair_count = b.pairs;
            p.repetitions = b.repetitions;
            p.seed = g.seed;
            write_timing_csv(os, run_timing(kinds, p));
        }
    } else if (b.mode == "agreement") {
        return run_agreement_cmd(g, b);
    } else {
        throw UsageError("unknown bench mode '" + b.mode + "'");
    }
    emit(g, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streamline distance comparison toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (default: hardware count)")
        ->check(CLI::PositiveNumber);
    app.add_option("--sigma", g.sigma, "Kernel bandwidth for pdm/var in mm")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--prototypes", g.prototypes, "Number of SFF prototypes")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--voxel-size", g.voxel_size, "Voxel edge in mm")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--out", g.out, "Output file (default: stdout for text output)");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic subject (TRGX + bundle JSONs)");
    synth->add_option("spec", synth_args.spec, "Subject spec JSON");
    synth->add_flag("--builtin", synth_args.builtin, "Use the built-in benchmark layout");
    synth->add_option("--dir", synth_args.dir, "Output directory")->capture_default_str();
    synth->add_option("--name", synth_args.name, "File name stem")->capture_default_str();

    DistArgs dist_args;
    auto* dist = app.add_subcommand("dist", "Print a distance matrix as CSV");
    dist->add_option("a", dist_args.a, "Tractogram")->required();
    dist->add_option("b", dist_args.b, "Second tractogram (default: the first)");
    dist->add_option("--kind", dist_args.kind, "Distance kind")->required();
    dist->add_option("--rows", dist_args.rows, "Comma-separated row indices");
    dist->add_option("--cols", dist_args.cols, "Comma-separated column indices");

    EmbedArgs embed_args;
    auto* embed_cmd = app.add_subcommand("embed", "Select prototypes and write the dissimilarity embedding");
    embed_cmd->add_option("input", embed_args.input, "Tractogram")->required();
    embed_cmd->add_option("--kind", embed_args.kind, "Distance kind")->required();
    embed_cmd->add_option("--subset", embed_args.subset, "SFF candidate subset size")->capture_default_str();

    SegmentArgs segment_args;
    auto* segment_cmd = app.add_subcommand("segment", "Transfer an example bundle to a target tractogram");
    segment_cmd->add_option("example", segment_args.example, "Example tractogram")->required();
    segment_cmd->add_option("bundle", segment_args.bundle, "Example bundle JSON")->required();
    segment_cmd->add_option("target", segment_args.target, "Target tractogram")->required();
    segment_cmd->add_option("--embedding", segment_args.target_embedding, "Precomputed target embedding (EMBD)");
    segment_cmd->add_option("--kind", segment_args.kind, "Distance kind")->required();

    DscArgs dsc_args;
    auto* dsc_cmd = app.add_subcommand("dsc", "Dice overlap of two bundles or results");
    dsc_cmd->add_option("a", dsc_args.a, "Bundle or result JSON")->required();
    dsc_cmd->add_option("b", dsc_args.b, "Bundle or result JSON")->required();
    dsc_cmd->add_option("tractogram", dsc_args.tractogram, "Tractogram both refer to")->required();

    BenchArgs agreement_args;
    auto* agreement = app.add_subcommand("agreement", "Nearest-neighbor agreement matrix on the synthetic benchmark");
    agreement->add_option("--subjects", agreement_args.subjects, "Subject count")->capture_default_str();
    agreement->add_option("--kinds", agreement_args.kinds, "Comma-separated kinds or 'all'")->capture_default_str();

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "Benchmark drivers (dsc, timing, agreement)");
    bench->add_option("mode", bench_args.mode, "dsc | timing | agreement")
        ->check(CLI::IsMember({"dsc", "timing", "agreement"}))
        ->capture_default_str();
    bench->add_option("--subjects", bench_args.subjects, "Subject count")->capture_default_str();
    bench->add_option("--kinds", bench_args.kinds, "Comma-separated kinds or 'all'")->capture_default_str();
    bench->add_option("--pairs", bench_args.pairs, "Distance evaluations per kind (timing)")->capture_default_str();
    bench->add_option("--repetitions", bench_args.repetitions, "Timing repetitions")->capture_default_str();
    bench->add_flag("--pipeline", bench_args.pipeline, "Time the full segmentation pipeline instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    set_thread_count(g.threads > 0 ? g.threads : std::max(1U, std::thread::hardware_concurrency()));

    try {
        if (*synth) return run_synth(g, synth_args);
        if (*dist) return run_dist(g, dist_args);
        if (*embed_cmd) return run_embed(g, embed_args);
        if (*segment_cmd) return run_segment(g, segment_args);
        if (*dsc_cmd) return run_dsc(g, dsc_args);
        if (*agreement) return run_agreement_cmd(g, agreement_args);
        if (*bench) return run_bench(g, bench_args);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return category(e.code()) == ErrorCategory::Data ? kExitData : kExitContract;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitContract;
    }
    return kExitUsage;
}
