#include "tractdist/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>

#include <json.hpp>

#include "tractdist/error.hpp"

namespace tractdist::io {

namespace {

using nlohmann::json;

constexpr std::uint8_t kTrgxMagic[8] = {'T', 'R', 'G', 'X', 0, 0, 0, 1};
constexpr std::uint8_t kEmbdMagic[8] = {'E', 'M', 'B', 'D', 0, 0, 0, 1};
constexpr std::size_t kMaxKindName = 256;

class Writer {
public:
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : data_(bytes) {}

    [[nodiscard]] std::size_t remaining() const noexcept { return data_.size() - pos_; }

    void need(std::size_t n, const char* what) const {
        if (remaining() < n) {
            throw Error(Errc::TruncatedFile, std::string("file ends inside ") + what);
        }
    }
    void magic(const std::uint8_t (&expected)[8], const char* format) {
        const std::size_t avail = std::min<std::size_t>(remaining(), 8);
        if (std::memcmp(data_.data() + pos_, expected, avail) != 0) {
            throw Error(Errc::BadMagic, std::string("not a ") + format + " file");
        }
        need(8, "magic");
        pos_ += 8;
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }
    float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
    double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
    std::string text(std::size_t n, const char* what) {
        need(n, what);
        std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
        pos_ += n;
        return s;
    }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

float quantize(double v) {
    const auto f = static_cast<float>(v);
    if (!std::isfinite(f)) {
        throw Error(Errc::NonFiniteCoordinate, "value does not fit in single precision");
    }
    return f;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::MalformedJson, e.what());
    }
}

template <typename F>
auto json_guard(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw Error(Errc::MalformedJson, e.what());
    }
}

std::vector<std::size_t> index_list(const json& arr, const char* field) {
    if (!arr.is_array()) {
        throw Error(Errc::MalformedJson, std::string("'") + field + "' must be an array of integers");
    }
    std::vector<std::size_t> out;
    out.reserve(arr.size());
    for (const json& v : arr) {
        if (v.is_number_unsigned()) {
            out.push_back(v.get<std::size_t>());
        } else if (v.is_number_integer()) {
            throw Error(Errc::IndexOutOfRange, std::string("negative index in '") + field + "'");
        } else {
            throw Error(Errc::MalformedJson, std::string("'") + field + "' must contain integers");
        }
    }
    return out;
}

std::size_t bound_for(const std::vector<std::size_t>& indices, std::optional<std::size_t> size) {
    if (size) {
        return *size;
    }
    return indices.empty() ? 0 : *std::max_element(indices.begin(), indices.end()) + 1;
}

Point3 point_from(const json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw Error(Errc::InvalidSpec, "points must be [x, y, z] arrays");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Centerline centerline_from(const json& j) {
    Centerline c;
    const std::string type = j.at("type").get<std::string>();
    if (type == "arc") {
        c.shape = Centerline::Shape::Arc;
        c.center = point_from(j.value("center", json::array({0, 0, 0})));
        c.radius = j.at("radius").get<double>();
        c.start_deg = j.at("start_deg").get<double>();
        c.end_deg = j.at("end_deg").get<double>();
        c.axis_u = point_from(j.value("axis_u", json::array({1, 0, 0})));
        c.axis_v = point_from(j.value("axis_v", json::array({0, 1, 0})));
    } else if (type == "helix") {
        c.shape = Centerline::Shape::Helix;
        c.center = point_from(j.value("center", json::array({0, 0, 0})));
        c.radius = j.at("radius").get<double>();
        c.pitch = j.at("pitch").get<double>();
        c.turns = j.at("turns").get<double>();
    } else if (type == "polyline") {
        c.shape = Centerline::Shape::Polyline;
        for (const json& p : j.at("points")) {
            c.control_points.push_back(point_from(p));
        }
    } else {
        throw Error(Errc::InvalidSpec, "unknown centerline type '" + type + "'");
    }
    return c;
}

}  // namespace

std::vector<std::uint8_t> encode_tractogram(const Tractogram& t) {
    if (t.empty()) {
        throw Error(Errc::EmptyTractogram, "a TRGX file holds at least one streamline");
    }
    Writer w;
    w.bytes(kTrgxMagic);
    w.f32(quantize(t.voxel_size));
    w.f32(quantize(t.origin.x));
    w.f32(quantize(t.origin.y));
    w.f32(quantize(t.origin.z));
    w.u64(t.size());
    for (const Streamline& s : t.streamlines) {
        if (s.size() > std::numeric_limits<std::uint32_t>::max()) {
            throw Error(Errc::CountMismatch, "streamline has too many points for TRGX");
        }
        w.u32(static_cast<std::uint32_t>(s.size()));
        for (const Point3& p : s.points()) {
            w.f32(quantize(p.x));
            w.f32(quantize(p.y));
            w.f32(quantize(p.z));
        }
    }
    return w.take();
}

Tractogram decode_tractogram(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    r.magic(kTrgxMagic, "TRGX");
    Tractogram t;
    const float voxel = r.f32("header");
    const float ox = r.f32("header");
    const float oy = r.f32("header");
    const float oz = r.f32("header");
    if (!std::isfinite(voxel) || !std::isfinite(ox) || !std::isfinite(oy) || !std::isfinite(oz)) {
        throw Error(Errc::NonFiniteCoordinate, "header grid values are not finite");
    }
    if (!(voxel > 0.0F)) {
        throw Error(Errc::HeaderMismatch, "voxel size must be positive");
    }
    t.voxel_size = voxel;
    t.origin = {ox, oy, oz};

    const std::uint64_t n = r.u64("streamline count");
    if (n == 0) {
        throw Error(Errc::EmptyTractogram, "TRGX declares zero streamlines");
    }
    // Every record takes at least its 4-byte count.
    if (n > r.remaining() / 4) {
        throw Error(Errc::TruncatedFile, "declared streamline count exceeds file size");
    }
    t.streamlines.reserve(static_cast<std::size_t>(n));
    std::vector<Point3> pts;
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint32_t count = r.u32("streamline point count");
        if (count > r.remaining() / 12) {
            throw Error(Errc::TruncatedFile, "declared point count exceeds file size");
        }
        pts.resize(count);
        for (Point3& p : pts) {
            p.x = r.f32("point");
            p.y = r.f32("point");
            p.z = r.f32("point");
        }
        t.streamlines.push_back(Streamline::build(pts));
    }
    if (r.remaining() != 0) {
        throw Error(Errc::CountMismatch, std::to_string(r.remaining()) + " bytes after the declared streamlines");
    }
    return t;
}

void write_tractogram(const Tractogram& t, const std::filesystem::path& path) {
    write_file(path, encode_tractogram(t));
}

Tractogram read_tractogram(const std::filesystem::path& path) { return decode_tractogram(read_file(path)); }

std::vector<std::uint8_t> encode_embedding(const EmbeddedTractogram& e) {
    if (e.values.size() != e.rows * e.cols || e.prototypes.size() != e.cols) {
        throw Error(Errc::HeaderMismatch, "embedding shape disagrees with its prototypes");
    }
    const std::string name = e.kind.name();
    Writer w;
    w.bytes(kEmbdMagic);
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(name.data()), name.size()));
    w.u64(e.rows);
    w.u64(e.cols);
    for (const std::size_t idx : e.prototypes.indices) {
        w.u64(idx);
    }
    for (const double v : e.values) {
        w.f64(v);
    }
    return w.take();
}

EmbeddedTractogram decode_embedding(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    r.magic(kEmbdMagic, "EMBD");
    const std::uint32_t name_len = r.u32("kind name length");
    if (name_len == 0 || name_len > kMaxKindName) {
        throw Error(Errc::HeaderMismatch, "kind name length " + std::to_string(name_len) + " is invalid");
    }
    const std::string name = r.text(name_len, "kind name");

    EmbeddedTractogram e;
    try {
        e.kind = DistanceKind::parse(name);
    } catch (const Error& err) {
        throw Error(Errc::HeaderMismatch, std::string("bad kind in header: ") + err.what());
    }
    const std::uint64_t rows = r.u64("row count");
    const std::uint64_t cols = r.u64("column count");
    if (rows == 0 || cols == 0) {
        throw Error(Errc::HeaderMismatch, "embedding must have at least one row and one column");
    }
    if (cols > r.remaining() / 8) {
        throw Error(Errc::TruncatedFile, "declared prototype count exceeds file size");
    }
    e.prototypes.kind = e.kind;
    e.prototypes.indices.reserve(static_cast<std::size_t>(cols));
    for (std::uint64_t j = 0; j < cols; ++j) {
        e.prototypes.indices.push_back(static_cast<std::size_t>(r.u64("prototype index")));
    }
    if (std::set<std::size_t>(e.prototypes.indices.begin(), e.prototypes.indices.end()).size() != cols) {
        throw Error(Errc::HeaderMismatch, "prototype indices are not distinct");
    }
    const std::uint64_t cells_available = r.remaining() / 8;
    if (rows > cells_available / cols) {
        throw Error(Errc::TruncatedFile, "declared matrix exceeds file size");
    }
    if (rows * cols * 8 != r.remaining()) {
        throw Error(Errc::CountMismatch, "payload size differs from the declared matrix");
    }
    e.rows = static_cast<std::size_t>(rows);
    e.cols = static_cast<std::size_t>(cols);
    e.values.resize(e.rows * e.cols);
    for (double& v : e.values) {
        v = r.f64("matrix");
        if (!std::isfinite(v)) {
            throw Error(Errc::NonFiniteCoordinate, "embedding contains a non-finite value");
        }
    }
    return e;
}

void write_embedding(const EmbeddedTractogram& e, const std::filesystem::path& path) {
    write_file(path, encode_embedding(e));
}

EmbeddedTractogram read_embedding(const std::filesystem::path& path) { return decode_embedding(read_file(path)); }

std::string encode_bundle(const BundleRef& b, const std::string& name) {
    json j;
    j["tractogram"] = b.tractogram_id();
    j["name"] = name;
    j["indices"] = std::vector<std::size_t>(b.indices().begin(), b.indices().end());
    return j.dump() + "\n";
}

NamedBundle decode_bundle(const std::string& text, std::optional<std::size_t> tractogram_size) {
    const json j = parse_json(text);
    return json_guard([&] {
        if (!j.is_object()) {
            throw Error(Errc::MalformedJson, "bundle file must hold a JSON object");
        }
        auto indices = index_list(j.at("indices"), "indices");
        const std::size_t bound = bound_for(indices, tractogram_size);
        return NamedBundle{j.value("name", std::string{}),
                           BundleRef(j.value("tractogram", std::string{}), std::move(indices), bound)};
    });
}

void write_bundle(const BundleRef& b, const std::string& name, const std::filesystem::path& path) {
    write_text(path, encode_bundle(b, name));
}

NamedBundle read_bundle(const std::filesystem::path& path, std::optional<std::size_t> tractogram_size) {
    return decode_bundle(read_text(path), tractogram_size);
}

std::string encode_segmentation(const SegmentationResult& r) {
    json j;
    j["kind"] = r.kind.name();
    j["prototype_count"] = r.prototype_count;
    j["example"] = std::vector<std::size_t>(r.example.indices().begin(), r.example.indices().end());
    j["predicted"] = std::vector<std::size_t>(r.predicted.indices().begin(), r.predicted.indices().end());
    json mult = json::object();
    for (const auto& [idx, count] : r.multiplicity) {
        mult[std::to_string(idx)] = count;
    }
    j["multiplicity"] = mult;
    json per_query = json::array();
    for (const QueryMatch& m : r.per_query) {
        per_query.push_back(json::array({m.example_index, m.target_index, m.embedded_distance}));
    }
    j["per_query"] = per_query;
    return j.dump(2) + "\n";
}

SegmentationResult decode_segmentation(const std::string& text, std::optional<std::size_t> target_size) {
    const json j = parse_json(text);
    return json_guard([&] {
        SegmentationResult r;
        try {
            r.kind = DistanceKind::parse(j.at("kind").get<std::string>());
        } catch (const Error& e) {
            throw Error(Errc::MalformedJson, e.what());
        }
        r.prototype_count = j.at("prototype_count").get<std::size_t>();
        auto example = index_list(j.at("example"), "example");
        r.example = BundleRef({}, example, bound_for(example, std::nullopt));
        auto predicted = index_list(j.at("predicted"), "predicted");
        const std::size_t bound = bound_for(predicted, target_size);
        r.predicted = BundleRef({}, std::move(predicted), bound);
        for (const auto& [key, value] : j.at("multiplicity").items()) {
            std::size_t idx = 0;
            const auto res = std::from_chars(key.data(), key.data() + key.size(), idx);
            if (key.empty() || res.ec != std::errc{} || res.ptr != key.data() + key.size()) {
                throw Error(Errc::MalformedJson, "multiplicity key '" + key + "' is not an integer");
            }
            r.multiplicity[idx] = value.get<std::size_t>();
        }
        for (const json& q : j.at("per_query")) {
            if (!q.is_array() || q.size() != 3) {
                throw Error(Errc::MalformedJson, "per_query entries must be [example, target, distance]");
            }
            r.per_query.push_back(
                QueryMatch{q[0].get<std::size_t>(), q[1].get<std::size_t>(), q[2].get<double>()});
        }
        return r;
    });
}

BundleRef read_index_set(const std::filesystem::path& path, std::size_t tractogram_size) {
    const std::string text = read_text(path);
    const json j = parse_json(text);
    if (j.is_object() && j.contains("predicted")) {
        return decode_segmentation(text, tractogram_size).predicted;
    }
    return decode_bundle(text, tractogram_size).bundle;
}

SynthSpec decode_synth_spec(const std::string& text) {
    const json j = parse_json(text);
    SynthSpec spec;
    try {
        if (!j.is_object() || !j.contains("bundles") || !j.at("bundles").is_object()) {
            throw Error(Errc::InvalidSpec, "spec needs a 'bundles' object");
        }
        spec.noise_streamlines = j.value("noise_streamlines", std::size_t{0});
        spec.perturb_sigma = j.value("perturb_sigma", 0.0);
        spec.voxel_size = j.value("voxel_size", 1.25);
        for (const auto& [name, b] : j.at("bundles").items()) {
            BundleSpec bs;
            bs.centerline = centerline_from(b.at("centerline"));
            bs.streamline_count = b.value("streamline_count", bs.streamline_count);
            bs.radial_jitter_sigma = b.value("jitter", bs.radial_jitter_sigma);
            if (b.contains("points")) {
                const json& range = b.at("points");
                if (!range.is_array() || range.size() != 2) {
                    throw Error(Errc::InvalidSpec, "'points' must be [min, max]");
                }
                bs.min_points = range[0].get<std::size_t>();
                bs.max_points = range[1].get<std::size_t>();
            }
            bs.rng_seed = b.value("seed", std::uint64_t{0});
            bs.validate();
            spec.bundles.emplace(name, std::move(bs));
        }
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidSpec, e.what());
    }
    if (spec.bundles.empty()) {
        throw Error(Errc::InvalidSpec, "spec declares no bundles");
    }
    if (!(spec.voxel_size > 0.0) || !(spec.perturb_sigma >= 0.0)) {
        throw Error(Errc::InvalidSpec, "voxel_size must be positive and perturb_sigma non-negative");
    }
    return spec;
}

SynthSpec read_synth_spec(const std::filesystem::path& path) { return decode_synth_spec(read_text(path)); }

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::IoError, "cannot open '" + path.string() + "' for reading");
    }
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::IoError, "cannot open '" + path.string() + "' for reading");
    }
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::IoError, "cannot open '" + path.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(Errc::IoError, "write to '" + path.string() + "' failed");
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace tractdist::io
