#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tractdist/embedding.hpp"
#include "tractdist/model.hpp"
#include "tractdist/segmentation.hpp"
#include "tractdist/synth.hpp"

namespace tractdist::io {

/// TRGX layout, all little-endian:
///
///   magic "TRGX\0\0\0\1"        8 bytes
///   voxel_size                  f32
///   origin x, y, z              3 x f32
///   N                           u64
///   N times: point count c      u32
///            c points           c x 3 x f32
///
/// Coordinates are quantized to f32 on write.
inline constexpr std::size_t kTrgxHeaderSize = 8 + 4 + 12;

/// Throws EmptyTractogram or NonFiniteCoordinate (value overflows f32).
std::vector<std::uint8_t> encode_tractogram(const Tractogram& t);

/// Throws BadMagic, TruncatedFile, CountMismatch, EmptyTractogram,
/// HeaderMismatch (non-positive voxel size), NonFiniteCoordinate, or
/// FewerThanTwoDistinctPoints for a streamline record with < 2 distinct points.
Tractogram decode_tractogram(std::span<const std::uint8_t> bytes);

void write_tractogram(const Tractogram& t, const std::filesystem::path& path);
Tractogram read_tractogram(const std::filesystem::path& path);

/// EMBD layout, all little-endian:
///
///   magic "EMBD\0\0\0\1"        8 bytes
///   kind name length L          u32
///   kind name                   L bytes (canonical DistanceKind name)
///   N, d                        2 x u64
///   prototype indices           d x u64
///   values                      N x d f64, row-major
std::vector<std::uint8_t> encode_embedding(const EmbeddedTractogram& e);

/// Throws BadMagic, TruncatedFile, CountMismatch, HeaderMismatch or NonFiniteCoordinate.
EmbeddedTractogram decode_embedding(std::span<const std::uint8_t> bytes);

void write_embedding(const EmbeddedTractogram& e, const std::filesystem::path& path);
EmbeddedTractogram read_embedding(const std::filesystem::path& path);

/// Bundle JSON: {"tractogram": "<file>", "name": "<bundle>", "indices": [...]}.
struct NamedBundle {
    std::string name;
    BundleRef bundle;
};

std::string encode_bundle(const BundleRef& b, const std::string& name);

/// With `tractogram_size`, indices are range-checked (IndexOutOfRange);
/// without it only negativity is rejected. Throws MalformedJson.
NamedBundle decode_bundle(const std::string& text, std::optional<std::size_t> tractogram_size = std::nullopt);

void write_bundle(const BundleRef& b, const std::string& name, const std::filesystem::path& path);
NamedBundle read_bundle(const std::filesystem::path& path, std::optional<std::size_t> tractogram_size = std::nullopt);

/// Segmentation result JSON: {kind, prototype_count, example, predicted,
/// multiplicity: {"index": count}, per_query: [[example, target, dist], ...]}.
std::string encode_segmentation(const SegmentationResult& r);
SegmentationResult decode_segmentation(const std::string& text,
                                       std::optional<std::size_t> target_size = std::nullopt);

/// Reads either a bundle JSON (`indices`) or a segmentation result
/// (`predicted`) and returns the streamline index set it describes.
BundleRef read_index_set(const std::filesystem::path& path, std::size_t tractogram_size);

/// Synthetic subject description consumed by the `synth` command.
struct SynthSpec {
    std::map<std::string, BundleSpec> bundles;
    std::size_t noise_streamlines = 0;
    double perturb_sigma = 0.0;  // optional whole-subject displacement
    double voxel_size = 1.25;
};

/// Throws MalformedJson or InvalidSpec.
SynthSpec decode_synth_spec(const std::string& text);
SynthSpec read_synth_spec(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace tractdist::io
