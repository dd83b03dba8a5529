#pragma once

// Structure-aware mutations of valid TRGX/EMBD files for robustness tests.

#include <cstdint>
#include <cstring>
#include <set>
#include <vector>

#include "tractdist/error.hpp"
#include "tractdist/random.hpp"

namespace fuzz {

using Bytes = std::vector<std::uint8_t>;

inline std::uint32_t get_u32(const Bytes& b, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[at + static_cast<std::size_t>(i)];
    return v;
}

inline std::uint64_t get_u64(const Bytes& b, std::size_t at) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[at + static_cast<std::size_t>(i)];
    return v;
}

inline void put_u32(Bytes& b, std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b[at + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline void put_u64(Bytes& b, std::size_t at, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) b[at + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> (8 * i));
}

/// Offsets of the count fields of a valid TRGX file.
struct TrgxFields {
    std::size_t n_offset = 24;
    std::vector<std::size_t> count_offsets;
};

inline TrgxFields trgx_fields(const Bytes& b) {
    TrgxFields f;
    const std::uint64_t n = get_u64(b, f.n_offset);
    std::size_t at = f.n_offset + 8;
    for (std::uint64_t i = 0; i < n; ++i) {
        f.count_offsets.push_back(at);
        at += 4 + 12 * static_cast<std::size_t>(get_u32(b, at));
    }
    return f;
}

struct EmbdFields {
    std::size_t name_len_offset = 8;
    std::size_t rows_offset = 0;
    std::size_t cols_offset = 0;
    std::size_t protos_offset = 0;
};

inline EmbdFields embd_fields(const Bytes& b) {
    EmbdFields f;
    f.rows_offset = 12 + get_u32(b, 8);
    f.cols_offset = f.rows_offset + 8;
    f.protos_offset = f.cols_offset + 8;
    return f;
}

inline std::uint64_t interesting_u64(tractdist::Rng& rng, std::uint64_t current) {
    switch (rng.below(7)) {
        case 0: return 0;
        case 1: return current + 1;
        case 2: return current - 1;
        case 3: return ~std::uint64_t{0};
        case 4: return std::uint64_t{1} << rng.below(64);
        case 5: return current * 2;
        default: return rng.next();
    }
}

inline void mutate_common(Bytes& b, tractdist::Rng& rng) {
    switch (rng.below(4)) {
        case 0: b[rng.below(8)] ^= static_cast<std::uint8_t>(1 + rng.below(255)); break;  // magic
        case 1: b.resize(rng.below(b.size())); break;                                     // truncate
        case 2:
            for (std::uint64_t k = 1 + rng.below(16); k > 0; --k) b.push_back(static_cast<std::uint8_t>(rng.next()));
            break;
        default: {
            const std::size_t at = rng.below(std::min<std::size_t>(b.size(), 64));
            b[at] ^= static_cast<std::uint8_t>(1U << rng.below(8));
        }
    }
}

/// One random header/count mutation of a valid TRGX file.
inline Bytes mutate_trgx(const Bytes& valid, tractdist::Rng& rng) {
    Bytes b = valid;
    const TrgxFields f = trgx_fields(valid);
    switch (rng.below(4)) {
        case 0: put_u64(b, f.n_offset, interesting_u64(rng, get_u64(b, f.n_offset))); break;
        case 1: {
            const std::size_t at = f.count_offsets[rng.below(f.count_offsets.size())];
            put_u32(b, at, static_cast<std::uint32_t>(interesting_u64(rng, get_u32(b, at))));
            break;
        }
        case 2: {
            // voxel size or an origin component
            const std::size_t at = 8 + 4 * rng.below(4);
            put_u32(b, at, static_cast<std::uint32_t>(rng.below(2) ? rng.next() : 0x7f800000U | rng.below(2)));
            break;
        }
        default: mutate_common(b, rng);
    }
    return b;
}

inline Bytes mutate_embd(const Bytes& valid, tractdist::Rng& rng) {
    Bytes b = valid;
    const EmbdFields f = embd_fields(valid);
    switch (rng.below(5)) {
        case 0: put_u32(b, f.name_len_offset, static_cast<std::uint32_t>(interesting_u64(rng, get_u32(b, 8)))); break;
        case 1: put_u64(b, f.rows_offset, interesting_u64(rng, get_u64(b, f.rows_offset))); break;
        case 2: put_u64(b, f.cols_offset, interesting_u64(rng, get_u64(b, f.cols_offset))); break;
        case 3: {
            const std::size_t d = static_cast<std::size_t>(get_u64(valid, f.cols_offset));
            const std::size_t at = f.protos_offset + 8 * rng.below(d);
            put_u64(b, at, interesting_u64(rng, get_u64(b, at)));
            break;
        }
        default: mutate_common(b, rng);
    }
    return b;
}

inline const std::set<tractdist::Errc>& trgx_errors() {
    using tractdist::Errc;
    static const std::set<Errc> codes{Errc::BadMagic,          Errc::TruncatedFile,  Errc::CountMismatch,
                                      Errc::EmptyTractogram,   Errc::HeaderMismatch, Errc::NonFiniteCoordinate,
                                      Errc::FewerThanTwoDistinctPoints};
    return codes;
}

inline const std::set<tractdist::Errc>& embd_errors() {
    using tractdist::Errc;
    static const std::set<Errc> codes{Errc::BadMagic, Errc::TruncatedFile, Errc::CountMismatch, Errc::HeaderMismatch,
                                      Errc::NonFiniteCoordinate};
    return codes;
}

}  // namespace fuzz
