#pragma once

#include <array>
#include <cstdint>

namespace parax {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Pure function of (counter, key); no hidden state.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Purpose tags keep independent draws for one path on disjoint streams.
enum class StreamPurpose : std::uint8_t {
    ou = 1,
    wiener = 2,
    ou_given_wiener = 3,
    generic = 7,
};

/// Identifies one reproducible random stream: a master seed plus a 64-bit
/// stream index. Ensemble path p draws from stream_for(p, purpose), so the
/// numbers a path sees do not depend on which worker runs it.
struct StreamId {
    std::uint64_t master_seed = 0;
    std::uint64_t stream = 0;

    bool operator==(const StreamId&) const = default;
};

/// Stream for path `path_index` of an ensemble. `sub` separates repeated
/// draws of the same purpose (e.g. one per epsilon in a convergence study).
StreamId stream_for(std::uint64_t master_seed, std::uint64_t path_index, StreamPurpose purpose,
                    std::uint32_t sub = 0) noexcept;

/// Standard normal variates from one Philox stream via Box-Muller.
class NormalStream {
public:
    explicit NormalStream(StreamId id) noexcept;

    double next() noexcept;
    /// Uniform on [0, 1).
    double uniform() noexcept;

private:
    std::uint64_t next_u64() noexcept;

    PhiloxKey key_{};
    std::uint64_t stream_ = 0;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace parax
