#include "parax/rng.hpp"

#include <cmath>
#include <numbers>

namespace parax {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

StreamId stream_for(std::uint64_t master_seed, std::uint64_t path_index, StreamPurpose purpose,
                    std::uint32_t sub) noexcept {
    // path index in the low 40 bits, sub-stream in the next 16, purpose on top
    const std::uint64_t stream = (static_cast<std::uint64_t>(purpose) << 56) |
                                 (static_cast<std::uint64_t>(sub & 0xFFFFu) << 40) |
                                 (path_index & ((std::uint64_t{1} << 40) - 1));
    return {master_seed, stream};
}

NormalStream::NormalStream(StreamId id) noexcept
    : key_{static_cast<std::uint32_t>(id.master_seed), static_cast<std::uint32_t>(id.master_seed >> 32)},
      stream_(id.stream) {}

std::uint64_t NormalStream::next_u64() noexcept {
    if (buf_pos_ >= 4) {
        buf_ = philox4x32_10({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                              static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                             key_);
        ++block_;
        buf_pos_ = 0;
    }
    const std::uint64_t lo = buf_[buf_pos_];
    const std::uint64_t hi = buf_[buf_pos_ + 1];
    buf_pos_ += 2;
    return (hi << 32) | lo;
}

double NormalStream::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double NormalStream::next() noexcept {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

}  // namespace parax
