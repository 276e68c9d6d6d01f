#pragma once

#include <array>
#include <cstdint>

namespace gameopt {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// A block of four 32-bit outputs is a pure function of (key, counter).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept {
        constexpr std::uint32_t kM0 = 0xD2511F53u;
        constexpr std::uint32_t kM1 = 0xCD9E8D57u;
        constexpr std::uint32_t kW0 = 0x9E3779B9u;
        constexpr std::uint32_t kW1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// Purposes that share one replication stream without overlapping.
enum class Substream : std::uint32_t {
    innovations = 0,
    bridge = 1,
    probes = 2,
    strategy = 3,
};

/// Sequential view of the generator at address (seed, stream, substream).
/// Draw k of a stream is determined by its address alone, so replications
/// can be produced in any order or on any thread.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream,
                 Substream sub = Substream::innovations) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream),
          sub_(static_cast<std::uint32_t>(sub)) {}

    std::uint32_t next_u32() noexcept {
        if (pos_ == 4) refill();
        return buffer_[pos_++];
    }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() noexcept {
        const std::uint64_t hi = next_u32() >> 5;  // 27 bits
        const std::uint64_t lo = next_u32() >> 6;  // 26 bits
        const std::uint64_t bits = (hi << 26) | lo;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal() noexcept;

    /// Index into a discrete distribution given its cumulative weights.
    template <typename Cdf>
    std::size_t categorical(const Cdf& cumulative) noexcept {
        const double u = uniform();
        std::size_t i = 0;
        while (i + 1 < cumulative.size() && u >= cumulative[i]) ++i;
        return i;
    }

private:
    void refill() noexcept {
        // 48 bits of block index, 16 bits of substream, 64 bits of stream.
        const Philox4x32::Counter ctr{
            static_cast<std::uint32_t>(block_),
            static_cast<std::uint32_t>((block_ >> 32) & 0xFFFFu) | (sub_ << 16),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        buffer_ = Philox4x32::block(ctr, key_);
        ++block_;
        pos_ = 0;
    }

    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint32_t sub_;
    std::uint64_t block_ = 0;
    Philox4x32::Counter buffer_{};
    int pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace gameopt
