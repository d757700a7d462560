#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace srr {

/// Philox4x32-10 counter-based generator.
///
/// The 64-bit key is the user seed; the upper 64 bits of the 128-bit counter select an
/// independent stream (one per simulated path) and the lower 64 bits count blocks within
/// it. Satisfies UniformRandomBitGenerator with 64-bit output, two outputs per block.
class Philox4x32 {
public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// The raw 10-round bijection, exposed for known-answer tests.
    static Block encrypt(Block counter, Key key);

private:
    Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    Block buffer_{};
    int used_ = 4;  // 32-bit words of buffer_ already consumed
};

}  // namespace srr
