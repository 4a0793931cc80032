#pragma once

#include <array>
#include <cstdint>

namespace cscv {

// splitmix64 finalizer; used to derive independent child seeds from a master
// seed so that distinct roles (implementation rows, holdout rows, signal
// noise, per-draw matrices) never share a stream.
std::uint64_t mix64(std::uint64_t z);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b);

// Philox4x32-10 block function. Counter-based: the caller owns the counter,
// the generator has no hidden state, and any (key, counter) pair can be
// evaluated independently. This is what makes per-row streams stable when a
// matrix is extended with more rows: row i's entries depend only on
// (seed, i, position), never on how many rows exist in total.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Convenience stream over the Philox block function. `stream` selects an
// independent substream of the same seed (used for row indices).
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();

    // Uniform on the open interval (0,1); never returns 0 or 1, safe for logs.
    double next_uniform();

    // Standard normal via the Marsaglia polar method (rejection; consumes a
    // variable number of uniforms, which is fine since streams are isolated).
    double next_gaussian();

    // +1.0 or -1.0 with equal probability.
    double next_sign();

    // Uniform integer in [0, bound) by rejection; bound > 0.
    std::uint64_t next_below(std::uint64_t bound);

  private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_lo_, stream_hi_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace cscv
