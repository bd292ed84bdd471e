// rng.hpp - Philox4x32-10 counter-based generator with per-sample substreams

#pragma once

#include <array>
#include <cstdint>

namespace bathsmith {

// Philox4x32 with 10 rounds (Salmon et al. 2011). Stateless block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Stream (seed, stream_id) -> sequence of doubles. Two generators with the
// same seed and stream produce identical output on every platform; distinct
// stream ids never overlap (the id occupies the upper counter words).
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    // Uniform on (0, 1), 53-bit resolution.
    double uniform();
    // Standard normal (Box-Muller, both outputs used).
    double normal();

private:
    std::uint64_t next_u64();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline constexpr std::uint64_t kDefaultSeed = 20240917;

} // namespace bathsmith
