#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace rgw {

/// Counter-based generator (Philox4x32-10). The pair (seed, stream) fixes the whole sequence,
/// so streams can be handed to tasks in any order and still reproduce bit for bit.
class RngStream {
  public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    /// Independent child stream; the parent is not advanced.
    RngStream substream(std::uint64_t tag) const;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return next_u64(); }

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1), 53 random bits.
    double uniform();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    /// Index drawn with probability proportional to weights (need not be normalized).
    std::size_t categorical(std::span<const double> weights);
    std::uint64_t binomial(std::uint64_t trials, double p);

  private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int available_ = 0;
};

/// Raw Philox4x32-10 block; exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

} // namespace rgw
