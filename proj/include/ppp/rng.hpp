#pragma once

#include <cstdint>
#include <random>

namespace ppp {

// Seeded random stream for Monte Carlo work.
//
// Each stream is a std::mt19937_64 whose state is expanded from the four
// 32-bit words (seed_lo, seed_hi, stream_lo, stream_hi) through
// std::seed_seq. Both algorithms are fully specified by the standard, so a
// (seed, stream_id) pair yields the same sequence on every conforming
// platform. Distinct stream ids give unrelated initial states; parallel code
// hands one stream to each work block and never shares a stream between
// threads.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // 53-bit uniform on [0, 1).
    double uniform();
    // 53-bit uniform on the open interval (0, 1).
    double uniform_open();
    std::uint64_t next_u64() { return engine_(); }
    // Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    // Child stream for sub-task `index`, derived deterministically.
    RngStream split(std::uint64_t index) const;

  private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

} // namespace ppp
