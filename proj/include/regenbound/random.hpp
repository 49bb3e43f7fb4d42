#pragma once

// Counter-based uniforms: every variate is a pure function of
// (seed, domain, replica, step, slot), so results do not depend on how
// replicas are scheduled across threads.

#include <array>
#include <cstdint>

namespace regenbound {

// Philox4x32-10 (Salmon et al., SC'11).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

// Separates the uses of one seed so that, e.g., the coupled and the
// independent simulations never share variates.
enum class Domain : std::uint8_t { coupling = 1, independent = 2, alternating = 3, bootstrap = 4, occupancy = 5 };

// The four uniforms a construction step may consume, plus an auxiliary gate.
enum class Slot : std::uint8_t { U = 0, U1 = 1, U2 = 2, U3 = 3, Gate = 4 };

class UniformStream {
 public:
  UniformStream(std::uint64_t seed, Domain domain, std::uint64_t replica)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        domain_(static_cast<std::uint32_t>(domain)),
        replica_(replica) {}

  // Uniform on [0, 1) with 53 random bits. `step` must stay below 2^48.
  double operator()(std::uint64_t step, Slot slot) const {
    const std::array<std::uint32_t, 4> ctr{
        static_cast<std::uint32_t>(replica_), static_cast<std::uint32_t>(replica_ >> 32),
        static_cast<std::uint32_t>(step),
        (static_cast<std::uint32_t>(step >> 32) << 16) | (domain_ << 8) | static_cast<std::uint32_t>(slot)};
    const auto out = philox4x32(ctr, key_);
    const std::uint64_t bits = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  std::uint64_t replica() const { return replica_; }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t domain_;
  std::uint64_t replica_;
};

}  // namespace regenbound
