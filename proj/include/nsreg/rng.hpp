#pragma once

// Seedable 64-bit RNG with explicitly specified output transforms, so that
// identically seeded runs produce identical streams on every platform.
// Generator: xoshiro256++ seeded through splitmix64. Uniform doubles take the
// top 53 bits; Gaussians come from the Box-Muller cosine branch (two uniforms
// per draw, nothing cached).

#include <array>
#include <cstdint>
#include <string_view>

namespace nsreg {

std::uint64_t splitmix64_next(std::uint64_t& state);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double next_uniform();
  /// Uniform on (0, 1]; safe as a log() argument.
  double next_uniform_pos();
  /// Standard normal via Box-Muller.
  double next_gaussian();

 private:
  std::array<std::uint64_t, 4> state_;
};

/// Collision-resistant stream derivation: hashes a text label and two indices
/// into a fresh seed. Used for per-(method, n, replication) dataset seeds and
/// per-restart optimizer streams.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t a = 0, std::uint64_t b = 0);

}  // namespace nsreg
