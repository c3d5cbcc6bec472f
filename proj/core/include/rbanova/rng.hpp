#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string_view>

namespace rbanova {

/// Splitmix64-based seeded generator. Streams are derived by hashing a
/// (seed, stream name) pair so independent parts of a run (chain init,
/// proposals, model samples, noise) draw from non-overlapping sequences
/// that are reproducible from the master seed alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::string_view stream = "");

  std::uint64_t next_u64();

  /// Uniform on the open interval (0,1).
  double uniform01();
  /// Uniform on [lo,hi].
  double uniform(double lo, double hi);
  /// Standard normal, Marsaglia polar method (sqrt/log only).
  double normal();

  Eigen::VectorXd normal_vector(int m);
  /// Componentwise uniform on [-1,1]^m.
  Eigen::VectorXd uniform_box(int m);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// FNV-1a 64-bit hash; also used for config hashes and file checksums.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace rbanova
