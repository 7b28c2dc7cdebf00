#pragma once

#include <cstdint>
#include <initializer_list>

#include <Eigen/Dense>

namespace hetreg {

/// Deterministic substream generator (splitmix64 core).
///
/// A stream is keyed by a short tuple of 64-bit values, e.g. (seed, draw)
/// for Monte Carlo draw m or (seed, replicate, tag) for nested simulation
/// streams. Distinct key tuples give statistically independent sequences,
/// so work partitioned over draws produces the same numbers regardless of
/// thread count or iteration order.
class RandomStream {
 public:
  explicit RandomStream(std::initializer_list<std::uint64_t> keys);

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double next_unit();

  /// Standard normal via the Marsaglia polar method; pairs are generated
  /// and the spare is cached, so consumption order stays fixed.
  double next_normal();

  /// Chi-squared draw with integer df, as the sum of df squared standard
  /// normals. df = 1 therefore equals the square of the next normal.
  double next_chi_squared(int df);

  /// Vector of iid standard normals.
  Eigen::VectorXd normal_vector(int dim);

  /// Spherical multivariate t draw: sqrt(df/U) * V with V standard normal
  /// and U an independent chi-squared with df degrees of freedom, consumed
  /// from this stream in that order.
  Eigen::VectorXd student_t_vector(int dim, int df);

 private:
  std::uint64_t state_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// The t construction used everywhere a normal vector and a chi-squared
/// divisor are combined: sqrt(df/u) * v. u must be positive.
Eigen::VectorXd student_t_scale(const Eigen::VectorXd& v, int df, double u);

/// Collapses a key tuple into a single 64-bit seed for nested streams.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys);

// Fixed tags that keep derived substreams disjoint.
namespace stream_tag {
inline constexpr std::uint64_t kInner = 0x696e6e6572ULL;
inline constexpr std::uint64_t kFiducial = 0x66696475ULL;
inline constexpr std::uint64_t kGeneralized = 0x67656e76ULL;
}  // namespace stream_tag

}  // namespace hetreg
