#include "hetreg/rng.hpp"

#include <cmath>
#include <string>

#include "hetreg/error.hpp"

namespace hetreg {

namespace {

constexpr std::uint64_t kStateInit = 0x6a09e667f3bcc909ULL;
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t absorb_keys(std::initializer_list<std::uint64_t> keys) {
  std::uint64_t state = kStateInit + static_cast<std::uint64_t>(keys.size());
  for (std::uint64_t key : keys) {
    state = mix64((state + kGamma) ^ key);
  }
  return state;
}

}  // namespace

RandomStream::RandomStream(std::initializer_list<std::uint64_t> keys)
    : state_(absorb_keys(keys)) {}

std::uint64_t RandomStream::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

double RandomStream::next_unit() {
  // 53 random bits centered in (0, 1); never returns an endpoint.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_unit() - 1.0;
    v = 2.0 * next_unit() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

double RandomStream::next_chi_squared(int df) {
  if (df < 1) {
    fail(ErrorCode::InvalidArgument,
         "chi-squared sampling needs df >= 1, got " + std::to_string(df));
  }
  double sum = 0.0;
  for (int i = 0; i < df; ++i) {
    const double z = next_normal();
    sum += z * z;
  }
  return sum;
}

Eigen::VectorXd RandomStream::normal_vector(int dim) {
  if (dim < 1) {
    fail(ErrorCode::InvalidArgument, "normal vector needs dim >= 1");
  }
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) {
    v(i) = next_normal();
  }
  return v;
}

Eigen::VectorXd RandomStream::student_t_vector(int dim, int df) {
  const Eigen::VectorXd v = normal_vector(dim);
  const double u = next_chi_squared(df);
  return student_t_scale(v, df, u);
}

Eigen::VectorXd student_t_scale(const Eigen::VectorXd& v, int df, double u) {
  if (df < 1) {
    fail(ErrorCode::InvalidArgument, "t scaling needs df >= 1");
  }
  if (!(u > 0.0)) {
    fail(ErrorCode::InvalidArgument, "chi-squared divisor must be positive");
  }
  return std::sqrt(static_cast<double>(df) / u) * v;
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) {
  return absorb_keys(keys);
}

}  // namespace hetreg
