#pragma once

#include <cstdint>
#include <vector>

#include "coatlab/types.hpp"

namespace coatlab {

// xoshiro256** seeded through splitmix64. Output is fully specified here (no
// std:: distributions) so sample streams are identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);
  Vec3 unit_vector();

 private:
  std::uint64_t s_[4];
};

// Seed for the stream-th independent substream of a base seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

// Radical inverse of index in the given prime base.
double halton(std::uint64_t index, unsigned base);

// Quasi-random point in [lo, hi] (componentwise) from the 3D Halton sequence.
Vec3 halton_point(std::uint64_t index, const Vec3& lo, const Vec3& hi);

// n quasi-uniform unit vectors (golden-angle spiral).
std::vector<Vec3> fibonacci_sphere(int n);

// Sum with pairwise reduction; order-independent up to the fixed tree shape.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace coatlab
