#include "metallab/rng.hpp"

#include <cmath>
#include <numbers>

namespace metallab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SampleRng SampleRng::stream(std::uint64_t seed, std::uint64_t tag) {
  return SampleRng(splitmix64(splitmix64(seed) ^ (tag * 0xd1342543de82ef95ULL + 1)));
}

double SampleRng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec SampleRng::uniform_vector(std::size_t n, double lo, double hi) {
  Vec v(n);
  for (auto& x : v) x = uniform(lo, hi);
  return v;
}

Vec SampleRng::normal_vector(std::size_t n) {
  Vec v(n);
  for (auto& x : v) x = normal();
  return v;
}

}  // namespace metallab
