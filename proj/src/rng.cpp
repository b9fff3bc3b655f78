#include "rng.hpp"

#include <cmath>

namespace duelbench {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t run_index,
                          stream_tag tag) {
  std::uint64_t s = master_seed;
  std::uint64_t a = splitmix64(s);
  s ^= run_index * 0x9e3779b97f4a7c15ull;
  std::uint64_t b = splitmix64(s);
  s ^= static_cast<std::uint64_t>(tag) * 0xd1b54a32d192ed03ull;
  std::uint64_t c = splitmix64(s);
  return a ^ (b + 0x165667b19e3779f9ull) ^ (c << 1);
}

double rng_stream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform_open();
  double u2 = uniform_open();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

double rng_stream::gumbel() {
  return -std::log(-std::log(uniform_open()));
}

std::uint64_t rng_stream::below(std::uint64_t n) {
  // Lemire's multiply-shift rejection sampler.
  if (n == 0) return 0;
  std::uint64_t x = gen_();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  std::uint64_t lo = static_cast<std::uint64_t>(m);
  if (lo < n) {
    std::uint64_t threshold = (0ull - n) % n;
    while (lo < threshold) {
      x = gen_();
      m = static_cast<__uint128_t>(x) * n;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace duelbench
