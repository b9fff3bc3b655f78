#pragma once

#include <cstdint>
#include <random>

namespace duelbench {

// splitmix64 step; used to derive well-separated child seeds.
std::uint64_t splitmix64(std::uint64_t& state);

// Named sub-streams of one run so instance generation, preference noise and
// the two posterior chains never share randomness.
enum class stream_tag : std::uint64_t {
  instance = 1,
  preference = 2,
  chain1 = 3,
  chain2 = 4,
  agent = 5,
};

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t run_index,
                          stream_tag tag);

// mt19937_64 with hand-rolled output transforms.  std::*_distribution is
// implementation-defined, so going through our own uniform/normal/gumbel
// keeps runs bitwise reproducible across standard libraries.
class rng_stream {
 public:
  explicit rng_stream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // uniform on [0, 1), 53-bit resolution
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // uniform on (0, 1); safe to feed into log()
  double uniform_open() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal();  // standard normal via Box-Muller
  double gumbel();  // standard Gumbel, -log(-log(U))

  // uniform integer in [0, n), unbiased (Lemire rejection)
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace duelbench
