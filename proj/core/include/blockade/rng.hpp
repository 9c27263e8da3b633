#pragma once

#include <cstdint>
#include <random>

namespace blockade {

// Independent random stream keyed by (master seed, stream index). Trajectory
// or pulse-block k always draws from stream k, so results do not depend on
// how tasks are scheduled across workers.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Exposed for oracle generators in tests.
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace blockade
