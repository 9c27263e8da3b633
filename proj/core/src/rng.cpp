#include "blockade/rng.hpp"

namespace blockade {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t master_seed, std::uint64_t stream) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  // seed_seq's mixing is fully specified by the standard, so streams are
  // reproducible across platforms.
  std::seed_seq seq{lo(master_seed), hi(master_seed), lo(stream), hi(stream), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t stream)
    : engine_(seeded_engine(master_seed, stream)) {}

}  // namespace blockade
