#include "enkfsq/random.hpp"

namespace enkfsq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) { return SplitMix64(x)(); }

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(root);
  for (std::uint64_t p : path) {
    h = splitmix64(h ^ splitmix64(p + 0x632BE59BD9B4E019ULL));
  }
  return h;
}

RandomStream RandomStream::derive(std::uint64_t root, StreamTag tag,
                                  std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = derive_seed(root, {static_cast<std::uint64_t>(tag)});
  h = derive_seed(h, path);
  return RandomStream(h);
}

}  // namespace enkfsq
