#include "wiplab/common.hpp"

namespace wiplab
{

std::uint64_t fnv1a(const void * data, std::size_t n, std::uint64_t h)
{
  const auto * p = static_cast<const unsigned char *>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a(const std::string & s)
{
  return fnv1a(s.data(), s.size());
}

std::mt19937_64 substream(std::uint64_t root_seed, const std::string & name)
{
  std::uint64_t h = fnv1a(name);
  h = fnv1a(&root_seed, sizeof(root_seed), h);
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(root_seed), static_cast<std::uint32_t>(root_seed >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace wiplab
