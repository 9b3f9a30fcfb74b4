#ifndef WIPLAB_COMMON_HPP_
#define WIPLAB_COMMON_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <random>

namespace wiplab
{

// Error categories map onto CLI exit codes.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvalidParameterError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class DegenerateConfigurationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class SimulationDivergedError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// FNV-1a, used for content hashes in reports and learning traces.
std::uint64_t fnv1a(const void * data, std::size_t n, std::uint64_t h = 1469598103934665603ULL);
std::uint64_t fnv1a(const std::string & s);

// All randomness flows from one root seed; consumers get independent
// engines keyed by stream name, so adding a consumer never perturbs others.
std::mt19937_64 substream(std::uint64_t root_seed, const std::string & name);

}  // namespace wiplab

#endif  // WIPLAB_COMMON_HPP_
