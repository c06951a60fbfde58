#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "teachbot/numcore/parameter.hpp"

namespace teachbot::num {

// Checkpoint layout (all text lines end in '\n'):
//
//   TEACHBOT-CHECKPOINT 1
//   <parameter count>
//   <name> f64 <rank> <dim_0> ... <dim_rank-1>      one line per parameter
//   <payload>
//
// The payload is every parameter's values, in manifest order, row-major,
// as IEEE-754 binary64 little-endian. Nothing follows the payload.

struct NamedTensor {
  std::string name;
  Tensor value;
};

void write_checkpoint(std::ostream& out, const ParameterSet& params);
void save_checkpoint(const std::filesystem::path& path, const ParameterSet& params);

std::vector<NamedTensor> read_checkpoint(std::istream& in);
std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path);

/// Copies checkpoint values into `params`; names, order and shapes must match.
void load_checkpoint(const std::filesystem::path& path, ParameterSet& params);
void assign_checkpoint(const std::vector<NamedTensor>& tensors, ParameterSet& params);

}  // namespace teachbot::num
