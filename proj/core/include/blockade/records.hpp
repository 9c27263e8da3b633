#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "blockade/mcwf.hpp"

// Text serialization of emission records:
//
//   # blockade emission records v1
//   # <free-form header lines, e.g. resolved parameters>
//   @record seed=<u64> stream=<u64> duration=<ns> pulse_count=<n> clicks=<count>
//   <click time>            (one per line, shortest round-trip decimal)
//   ...
//
// Any number of @record blocks may follow each other.

namespace blockade {

void write_records(std::ostream& out, std::span<const EmissionRecord> records,
                   std::span<const std::string> header_lines = {});
std::vector<EmissionRecord> read_records(std::istream& in);

void save_records(const std::filesystem::path& path, std::span<const EmissionRecord> records,
                  std::span<const std::string> header_lines = {});
std::vector<EmissionRecord> load_records(const std::filesystem::path& path);

}  // namespace blockade
