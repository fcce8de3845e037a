#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace arelab::cli {

std::uint64_t fnv1a64(std::string_view data) noexcept;

struct RunManifest {
  std::string command_line;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string versions;
  double wall_time_seconds = 0.0;
  std::vector<std::string> output_files;
  std::string config;  // canonical rendering the hash was taken over
};

// key=value lines; the config block follows under "config." keys.
void write_manifest(std::ostream& os, const RunManifest& m);

std::string version_string();

}  // namespace arelab::cli
