#include "arelab/cli/manifest.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "arelab/kernels.hpp"

#ifndef ARELAB_VERSION
#define ARELAB_VERSION "unknown"
#endif

namespace arelab::cli {

std::uint64_t fnv1a64(std::string_view data) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string version_string() {
  std::ostringstream os;
  os << "arelab " << ARELAB_VERSION << "; boost " << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000
     << '.' << BOOST_VERSION % 100 << "; eigen " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.'
     << EIGEN_MINOR_VERSION << "; compiler " << __VERSION__ << "; kernel "
     << kernels::isa_name(kernels::active().isa);
  return os.str();
}

void write_manifest(std::ostream& os, const RunManifest& m) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(m.config_hash));
  os << "command_line=" << m.command_line << '\n'
     << "config_hash=" << hash << '\n'
     << "seed=" << m.seed << '\n'
     << "versions=" << m.versions << '\n'
     << "wall_time_seconds=" << m.wall_time_seconds << '\n';
  for (std::size_t i = 0; i < m.output_files.size(); ++i) os << "output_file." << i << '=' << m.output_files[i] << '\n';
  std::istringstream cfg(m.config);
  std::string line, section;
  while (std::getline(cfg, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    os << "config." << section << '.' << line << '\n';
  }
}

}  // namespace arelab::cli
