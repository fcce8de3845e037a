#pragma once

#include <string>

#include "arelab/power_engine.hpp"

namespace arelab::cli {

// Reads a flat INI file whose sections mirror SimulationConfig:
//
//   [simulation]  seed, replicates, oracle_replicates, alpha, mode, shift_x, threads
//   [grid]        start, ratio, max_n, refine
//   [smoothing]   method (isotonic|window), window, verification_window
//
// Keys absent from the file keep the values already in cfg. Unknown keys are
// errors so that typos do not silently change a run.
void load_config_file(const std::string& path, SimulationConfig& cfg);

// Canonical key=value rendering, used for the manifest and its hash.
std::string render_config(const SimulationConfig& cfg);

}  // namespace arelab::cli
