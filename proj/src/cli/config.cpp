#include "arelab/cli/config.hpp"

#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "arelab/errors.hpp"

namespace arelab::cli {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kKnownKeys = {
    "simulation.seed",      "simulation.replicates", "simulation.oracle_replicates",
    "simulation.alpha",     "simulation.mode",       "simulation.shift_x",
    "simulation.threads",   "grid.start",            "grid.ratio",
    "grid.max_n",           "grid.refine",           "smoothing.method",
    "smoothing.window",     "smoothing.verification_window",
};

template <typename T>
void read(const pt::ptree& tree, const char* key, T& value) {
  if (auto v = tree.get_optional<T>(key)) value = *v;
}

}  // namespace

void load_config_file(const std::string& path, SimulationConfig& cfg) {
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw DomainError("cannot read config file: " + std::string(e.what()));
  }
  for (const auto& [section, body] : tree) {
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!kKnownKeys.count(full)) throw DomainError("unknown config key '" + full + "' in " + path);
    }
  }
  try {
    read(tree, "simulation.seed", cfg.seed);
    read(tree, "simulation.replicates", cfg.replicates);
    read(tree, "simulation.oracle_replicates", cfg.oracle_replicates);
    read(tree, "simulation.alpha", cfg.alpha);
    read(tree, "simulation.shift_x", cfg.shift_x);
    read(tree, "simulation.threads", cfg.threads);
    read(tree, "grid.start", cfg.grid.start);
    read(tree, "grid.ratio", cfg.grid.ratio);
    read(tree, "grid.max_n", cfg.grid.max_n);
    read(tree, "grid.refine", cfg.grid.refine);
    read(tree, "smoothing.window", cfg.smoothing_window);
    read(tree, "smoothing.verification_window", cfg.verification_window);
    if (auto mode = tree.get_optional<std::string>("simulation.mode")) {
      if (*mode == "fixed_level") cfg.mode = LevelMode::fixed_level;
      else if (*mode == "shift") cfg.mode = LevelMode::shift;
      else throw DomainError("simulation.mode must be fixed_level or shift");
    }
    if (auto method = tree.get_optional<std::string>("smoothing.method")) {
      if (*method == "isotonic") cfg.smoothing = PowerSmoothing::isotonic;
      else if (*method == "window") cfg.smoothing = PowerSmoothing::window;
      else throw DomainError("smoothing.method must be isotonic or window");
    }
  } catch (const pt::ptree_bad_data& e) {
    throw DomainError("bad value in config file " + path + ": " + e.what());
  }
}

std::string render_config(const SimulationConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "[simulation]\n"
     << "seed=" << cfg.seed << "\n"
     << "replicates=" << cfg.replicates << "\n"
     << "oracle_replicates=" << cfg.oracle_replicates << "\n"
     << "alpha=" << cfg.alpha << "\n"
     << "mode=" << (cfg.mode == LevelMode::fixed_level ? "fixed_level" : "shift") << "\n"
     << "shift_x=" << cfg.shift_x << "\n"
     << "[grid]\n"
     << "start=" << cfg.grid.start << "\n"
     << "ratio=" << cfg.grid.ratio << "\n"
     << "max_n=" << cfg.grid.max_n << "\n"
     << "refine=" << (cfg.grid.refine ? "true" : "false") << "\n"
     << "[smoothing]\n"
     << "method=" << (cfg.smoothing == PowerSmoothing::isotonic ? "isotonic" : "window") << "\n"
     << "window=" << cfg.smoothing_window << "\n"
     << "verification_window=" << cfg.verification_window << "\n";
  return os.str();
}

}  // namespace arelab::cli
