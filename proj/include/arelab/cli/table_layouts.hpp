#pragma once

#include <cstddef>
#include <vector>

namespace arelab::cli {

// One printed cell of the power tables: n with the reference KS and NP
// percentages.
struct PowerCellRef {
  std::size_t n;
  int ks_percent;
  int np_percent;
};

struct PowerColumn {
  double theta;
  std::vector<PowerCellRef> cells;
};

struct PowerTableLayout {
  int id;
  double r;
  std::vector<PowerColumn> columns;
};

// One cell of the ratio table: at the target power the NP test needs n_np
// observations; reference_ratio is the reference N/n.
struct RatioCellRef {
  int power_percent;
  std::size_t n_np;
  double reference_ratio;
};

struct RatioRow {
  double r;
  double theta;
  std::vector<RatioCellRef> cells;
};

// Tables 1-4 (power tables, ids 1..4).
const std::vector<PowerTableLayout>& power_tables();
const PowerTableLayout& power_table(int id);

// Table 5 rows.
const std::vector<RatioRow>& ratio_table();
inline constexpr int kRatioPowerLevels[] = {15, 20, 30, 40, 50, 60, 70};

}  // namespace arelab::cli
