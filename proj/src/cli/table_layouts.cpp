#include "arelab/cli/table_layouts.hpp"

#include "arelab/errors.hpp"

namespace arelab::cli {

const std::vector<PowerTableLayout>& power_tables() {
  static const std::vector<PowerTableLayout> tables = {
      {1,
       0.7,
       {{0.1,
         {{16, 5, 30}, {28, 6, 40}, {41, 7, 50}, {60, 9, 60}, {80, 11, 70}, {300, 30, 98},
          {410, 40, 100}, {520, 50, 100}, {640, 60, 100}, {780, 70, 100}}},
        {0.05,
         {{11, 4, 15}, {20, 4, 20}, {42, 5, 30}, {70, 6, 40}, {105, 7, 50}, {150, 7, 60},
          {540, 15, 94}, {750, 20, 98}, {1200, 30, 100}, {1600, 40, 100}, {2080, 50, 100},
          {2500, 60, 100}}},
        {0.02,
         {{40, 4, 15}, {70, 5, 20}, {155, 5, 30}, {250, 5, 40}, {3200, 15, 99}, {4900, 20, 100},
          {7700, 30, 100}, {10100, 40, 100}}}}},
      {2,
       0.6,
       {{0.1,
         {{16, 5, 20}, {35, 6, 30}, {60, 7, 40}, {92, 9, 50}, {127, 10, 60}, {175, 13, 70},
          {300, 20, 86}, {480, 30, 96}, {640, 40, 99}, {840, 50, 100}, {1040, 60, 100},
          {1280, 70, 100}}},
        {0.05,
         {{27, 5, 15}, {48, 5, 20}, {105, 6, 30}, {180, 7, 40}, {260, 8, 50}, {370, 9, 60},
          {800, 15, 85}, {1045, 20, 94}, {1900, 30, 99}, {2600, 40, 100}, {3300, 50, 100},
          {4100, 60, 100}}},
        {0.02,
         {{110, 4, 15}, {205, 5, 20}, {460, 6, 30}, {5400, 15, 95}, {7800, 20, 99},
          {12000, 30, 100}}}}},
      {3,
       0.4,
       {{0.2,
         {{15, 5, 15}, {28, 6, 20}, {62, 9, 30}, {100, 11, 40}, {148, 14, 50}, {153, 15, 51},
          {200, 18, 60}, {225, 20, 64}, {270, 24, 70}, {350, 30, 79}, {500, 40, 90}, {640, 50, 95},
          {795, 60, 97}, {970, 70, 99}}},
        {0.1,
         {{54, 5, 15}, {105, 6, 20}, {220, 8, 30}, {360, 11, 40}, {510, 13, 50}, {600, 15, 55},
          {700, 16, 60}, {870, 20, 68}, {1430, 30, 84}, {1950, 40, 93}, {2500, 50, 97},
          {3160, 60, 99}}},
        {0.05,
         {{205, 6, 15}, {400, 6, 20}, {810, 8, 30}, {2400, 15, 59}, {3400, 20, 72},
          {5600, 30, 88}}}}},
      {4,
       0.3,
       {{0.2,
         {{40, 6, 15}, {75, 7, 20}, {165, 10, 30}, {255, 13, 40}, {300, 15, 44}, {360, 17, 50},
          {430, 20, 56}, {480, 22, 60}, {645, 28, 70}, {710, 30, 73}, {980, 40, 84},
          {1260, 50, 91}, {1600, 60, 96}, {1950, 70, 98}}},
        {0.1,
         {{160, 5, 15}, {300, 7, 20}, {610, 10, 30}, {950, 13, 40}, {1200, 15, 47}, {1340, 17, 50},
          {1700, 20, 58}, {1830, 21, 60}, {2800, 30, 76}, {3880, 40, 87}, {5050, 50, 93},
          {6350, 60, 97}}},
        {0.05,
         {{640, 6, 15}, {1200, 7, 20}, {2300, 10, 30}, {4800, 15, 47}, {6800, 20, 59},
          {11100, 30, 77}}}}},
  };
  return tables;
}

const PowerTableLayout& power_table(int id) {
  for (const auto& t : power_tables()) {
    if (t.id == id) return t;
  }
  throw DomainError("power tables have ids 1..4, got " + std::to_string(id));
}

const std::vector<RatioRow>& ratio_table() {
  static const std::vector<RatioRow> rows = {
      {0.7, 0.1, {{30, 16, 18.8}, {40, 28, 14.6}, {50, 41, 12.7}, {60, 60, 10.7}, {70, 80, 9.8}}},
      {0.7, 0.05,
       {{15, 11, 49.1}, {20, 20, 37.5}, {30, 42, 28.6}, {40, 70, 22.9}, {50, 105, 19.8}, {60, 150, 16.7}}},
      {0.7, 0.02, {{15, 40, 80.0}, {20, 70, 70.0}, {30, 155, 49.7}, {40, 250, 40.4}}},
      {0.6, 0.1,
       {{20, 16, 18.8}, {30, 35, 13.7}, {40, 60, 10.7}, {50, 92, 9.1}, {60, 127, 8.2}, {70, 175, 7.3}}},
      {0.6, 0.05,
       {{15, 27, 29.6}, {20, 48, 21.8}, {30, 105, 18.1}, {40, 180, 14.4}, {50, 260, 12.7}, {60, 370, 11.1}}},
      {0.6, 0.02, {{15, 110, 49.1}, {20, 205, 38.1}, {30, 460, 26.1}}},
      {0.4, 0.2,
       {{15, 15, 10.2}, {20, 28, 8.0}, {30, 62, 5.7}, {40, 100, 5.0}, {50, 148, 4.3}, {60, 200, 4.0},
        {70, 270, 3.6}}},
      {0.4, 0.1,
       {{15, 54, 11.1}, {20, 105, 8.3}, {30, 220, 6.6}, {40, 360, 5.4}, {50, 510, 4.9}, {60, 700, 4.5}}},
      {0.4, 0.05, {{15, 205, 11.7}, {20, 400, 8.5}, {30, 810, 6.9}}},
      {0.3, 0.2,
       {{15, 40, 7.5}, {20, 75, 5.7}, {30, 165, 4.3}, {40, 255, 3.8}, {50, 360, 3.5}, {60, 480, 3.3},
        {70, 645, 3.0}}},
      {0.3, 0.1,
       {{15, 160, 7.5}, {20, 300, 5.7}, {30, 610, 4.6}, {40, 950, 4.1}, {50, 1340, 3.8}, {60, 1830, 3.5}}},
      {0.3, 0.05, {{15, 640, 7.5}, {20, 1200, 5.7}, {30, 2300, 4.8}}},
  };
  return rows;
}

}  // namespace arelab::cli
