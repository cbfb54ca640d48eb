// Copyright 2026 the scenerec authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

namespace scenerec::lex {

// Fixed phrase tables shared by the world generator and the scene-feature
// renderer. Both sides must draw from the same vocabulary so that scene
// texts and the training corpus overlap.

struct CuisineInfo {
  const char* noun;   // used in POI names
  const char* tag;    // category tag slice
  double warmth;      // -1 icy .. +1 boiling; drives the planted weather cross
  std::array<const char*, 6> dishes;
  std::array<double, 4> meal_match;  // per timeslot: breakfast, lunch, dinner, late night
  double base_price;
};

inline const std::vector<CuisineInfo>& cuisines() {
  static const std::vector<CuisineInfo> table = {
      {"congee house", "cantonese comfort food", 0.6,
       {"pork congee", "shrimp dumpling", "rice noodle roll", "custard bun", "turnip cake",
        "chicken feet"},
       {1.0, 0.2, 0.0, 0.3},
       22},
      {"hotpot kitchen", "boiling hotpot", 1.0,
       {"spicy beef hotpot", "lamb hotpot", "mushroom broth", "tripe platter", "fish ball skewer",
        "tofu hotpot"},
       {-1.0, 0.0, 0.6, 1.0},
       55},
      {"noodle bar", "steaming noodles", 0.8,
       {"beef noodle soup", "wonton noodles", "dan dan noodles", "hand pulled ramen",
        "scallion oil noodles", "hot dry noodles"},
       {0.3, 1.0, 0.3, 0.0},
       28},
      {"grill yard", "charcoal grill", 0.4,
       {"charcoal lamb skewer", "grilled fish", "roast chicken wing", "smoked brisket",
        "grilled eggplant", "corn on the cob"},
       {-1.0, 0.3, 0.6, 1.0},
       42},
      {"pizza stop", "western fast food", 0.0,
       {"pepperoni pizza", "cheese burger", "garlic bread", "fried chicken sandwich",
        "onion rings", "margherita pizza"},
       {-0.5, 0.8, 0.6, 0.0},
       38},
      {"salad bar", "fresh light bites", -0.5,
       {"garden salad", "chicken caesar wrap", "quinoa bowl", "fruit cup", "avocado toast",
        "cold pasta salad"},
       {0.0, 1.0, 0.3, -0.5},
       32},
      {"sushi counter", "cold seafood rice", -0.6,
       {"salmon sushi set", "tuna poke bowl", "seaweed salad", "chilled soba", "california roll",
        "shrimp nigiri"},
       {-0.5, 0.8, 0.6, -0.3},
       48},
      {"dessert lab", "icy sweet desserts", -1.0,
       {"mango shaved ice", "vanilla sundae", "iced milk tea", "frozen yogurt", "chilled pudding",
        "fruit smoothie"},
       {0.0, 0.3, 0.3, 0.8},
       18},
  };
  return table;
}

inline const CuisineInfo& cuisine(int c) {
  const auto& t = cuisines();
  return t[static_cast<size_t>(c) % t.size()];
}

struct WeatherInfo {
  const char* phrase;
  double temp_mean;
  double weight;
};

inline const std::vector<WeatherInfo>& weathers() {
  static const std::vector<WeatherInfo> table = {
      {"clear sky", 22, 0.30}, {"light rain", 12, 0.22}, {"heavy rain", 8, 0.13},
      {"snow", -3, 0.12},      {"overcast haze", 15, 0.23},
  };
  return table;
}

inline const WeatherInfo& weather(int w) {
  const auto& t = weathers();
  return t[static_cast<size_t>(w) % t.size()];
}

struct TimeslotInfo {
  const char* phrase;
  double weight;
};

inline const std::vector<TimeslotInfo>& timeslots() {
  static const std::vector<TimeslotInfo> table = {
      {"breakfast", 0.18}, {"lunch rush", 0.30}, {"dinner time", 0.32}, {"late night", 0.20}};
  return table;
}

inline const TimeslotInfo& timeslot(int s) {
  const auto& t = timeslots();
  return t[static_cast<size_t>(s) % t.size()];
}

// Grid quadrant names; grids smaller than 2x2 collapse into region 0.
inline const std::vector<std::string>& regions() {
  static const std::vector<std::string> table = {"harborside", "old town", "garden hills",
                                                 "station quarter"};
  return table;
}

inline int region_of(int row, int col, int grid_size) {
  if (grid_size < 2) return 0;
  int half = grid_size / 2;
  return (row >= half ? 2 : 0) + (col >= half ? 1 : 0);
}

inline const std::string& region_name(int row, int col, int grid_size) {
  return regions()[static_cast<size_t>(region_of(row, col, grid_size))];
}

inline const char* temperature_bin(double t) {
  if (t < 0) return "freezing cold";
  if (t < 8) return "chilly";
  if (t < 15) return "cool";
  if (t < 22) return "mild";
  if (t < 30) return "warm";
  return "scorching hot";
}

inline int temperature_bin_index(double t) {
  if (t < 0) return 0;
  if (t < 8) return 1;
  if (t < 15) return 2;
  if (t < 22) return 3;
  if (t < 30) return 4;
  return 5;
}

// Normalized cold score in [-1.5, 1.5]; pairs with cuisine warmth in the
// planted click model.
inline double coldness(double temp) {
  double c = (18.0 - temp) / 12.0;
  if (c > 1.5) c = 1.5;
  if (c < -1.5) c = -1.5;
  return c;
}

inline const char* day_type(long t) { return (t / 1000) % 7 < 5 ? "weekday" : "weekend"; }

inline const std::vector<std::string>& brand_words() {
  static const std::vector<std::string> table = {"golden", "lucky", "jade",  "sunrise",
                                                 "corner", "twin",  "grand", "little"};
  return table;
}

inline const std::vector<std::string>& genders() {
  static const std::vector<std::string> table = {"female", "male", "unspecified"};
  return table;
}

// Scene-level statistic phrases, three levels each.
inline const std::array<std::array<const char*, 3>, 4>& stat_phrases() {
  static const std::array<std::array<const char*, 3>, 4> table = {{
      {"demand is quiet", "demand is steady", "demand is surging"},
      {"couriers are idle", "couriers are busy", "couriers are overloaded"},
      {"waits are short", "waits are normal", "waits are long"},
      {"few discounts", "some discounts", "heavy discounts"},
  }};
  return table;
}

}  // namespace scenerec::lex
