// Copyright 2026 the scenerec authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "scenerec/textcodec.hpp"

namespace scenerec {

struct WorldConfig {
  int n_pois = 200;
  int n_users = 1000;
  int n_cuisines = 8;
  int grid_size = 8;
  int n_weather = 5;
  int n_timeslots = 4;
  double affinity_noise = 1.0;  // logistic noise scale in the click model; 0 = hard threshold
  uint64_t seed = 42;

  void validate() const;
};

struct GridCell {
  int row = 0;
  int col = 0;
  bool operator==(const GridCell&) const = default;
};

struct PoiRecord {
  int poi_id = 0;
  std::string name;
  GridCell location;
  int cuisine = 0;
  std::vector<std::string> menu;
  std::string intro;
  std::map<std::string, double> stats;
};

struct SceneContext {
  int weather = 0;
  int timeslot = 0;
  GridCell cell;
  double temperature = 18.0;
  long t = 0;  // event time index
};

struct UserEvent {
  int poi_id = 0;
  std::string poi_name;
  SceneContext context;
  int price_yuan = 0;
  int action = 2;  // 1 = click, 2 = order
};

struct UserRecord {
  int user_id = 0;
  std::string nickname;
  std::string gender;
  GridCell home;
  std::vector<double> pref;  // preference weights over cuisines, sums to 1
  std::vector<UserEvent> history;
};

struct InteractionRecord {
  int user_id = 0;
  int poi_id = 0;
  SceneContext context;
  int click = 0;
  int order = 0;
};

// Planted click model parameters; persisted so tests and diagnostics can
// recompute the exact generative probabilities.
struct GroundTruth {
  double w_affinity = 1.3;
  double w_warmth = 1.1;
  double w_meal = 0.9;
  double w_home = 0.5;
  double bias = -1.1;
  double order_fraction = 0.35;
  double pref_scale = 1.0;  // z-scales the user-cuisine preference term
};

struct World {
  WorldConfig config;
  std::vector<PoiRecord> pois;
  std::vector<UserRecord> users;
  GroundTruth truth;

  const PoiRecord& poi(int id) const { return pois.at(static_cast<size_t>(id)); }
  const UserRecord& user(int id) const { return users.at(static_cast<size_t>(id)); }
};

World gen_world(const WorldConfig& config);

// Click logit under the planted model (before sampling noise).
double click_logit(const World& world, int user_id, int poi_id, const SceneContext& ctx);
// P(click) = sigmoid(logit / affinity_noise); degenerates to a step at 0 noise.
double click_probability(const World& world, int user_id, int poi_id, const SceneContext& ctx);

std::vector<InteractionRecord> sample_interactions(const World& world, long n, uint64_t seed);

// Renders the n_k + 1 keyword slices of a POI description.
KeywordedText render_poi_description(const PoiRecord& poi, int grid_size);

// Renders (U_p, U_a): a single profile slice and a single actions slice.
// Users without history get a fixed sentinel actions slice.
std::pair<KeywordedText, KeywordedText> render_user_texts(const UserRecord& user, int grid_size);

// Temporal split: test is the trailing fraction by event time.
struct DatasetSplit {
  std::vector<InteractionRecord> train;
  std::vector<InteractionRecord> test;
};
DatasetSplit split_dataset(std::vector<InteractionRecord> records, double test_fraction);

// Line-delimited serialization; a manifest records config + seed + format.
void save_world(const World& world, const std::filesystem::path& dir);
World load_world(const std::filesystem::path& dir);
void save_interactions(const std::vector<InteractionRecord>& records,
                       const std::filesystem::path& file);
std::vector<InteractionRecord> load_interactions(const std::filesystem::path& file);

uint64_t world_digest(const std::filesystem::path& dir);

}  // namespace scenerec
