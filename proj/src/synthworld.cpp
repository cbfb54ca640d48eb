// Copyright 2026 the scenerec authors
// SPDX-License-Identifier: Apache-2.0
#include "scenerec/synthworld.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scenerec/common.hpp"
#include "scenerec/digest.hpp"
#include "scenerec/io.hpp"
#include "scenerec/lexicon.hpp"
#include "scenerec/rng.hpp"

namespace scenerec {

using nlohmann::json;

void WorldConfig::validate() const {
  require(n_pois >= 1, "world config: n_pois must be >= 1");
  require(n_users >= 1, "world config: n_users must be >= 1");
  require(n_cuisines >= 1, "world config: n_cuisines must be >= 1");
  require(grid_size >= 1, "world config: grid_size must be >= 1");
  require(n_weather >= 1, "world config: n_weather must be >= 1");
  require(n_timeslots >= 1, "world config: n_timeslots must be >= 1");
  require(affinity_noise >= 0.0, "world config: affinity_noise must be >= 0");
}

namespace {

// Component stddev of a symmetric Dirichlet(0.5) over k categories; used to
// z-scale the preference term of the click model.
double dirichlet_component_sd(int k) {
  double alpha = 0.5;
  double a0 = alpha * k;
  double var = alpha * (a0 - alpha) / (a0 * a0 * (a0 + 1.0));
  return std::sqrt(var);
}

SceneContext sample_context(const World& world, const UserRecord& user, long t, Rng& rng) {
  const WorldConfig& cfg = world.config;
  SceneContext ctx;
  ctx.t = t;
  std::vector<double> wweights;
  for (int w = 0; w < cfg.n_weather; ++w) wweights.push_back(lex::weather(w).weight);
  ctx.weather = rng.categorical(wweights);
  ctx.temperature = rng.normal(lex::weather(ctx.weather).temp_mean, 3.0);
  std::vector<double> sweights;
  for (int s = 0; s < cfg.n_timeslots; ++s) sweights.push_back(lex::timeslot(s).weight);
  ctx.timeslot = rng.categorical(sweights);
  if (rng.bernoulli(0.7)) {
    ctx.cell = user.home;
  } else {
    ctx.cell = {rng.below_int(cfg.grid_size), rng.below_int(cfg.grid_size)};
  }
  return ctx;
}

int sample_poi_near(const World& world, const GridCell& cell, Rng& rng) {
  // Impressions favor the request's region.
  int region = lex::region_of(cell.row, cell.col, world.config.grid_size);
  if (rng.bernoulli(0.7)) {
    std::vector<int> local;
    for (const auto& p : world.pois) {
      if (lex::region_of(p.location.row, p.location.col, world.config.grid_size) == region)
        local.push_back(p.poi_id);
    }
    if (!local.empty()) return local[static_cast<size_t>(rng.below(local.size()))];
  }
  return rng.below_int(static_cast<int>(world.pois.size()));
}

std::string format_cell(const GridCell& c) {
  std::ostringstream ss;
  ss << "cell " << c.row << "," << c.col;
  return ss.str();
}

std::string event_clause(const UserEvent& ev) {
  std::ostringstream ss;
  ss << lex::weather(ev.context.weather).phrase << " " << lex::timeslot(ev.context.timeslot).phrase
     << ": ordered " << ev.poi_name << ", " << ev.price_yuan << " yuan";
  return ss.str();
}

}  // namespace

World gen_world(const WorldConfig& config) {
  config.validate();
  World world;
  world.config = config;
  world.truth.pref_scale = 1.0 / dirichlet_component_sd(config.n_cuisines);

  Rng rng = Rng(config.seed).fork(0x1001);

  // POIs: cuisine uniform, location uniform over the grid.
  std::map<std::string, int> name_counter;
  for (int i = 0; i < config.n_pois; ++i) {
    PoiRecord p;
    p.poi_id = i;
    p.cuisine = rng.below_int(config.n_cuisines);
    p.location = {rng.below_int(config.grid_size), rng.below_int(config.grid_size)};
    const auto& cu = lex::cuisine(p.cuisine);
    const auto& brands = lex::brand_words();
    std::string base =
        brands[static_cast<size_t>(rng.below(brands.size()))] + " " + cu.noun;
    int serial = ++name_counter[base];
    p.name = base + " " + std::to_string(serial);

    std::vector<int> dish_idx = rng.sample_distinct(static_cast<int>(cu.dishes.size()), 3);
    std::sort(dish_idx.begin(), dish_idx.end());
    for (int d : dish_idx) p.menu.emplace_back(cu.dishes[static_cast<size_t>(d)]);

    const std::string& region =
        lex::region_name(p.location.row, p.location.col, config.grid_size);
    p.intro = "known for " + p.menu[0] + " in " + region;

    double orders = std::round(std::exp(rng.normal(std::log(150.0), 0.6)));
    p.stats["orders30d"] = orders;
    p.stats["clicks30d"] = std::round(orders * rng.uniform(3.0, 6.0));
    p.stats["rating"] = std::round(rng.uniform(3.5, 5.0) * 10.0) / 10.0;
    p.stats["delivery_min"] = 18 + rng.below_int(28);
    p.stats["fee_yuan"] = rng.below_int(6);
    p.stats["avg_price"] = std::round(cu.base_price * rng.uniform(0.8, 1.3));
    world.pois.push_back(std::move(p));
  }

  // Users: preference over cuisines from a symmetric Dirichlet.
  static const std::vector<std::string> adjectives = {"hungry", "cozy",    "midnight", "sunny",
                                                      "spicy",  "roaming", "quiet",    "snowy"};
  static const std::vector<std::string> animals = {"panda", "otter",  "sparrow", "tiger",
                                                   "rabbit", "fox",   "crane",   "lynx"};
  for (int i = 0; i < config.n_users; ++i) {
    UserRecord u;
    u.user_id = i;
    u.nickname = adjectives[static_cast<size_t>(rng.below(adjectives.size()))] + " " +
                 animals[static_cast<size_t>(rng.below(animals.size()))] + " " +
                 std::to_string(1 + rng.below_int(99));
    u.gender = lex::genders()[static_cast<size_t>(rng.below(lex::genders().size()))];
    u.home = {rng.below_int(config.grid_size), rng.below_int(config.grid_size)};
    u.pref = rng.dirichlet(config.n_cuisines, 0.5);
    world.users.push_back(std::move(u));
  }

  // Histories are generated against the planted click model so that action
  // texts reflect actual user taste and context fit.
  for (auto& u : world.users) {
    int n_events = 2 + rng.below_int(3);
    for (int j = 0; j < n_events; ++j) {
      SceneContext ctx = sample_context(world, u, j, rng);
      int chosen = -1;
      for (int attempt = 0; attempt < 8; ++attempt) {
        int cand = sample_poi_near(world, ctx.cell, rng);
        chosen = cand;
        if (rng.bernoulli(click_probability(world, u.user_id, cand, ctx))) break;
      }
      const PoiRecord& p = world.poi(chosen);
      UserEvent ev;
      ev.poi_id = chosen;
      ev.poi_name = p.name;
      ev.context = ctx;
      ev.price_yuan = static_cast<int>(
          std::max(5.0, std::round(p.stats.at("avg_price") + rng.normal(0.0, 4.0))));
      ev.action = 2;
      u.history.push_back(std::move(ev));
    }
  }
  return world;
}

double click_logit(const World& world, int user_id, int poi_id, const SceneContext& ctx) {
  const UserRecord& u = world.user(user_id);
  const PoiRecord& p = world.poi(poi_id);
  const GroundTruth& gt = world.truth;
  int k = world.config.n_cuisines;
  double aff = (u.pref[static_cast<size_t>(p.cuisine)] - 1.0 / k) * gt.pref_scale;
  const auto& cu = lex::cuisine(p.cuisine);
  double warm = cu.warmth * lex::coldness(ctx.temperature);
  double meal = cu.meal_match[static_cast<size_t>(ctx.timeslot) % 4];
  double home = (ctx.cell == u.home) ? 1.0 : 0.0;
  return gt.bias + gt.w_affinity * aff + gt.w_warmth * warm + gt.w_meal * meal + gt.w_home * home;
}

double click_probability(const World& world, int user_id, int poi_id, const SceneContext& ctx) {
  double logit = click_logit(world, user_id, poi_id, ctx);
  double s = world.config.affinity_noise;
  if (s <= 0.0) return logit > 0.0 ? 1.0 : 0.0;
  return 1.0 / (1.0 + std::exp(-logit / s));
}

std::vector<InteractionRecord> sample_interactions(const World& world, long n, uint64_t seed) {
  require(!world.pois.empty() && !world.users.empty(), "sample_interactions: world is empty");
  require(n >= 0, "sample_interactions: n must be >= 0");
  Rng rng = Rng(seed).fork(0x2002);
  std::vector<InteractionRecord> out;
  out.reserve(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) {
    InteractionRecord r;
    r.user_id = rng.below_int(static_cast<int>(world.users.size()));
    r.context = sample_context(world, world.user(r.user_id), i, rng);
    r.poi_id = sample_poi_near(world, r.context.cell, rng);
    double p = click_probability(world, r.user_id, r.poi_id, r.context);
    r.click = rng.bernoulli(p) ? 1 : 0;
    r.order = (r.click == 1 && rng.bernoulli(world.truth.order_fraction)) ? 1 : 0;
    out.push_back(r);
  }
  return out;
}

KeywordedText render_poi_description(const PoiRecord& poi, int grid_size) {
  const auto& cu = lex::cuisine(poi.cuisine);
  KeywordedText text;
  text.slices.push_back({"name", poi.name});
  text.slices.push_back(
      {"location", format_cell(poi.location) + " " +
                       lex::region_name(poi.location.row, poi.location.col, grid_size)});
  text.slices.push_back({"tag", cu.tag});
  text.slices.push_back({"intro", poi.intro});
  std::string menu;
  for (size_t i = 0; i < poi.menu.size(); ++i) {
    if (i) menu += "; ";
    menu += poi.menu[i];
  }
  text.slices.push_back({"menu", menu});
  std::ostringstream stats;
  stats << "orders " << static_cast<long>(poi.stats.at("orders30d")) << "; clicks "
        << static_cast<long>(poi.stats.at("clicks30d")) << "; rating " << poi.stats.at("rating");
  text.slices.push_back({"stats", stats.str()});
  std::ostringstream service;
  service << "delivery " << static_cast<long>(poi.stats.at("delivery_min")) << " min; fee "
          << static_cast<long>(poi.stats.at("fee_yuan")) << " yuan";
  text.slices.push_back({"service", service.str()});
  return text;
}

std::pair<KeywordedText, KeywordedText> render_user_texts(const UserRecord& user, int grid_size) {
  // Two highest-preference cuisines, ties broken by index.
  std::vector<int> order(user.pref.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return user.pref[static_cast<size_t>(a)] > user.pref[static_cast<size_t>(b)]; });
  std::ostringstream profile;
  profile << user.nickname << "; " << user.gender << "; lives in " << format_cell(user.home) << " "
          << lex::region_name(user.home.row, user.home.col, grid_size) << "; enjoys "
          << lex::cuisine(order[0]).tag;
  if (order.size() > 1) profile << " and " << lex::cuisine(order[1]).tag;

  KeywordedText up;
  up.slices.push_back({"profile", profile.str()});

  KeywordedText ua;
  if (user.history.empty()) {
    ua.slices.push_back({"actions", "no delivery history yet"});
  } else {
    std::string actions;
    for (size_t i = 0; i < user.history.size(); ++i) {
      if (i) actions += "; ";
      actions += event_clause(user.history[i]);
    }
    ua.slices.push_back({"actions", actions});
  }
  return {up, ua};
}

DatasetSplit split_dataset(std::vector<InteractionRecord> records, double test_fraction) {
  require(test_fraction > 0.0 && test_fraction < 1.0,
          "split_dataset: test fraction must be in (0, 1)");
  std::stable_sort(records.begin(), records.end(),
                   [](const InteractionRecord& a, const InteractionRecord& b) {
                     return a.context.t < b.context.t;
                   });
  size_t n_test = static_cast<size_t>(std::llround(static_cast<double>(records.size()) * test_fraction));
  if (n_test >= records.size() && !records.empty()) n_test = records.size() - 1;
  size_t n_train = records.size() - n_test;
  DatasetSplit split;
  split.train.assign(records.begin(), records.begin() + static_cast<long>(n_train));
  split.test.assign(records.begin() + static_cast<long>(n_train), records.end());
  return split;
}

namespace {

json context_to_json(const SceneContext& c) {
  return json{{"weather", c.weather}, {"timeslot", c.timeslot},
              {"cell", {c.cell.row, c.cell.col}}, {"temp", c.temperature}, {"t", c.t}};
}

SceneContext context_from_json(const json& j) {
  SceneContext c;
  c.weather = j.at("weather").get<int>();
  c.timeslot = j.at("timeslot").get<int>();
  c.cell = {j.at("cell").at(0).get<int>(), j.at("cell").at(1).get<int>()};
  c.temperature = j.at("temp").get<double>();
  c.t = j.at("t").get<long>();
  return c;
}

}  // namespace

void save_world(const World& world, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::ostringstream pois;
  for (const auto& p : world.pois) {
    json j{{"poi_id", p.poi_id},
           {"name", p.name},
           {"cell", {p.location.row, p.location.col}},
           {"cuisine", p.cuisine},
           {"menu", p.menu},
           {"intro", p.intro},
           {"stats", p.stats}};
    pois << j.dump() << "\n";
  }
  write_file_atomic(dir / "pois.jsonl", pois.str());

  std::ostringstream users;
  for (const auto& u : world.users) {
    json hist = json::array();
    for (const auto& ev : u.history) {
      hist.push_back(json{{"poi_id", ev.poi_id},
                          {"poi_name", ev.poi_name},
                          {"context", context_to_json(ev.context)},
                          {"price_yuan", ev.price_yuan},
                          {"action", ev.action}});
    }
    json j{{"user_id", u.user_id}, {"nickname", u.nickname}, {"gender", u.gender},
           {"home", {u.home.row, u.home.col}}, {"pref", u.pref}, {"history", hist}};
    users << j.dump() << "\n";
  }
  write_file_atomic(dir / "users.jsonl", users.str());

  json truth{{"w_affinity", world.truth.w_affinity}, {"w_warmth", world.truth.w_warmth},
             {"w_meal", world.truth.w_meal},         {"w_home", world.truth.w_home},
             {"bias", world.truth.bias},             {"order_fraction", world.truth.order_fraction},
             {"pref_scale", world.truth.pref_scale}};
  write_file_atomic(dir / "groundtruth.json", truth.dump(2) + "\n");

  json manifest{{"format", "scenerec-world v1"},
                {"config",
                 {{"n_pois", world.config.n_pois},
                  {"n_users", world.config.n_users},
                  {"n_cuisines", world.config.n_cuisines},
                  {"grid_size", world.config.grid_size},
                  {"n_weather", world.config.n_weather},
                  {"n_timeslots", world.config.n_timeslots},
                  {"affinity_noise", world.config.affinity_noise},
                  {"seed", world.config.seed}}},
                {"digests",
                 {{"pois", hex64(file_digest(dir / "pois.jsonl"))},
                  {"users", hex64(file_digest(dir / "users.jsonl"))},
                  {"groundtruth", hex64(file_digest(dir / "groundtruth.json"))}}}};
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

World load_world(const std::filesystem::path& dir) {
  json manifest = json::parse(read_file(dir / "manifest.json"));
  require(manifest.at("format").get<std::string>() == "scenerec-world v1",
          "world manifest: unsupported format");
  World world;
  const json& cfg = manifest.at("config");
  world.config.n_pois = cfg.at("n_pois").get<int>();
  world.config.n_users = cfg.at("n_users").get<int>();
  world.config.n_cuisines = cfg.at("n_cuisines").get<int>();
  world.config.grid_size = cfg.at("grid_size").get<int>();
  world.config.n_weather = cfg.at("n_weather").get<int>();
  world.config.n_timeslots = cfg.at("n_timeslots").get<int>();
  world.config.affinity_noise = cfg.at("affinity_noise").get<double>();
  world.config.seed = cfg.at("seed").get<uint64_t>();

  require(hex64(file_digest(dir / "pois.jsonl")) ==
              manifest.at("digests").at("pois").get<std::string>(),
          "world load: pois.jsonl digest mismatch");
  require(hex64(file_digest(dir / "users.jsonl")) ==
              manifest.at("digests").at("users").get<std::string>(),
          "world load: users.jsonl digest mismatch");

  for (const auto& line : read_lines(dir / "pois.jsonl")) {
    json j = json::parse(line);
    PoiRecord p;
    p.poi_id = j.at("poi_id").get<int>();
    p.name = j.at("name").get<std::string>();
    p.location = {j.at("cell").at(0).get<int>(), j.at("cell").at(1).get<int>()};
    p.cuisine = j.at("cuisine").get<int>();
    p.menu = j.at("menu").get<std::vector<std::string>>();
    p.intro = j.at("intro").get<std::string>();
    p.stats = j.at("stats").get<std::map<std::string, double>>();
    world.pois.push_back(std::move(p));
  }
  for (const auto& line : read_lines(dir / "users.jsonl")) {
    json j = json::parse(line);
    UserRecord u;
    u.user_id = j.at("user_id").get<int>();
    u.nickname = j.at("nickname").get<std::string>();
    u.gender = j.at("gender").get<std::string>();
    u.home = {j.at("home").at(0).get<int>(), j.at("home").at(1).get<int>()};
    u.pref = j.at("pref").get<std::vector<double>>();
    for (const auto& ej : j.at("history")) {
      UserEvent ev;
      ev.poi_id = ej.at("poi_id").get<int>();
      ev.poi_name = ej.at("poi_name").get<std::string>();
      ev.context = context_from_json(ej.at("context"));
      ev.price_yuan = ej.at("price_yuan").get<int>();
      ev.action = ej.at("action").get<int>();
      u.history.push_back(std::move(ev));
    }
    world.users.push_back(std::move(u));
  }

  json truth = json::parse(read_file(dir / "groundtruth.json"));
  world.truth.w_affinity = truth.at("w_affinity").get<double>();
  world.truth.w_warmth = truth.at("w_warmth").get<double>();
  world.truth.w_meal = truth.at("w_meal").get<double>();
  world.truth.w_home = truth.at("w_home").get<double>();
  world.truth.bias = truth.at("bias").get<double>();
  world.truth.order_fraction = truth.at("order_fraction").get<double>();
  world.truth.pref_scale = truth.at("pref_scale").get<double>();
  return world;
}

void save_interactions(const std::vector<InteractionRecord>& records,
                       const std::filesystem::path& file) {
  std::ostringstream out;
  for (const auto& r : records) {
    json j{{"user_id", r.user_id},
           {"poi_id", r.poi_id},
           {"context", context_to_json(r.context)},
           {"click", r.click},
           {"order", r.order}};
    out << j.dump() << "\n";
  }
  write_file_atomic(file, out.str());
}

std::vector<InteractionRecord> load_interactions(const std::filesystem::path& file) {
  std::vector<InteractionRecord> records;
  for (const auto& line : read_lines(file)) {
    json j = json::parse(line);
    InteractionRecord r;
    r.user_id = j.at("user_id").get<int>();
    r.poi_id = j.at("poi_id").get<int>();
    r.context = context_from_json(j.at("context"));
    r.click = j.at("click").get<int>();
    r.order = j.at("order").get<int>();
    records.push_back(r);
  }
  return records;
}

uint64_t world_digest(const std::filesystem::path& dir) {
  return file_digest(dir / "manifest.json");
}

}  // namespace scenerec
