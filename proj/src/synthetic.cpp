#include "bos/synthetic.hpp"

#include "bos/error.hpp"
#include "bos/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace bos {
namespace {

constexpr double kQuantum = 1e6;          // emitted values are rounded to 1e-6
constexpr int kMinBlinkGap = 4;           // frames between pulse starts
constexpr double kRecipeSumTolerance = 1e-6;
constexpr std::uint64_t kLabelStream = 0xB05B05B05ULL;

double quantize(double v) { return std::round(v * kQuantum) / kQuantum; }

ChannelRow base_mean() {
  ChannelRow m = ChannelRow::Zero();
  m(kAu45) = 0.1;
  m(kGazeX) = 0.05;
  m(kGazeY) = 0.15;
  m(kHeadX) = 10.0;
  m(kHeadY) = 30.0;
  m(kHeadZ) = 450.0;
  m(kHeadPitch) = 0.1;
  m(kWristX) = 0.5;
  m(kWristY) = 0.85;
  m(kWristZ) = -0.1;
  return m;
}

ChannelRow still_scale() {
  ChannelRow s;
  s << 0.08, 0.08, 0.05, 0.01, 0.01, 1.0, 1.0, 1.0, 0.01, 0.01, 0.01, 0.005, 0.005, 0.005;
  return s;
}

ChannelRow moving_scale() {
  ChannelRow s = still_scale() * 5.0;
  s(kValence) = 0.08;
  s(kArousal) = 0.08;
  s(kAu45) = 0.05;
  return s;
}

LatentState make_state(std::string name, double valence, double arousal, bool moving, double blink) {
  LatentState st;
  st.name = std::move(name);
  st.mean = base_mean();
  st.mean(kValence) = valence;
  st.mean(kArousal) = arousal;
  st.scale = moving ? moving_scale() : still_scale();
  st.blink_probability = blink;
  return st;
}

// One contiguous run of a single state. Pulses start at least one frame after
// the run begins and end at least one frame before it ends, so runs can be
// concatenated in any order without merging blinks.
ChannelMatrix emit_run(const LatentState &st, int length, double noise, Rng &rng) {
  ChannelMatrix out(length, kNumChannels);
  for (int t = 0; t < length; ++t) {
    for (int c = 0; c < kNumChannels; ++c) out(t, c) = st.mean(c) + noise * st.scale(c) * rng.normal();
    out(t, kValence) = std::clamp(out(t, kValence), -1.0, 1.0);
    out(t, kArousal) = std::clamp(out(t, kArousal), -1.0, 1.0);
    out(t, kAu45) = std::max(out(t, kAu45), 0.0);
  }
  int last_start = -kMinBlinkGap;
  for (int t = 1; t + 3 <= length; ++t) {
    if (t - last_start < kMinBlinkGap) continue;
    if (rng.uniform() < st.blink_probability) {
      out(t, kAu45) += 0.5 * st.blink_amplitude;
      out(t + 1, kAu45) += st.blink_amplitude;
      out(t + 2, kAu45) += 0.5 * st.blink_amplitude;
      last_start = t;
    }
  }
  return out.unaryExpr([](double v) { return quantize(v); });
}

std::vector<int> frame_targets(const Recipe &recipe, int n) {
  std::vector<int> targets;
  int assigned = 0;
  for (std::size_t i = 0; i < recipe.size(); ++i) {
    const int t = i + 1 == recipe.size() ? n - assigned : static_cast<int>(std::lround(recipe[i].second * n));
    targets.push_back(std::max(t, 0));
    assigned += targets.back();
  }
  return targets;
}

std::string level_name(const GeneratorConfig &cfg, std::size_t level) {
  return cfg.mode == LabelingMode::kOrder ? std::string("order recipe") : "level " + std::to_string(level);
}

struct Run {
  int state = 0;
  int length = 0;
};

std::vector<Run> split_into_runs(int state, int total, int dwell_min, int dwell_max, Rng &rng) {
  const int lo = (total + dwell_max - 1) / dwell_max;
  const int hi = total / dwell_min;
  const int count = lo + static_cast<int>(rng.index(static_cast<std::uint64_t>(hi - lo + 1)));
  std::vector<Run> runs(static_cast<std::size_t>(count), Run{state, dwell_min});
  int remaining = total - count * dwell_min;
  while (remaining > 0) {
    auto &r = runs[rng.index(runs.size())];
    if (r.length < dwell_max) {
      ++r.length;
      --remaining;
    }
  }
  return runs;
}

} // namespace

std::vector<LatentState> default_states() {
  std::vector<LatentState> s;
  s.push_back(make_state("focused", 0.35, 0.35, false, 0.01));
  s.push_back(make_state("off-task", -0.35, -0.35, true, 0.04));
  s.push_back(make_state("sleepy", -0.35, -0.35, false, 0.04));
  s.push_back(make_state("fidgeting", 0.35, 0.35, true, 0.01));
  LatentState facepalm = make_state("facepalm", -0.5, 0.5, false, 0.02);
  for (const Channel c : {kHeadPitch, kWristX, kWristY, kWristZ}) facepalm.scale(c) *= 8.0;
  facepalm.mean(kWristY) = 0.4;
  s.push_back(facepalm);
  return s;
}

GeneratorConfig default_generator_config() {
  GeneratorConfig cfg;
  cfg.states = default_states();
  cfg.level_recipes = {{{"sleepy", 0.5}, {"fidgeting", 0.5}}, {{"focused", 0.5}, {"off-task", 0.5}}};
  return cfg;
}

GeneratorConfig single_state_generator_config() {
  GeneratorConfig cfg = default_generator_config();
  cfg.level_recipes = {{{"sleepy", 1.0}}, {{"focused", 1.0}}};
  return cfg;
}

GeneratorConfig order_generator_config() {
  GeneratorConfig cfg = default_generator_config();
  cfg.mode = LabelingMode::kOrder;
  cfg.level_recipes = {{{"focused", 0.5}, {"sleepy", 0.5}}};
  return cfg;
}

const LatentState &GeneratorConfig::state(const std::string &name) const {
  for (const auto &s : states) {
    if (s.name == name) return s;
  }
  throw Error(ErrorCode::kInfeasibleRecipe, "unknown state '" + name + "'");
}

void GeneratorConfig::validate() const {
  if (num_videos < 1) throw Error(ErrorCode::kMalformedInput, "num_videos must be positive");
  if (frames_per_video < 3) throw Error(ErrorCode::kMalformedInput, "frames_per_video must be >= 3");
  if (!(fps > 0.0)) throw Error(ErrorCode::kMalformedInput, "fps must be positive");
  if (num_levels < 2) throw Error(ErrorCode::kMalformedInput, "num_levels must be >= 2");
  if (dwell_min < 1 || dwell_max < dwell_min) throw Error(ErrorCode::kMalformedInput, "bad dwell range");
  if (!(noise >= 0.0)) throw Error(ErrorCode::kMalformedInput, "noise must be >= 0");
  if (train_fraction <= 0.0 || validation_fraction < 0.0 || train_fraction + validation_fraction >= 1.0) {
    throw Error(ErrorCode::kMalformedInput, "split fractions must leave room for a test split");
  }
  if (mode == LabelingMode::kOrder) {
    if (num_levels != 2) throw Error(ErrorCode::kMalformedInput, "order mode is a two-level task");
    if (level_recipes.size() != 1) throw Error(ErrorCode::kInfeasibleRecipe, "order mode takes exactly one recipe");
    if (num_videos % 2 != 0) throw Error(ErrorCode::kMalformedInput, "order mode needs an even num_videos");
  } else if (static_cast<int>(level_recipes.size()) != num_levels) {
    throw Error(ErrorCode::kInfeasibleRecipe, std::to_string(level_recipes.size()) + " recipes for " +
                                                  std::to_string(num_levels) + " levels");
  }
  for (std::size_t level = 0; level < level_recipes.size(); ++level) {
    const auto &recipe = level_recipes[level];
    const std::string who = level_name(*this, level);
    if (recipe.empty()) throw Error(ErrorCode::kInfeasibleRecipe, who + ": empty recipe");
    double sum = 0.0;
    for (const auto &[name, fraction] : recipe) {
      (void)state(name);
      if (!(fraction >= 0.0)) throw Error(ErrorCode::kInfeasibleRecipe, who + ": negative fraction for " + name);
      sum += fraction;
    }
    if (std::abs(sum - 1.0) > kRecipeSumTolerance) {
      throw Error(ErrorCode::kInfeasibleRecipe, who + ": fractions sum to " + std::to_string(sum));
    }
    if (mode == LabelingMode::kFrequency) {
      const auto targets = frame_targets(recipe, frames_per_video);
      for (std::size_t i = 0; i < recipe.size(); ++i) {
        const int t = targets[i];
        if (t == 0) continue;
        if ((t + dwell_max - 1) / dwell_max > t / dwell_min) {
          throw Error(ErrorCode::kInfeasibleRecipe, who + ": " + std::to_string(t) + " frames of " +
                                                        recipe[i].first + " cannot be cut into dwells of " +
                                                        std::to_string(dwell_min) + "-" + std::to_string(dwell_max));
        }
      }
    }
  }
}

GeneratedDataset generate_dataset(const GeneratorConfig &cfg) {
  cfg.validate();
  const int n = cfg.frames_per_video;

  std::map<std::string, int> state_index;
  for (std::size_t i = 0; i < cfg.states.size(); ++i) state_index[cfg.states[i].name] = static_cast<int>(i);

  // Label and split assignment: balanced labels, stratified splits. Order mode
  // assigns whole pairs so both orderings of a pair share a split.
  const bool paired = cfg.mode == LabelingMode::kOrder;
  const int units = paired ? cfg.num_videos / 2 : cfg.num_videos;
  const int unit_levels = paired ? 1 : cfg.num_levels;
  std::vector<int> unit_label(static_cast<std::size_t>(units));
  for (int u = 0; u < units; ++u) unit_label[static_cast<std::size_t>(u)] = u % unit_levels;
  Rng label_rng(mix_seed(cfg.seed, kLabelStream));
  label_rng.shuffle(unit_label.begin(), unit_label.end());
  std::vector<Split> unit_split(static_cast<std::size_t>(units));
  for (int level = 0; level < unit_levels; ++level) {
    const auto members = std::count(unit_label.begin(), unit_label.end(), level);
    const auto n_train = std::lround(cfg.train_fraction * static_cast<double>(members));
    const auto n_val = std::lround(cfg.validation_fraction * static_cast<double>(members));
    long seen = 0;
    for (int u = 0; u < units; ++u) {
      if (unit_label[static_cast<std::size_t>(u)] != level) continue;
      unit_split[static_cast<std::size_t>(u)] =
          seen < n_train ? Split::kTrain : (seen < n_train + n_val ? Split::kValidation : Split::kTest);
      ++seen;
    }
  }

  GeneratedDataset out;
  out.num_levels = cfg.num_levels;
  out.videos.resize(static_cast<std::size_t>(cfg.num_videos));

  auto assemble = [&](GeneratedVideo &video, int index, const std::vector<std::pair<int, ChannelMatrix>> &blocks) {
    char id[32];
    std::snprintf(id, sizeof(id), "vid%05d", index);
    video.track.video_id = id;
    video.track.fps = cfg.fps;
    video.track.channels.resize(n, kNumChannels);
    video.track.frame_index.resize(static_cast<std::size_t>(n));
    video.track.valid.assign(static_cast<std::size_t>(n), true);
    video.states.resize(static_cast<std::size_t>(n));
    int at = 0;
    for (const auto &[state, frames] : blocks) {
      video.track.channels.middleRows(at, frames.rows()) = frames;
      std::fill_n(video.states.begin() + at, frames.rows(), state);
      at += static_cast<int>(frames.rows());
    }
    for (int t = 0; t < n; ++t) video.track.frame_index[static_cast<std::size_t>(t)] = t;
  };

  for (int u = 0; u < units; ++u) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(u)));
    if (paired) {
      const auto &recipe = cfg.level_recipes.front();
      const auto targets = frame_targets(recipe, n);
      std::vector<std::pair<int, ChannelMatrix>> blocks;
      for (std::size_t i = 0; i < recipe.size(); ++i) {
        if (targets[i] == 0) continue;
        const int s = state_index.at(recipe[i].first);
        blocks.emplace_back(s, emit_run(cfg.states[static_cast<std::size_t>(s)], targets[i], cfg.noise, rng));
      }
      for (int order = 0; order < 2; ++order) {
        const int index = 2 * u + order;
        auto &video = out.videos[static_cast<std::size_t>(index)];
        video.label = order;
        video.split = unit_split[static_cast<std::size_t>(u)];
        if (order == 1) std::reverse(blocks.begin(), blocks.end());
        assemble(video, index, blocks);
      }
      continue;
    }

    const int label = unit_label[static_cast<std::size_t>(u)];
    const auto &recipe = cfg.level_recipes[static_cast<std::size_t>(label)];
    const auto targets = frame_targets(recipe, n);
    std::vector<Run> runs;
    for (std::size_t i = 0; i < recipe.size(); ++i) {
      if (targets[i] == 0) continue;
      const auto more = split_into_runs(state_index.at(recipe[i].first), targets[i], cfg.dwell_min, cfg.dwell_max, rng);
      runs.insert(runs.end(), more.begin(), more.end());
    }
    rng.shuffle(runs.begin(), runs.end());
    std::vector<std::pair<int, ChannelMatrix>> blocks;
    for (const auto &r : runs) {
      blocks.emplace_back(r.state, emit_run(cfg.states[static_cast<std::size_t>(r.state)], r.length, cfg.noise, rng));
    }
    auto &video = out.videos[static_cast<std::size_t>(u)];
    video.label = label;
    video.split = unit_split[static_cast<std::size_t>(u)];
    assemble(video, u, blocks);
  }
  return out;
}

DatasetManifest write_dataset(const std::filesystem::path &dir, const GeneratedDataset &dataset, double fps) {
  std::filesystem::create_directories(dir / "tracks");
  DatasetManifest manifest;
  manifest.num_levels = dataset.num_levels;
  manifest.fps = fps;
  for (const auto &v : dataset.videos) {
    const std::string rel = "tracks/" + v.track.video_id + ".csv";
    write_track(dir / rel, v.track);
    manifest.entries.push_back({v.track.video_id, rel, v.label, v.split});
  }
  write_manifest(dir / "manifest.json", manifest);
  for (auto &e : manifest.entries) e.track_path = (dir / e.track_path).string();
  return manifest;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson row_to_json(const ChannelRow &row) {
  ojson j = ojson::object();
  for (int c = 0; c < kNumChannels; ++c) j[std::string(kChannelNames[static_cast<std::size_t>(c)])] = row(c);
  return j;
}

ChannelRow row_from_json(const ojson &j, const ChannelRow &fallback) {
  ChannelRow row = fallback;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto pos = std::find(kChannelNames.begin(), kChannelNames.end(), it.key());
    if (pos == kChannelNames.end()) throw Error(ErrorCode::kMalformedInput, "unknown channel '" + it.key() + "'");
    row(static_cast<int>(pos - kChannelNames.begin())) = it.value().get<double>();
  }
  return row;
}

} // namespace

std::string generator_config_to_json(const GeneratorConfig &cfg) {
  ojson j;
  j["mode"] = cfg.mode == LabelingMode::kOrder ? "order" : "frequency";
  j["num_videos"] = cfg.num_videos;
  j["frames_per_video"] = cfg.frames_per_video;
  j["fps"] = cfg.fps;
  j["num_levels"] = cfg.num_levels;
  j["seed"] = cfg.seed;
  j["dwell_frames"] = {cfg.dwell_min, cfg.dwell_max};
  j["noise"] = cfg.noise;
  j["split_fractions"] = {{"train", cfg.train_fraction}, {"validation", cfg.validation_fraction}};
  j["states"] = ojson::array();
  for (const auto &s : cfg.states) {
    j["states"].push_back({{"name", s.name},
                           {"mean", row_to_json(s.mean)},
                           {"scale", row_to_json(s.scale)},
                           {"blink_probability", s.blink_probability},
                           {"blink_amplitude", s.blink_amplitude}});
  }
  j["level_recipes"] = ojson::array();
  for (const auto &r : cfg.level_recipes) {
    ojson recipe = ojson::object();
    for (const auto &[name, f] : r) recipe[name] = f;
    j["level_recipes"].push_back(recipe);
  }
  return j.dump(2) + "\n";
}

GeneratorConfig generator_config_from_json(const std::string &text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorCode::kMalformedInput, std::string("generator config: ") + e.what());
  }
  GeneratorConfig cfg = default_generator_config();
  try {
    const std::string mode = j.value("mode", "frequency");
    if (mode == "order") {
      cfg = order_generator_config();
    } else if (mode != "frequency") {
      throw Error(ErrorCode::kMalformedInput, "mode must be frequency or order");
    }
    cfg.num_videos = j.value("num_videos", cfg.num_videos);
    cfg.frames_per_video = j.value("frames_per_video", cfg.frames_per_video);
    cfg.fps = j.value("fps", cfg.fps);
    cfg.num_levels = j.value("num_levels", cfg.num_levels);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.noise = j.value("noise", cfg.noise);
    if (j.contains("dwell_frames")) {
      cfg.dwell_min = j["dwell_frames"].at(0).get<int>();
      cfg.dwell_max = j["dwell_frames"].at(1).get<int>();
    }
    if (j.contains("split_fractions")) {
      cfg.train_fraction = j["split_fractions"].value("train", cfg.train_fraction);
      cfg.validation_fraction = j["split_fractions"].value("validation", cfg.validation_fraction);
    }
    if (j.contains("states")) {
      cfg.states.clear();
      for (const auto &s : j["states"]) {
        LatentState st;
        st.name = s.at("name").get<std::string>();
        st.mean = row_from_json(s.value("mean", ojson::object()), base_mean());
        st.scale = row_from_json(s.value("scale", ojson::object()), still_scale());
        st.blink_probability = s.value("blink_probability", 0.0);
        st.blink_amplitude = s.value("blink_amplitude", 2.5);
        cfg.states.push_back(std::move(st));
      }
    }
    if (j.contains("level_recipes")) {
      cfg.level_recipes.clear();
      for (const auto &r : j["level_recipes"]) {
        Recipe recipe;
        for (auto it = r.begin(); it != r.end(); ++it) recipe.emplace_back(it.key(), it.value().get<double>());
        cfg.level_recipes.push_back(std::move(recipe));
      }
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kMalformedInput, std::string("generator config: ") + e.what());
  }
  return cfg;
}

} // namespace bos
