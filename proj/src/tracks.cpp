#include "bos/tracks.hpp"

#include "bos/error.hpp"
#include "bos/log.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bos {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

double parse_double(std::string_view field, std::string_view column, long row) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::kMalformedInput, std::string(column), row,
                "cannot parse '" + std::string(field) + "' in column " + std::string(column) +
                    ", row " + std::to_string(row));
  }
  return value;
}

std::int64_t parse_int(std::string_view field, std::string_view column, long row) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::kMalformedInput, std::string(column), row,
                "cannot parse integer '" + std::string(field) + "' in column " +
                    std::string(column) + ", row " + std::to_string(row));
  }
  return value;
}

void append_double(std::string &out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

FrameRecord FeatureTrack::frame(Eigen::Index i) const {
  return FrameRecord{frame_index[static_cast<std::size_t>(i)], channels.row(i),
                     valid[static_cast<std::size_t>(i)]};
}

void FeatureTrack::push_back(const FrameRecord &record) {
  const Eigen::Index n = channels.rows();
  channels.conservativeResize(n + 1, Eigen::NoChange);
  channels.row(n) = record.values;
  frame_index.push_back(record.frame_index);
  valid.push_back(record.valid);
}

bool FeatureTrack::all_valid() const {
  return std::all_of(valid.begin(), valid.end(), [](bool v) { return v; });
}

void check_frame_ranges(const ChannelRow &values, long row) {
  auto fail = [row](int c) {
    const std::string name(kChannelNames[static_cast<std::size_t>(c)]);
    throw Error(ErrorCode::kValueOutOfRange, name, row,
                "column " + name + " out of range at row " + std::to_string(row));
  };
  for (int c = 0; c < kNumChannels; ++c) {
    if (!std::isfinite(values(c))) fail(c);
  }
  if (values(kValence) < -1.0 || values(kValence) > 1.0) fail(kValence);
  if (values(kArousal) < -1.0 || values(kArousal) > 1.0) fail(kArousal);
  if (values(kAu45) < 0.0) fail(kAu45);
}

FeatureTrack parse_track_csv(std::string_view text, std::string video_id, double fps) {
  if (!(fps > 0.0)) throw Error(ErrorCode::kMalformedInput, "fps must be positive");

  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start < text.size()) {
      auto nl = text.find('\n', start);
      if (nl == std::string_view::npos) nl = text.size();
      const auto line = trim(text.substr(start, nl - start));
      if (!line.empty()) lines.push_back(line);
      start = nl + 1;
    }
  }
  if (lines.empty()) throw Error(ErrorCode::kMissingColumn, "frame", -1, "empty track file");

  const auto header = split_fields(lines.front());
  auto find_column = [&](std::string_view name) -> long {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<long>(i);
    }
    return -1;
  };

  const long frame_col = find_column("frame");
  if (frame_col < 0) throw Error(ErrorCode::kMissingColumn, "frame", -1, "missing column frame");
  std::array<long, kNumChannels> channel_col{};
  for (int c = 0; c < kNumChannels; ++c) {
    const auto name = kChannelNames[static_cast<std::size_t>(c)];
    channel_col[static_cast<std::size_t>(c)] = find_column(name);
    if (channel_col[static_cast<std::size_t>(c)] < 0) {
      throw Error(ErrorCode::kMissingColumn, std::string(name), -1,
                  "missing column " + std::string(name));
    }
  }
  const long valid_col = find_column("valid");
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto &h = header[i];
    const bool known = h == "frame" || h == "valid" ||
                       std::find(kChannelNames.begin(), kChannelNames.end(), h) !=
                           kChannelNames.end();
    if (!known) warn("ignoring extra column '" + std::string(h) + "' in track " + video_id);
  }

  FeatureTrack track;
  track.video_id = std::move(video_id);
  track.fps = fps;
  const auto rows = static_cast<Eigen::Index>(lines.size() - 1);
  track.channels.resize(rows, Eigen::NoChange);
  track.frame_index.reserve(static_cast<std::size_t>(rows));
  track.valid.reserve(static_cast<std::size_t>(rows));

  for (Eigen::Index r = 0; r < rows; ++r) {
    const long row = static_cast<long>(r) + 1;
    const auto fields = split_fields(lines[static_cast<std::size_t>(r) + 1]);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kMalformedInput, "", row,
                  "row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(header.size()));
    }
    const auto index = parse_int(fields[static_cast<std::size_t>(frame_col)], "frame", row);
    if (index < 0) {
      throw Error(ErrorCode::kValueOutOfRange, "frame", row,
                  "negative frame index at row " + std::to_string(row));
    }
    if (!track.frame_index.empty() && index <= track.frame_index.back()) {
      throw Error(ErrorCode::kNonMonotonicFrameIndex, "frame", row,
                  "frame index not increasing at row " + std::to_string(row));
    }
    ChannelRow values;
    for (int c = 0; c < kNumChannels; ++c) {
      values(c) = parse_double(fields[static_cast<std::size_t>(channel_col[static_cast<std::size_t>(c)])],
                               kChannelNames[static_cast<std::size_t>(c)], row);
    }
    check_frame_ranges(values, row);
    bool valid = true;
    if (valid_col >= 0) {
      const auto v = fields[static_cast<std::size_t>(valid_col)];
      if (v == "1") {
        valid = true;
      } else if (v == "0") {
        valid = false;
      } else {
        throw Error(ErrorCode::kValueOutOfRange, "valid", row,
                    "valid must be 0 or 1 at row " + std::to_string(row));
      }
    }
    track.channels.row(r) = values;
    track.frame_index.push_back(index);
    track.valid.push_back(valid);
  }
  return track;
}

FeatureTrack parse_track(const std::filesystem::path &path, double fps) {
  return parse_track_csv(read_file(path), path.stem().string(), fps);
}

std::string format_track_csv(const FeatureTrack &track) {
  std::string out = "frame";
  for (const auto name : kChannelNames) {
    out += ',';
    out += name;
  }
  out += ",valid\n";
  out.reserve(out.size() + static_cast<std::size_t>(track.size()) * 160);
  for (Eigen::Index r = 0; r < track.size(); ++r) {
    out += std::to_string(track.frame_index[static_cast<std::size_t>(r)]);
    for (int c = 0; c < kNumChannels; ++c) {
      out += ',';
      append_double(out, track.channels(r, c));
    }
    out += track.valid[static_cast<std::size_t>(r)] ? ",1\n" : ",0\n";
  }
  return out;
}

void write_track(const std::filesystem::path &path, const FeatureTrack &track) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << format_track_csv(track);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

FeatureTrack repair_track(const FeatureTrack &track, double max_invalid_fraction) {
  if (track.size() == 0) throw Error(ErrorCode::kTrackTooShort, "track " + track.video_id + " is empty");

  // Re-grid onto contiguous indices; gaps become invalid frames.
  const std::int64_t first = track.frame_index.front();
  const std::int64_t last = track.frame_index.back();
  const auto n = static_cast<Eigen::Index>(last - first + 1);

  FeatureTrack out;
  out.video_id = track.video_id;
  out.fps = track.fps;
  out.channels = ChannelMatrix::Zero(n, kNumChannels);
  out.frame_index.resize(static_cast<std::size_t>(n));
  out.valid.assign(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) out.frame_index[static_cast<std::size_t>(i)] = first + i;
  for (Eigen::Index r = 0; r < track.size(); ++r) {
    const auto slot = static_cast<Eigen::Index>(track.frame_index[static_cast<std::size_t>(r)] - first);
    out.channels.row(slot) = track.channels.row(r);
    out.valid[static_cast<std::size_t>(slot)] = track.valid[static_cast<std::size_t>(r)];
  }

  const auto invalid = std::count(out.valid.begin(), out.valid.end(), false);
  const double fraction = static_cast<double>(invalid) / static_cast<double>(n);
  if (fraction > max_invalid_fraction || invalid == n) {
    throw Error(ErrorCode::kTooManyInvalid,
                "track " + track.video_id + " has invalid fraction " + std::to_string(fraction));
  }
  if (invalid == 0) return out;

  Eigen::Index first_valid = 0;
  while (!out.valid[static_cast<std::size_t>(first_valid)]) ++first_valid;
  for (Eigen::Index i = 0; i < first_valid; ++i) out.channels.row(i) = out.channels.row(first_valid);
  for (Eigen::Index i = first_valid + 1; i < n; ++i) {
    if (!out.valid[static_cast<std::size_t>(i)]) out.channels.row(i) = out.channels.row(i - 1);
  }
  out.valid.assign(static_cast<std::size_t>(n), true);
  return out;
}

std::string_view to_string(Split split) {
  switch (split) {
  case Split::kTrain: return "train";
  case Split::kValidation: return "validation";
  case Split::kTest: return "test";
  }
  return "train";
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "validation") return Split::kValidation;
  if (text == "test") return Split::kTest;
  throw Error(ErrorCode::kMalformedInput, "unknown split '" + std::string(text) + "'");
}

void DatasetManifest::validate() const {
  if (num_levels < 2) throw Error(ErrorCode::kMalformedInput, "num_levels must be >= 2");
  bool has_train = false;
  bool has_test = false;
  for (const auto &e : entries) {
    if (e.label < 0 || e.label >= num_levels) {
      throw Error(ErrorCode::kLabelOutOfRange, e.video_id, -1,
                  "label " + std::to_string(e.label) + " of " + e.video_id + " outside [0, " +
                      std::to_string(num_levels - 1) + "]");
    }
    has_train |= e.split == Split::kTrain;
    has_test |= e.split == Split::kTest;
  }
  if (!has_train) throw Error(ErrorCode::kNotEnoughData, "manifest has no train entries");
  if (!has_test) throw Error(ErrorCode::kNotEnoughData, "manifest has no test entries");
}

std::vector<ManifestEntry> DatasetManifest::select(Split split) const {
  std::vector<ManifestEntry> out;
  for (const auto &e : entries) {
    if (e.split == split) out.push_back(e);
  }
  return out;
}

DatasetManifest read_manifest(const std::filesystem::path &path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorCode::kMalformedInput, path.string() + ": " + e.what());
  }
  DatasetManifest m;
  try {
    m.num_levels = j.at("num_levels").get<int>();
    m.fps = j.value("fps", 30.0);
    const auto base = path.parent_path();
    for (const auto &e : j.at("entries")) {
      ManifestEntry entry;
      entry.video_id = e.at("video_id").get<std::string>();
      std::filesystem::path track = e.at("track_path").get<std::string>();
      entry.track_path = (track.is_relative() ? base / track : track).string();
      entry.label = e.at("label").get<int>();
      entry.split = parse_split(e.at("split").get<std::string>());
      m.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kMalformedInput, path.string() + ": " + e.what());
  }
  m.validate();
  return m;
}

void write_manifest(const std::filesystem::path &path, const DatasetManifest &manifest) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto &e : manifest.entries) {
    entries.push_back({{"video_id", e.video_id},
                       {"track_path", e.track_path},
                       {"label", e.label},
                       {"split", std::string(to_string(e.split))}});
  }
  const nlohmann::json j = {{"num_levels", manifest.num_levels},
                            {"fps", manifest.fps},
                            {"entries", std::move(entries)}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

} // namespace bos
