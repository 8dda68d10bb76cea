#pragma once

#include "bos/codebook.hpp"
#include "bos/metrics.hpp"
#include "bos/ordinal.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace bos {

inline constexpr int kFileFormatVersion = 1;

/// FNV-1a 64 of the bytes, as 16 lowercase hex digits.
std::string content_hash(std::string_view bytes);

/// Canonical text of a JSON document (2-space indent, trailing newline). All
/// artifact files are written in this form so hashes are stable.
std::string canonical_dump(const nlohmann::json &j);

nlohmann::json codebook_to_json(const Codebook &codebook);
Codebook codebook_from_json(const nlohmann::json &j);

inline constexpr std::string_view kPipelineBagOfStates = "bag-of-states";
inline constexpr std::string_view kPipelineFunctionalBaseline = "functional-baseline";

/// A trained classifier plus the context needed to apply it consistently.
struct ModelFile {
  OrdinalModel model;
  std::string pipeline = std::string(kPipelineBagOfStates);
  /// Hash of the codebook the histograms were encoded with; empty for the
  /// functional baseline.
  std::string codebook_hash;
  bool normalize = false;
  /// Input z-scoring, used by the functional baseline.
  std::optional<Standardizer> input_standardizer;
};

nlohmann::json model_to_json(const ModelFile &file);
ModelFile model_from_json(const nlohmann::json &j);

nlohmann::json evaluation_to_json(const Evaluation &evaluation);

nlohmann::json read_json_file(const std::filesystem::path &path);
/// Writes canonical_dump(j) and returns its content hash.
std::string write_json_file(const std::filesystem::path &path, const nlohmann::json &j);

} // namespace bos
