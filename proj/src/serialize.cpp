#include "bos/serialize.hpp"

#include "bos/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace bos {
namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd &v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vector_from_json(const json &j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json matrix_to_json(const Eigen::MatrixXd &m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r).transpose()));
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json &j, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Eigen::VectorXd row = vector_from_json(j[r]);
    if (row.size() != cols) throw Error(ErrorCode::kDimensionMismatch, "ragged matrix in file");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

json standardizer_to_json(const Standardizer &s) {
  return {{"mean", vector_to_json(s.mean)}, {"std", vector_to_json(s.std)}};
}

Standardizer standardizer_from_json(const json &j) {
  Standardizer s;
  s.mean = vector_from_json(j.at("mean"));
  s.std = vector_from_json(j.at("std"));
  if (s.mean.size() != s.std.size()) throw Error(ErrorCode::kDimensionMismatch, "standardizer size mismatch");
  return s;
}

json classifier_to_json(const BinaryClassifier &c) {
  return std::visit(
      [](const auto &m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearLogistic>) {
          return {{"kind", "linear"}, {"weights", vector_to_json(m.weights)}, {"bias", m.bias}};
        } else if constexpr (std::is_same_v<T, KernelLogistic>) {
          return {{"kind", "rbf"},
                  {"gamma", m.gamma},
                  {"bias", m.bias},
                  {"dual", vector_to_json(m.dual)},
                  {"support", matrix_to_json(m.support)}};
        } else {
          return {{"kind", "constant"}, {"p", m.p}};
        }
      },
      c.model());
}

BinaryClassifier classifier_from_json(const json &j, Eigen::Index input_dim) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "linear") {
    LinearLogistic m{vector_from_json(j.at("weights")), j.at("bias").get<double>()};
    if (m.weights.size() != input_dim) throw Error(ErrorCode::kDimensionMismatch, "weight vector size mismatch");
    return BinaryClassifier(std::move(m));
  }
  if (kind == "rbf") {
    KernelLogistic m;
    m.gamma = j.at("gamma").get<double>();
    m.bias = j.at("bias").get<double>();
    m.dual = vector_from_json(j.at("dual"));
    m.support = matrix_from_json(j.at("support"), input_dim);
    if (m.support.rows() != m.dual.size()) throw Error(ErrorCode::kDimensionMismatch, "support/dual size mismatch");
    return BinaryClassifier(std::move(m));
  }
  if (kind == "constant") return BinaryClassifier(ConstantProbability{j.at("p").get<double>()});
  throw Error(ErrorCode::kMalformedInput, "unknown classifier kind '" + kind + "'");
}

template <typename F> auto guarded(const char *what, F &&f) {
  try {
    return f();
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kMalformedInput, std::string(what) + ": " + e.what());
  }
}

} // namespace

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string canonical_dump(const nlohmann::json &j) { return j.dump(2) + "\n"; }

nlohmann::json codebook_to_json(const Codebook &cb) {
  return {{"version", kFileFormatVersion},
          {"K", cb.size()},
          {"dims", cb.dims()},
          {"seed", cb.seed},
          {"standardizer", standardizer_to_json(cb.standardizer)},
          {"centroids", matrix_to_json(cb.centroids)},
          {"wcss", cb.wcss},
          {"config",
           {{"segment_len", cb.config.segment_len},
            {"blink_threshold", cb.config.blink_threshold},
            {"normalize", cb.config.normalize}}}};
}

Codebook codebook_from_json(const nlohmann::json &j) {
  return guarded("codebook", [&] {
    if (j.at("version").get<int>() != kFileFormatVersion) {
      throw Error(ErrorCode::kConfigMismatch, "unsupported codebook version");
    }
    Codebook cb;
    const auto dims = j.at("dims").get<Eigen::Index>();
    cb.seed = j.at("seed").get<std::uint64_t>();
    cb.standardizer = standardizer_from_json(j.at("standardizer"));
    cb.centroids = matrix_from_json(j.at("centroids"), dims);
    cb.wcss = j.at("wcss").get<double>();
    const auto &c = j.at("config");
    cb.config.segment_len = c.at("segment_len").get<int>();
    cb.config.blink_threshold = c.at("blink_threshold").get<double>();
    cb.config.normalize = c.at("normalize").get<bool>();
    if (cb.size() != j.at("K").get<int>() || cb.standardizer.dims() != dims) {
      throw Error(ErrorCode::kDimensionMismatch, "codebook shape disagrees with its header");
    }
    return cb;
  });
}

nlohmann::json model_to_json(const ModelFile &file) {
  const auto &m = file.model;
  json classifiers = json::array();
  for (const auto &c : m.classifiers) classifiers.push_back(classifier_to_json(c));
  json j = {{"version", kFileFormatVersion},
            {"pipeline", file.pipeline},
            {"num_levels", m.num_levels},
            {"input_dim", m.input_dim},
            {"backend", std::string(to_string(m.backend))},
            {"hyperparams", {{"lambda", m.hyperparams.lambda}, {"gamma", m.hyperparams.gamma}}},
            {"seed", m.seed},
            {"codebook_hash", file.codebook_hash},
            {"normalize", file.normalize},
            {"classifiers", std::move(classifiers)}};
  if (file.input_standardizer) j["input_standardizer"] = standardizer_to_json(*file.input_standardizer);
  return j;
}

ModelFile model_from_json(const nlohmann::json &j) {
  return guarded("model", [&] {
    if (j.at("version").get<int>() != kFileFormatVersion) {
      throw Error(ErrorCode::kConfigMismatch, "unsupported model version");
    }
    ModelFile f;
    f.pipeline = j.at("pipeline").get<std::string>();
    f.codebook_hash = j.at("codebook_hash").get<std::string>();
    f.normalize = j.at("normalize").get<bool>();
    auto &m = f.model;
    m.num_levels = j.at("num_levels").get<int>();
    m.input_dim = j.at("input_dim").get<Eigen::Index>();
    m.backend = parse_backend(j.at("backend").get<std::string>());
    m.hyperparams.lambda = j.at("hyperparams").at("lambda").get<double>();
    m.hyperparams.gamma = j.at("hyperparams").at("gamma").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto &c : j.at("classifiers")) m.classifiers.push_back(classifier_from_json(c, m.input_dim));
    if (static_cast<int>(m.classifiers.size()) != m.num_levels - 1) {
      throw Error(ErrorCode::kMalformedInput, "model must hold num_levels - 1 classifiers");
    }
    if (j.contains("input_standardizer")) f.input_standardizer = standardizer_from_json(j.at("input_standardizer"));
    return f;
  });
}

nlohmann::json evaluation_to_json(const Evaluation &e) {
  json metrics = {{"accuracy", e.accuracy}, {"n", e.total}};
  if (e.binary) {
    metrics["precision"] = e.binary->precision;
    metrics["recall"] = e.binary->recall;
    metrics["f1"] = e.binary->f1;
  }
  json confusion = json::array();
  for (Eigen::Index r = 0; r < e.confusion.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < e.confusion.cols(); ++c) row.push_back(e.confusion(r, c));
    confusion.push_back(std::move(row));
  }
  return {{"metrics", std::move(metrics)}, {"confusion", std::move(confusion)}};
}

nlohmann::json read_json_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorCode::kMalformedInput, path.string() + ": " + e.what());
  }
}

std::string write_json_file(const std::filesystem::path &path, const nlohmann::json &j) {
  const std::string text = canonical_dump(j);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
  return content_hash(text);
}

} // namespace bos
