#include "ssm/model.hpp"

#include <nlohmann/json.hpp>

#include "ssm/util.hpp"

namespace ssm {

using nlohmann::json;

SurrogateModel SurrogateModel::initialise(StructureSpec structure, std::size_t dim, const nn::TrainConfig& train,
                                          std::uint64_t seed) {
  nn::validate(train);
  SurrogateModel m;
  m.structure = std::move(structure);
  m.dim = dim;
  m.train = train;
  for (auto p : m.structure.pairs) {
    const auto s = derive_seed(seed, 0x1417, static_cast<std::uint64_t>(slot_number(p.premise)),
                               static_cast<std::uint64_t>(slot_number(p.hypothesis)));
    m.classifiers.emplace(p, nn::PairClassifierParams::random(p, dim, train.hidden, train.init_scale, s));
  }
  return m;
}

ZMarginals SurrogateModel::marginals(const EmbeddedExample& example, const ActiveSet& active) const {
  ZMarginals out;
  for (auto p : active.pairs) {
    out[p] = nn::forward(classifiers.at(p), example.premise.at(p.premise).vector,
                         example.hypothesis.at(p.hypothesis).vector);
  }
  return out;
}

LabelDistribution SurrogateModel::predict(const EmbeddedExample& example) const {
  const auto active = active_pairs(structure, example);
  return predict_label_exact(marginals(example, active), active);
}

namespace {

std::vector<double> flat(const Eigen::MatrixXd& m) {
  // row-major
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
  return out;
}

Eigen::MatrixXd unflat(const json& values, Eigen::Index rows, Eigen::Index cols, const char* what) {
  const auto v = values.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(v.size()) != rows * cols) {
    throw Error(std::string("checkpoint array '") + what + "' has " + std::to_string(v.size()) + " values, expected " +
                std::to_string(rows * cols));
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

}  // namespace

std::string serialize_model(const SurrogateModel& model) {
  json j;
  j["magic"] = kCheckpointMagic;
  j["version"] = kCheckpointVersion;
  j["structure"] = json::parse(model.structure.to_json());
  j["dim"] = model.dim;
  const auto& t = model.train;
  j["train"] = {{"hidden", t.hidden},         {"learning_rate", t.learning_rate}, {"batch_size", t.batch_size},
                {"epochs", t.epochs},         {"seed", t.seed},                   {"init_scale", t.init_scale},
                {"weight_decay", t.weight_decay}};
  j["classifiers"] = json::array();
  for (const auto& [pair, p] : model.classifiers) {
    j["classifiers"].push_back({{"k", slot_number(pair.premise)},
                                {"l", slot_number(pair.hypothesis)},
                                {"w1", flat(p.w1)},
                                {"b1", flat(p.b1)},
                                {"w2", flat(p.w2)},
                                {"b2", flat(p.b2)}});
  }
  return j.dump() + "\n";
}

SurrogateModel parse_model(std::string_view text, const std::string& source) {
  try {
    const auto j = json::parse(text);
    if (j.value("magic", std::string()) != kCheckpointMagic) throw FormatError(source, 0, "not a surrogate checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw FormatError(source, 0, "unsupported checkpoint version " + j.at("version").dump());
    }
    SurrogateModel m;
    m.structure = StructureSpec::from_json(j.at("structure").dump());
    m.dim = j.at("dim").get<std::size_t>();
    const auto& t = j.at("train");
    m.train.hidden = t.at("hidden").get<std::size_t>();
    m.train.learning_rate = t.at("learning_rate").get<double>();
    m.train.batch_size = t.at("batch_size").get<std::size_t>();
    m.train.epochs = t.at("epochs").get<std::size_t>();
    m.train.seed = t.at("seed").get<std::uint64_t>();
    m.train.init_scale = t.at("init_scale").get<double>();
    m.train.weight_decay = t.at("weight_decay").get<double>();
    const auto h = static_cast<Eigen::Index>(m.train.hidden);
    const auto in = static_cast<Eigen::Index>(2 * m.dim);
    for (const auto& c : j.at("classifiers")) {
      nn::PairClassifierParams p;
      p.pair = {slot_from_number(c.at("k").get<int>()), slot_from_number(c.at("l").get<int>())};
      p.w1 = unflat(c.at("w1"), h, in, "w1");
      p.b1 = unflat(c.at("b1"), h, 1, "b1");
      p.w2 = unflat(c.at("w2"), 3, h, "w2");
      p.b2 = unflat(c.at("b2"), 3, 1, "b2");
      m.classifiers.emplace(p.pair, std::move(p));
    }
    for (auto p : m.structure.pairs) {
      if (!m.classifiers.count(p)) throw FormatError(source, 0, "missing classifier for pair " + to_string(p));
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(source, 0, e.what());
  } catch (const std::out_of_range& e) {
    throw FormatError(source, 0, e.what());
  }
}

void save_model(const SurrogateModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

SurrogateModel load_model(const std::filesystem::path& path) { return parse_model(read_file(path), path.string()); }

}  // namespace ssm
