#include "codemix/training/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "codemix/error.hpp"

namespace codemix::training {
namespace {

constexpr std::string_view kMagic = "CMCX";
constexpr std::string_view kMomentPrefix = "optimizer.m/";
constexpr std::string_view kVariancePrefix = "optimizer.v/";

[[noreturn]] void corrupt(const std::string& what) {
  fail(ErrorKind::kCorruption, "checkpoint: " + what);
}

class Writer {
 public:
  void bytes(std::string_view s) { out_.append(s); }
  template <typename U>
  void uint(U value) {
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      out_.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
    }
  }
  void f64(double value) { uint(std::bit_cast<std::uint64_t>(value)); }
  void block(std::string_view s) {
    uint<std::uint64_t>(s.size());
    bytes(s);
  }
  void tensor(const std::string& name, const nn::Tensor& t) {
    if (name.size() > 0xFFFF) corrupt("tensor name too long: " + name);
    uint<std::uint16_t>(static_cast<std::uint16_t>(name.size()));
    bytes(name);
    uint<std::uint8_t>(static_cast<std::uint8_t>(t.rank()));
    for (const auto d : t.shape()) uint<std::uint64_t>(d);
    for (const double x : t.data()) f64(x);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::string_view bytes(std::size_t n, const char* what) {
    if (data_.size() - pos_ < n) corrupt(std::string("truncated ") + what);
    const auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  template <typename U>
  U uint(const char* what) {
    const auto raw = bytes(sizeof(U), what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[i])) << (8 * i);
    }
    return static_cast<U>(v);
  }
  std::string_view block(const char* what) {
    const auto n = uint<std::uint64_t>(what);
    return bytes(static_cast<std::size_t>(n), what);
  }
  std::pair<std::string, nn::Tensor> tensor() {
    const auto name_len = uint<std::uint16_t>("tensor header");
    std::string name(bytes(name_len, "tensor name"));
    const auto rank = uint<std::uint8_t>("tensor rank");
    nn::Tensor::Shape shape;
    std::size_t count = 1;
    for (std::uint8_t i = 0; i < rank; ++i) {
      const auto d = uint<std::uint64_t>("tensor dims");
      if (d > (std::uint64_t{1} << 32)) corrupt("implausible dimension in " + name);
      shape.push_back(static_cast<std::size_t>(d));
      count *= shape.back();
    }
    if (count > remaining() / 8) corrupt("truncated tensor block for " + name);
    std::vector<double> values(count);
    for (auto& x : values) x = std::bit_cast<double>(uint<std::uint64_t>("tensor data"));
    return {std::move(name), nn::Tensor(std::move(shape), std::move(values))};
  }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

nlohmann::json to_json(const EpochRecord& record) {
  return {{"epoch", record.epoch},
          {"loss", record.loss},
          {"train", metrics::to_json(record.train)},
          {"eval", record.eval ? metrics::to_json(*record.eval) : nlohmann::json(nullptr)}};
}

EpochRecord epoch_record_from_json(const nlohmann::json& j) {
  EpochRecord r;
  r.epoch = j.at("epoch").get<std::size_t>();
  r.loss = j.at("loss").get<double>();
  r.train = metrics::report_from_json(j.at("train"));
  if (!j.at("eval").is_null()) r.eval = metrics::report_from_json(j.at("eval"));
  return r;
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& r : ckpt.history) history.push_back(to_json(r));

  std::size_t n_tensors = ckpt.params.size();
  if (ckpt.optimizer) n_tensors += ckpt.optimizer->m.size() + ckpt.optimizer->v.size();

  nlohmann::json meta = {
      {"model_config", ckpt.model_config},
      {"train_config", ckpt.train_config},
      {"clean_rules", ckpt.clean_rules},
      {"label_names", ckpt.label_names},
      {"history", history},
      {"epochs_completed", ckpt.epochs_completed},
      {"optimizer_step", ckpt.optimizer ? nlohmann::json(ckpt.optimizer->step) : nlohmann::json(nullptr)},
      {"n_tensors", n_tensors},
  };

  Writer w;
  w.bytes(kMagic);
  w.uint<std::uint32_t>(Checkpoint::kVersion);
  w.block(meta.dump());
  w.block(ckpt.vocab.to_text());
  for (const auto& p : ckpt.params.params()) w.tensor(p.name, p.value);
  if (ckpt.optimizer) {
    const auto params = ckpt.params.params();
    if (ckpt.optimizer->m.size() != params.size() || ckpt.optimizer->v.size() != params.size()) {
      fail(ErrorKind::kDimension, "checkpoint: optimizer state does not match parameters");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      w.tensor(std::string(kMomentPrefix) + params[i].name, ckpt.optimizer->m[i]);
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      w.tensor(std::string(kVariancePrefix) + params[i].name, ckpt.optimizer->v[i]);
    }
  }
  return w.take();
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.remaining() < kMagic.size() || r.bytes(kMagic.size(), "magic") != kMagic) {
    corrupt("bad magic (not a checkpoint file)");
  }
  const auto version = r.uint<std::uint32_t>("version");
  if (version != Checkpoint::kVersion) {
    corrupt("version mismatch: file has " + std::to_string(version) + ", expected " +
            std::to_string(Checkpoint::kVersion));
  }

  Checkpoint ckpt;
  std::size_t n_tensors = 0;
  std::optional<std::uint64_t> optimizer_step;
  try {
    const auto meta = nlohmann::json::parse(r.block("config header"));
    ckpt.model_config = meta.at("model_config").get<model::ModelConfig>();
    ckpt.train_config = meta.at("train_config").get<TrainConfig>();
    ckpt.clean_rules = meta.at("clean_rules").get<textprep::CleanRules>();
    ckpt.label_names = meta.at("label_names").get<std::vector<std::string>>();
    for (const auto& h : meta.at("history")) ckpt.history.push_back(epoch_record_from_json(h));
    ckpt.epochs_completed = meta.at("epochs_completed").get<std::uint64_t>();
    n_tensors = meta.at("n_tensors").get<std::size_t>();
    if (const auto& step = meta.at("optimizer_step"); !step.is_null()) {
      optimizer_step = step.get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("invalid config header: ") + e.what());
  }
  ckpt.vocab = textprep::Vocab::from_text(r.block("vocab block"));

  std::vector<std::pair<std::string, nn::Tensor>> moments;
  std::vector<std::pair<std::string, nn::Tensor>> variances;
  for (std::size_t i = 0; i < n_tensors; ++i) {
    auto [name, tensor] = r.tensor();
    if (name.starts_with(kMomentPrefix)) {
      moments.emplace_back(name.substr(kMomentPrefix.size()), std::move(tensor));
    } else if (name.starts_with(kVariancePrefix)) {
      variances.emplace_back(name.substr(kVariancePrefix.size()), std::move(tensor));
    } else {
      ckpt.params.add(std::move(name), std::move(tensor));
    }
  }
  if (r.remaining() != 0) corrupt("trailing bytes after tensor records");

  if (optimizer_step) {
    const auto params = ckpt.params.params();
    if (moments.size() != params.size() || variances.size() != params.size()) {
      corrupt("optimizer state does not cover every parameter");
    }
    OptimizerState state;
    state.step = *optimizer_step;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (moments[i].first != params[i].name || variances[i].first != params[i].name ||
          moments[i].second.shape() != params[i].value.shape() ||
          variances[i].second.shape() != params[i].value.shape()) {
        corrupt("optimizer state out of order for " + params[i].name);
      }
      state.m.push_back(std::move(moments[i].second));
      state.v.push_back(std::move(variances[i].second));
    }
    ckpt.optimizer = std::move(state);
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "checkpoint: cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "checkpoint not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

model::Model model_from_checkpoint(const Checkpoint& ckpt) {
  model::Model m(ckpt.model_config);
  auto& store = m.params();
  if (store.size() != ckpt.params.size()) {
    fail(ErrorKind::kCorruption, "checkpoint: expected " + std::to_string(store.size()) +
                                     " parameters, found " +
                                     std::to_string(ckpt.params.size()));
  }
  for (auto& p : store.params()) {
    const auto id = ckpt.params.find(p.name);
    if (!id) fail(ErrorKind::kCorruption, "checkpoint: missing parameter " + p.name);
    const auto& saved = ckpt.params.value(*id);
    if (saved.shape() != p.value.shape()) {
      fail(ErrorKind::kCorruption, "checkpoint: shape mismatch for " + p.name);
    }
    p.value = saved;
  }
  return m;
}

}  // namespace codemix::training
