#include "ctcnn/checkpoint.hpp"

#include <json.hpp>
#include <limits>
#include <optional>
#include <utility>

#include "ctcnn/bytes.hpp"
#include "ctcnn/error.hpp"

namespace ctcnn {

using nlohmann::json;

namespace {

json layer_to_json(const Layer<float>& l) {
  json j;
  j["type"] = std::string(layer_type_name(l.kind()));
  if (auto* conv = dynamic_cast<const Conv2D<float>*>(&l)) {
    j["in_channels"] = conv->in_channels();
    j["filters"] = conv->out_channels();
    j["kernel"] = 3;
    j["stride"] = 1;
  } else if (auto* dense = dynamic_cast<const Dense<float>*>(&l)) {
    j["in_features"] = dense->in_features();
    j["units"] = dense->out_features();
  } else if (auto* drop = dynamic_cast<const Dropout<float>*>(&l)) {
    j["rate"] = drop->rate();
  } else if (l.kind() == LayerKind::max_pool2d) {
    j["pool"] = 2;
    j["stride"] = 2;
  }
  json shapes = json::array();
  for (const Tensor* p : l.params()) shapes.push_back(p->shape());
  j["params"] = shapes;
  return j;
}

std::unique_ptr<Layer<float>> layer_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "Conv2D") {
    return std::make_unique<Conv2D<float>>(j.at("in_channels").get<std::size_t>(),
                                           j.at("filters").get<std::size_t>());
  }
  if (type == "Dense") {
    return std::make_unique<Dense<float>>(j.at("in_features").get<std::size_t>(),
                                          j.at("units").get<std::size_t>());
  }
  if (type == "Dropout") return std::make_unique<Dropout<float>>(j.at("rate").get<double>(), 0);
  if (type == "ReLU") return std::make_unique<ReLU<float>>();
  if (type == "MaxPooling2D") return std::make_unique<MaxPool2D<float>>();
  if (type == "Flatten") return std::make_unique<Flatten<float>>();
  throw ConfigError("unknown layer type '" + type + "'");
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Sequential<float>& model) {
  json header;
  header["format"] = "CNCK";
  header["arch"] = model.arch;
  header["input_shape"] = model.input_shape();
  header["classes"] = model.class_names;
  json layers = json::array();
  for (std::size_t i = 0; i < model.size(); ++i) layers.push_back(layer_to_json(model.layer(i)));
  header["layers"] = layers;
  const std::string text = header.dump();

  std::vector<std::uint8_t> out{'C', 'N', 'C', 'K'};
  bytes::put_u32(out, kCheckpointVersion);
  bytes::put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (const Tensor* p : model.params())
    for (float v : p->data()) bytes::put_f32(out, v);
  return out;
}

Sequential<float> decode_checkpoint(const std::vector<std::uint8_t>& buf) {
  bytes::Reader r(buf, "CNCK");
  if (r.chars(4) != "CNCK") throw FormatError("CNCK: bad magic", 0);
  const std::size_t version_at = r.offset();
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("CNCK: unsupported version " + std::to_string(version), version_at);
  }
  const std::uint32_t header_len = r.u32();
  const std::size_t header_at = r.offset();
  const std::string_view text = r.chars(header_len);

  std::optional<Sequential<float>> model;
  try {
    const json header = json::parse(text);
    model.emplace(header.at("input_shape").get<Shape>());
    model->arch = header.at("arch").get<std::string>();
    model->class_names = header.at("classes").get<std::vector<std::string>>();
    for (const json& lj : header.at("layers")) {
      auto layer = layer_from_json(lj);
      std::vector<Shape> declared = lj.at("params").get<std::vector<Shape>>();
      std::vector<Shape> actual;
      for (const Tensor* p : std::as_const(*layer).params()) actual.push_back(p->shape());
      if (declared != actual) throw ConfigError("parameter shapes disagree with hyperparameters");
      model->add(std::move(layer));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("CNCK: malformed header: ") + e.what(), header_at);
  } catch (const Error& e) {
    throw FormatError(std::string("CNCK: inconsistent architecture: ") + e.what(), header_at);
  }

  std::size_t expected = 0;
  for (const Tensor* p : std::as_const(*model).params()) expected += p->size();
  if (r.remaining() != 4 * expected) {
    throw FormatError("CNCK: payload holds " + std::to_string(r.remaining()) +
                          " bytes, architecture needs " + std::to_string(4 * expected),
                      r.offset());
  }
  for (Tensor* p : model->params())
    for (float& v : p->data()) v = r.f32();
  return std::move(*model);
}

void save_checkpoint(const Sequential<float>& model, const std::filesystem::path& path) {
  bytes::write_file_atomic(path, encode_checkpoint(model));
}

Sequential<float> load_checkpoint(const std::filesystem::path& path) {
  try {
    return decode_checkpoint(bytes::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.detail(), e.offset());
  }
}

}  // namespace ctcnn
