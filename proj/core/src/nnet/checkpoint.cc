#include "gendet/nnet/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gendet/common/error.h"

namespace gendet::nnet {
namespace {

constexpr char kMagic[4] = {'G', 'D', 'C', 'K'};
constexpr uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t GetU32(const std::vector<uint8_t>& in, size_t offset) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(in[offset + i]) << (8 * i);
  return v;
}

[[noreturn]] void Corrupt(const std::string& what) {
  Fail(ErrorKind::kDataError, "invalid checkpoint: " + what);
}

}  // namespace

std::vector<uint8_t> SerializeCheckpoint(DetectorModel& model) {
  nlohmann::ordered_json header;
  header["arch"] = ToString(model.arch());
  header["preprocess"] = imageops::ToString(model.preprocess());
  header["input_size"] = model.input_size();
  header["in_channels"] = model.in_channels();
  header["seed"] = model.seed();
  const ModelOptions& opt = model.options();
  header["init"] = {{"fan_in_scaled", opt.init.fan_in_scaled}, {"std", opt.init.std}};
  header["ft_lambda"] = opt.ft_lambda;
  header["widths"] = {{"stem", opt.widths.stem},
                      {"blocks", opt.widths.blocks},
                      {"encoder", opt.widths.encoder}};
  auto& arrays = header["parameters"] = nlohmann::ordered_json::array();
  for (Parameter* p : model.Parameters()) {
    const Shape& s = p->value.shape();
    arrays.push_back({{"name", p->name}, {"shape", {s.n, s.c, s.h, s.w}}});
  }
  const std::string text = header.dump();

  std::vector<uint8_t> out(kMagic, kMagic + 4);
  PutU32(out, kVersion);
  PutU32(out, static_cast<uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (Parameter* p : model.Parameters()) {
    const size_t offset = out.size();
    out.resize(offset + p->value.size() * sizeof(double));
    std::memcpy(out.data() + offset, p->value.data(), p->value.size() * sizeof(double));
  }
  return out;
}

DetectorModel DeserializeCheckpoint(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) Corrupt("bad magic");
  if (GetU32(bytes, 4) != kVersion) Corrupt("unsupported version");
  const uint32_t header_len = GetU32(bytes, 8);
  if (bytes.size() < 12 + static_cast<size_t>(header_len)) Corrupt("truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + 12, bytes.begin() + 12 + header_len);
  } catch (const nlohmann::json::exception& e) {
    Corrupt(e.what());
  }

  ModelOptions opt;
  DetectorModel model = [&] {
    try {
      opt.init.fan_in_scaled = header.at("init").at("fan_in_scaled").get<bool>();
      opt.init.std = header.at("init").at("std").get<double>();
      opt.ft_lambda = header.at("ft_lambda").get<double>();
      opt.widths.stem = header.at("widths").at("stem").get<int>();
      opt.widths.blocks = header.at("widths").at("blocks").get<std::array<int, 3>>();
      opt.widths.encoder = header.at("widths").at("encoder").get<std::array<int, 4>>();
      return DetectorModel::Build(ParseArch(header.at("arch").get<std::string>()),
                                  imageops::ParsePreprocessMethod(
                                      header.at("preprocess").get<std::string>()),
                                  header.at("input_size").get<int>(),
                                  header.at("seed").get<uint64_t>(), opt);
    } catch (const nlohmann::json::exception& e) {
      Corrupt(e.what());
    }
  }();

  auto params = model.Parameters();
  const auto& arrays = header.at("parameters");
  if (arrays.size() != params.size()) Corrupt("parameter array count mismatch");
  size_t offset = 12 + header_len;
  for (size_t i = 0; i < params.size(); ++i) {
    const auto shape = arrays[i].at("shape").get<std::array<int, 4>>();
    const Shape& s = params[i]->value.shape();
    if (arrays[i].at("name").get<std::string>() != params[i]->name ||
        shape != std::array<int, 4>{s.n, s.c, s.h, s.w}) {
      Corrupt("parameter '" + params[i]->name + "' does not match the architecture");
    }
    const size_t n_bytes = params[i]->value.size() * sizeof(double);
    if (offset + n_bytes > bytes.size()) Corrupt("truncated weights");
    std::memcpy(params[i]->value.data(), bytes.data() + offset, n_bytes);
    offset += n_bytes;
  }
  if (offset != bytes.size()) Corrupt("trailing bytes");
  return model;
}

void SaveCheckpoint(const std::filesystem::path& file, DetectorModel& model) {
  const auto bytes = SerializeCheckpoint(model);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorKind::kDataError, "cannot write checkpoint " + file.string());
}

DetectorModel LoadCheckpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) Fail(ErrorKind::kDataError, "cannot open checkpoint " + file.string());
  std::vector<uint8_t> bytes(std::istreambuf_iterator<char>(in), {});
  return DeserializeCheckpoint(bytes);
}

}  // namespace gendet::nnet
