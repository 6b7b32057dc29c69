#include "hcrn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace hcrn {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'H', 'C', 'R', 'N'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((x >> (8 * i)) & 0xff);
}

void put_u64(std::string& out, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) out += static_cast<char>((x >> (8 * i)) & 0xff);
}

std::uint32_t get_u32(const std::string& s, std::size_t pos) {
  std::uint32_t x = 0;
  for (int i = 0; i < 4; ++i)
    x |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[pos + i]))
         << (8 * i);
  return x;
}

std::uint64_t get_u64(const std::string& s, std::size_t pos) {
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i)
    x |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[pos + i]))
         << (8 * i);
  return x;
}

std::size_t elem_size(const std::string& dtype) {
  if (dtype == "f32") return 4;
  if (dtype == "f64") return 8;
  throw FormatError("checkpoint: unknown dtype '" + dtype + "'");
}

void append_values(std::string& out, const TensorRecord& r) {
  if (r.dtype == "f64") {
    for (double x : r.data)
      put_u64(out, std::bit_cast<std::uint64_t>(x));
  } else {
    for (double x : r.data)
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
  }
}

std::string read_entire(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("checkpoint: cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace

void write_checkpoint_file(const std::string& path, const CheckpointData& c) {
  json manifest;
  manifest["config"] = c.config;
  manifest["epoch"] = c.epoch;
  manifest["rng"] = c.rng_state;

  std::string payload;
  json tensors = json::array();
  std::size_t offset = 0;
  for (const TensorRecord& r : c.tensors) {
    const std::size_t numel = Tensor<double>::numel_of(r.shape);
    if (numel != r.data.size())
      throw FormatError("checkpoint: shape/data mismatch for '" + r.name + "'");
    json t{{"name", r.name},
           {"shape", r.shape},
           {"dtype", r.dtype},
           {"group", r.group},
           {"offset", offset}};
    if (r.group == "model") t["frozen"] = r.frozen;
    tensors.push_back(std::move(t));
    append_values(payload, r);
    offset += numel * elem_size(r.dtype);
  }
  manifest["tensors"] = std::move(tensors);

  const std::string mbytes = manifest.dump();
  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u64(out, mbytes.size());
  out += mbytes;
  out += payload;

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("checkpoint: cannot write " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw InputError("checkpoint: short write to " + path);
}

namespace {

json parse_manifest(const std::string& bytes, std::size_t* payload_start) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("checkpoint: bad magic bytes");
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kVersion)
    throw FormatError("checkpoint: unsupported version " +
                      std::to_string(version));
  const std::uint64_t mlen = get_u64(bytes, 8);
  if (16 + mlen > bytes.size())
    throw FormatError("checkpoint: truncated manifest");
  json manifest;
  try {
    manifest = json::parse(bytes.substr(16, mlen));
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint: manifest is not valid JSON: ") +
                      e.what());
  }
  if (payload_start) *payload_start = 16 + static_cast<std::size_t>(mlen);
  return manifest;
}

}  // namespace

CheckpointData read_checkpoint_file(const std::string& path) {
  const std::string bytes = read_entire(path);
  std::size_t payload_start = 0;
  const json manifest = parse_manifest(bytes, &payload_start);

  CheckpointData c;
  c.config = manifest.at("config");
  c.epoch = manifest.at("epoch").get<int>();
  c.rng_state = manifest.at("rng").get<std::string>();

  const std::size_t payload_size = bytes.size() - payload_start;
  std::size_t expected_end = 0;
  for (const auto& t : manifest.at("tensors")) {
    TensorRecord r;
    r.name = t.at("name").get<std::string>();
    r.shape = t.at("shape").get<std::vector<std::size_t>>();
    r.dtype = t.at("dtype").get<std::string>();
    r.group = t.at("group").get<std::string>();
    r.frozen = t.value("frozen", false);
    const std::size_t numel = Tensor<double>::numel_of(r.shape);
    const std::size_t offset = t.at("offset").get<std::size_t>();
    if (offset != expected_end)
      throw FormatError("checkpoint: offset gap at tensor '" + r.name + "'");
    const std::size_t nbytes = numel * elem_size(r.dtype);
    if (offset + nbytes > payload_size)
      throw FormatError("checkpoint: payload truncated at tensor '" + r.name +
                        "'");
    r.data.resize(numel);
    const std::size_t base = payload_start + offset;
    for (std::size_t i = 0; i < numel; ++i) {
      if (r.dtype == "f64") {
        r.data[i] = std::bit_cast<double>(get_u64(bytes, base + 8 * i));
      } else {
        r.data[i] = static_cast<double>(
            std::bit_cast<float>(get_u32(bytes, base + 4 * i)));
      }
    }
    expected_end = offset + nbytes;
    c.tensors.push_back(std::move(r));
  }
  if (expected_end != payload_size)
    throw FormatError("checkpoint: payload size does not match manifest");
  return c;
}

json peek_checkpoint_config(const std::string& path) {
  const std::string bytes = read_entire(path);
  return parse_manifest(bytes, nullptr).at("config");
}

}  // namespace hcrn
