#include "qssm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qssm {

namespace {

constexpr char kMagic[8] = {'Q', 'S', 'S', 'M', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_double(std::string& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

struct Reader {
  const std::string& bytes;
  std::size_t pos = 0;
  const std::string& name;

  void need(std::size_t n) const {
    if (pos + n > bytes.size()) {
      throw std::runtime_error(name + ": checkpoint truncated");
    }
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    }
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    }
    pos += 8;
    return v;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes.substr(pos, n);
    pos += n;
    return s;
  }
};

std::uint32_t kind_code(GateKind kind) {
  switch (kind) {
    case GateKind::Quantum: return 0;
    case GateKind::Classical: return 1;
    case GateKind::ClassicalPerStep: return 2;
  }
  throw std::invalid_argument("checkpoint: bad gate kind");
}

GateKind kind_from_code(std::uint32_t code, const std::string& name) {
  switch (code) {
    case 0: return GateKind::Quantum;
    case 1: return GateKind::Classical;
    case 2: return GateKind::ClassicalPerStep;
  }
  throw std::runtime_error(name + ": checkpoint has unknown gate kind code " +
                           std::to_string(code));
}

}  // namespace

std::string checkpoint_bytes(const QssmModel& model,
                             const ParameterStore& store,
                             const std::string& config_hash) {
  if (config_hash.size() != 16) {
    throw std::invalid_argument("checkpoint: config hash must be 16 hex chars");
  }
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kVersion);
  put_u32(out, kind_code(model.kind()));
  out.append(config_hash);
  const ModelDims& d = model.dims();
  put_u64(out, d.f_in);
  put_u64(out, d.f_out);
  put_u64(out, d.window);
  put_u64(out, d.horizon);
  put_u64(out, d.proj_width);
  put_u64(out, d.latent_width);
  put_u64(out, store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const ParamEntry& e = store.entry(i);
    put_u32(out, static_cast<std::uint32_t>(e.name.size()));
    out.append(e.name);
    put_u64(out, e.size);
    for (double v : e.value()) put_double(out, v);
  }
  put_u64(out, fnv1a64(out));
  return out;
}

void save_checkpoint(const std::string& path, const QssmModel& model,
                     const ParameterStore& store,
                     const std::string& config_hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  const std::string bytes = checkpoint_bytes(model, store, config_hash);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw std::runtime_error("short write to " + path);
  }
}

CheckpointData parse_checkpoint(const std::string& bytes,
                                const std::string& source_name) {
  if (bytes.size() < sizeof(kMagic) + 8) {
    throw std::runtime_error(source_name + ": checkpoint truncated");
  }
  const std::string body = bytes.substr(0, bytes.size() - 8);
  Reader tail{bytes, bytes.size() - 8, source_name};
  if (tail.u64() != fnv1a64(body)) {
    throw std::runtime_error(source_name + ": checkpoint checksum mismatch (corrupted file)");
  }

  Reader r{body, 0, source_name};
  if (r.str(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw std::runtime_error(source_name + ": not a checkpoint file (bad magic)");
  }
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw std::runtime_error(source_name + ": unsupported checkpoint version " +
                             std::to_string(version));
  }
  CheckpointData data;
  data.kind = kind_from_code(r.u32(), source_name);
  data.config_hash = r.str(16);
  data.dims.f_in = r.u64();
  data.dims.f_out = r.u64();
  data.dims.window = r.u64();
  data.dims.horizon = r.u64();
  data.dims.proj_width = r.u64();
  data.dims.latent_width = r.u64();
  const std::uint64_t count = r.u64();
  data.params.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = r.u32();
    std::string name = r.str(name_len);
    const std::uint64_t size = r.u64();
    Vector values(size);
    for (std::uint64_t j = 0; j < size; ++j) {
      values[j] = std::bit_cast<double>(r.u64());
    }
    data.params.emplace_back(std::move(name), std::move(values));
  }
  if (r.pos != body.size()) {
    throw std::runtime_error(source_name + ": trailing bytes in checkpoint");
  }
  return data;
}

CheckpointData load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_checkpoint(buf.str(), path);
}

void apply_checkpoint(const CheckpointData& data, ModelBundle& bundle) {
  if (data.params.size() != bundle.store.size()) {
    throw std::runtime_error("checkpoint: parameter count mismatch");
  }
  for (std::size_t i = 0; i < data.params.size(); ++i) {
    ParamEntry& e = bundle.store.entry(i);
    const auto& [name, values] = data.params[i];
    if (name != e.name || values.size() != e.size) {
      throw std::runtime_error("checkpoint: parameter " + name +
                               " does not match registration of " + e.name);
    }
    auto dst = e.value();
    for (std::size_t j = 0; j < e.size; ++j) dst[j] = values[j];
  }
  bundle.store.mark_mutated();
}

}  // namespace qssm
