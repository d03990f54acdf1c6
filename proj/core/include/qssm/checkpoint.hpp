#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qssm/config.hpp"
#include "qssm/model.hpp"

namespace qssm {

// Binary layout (all integers little-endian):
//   magic "QSSMCKPT", u32 version=1,
//   u32 gate kind, 16-byte config-hash hex string,
//   u64 x6 dims (f_in, f_out, window, horizon, proj_width, latent_width),
//   u64 parameter count, then per parameter:
//     u32 name length, name bytes, u64 value count, doubles (IEEE-754 bits),
//   trailing u64 FNV-1a hash of every preceding byte.
struct CheckpointData {
  GateKind kind = GateKind::Quantum;
  std::string config_hash;
  ModelDims dims;
  std::vector<std::pair<std::string, Vector>> params;
};

std::string checkpoint_bytes(const QssmModel& model,
                             const ParameterStore& store,
                             const std::string& config_hash);
void save_checkpoint(const std::string& path, const QssmModel& model,
                     const ParameterStore& store,
                     const std::string& config_hash);

CheckpointData parse_checkpoint(const std::string& bytes,
                                const std::string& source_name);
CheckpointData load_checkpoint(const std::string& path);

// Copies values into the bundle's registered parameters; every name and
// size must match the registration exactly.
void apply_checkpoint(const CheckpointData& data, ModelBundle& bundle);

}  // namespace qssm
