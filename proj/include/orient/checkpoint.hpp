#pragma once

#include "orient/backbone.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>

namespace orient {

inline constexpr const char* kCheckpointFormat = "orient-checkpoint";
inline constexpr int kCheckpointVersion = 1;

// Checkpoint file (JSON, one object):
//   format      "orient-checkpoint"
//   version     1
//   seed        initialization seed
//   network     {layer_sizes: [..], activation: "relu", init_std}
//   layers      [{inputs, outputs, weights: [outputs*inputs, row-major], biases: [outputs]}, ...]
//   metadata    free-form object (the CLI stores the resolved experiment config here)
// Numbers are written with round-trip precision, so load(save(m)) is bit-exact.
struct Checkpoint {
    ModelState model;
    std::uint64_t seed = 0;
    nlohmann::json metadata = nlohmann::json::object();
};

nlohmann::json to_json(const NetworkSpec& spec);
NetworkSpec network_spec_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace orient
