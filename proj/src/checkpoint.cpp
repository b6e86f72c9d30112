#include "orient/checkpoint.hpp"

#include "orient/error.hpp"

#include <fstream>
#include <string>

namespace orient {

using nlohmann::json;

json to_json(const NetworkSpec& spec) {
    return json{{"layer_sizes", spec.layer_sizes}, {"activation", "relu"}, {"init_std", spec.init_std}};
}

NetworkSpec network_spec_from_json(const json& j) {
    NetworkSpec spec;
    try {
        spec.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
        if (j.value("activation", std::string("relu")) != "relu") {
            throw Error(ErrorKind::format_error, "unsupported activation");
        }
        spec.init_std = j.value("init_std", kDefaultInitStd);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::format_error, std::string("bad network spec: ") + e.what());
    }
    validate(spec);
    return spec;
}

json checkpoint_to_json(const Checkpoint& checkpoint) {
    json layers = json::array();
    for (const auto& l : checkpoint.model.parameters()) {
        layers.push_back({{"inputs", l.inputs}, {"outputs", l.outputs}, {"weights", l.weights}, {"biases", l.biases}});
    }
    return json{{"format", kCheckpointFormat},
                {"version", kCheckpointVersion},
                {"seed", checkpoint.seed},
                {"network", to_json(checkpoint.model.spec())},
                {"layers", std::move(layers)},
                {"metadata", checkpoint.metadata}};
}

Checkpoint checkpoint_from_json(const json& j) {
    try {
        if (j.at("format").get<std::string>() != kCheckpointFormat) {
            throw Error(ErrorKind::format_error, "not an orient checkpoint");
        }
        if (j.at("version").get<int>() != kCheckpointVersion) {
            throw Error(ErrorKind::format_error,
                        "unsupported checkpoint version " + std::to_string(j.at("version").get<int>()));
        }
        Checkpoint c{ModelState(network_spec_from_json(j.at("network"))), j.at("seed").get<std::uint64_t>(),
                     j.value("metadata", json::object())};
        const json& layers = j.at("layers");
        if (layers.size() != c.model.num_layers()) {
            throw Error(ErrorKind::format_error, "checkpoint layer count does not match its network");
        }
        for (std::size_t l = 0; l < c.model.num_layers(); ++l) {
            const auto w = layers[l].at("weights").get<std::vector<double>>();
            const auto b = layers[l].at("biases").get<std::vector<double>>();
            auto dw = c.model.weights(l);
            auto db = c.model.biases(l);
            if (w.size() != dw.size() || b.size() != db.size()) {
                throw Error(ErrorKind::format_error, "checkpoint layer " + std::to_string(l) + " has the wrong shape");
            }
            std::copy(w.begin(), w.end(), dw.begin());
            std::copy(b.begin(), b.end(), db.begin());
        }
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::format_error, std::string("malformed checkpoint: ") + e.what());
    }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "' for writing");
    os << checkpoint_to_json(checkpoint).dump() << '\n';
    if (!os) throw Error(ErrorKind::io_error, "write to '" + path.string() + "' failed");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::io_error, "cannot open checkpoint '" + path.string() + "'");
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::format_error, "checkpoint '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return checkpoint_from_json(j);
}

}  // namespace orient
