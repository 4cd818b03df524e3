#include "polylab/environment.hpp"

#include <nlohmann/json.hpp>

namespace polylab {

nlohmann::json descriptor_to_json(const EnvironmentDescriptor& desc) {
    nlohmann::json j;
    j["model"] = model_to_json(desc.model);
    j["d"] = desc.d;
    j["n_max"] = desc.n_max;
    j["seed"] = desc.seed;
    return j;
}

EnvironmentDescriptor descriptor_from_json(const nlohmann::json& j) {
    return EnvironmentDescriptor{model_from_json(j.at("model")), j.at("d").get<int>(),
                                 j.at("n_max").get<int>(),
                                 j.at("seed").get<std::uint64_t>()};
}

}  // namespace polylab
