#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mmbc/energy.hpp"
#include "mmbc/mdn.hpp"

namespace mmbc {

using ModelVariant = std::variant<DenseNet, EnergyNet, MdnGenerator>;
using NamedModels = std::vector<std::pair<std::string, ModelVariant>>;

// Versioned flat parameter file ("mmbc-params v1"): named entries, each a
// plain net, an energy net or an MDN generator. Parameters are written as
// hexfloats so a load reproduces the trained model bit for bit.
void save_models(const std::string& path, const NamedModels& models);
NamedModels load_models(const std::string& path);

const DenseNet* find_net(const NamedModels& models, const std::string& name);
const EnergyNet* find_energy(const NamedModels& models, const std::string& name);
const MdnGenerator* find_mdn(const NamedModels& models, const std::string& name);

}  // namespace mmbc
