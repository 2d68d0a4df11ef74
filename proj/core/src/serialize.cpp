#include "mmbc/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mmbc {

namespace {

const char* kMagic = "mmbc-params v1";

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::ReLU: return "relu";
        case Activation::LeakyReLU: return "leaky_relu";
        case Activation::Identity: return "identity";
    }
    return "?";
}

Activation activation_from_name(const std::string& s) {
    if (s == "relu") return Activation::ReLU;
    if (s == "leaky_relu") return Activation::LeakyReLU;
    if (s == "identity") return Activation::Identity;
    throw std::runtime_error("params file: unknown activation " + s);
}

void write_densenet(std::ostream& out, const DenseNet& net) {
    out << "dims " << net.layer_dims.size();
    for (int d : net.layer_dims) out << " " << d;
    out << "\nactivation " << activation_name(net.activation) << "\n";
    const auto flat = get_params(net);
    out << "params " << flat.size() << "\n";
    char buf[40];
    for (size_t i = 0; i < flat.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%a", flat[i]);
        out << buf << ((i % 8 == 7 || i + 1 == flat.size()) ? "\n" : " ");
    }
}

DenseNet read_densenet(std::istream& in) {
    std::string key;
    size_t ndims = 0;
    in >> key >> ndims;
    if (key != "dims") throw std::runtime_error("params file: expected dims");
    std::vector<int> dims(ndims);
    for (auto& d : dims) in >> d;
    std::string act;
    in >> key >> act;
    if (key != "activation") throw std::runtime_error("params file: expected activation");
    DenseNet net = zero_net(dims, activation_from_name(act));
    size_t count = 0;
    in >> key >> count;
    if (key != "params") throw std::runtime_error("params file: expected params");
    std::vector<double> flat(count);
    for (auto& v : flat) {
        std::string tok;
        in >> tok;
        v = std::strtod(tok.c_str(), nullptr);
    }
    if (!in) throw std::runtime_error("params file: truncated parameter block");
    set_params(net, flat);
    return net;
}

}  // namespace

void save_models(const std::string& path, const NamedModels& models) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << kMagic << "\nentries " << models.size() << "\n";
    for (const auto& [name, model] : models) {
        if (std::holds_alternative<DenseNet>(model)) {
            out << "entry " << name << " densenet\n";
            write_densenet(out, std::get<DenseNet>(model));
        } else if (std::holds_alternative<EnergyNet>(model)) {
            const auto& e = std::get<EnergyNet>(model);
            out << "entry " << name << " energy\n";
            out << "pair_dims " << e.cond_dim << " " << e.target_dim << "\n";
            write_densenet(out, e.net);
        } else {
            const auto& g = std::get<MdnGenerator>(model);
            out << "entry " << name << " mdn\n";
            out << "mixture " << g.cond_dim << " " << g.latent_dim << " " << g.target_dim << " "
                << g.components << "\n";
            out << "noise " << noise_name(g.noise) << "\n";
            char buf[40];
            std::snprintf(buf, sizeof buf, "%a", g.temperature);
            out << "temperature " << buf << "\n";
            write_densenet(out, g.net);
        }
    }
}

NamedModels load_models(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line);
    if (line != kMagic) throw std::runtime_error("params file: bad header in " + path);
    std::string key;
    size_t entries = 0;
    in >> key >> entries;
    if (key != "entries") throw std::runtime_error("params file: expected entries");

    NamedModels models;
    for (size_t i = 0; i < entries; ++i) {
        std::string name, kind;
        in >> key >> name >> kind;
        if (key != "entry") throw std::runtime_error("params file: expected entry");
        if (kind == "densenet") {
            models.emplace_back(name, read_densenet(in));
        } else if (kind == "energy") {
            EnergyNet e;
            in >> key >> e.cond_dim >> e.target_dim;
            if (key != "pair_dims") throw std::runtime_error("params file: expected pair_dims");
            e.net = read_densenet(in);
            models.emplace_back(name, std::move(e));
        } else if (kind == "mdn") {
            MdnGenerator g;
            in >> key >> g.cond_dim >> g.latent_dim >> g.target_dim >> g.components;
            if (key != "mixture") throw std::runtime_error("params file: expected mixture");
            std::string noise;
            in >> key >> noise;
            if (key != "noise") throw std::runtime_error("params file: expected noise");
            g.noise = noise_from_name(noise);
            std::string temp;
            in >> key >> temp;
            if (key != "temperature") throw std::runtime_error("params file: expected temperature");
            g.temperature = std::strtod(temp.c_str(), nullptr);
            g.net = read_densenet(in);
            models.emplace_back(name, std::move(g));
        } else {
            throw std::runtime_error("params file: unknown entry kind " + kind);
        }
    }
    return models;
}

const DenseNet* find_net(const NamedModels& models, const std::string& name) {
    for (const auto& [n, m] : models)
        if (n == name && std::holds_alternative<DenseNet>(m)) return &std::get<DenseNet>(m);
    return nullptr;
}

const EnergyNet* find_energy(const NamedModels& models, const std::string& name) {
    for (const auto& [n, m] : models)
        if (n == name && std::holds_alternative<EnergyNet>(m)) return &std::get<EnergyNet>(m);
    return nullptr;
}

const MdnGenerator* find_mdn(const NamedModels& models, const std::string& name) {
    for (const auto& [n, m] : models)
        if (n == name && std::holds_alternative<MdnGenerator>(m)) return &std::get<MdnGenerator>(m);
    return nullptr;
}

}  // namespace mmbc
