#include "config.hpp"

#include <fstream>

namespace qmaxent::cli {

namespace {

ModelSpec parse_model(const ordered_json& doc) {
    ModelSpec spec;
    if (!doc.is_object() || !doc.contains("type"))
        throw DomainError("config.model needs a type tag");
    const std::string type = doc.at("type").get<std::string>();
    if (type == "tfim") {
        spec.kind = ModelSpec::Kind::Tfim;
        spec.L = doc.at("L").get<int>();
        spec.J = doc.value("J", 1.0);
        spec.h = doc.value("h", 1.0);
        const std::string geometry = doc.value("geometry", std::string("ring"));
        if (geometry == "ring") spec.geometry = Geometry::Ring;
        else if (geometry == "open_chain") spec.geometry = Geometry::OpenChain;
        else throw DomainError("unknown chain geometry '" + geometry + "'");
    } else if (type == "toric2x2") {
        spec.kind = ModelSpec::Kind::Toric2x2;
    } else if (type == "fermion") {
        spec.kind = ModelSpec::Kind::Fermion;
        spec.L = doc.at("L").get<int>();
        spec.w = doc.value("w", 1.0);
    } else if (type == "marginal_file") {
        spec.kind = ModelSpec::Kind::MarginalFile;
        spec.path = doc.at("path").get<std::string>();
    } else {
        throw DomainError("unknown model type '" + type + "'");
    }
    return spec;
}

StateSpec parse_state(const ordered_json& doc) {
    StateSpec spec;
    if (doc.is_null()) return spec; // defaults to ground
    if (!doc.is_object() || !doc.contains("type"))
        throw DomainError("config.state needs a type tag");
    const std::string type = doc.at("type").get<std::string>();
    if (type == "ground") {
        spec.kind = StateSpec::Kind::Ground;
    } else if (type == "thermal") {
        spec.kind = StateSpec::Kind::Thermal;
        spec.temperature = doc.at("T").get<double>();
        if (!(spec.temperature > 0.0)) throw DomainError("temperature must be positive");
    } else if (type == "eigenstate") {
        spec.kind = StateSpec::Kind::Eigenstate;
        spec.eigenstate_index = doc.at("index").get<int>();
        if (spec.eigenstate_index < 0) throw DomainError("eigenstate index must be nonnegative");
    } else {
        throw DomainError("unknown state type '" + type + "'");
    }
    return spec;
}

RegionSpec parse_regions(const ordered_json& doc) {
    RegionSpec spec;
    if (doc.is_null()) return spec;
    if (!doc.is_object() || !doc.contains("type"))
        throw DomainError("config.regions needs a type tag");
    const std::string type = doc.at("type").get<std::string>();
    if (type == "intervals") {
        spec.kind = RegionSpec::Kind::Intervals;
        spec.window = doc.at("R").get<int>();
    } else if (type == "explicit") {
        spec.kind = RegionSpec::Kind::Explicit;
        for (const auto& region : doc.at("regions"))
            spec.regions.push_back(region.get<std::vector<int>>());
        if (spec.regions.empty()) throw DomainError("explicit region list is empty");
    } else if (type == "stabilizers") {
        spec.kind = RegionSpec::Kind::Stabilizers;
    } else {
        throw DomainError("unknown region type '" + type + "'");
    }
    return spec;
}

SolverOptions parse_solver(const ordered_json& doc) {
    SolverOptions opts;
    if (doc.is_null()) return opts;
    if (!doc.is_object()) throw DomainError("config.solver must be an object");
    opts.tolerance_eps = doc.value("tolerance_eps", opts.tolerance_eps);
    opts.max_iterations = doc.value("max_iterations", opts.max_iterations);
    opts.lambda_cap = doc.value("lambda_cap", opts.lambda_cap);
    opts.history_size = doc.value("history_size", opts.history_size);
    opts.seed = doc.value("seed", opts.seed);
    if (!(opts.tolerance_eps > 0.0)) throw DomainError("solver.tolerance_eps must be positive");
    if (opts.max_iterations < 0) throw DomainError("solver.max_iterations must be nonnegative");
    if (!(opts.lambda_cap > 0.0)) throw DomainError("solver.lambda_cap must be positive");
    if (opts.history_size < 1) throw DomainError("solver.history_size must be at least 1");
    return opts;
}

} // namespace

RunConfig parse_config(const ordered_json& doc) {
    if (!doc.is_object()) throw DomainError("config must be a JSON object");
    RunConfig config;
    config.echo = doc;
    config.has_model = doc.contains("model");
    if (config.has_model) config.model = parse_model(doc.at("model"));
    config.state = parse_state(doc.value("state", ordered_json()));
    config.regions = parse_regions(doc.value("regions", ordered_json()));
    if (!doc.contains("regions") && config.model.kind == ModelSpec::Kind::Toric2x2) {
        // Chain-style intervals make no sense on the torus; default to the
        // stabilizer supports instead of failing on the implicit default.
        config.regions.kind = RegionSpec::Kind::Stabilizers;
    }
    config.solver = parse_solver(doc.value("solver", ordered_json()));
    if (doc.contains("sweep")) {
        config.sweep_r = doc.at("sweep").at("R_values").get<std::vector<int>>();
        if (config.sweep_r.empty()) throw DomainError("sweep.R_values is empty");
    }
    if (doc.contains("output")) {
        const auto& out = doc.at("output");
        config.output.save_marginals = out.value("save_marginals", std::string());
        config.output.save_sigma = out.value("save_sigma", std::string());
    }
    if (doc.contains("certify")) {
        const auto& cert = doc.at("certify");
        config.certify.sigma_file = cert.at("sigma_file").get<std::string>();
        config.certify.marginal_file = cert.at("marginal_file").get<std::string>();
        config.certify.rho_file = cert.value("rho_file", std::string());
        if (cert.contains("s_rho")) config.certify.s_rho = cert.at("s_rho").get<double>();
    }
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file '" + path + "'");
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(doc);
}

} // namespace qmaxent::cli
