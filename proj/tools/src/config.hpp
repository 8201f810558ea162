#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmaxent/json_io.hpp"
#include "qmaxent/solver.hpp"

namespace qmaxent::cli {

struct ModelSpec {
    enum class Kind { Tfim, Toric2x2, Fermion, MarginalFile };
    Kind kind = Kind::Tfim;
    int L = 4;
    double J = 1.0;
    double h = 1.0;
    Geometry geometry = Geometry::Ring;
    double w = 1.0;          // fermion hopping
    std::string path;        // marginal-file model
};

struct StateSpec {
    enum class Kind { Ground, Thermal, Eigenstate };
    Kind kind = Kind::Ground;
    double temperature = 1.0;
    int eigenstate_index = 0;
};

struct RegionSpec {
    enum class Kind { Intervals, Explicit, Stabilizers };
    Kind kind = Kind::Intervals;
    int window = 2;                          // interval size; fermion max separation
    std::vector<std::vector<int>> regions;   // explicit sets
};

struct OutputSpec {
    std::string save_marginals; // optional path for the extracted ConstraintSet
    std::string save_sigma;     // optional path for the reconstructed state
};

struct CertifySpec {
    std::string sigma_file;
    std::string marginal_file;
    std::string rho_file;            // optional reference state
    std::optional<double> s_rho;     // claimed target entropy
};

/// Parsed and validated configuration document (see docs/schema.md).
struct RunConfig {
    bool has_model = false; // certify-only configs may omit the model block
    ModelSpec model;
    StateSpec state;
    RegionSpec regions;
    SolverOptions solver;
    std::vector<int> sweep_r; // window sizes for the sweep command
    OutputSpec output;
    CertifySpec certify;
    ordered_json echo; // original document, echoed into results
};

RunConfig parse_config(const ordered_json& doc);
RunConfig load_config(const std::string& path);

} // namespace qmaxent::cli
