#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "commands.hpp"
#include "config.hpp"

using namespace qmaxent;
using namespace qmaxent::cli;

namespace {

namespace fs = std::filesystem;

// Per-process scratch directory so parallel test runs never collide.
fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("qmaxent_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path scratch_file(const std::string& name) { return scratch_dir() / name; }

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

RunConfig config_from(const ordered_json& doc) { return parse_config(doc); }

ordered_json tfim_thermal_doc() {
    return ordered_json{
        {"model", {{"type", "tfim"}, {"L", 4}, {"J", 1.0}, {"h", 1.2}}},
        {"state", {{"type", "thermal"}, {"T", 1.0}}},
        {"regions", {{"type", "intervals"}, {"R", 2}}},
        {"solver", {{"tolerance_eps", 1e-9}}},
    };
}

} // namespace

TEST_CASE("reconstruct emits the full document for a known model") {
    const CommandResult result = cmd_reconstruct(config_from(tfim_thermal_doc()));
    CHECK(result.exit_code == 0);

    const ordered_json& doc = result.document;
    CHECK(doc.at("schema_version").get<int>() == kSchemaVersion);
    CHECK(doc.at("command") == "reconstruct");
    CHECK(doc.at("config").is_object()); // original document echoed back
    CHECK(doc.at("num_regions").get<int>() == 4);
    CHECK(doc.at("solver").at("converged").get<bool>());
    CHECK(doc.at("solver").at("final_constraint_residual").get<double>() <= 1e-9);
    CHECK(doc.at("model_info").at("dim").get<int>() == 16);

    // The target is thermal and the window covers every term: recovery is
    // essentially exact and certified.
    CHECK(doc.at("trace_distance").get<double>() < 1e-6);
    CHECK(std::abs(doc.at("s_rec").get<double>() - doc.at("s_rho").get<double>()) < 1e-7);
    CHECK(doc.at("certificate").at("satisfied").get<bool>());
    CHECK(doc.at("lambdas").size() == doc.at("num_constraints").get<std::size_t>());
}

TEST_CASE("reconstruct from a marginal file withholds target-only fields") {
    ordered_json doc = tfim_thermal_doc();
    const fs::path marginals = scratch_file("marginals.json");
    doc["output"]["save_marginals"] = marginals.string();
    const CommandResult direct = cmd_reconstruct(config_from(doc));
    REQUIRE(direct.exit_code == 0);

    const ordered_json from_file{
        {"model", {{"type", "marginal_file"}, {"path", marginals.string()}}},
        {"solver", {{"tolerance_eps", 1e-9}}},
    };
    const CommandResult replay = cmd_reconstruct(config_from(from_file));
    CHECK(replay.exit_code == 0);

    // Same data, same reconstruction.
    CHECK(std::abs(replay.document.at("s_rec").get<double>() -
                   direct.document.at("s_rec").get<double>()) < 1e-9);
    // Without the model there is no target state and nothing to certify.
    CHECK(replay.document.at("s_rho").is_null());
    CHECK(replay.document.at("trace_distance").is_null());
    CHECK(replay.document.at("certificate").is_null());
    CHECK(replay.document.at("model_info").is_null());
    CHECK(replay.document.at("bounds").is_null());
}

TEST_CASE("reconstruct saves a reloadable sigma") {
    ordered_json doc = tfim_thermal_doc();
    const fs::path sigma_path = scratch_file("sigma.json");
    doc["output"]["save_sigma"] = sigma_path.string();
    const CommandResult result = cmd_reconstruct(config_from(doc));
    REQUIRE(result.exit_code == 0);

    const DensityMatrix sigma = state_from_json(ordered_json::parse(slurp(sigma_path)));
    CHECK(std::abs(von_neumann_entropy(sigma) - result.document.at("s_rec").get<double>()) <
          1e-10);
}

TEST_CASE("ground-state runs attach energy bounds when the regions cover the terms") {
    const ordered_json doc{
        {"model", {{"type", "tfim"}, {"L", 4}, {"h", 1.5}}},
        {"state", {{"type", "ground"}}},
        {"regions", {{"type", "intervals"}, {"R", 2}}},
    };
    const CommandResult result = cmd_reconstruct(config_from(doc));
    CHECK(result.exit_code == 0);
    CHECK(result.document.at("bounds").at("kind") == "ground");
    CHECK(result.document.at("bounds").at("overlap_lower_bound").get<double>() > 0.99);

    // Single-site regions cannot constrain two-site energy terms, so no
    // bound is claimed.
    ordered_json uncovered = doc;
    uncovered["regions"]["R"] = 1;
    const CommandResult loose = cmd_reconstruct(config_from(uncovered));
    CHECK(loose.document.at("bounds").is_null());
}

TEST_CASE("toric runs default to stabilizer regions and topological bounds") {
    const ordered_json doc{
        {"model", {{"type", "toric2x2"}}},
        {"solver", {{"tolerance_eps", 1e-6}}},
    };
    const CommandResult result = cmd_reconstruct(config_from(doc));
    CHECK(result.exit_code == 0);
    CHECK(result.document.at("num_regions").get<int>() == 8);
    CHECK(result.document.at("model_info").at("ground_degeneracy").get<int>() == 4);
    CHECK(result.document.at("bounds").at("kind") == "topological");
    CHECK(std::abs(result.document.at("s_rec").get<double>() - std::log(4.0)) < 1e-3);
}

TEST_CASE("reconstruct rejects fermion models") {
    const ordered_json doc{{"model", {{"type", "fermion"}, {"L", 8}}}};
    CHECK_THROWS_AS(cmd_reconstruct(config_from(doc)), DomainError);
}

TEST_CASE("unconverged runs exit with status 2") {
    ordered_json doc = tfim_thermal_doc();
    doc["solver"] = {{"tolerance_eps", 1e-12}, {"max_iterations", 2}};
    const CommandResult result = cmd_reconstruct(config_from(doc));
    CHECK(result.exit_code == 2);
    CHECK_FALSE(result.document.at("solver").at("converged").get<bool>());
}

TEST_CASE("sweep runs every window and reports monotone entropy") {
    ordered_json doc = tfim_thermal_doc();
    doc["sweep"] = {{"R_values", {1, 2, 3}}};
    for (int jobs : {1, 2}) {
        const CommandResult result = cmd_sweep(config_from(doc), jobs);
        CHECK(result.exit_code == 0);
        const auto& entries = result.document.at("entries");
        REQUIRE(entries.size() == 3);
        CHECK(result.document.at("monotone_s_rec").get<bool>());
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(entries.at(i).at("R").get<int>() == static_cast<int>(i + 1));
        // Parallel scheduling must not change the numbers.
        if (jobs == 2) {
            const CommandResult serial = cmd_sweep(config_from(doc), 1);
            CHECK(dump_deterministic(serial.document.at("entries")) ==
                  dump_deterministic(result.document.at("entries")));
        }
    }
}

TEST_CASE("sweep records a bad window as a per-entry error") {
    ordered_json doc = tfim_thermal_doc();
    doc["sweep"] = {{"R_values", {2, 11}}};
    const CommandResult result = cmd_sweep(config_from(doc), 1);
    CHECK(result.exit_code == 2);
    const auto& entries = result.document.at("entries");
    REQUIRE(entries.size() == 2);
    CHECK_FALSE(entries.at(0).contains("error"));
    CHECK(entries.at(1).contains("error"));
}

TEST_CASE("fermion command fits a correlation window") {
    const ordered_json doc{
        {"model", {{"type", "fermion"}, {"L", 16}, {"w", 1.0}}},
        {"regions", {{"type", "intervals"}, {"R", 1}}},
    };
    const CommandResult result = cmd_fermion(config_from(doc));
    const ordered_json& out = result.document;
    CHECK(out.at("command") == "fermion");
    CHECK(out.at("length").get<int>() == 16);
    CHECK(out.at("window").get<int>() == 1);
    CHECK(out.at("lambdas").size() == 2);
    CHECK(out.at("g_window").size() == 2);
    CHECK(out.at("residual").get<double>() <= 1e-6);
    CHECK(out.at("s_rec").get<double>() <= 1e-4);

    const ordered_json spin{{"model", {{"type", "tfim"}, {"L", 4}}}};
    CHECK_THROWS_AS(cmd_fermion(config_from(spin)), DomainError);
}

TEST_CASE("certify replays saved artifacts") {
    ordered_json doc = tfim_thermal_doc();
    const fs::path sigma_path = scratch_file("cert_sigma.json");
    const fs::path marg_path = scratch_file("cert_marginals.json");
    doc["output"] = {{"save_sigma", sigma_path.string()},
                     {"save_marginals", marg_path.string()}};
    const CommandResult run = cmd_reconstruct(config_from(doc));
    REQUIRE(run.exit_code == 0);

    // Store the true state alongside, as an analysis pipeline would.
    const fs::path rho_path = scratch_file("cert_rho.json");
    {
        const LocalHamiltonian ham = build_tfim_chain(4, 1.0, 1.2, Geometry::Ring);
        std::ofstream out(rho_path);
        out << dump_deterministic(state_to_json(thermal_state(ham, 1.0)));
    }

    const ordered_json cert_doc{
        {"certify",
         {{"sigma_file", sigma_path.string()},
          {"marginal_file", marg_path.string()},
          {"rho_file", rho_path.string()}}},
    };
    const CommandResult cert = cmd_certify(config_from(cert_doc));
    CHECK(cert.exit_code == 0);
    CHECK(cert.document.at("certificate").at("satisfied").get<bool>());
    CHECK(cert.document.at("certificate").at("rho_known").get<bool>());
    CHECK(cert.document.at("marginal_error").get<double>() < 1e-6);

    // Entropy-only variant: the certificate holds without the state.
    const ordered_json entropy_doc{
        {"certify",
         {{"sigma_file", sigma_path.string()},
          {"marginal_file", marg_path.string()},
          {"s_rho", run.document.at("s_rho").get<double>()}}},
    };
    const CommandResult entropy_cert = cmd_certify(config_from(entropy_doc));
    CHECK(entropy_cert.exit_code == 0);
    CHECK_FALSE(entropy_cert.document.at("certificate").at("rho_known").get<bool>());

    // Without either reference the command cannot run.
    const ordered_json bare{
        {"certify",
         {{"sigma_file", sigma_path.string()}, {"marginal_file", marg_path.string()}}},
    };
    CHECK_THROWS_AS(cmd_certify(config_from(bare)), DomainError);
}

TEST_CASE("binary runs end to end with deterministic output") {
    const char* bin = std::getenv("QMAXENT_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "QMAXENT_BIN must point at the CLI binary (set by ctest)");

    const fs::path cfg = scratch_file("cli_config.json");
    {
        std::ofstream out(cfg);
        out << dump_deterministic(tfim_thermal_doc());
    }
    const fs::path out1 = scratch_file("cli_out1.json");
    const fs::path out2 = scratch_file("cli_out2.json");
    const fs::path log = scratch_file("cli_log.txt");

    const auto run = [&](const std::string& args) {
        const std::string command = std::string("\"") + bin + "\" " + args + " >" +
                                    log.string() + " 2>&1";
        const int status = std::system(command.c_str());
        REQUIRE(WIFEXITED(status));
        return WEXITSTATUS(status);
    };

    CHECK(run("reconstruct --config " + cfg.string() + " --out " + out1.string()) == 0);
    CHECK(run("reconstruct --config " + cfg.string() + " --out " + out2.string()) == 0);
    CHECK(slurp(out1) == slurp(out2)); // byte-identical across runs

    const ordered_json doc = ordered_json::parse(slurp(out1));
    CHECK(doc.at("command") == "reconstruct");
    CHECK(doc.at("solver").at("converged").get<bool>());

    // Tightening the tolerance from the command line must take effect.
    CHECK(run("reconstruct --config " + cfg.string() + " --tolerance 1e-11 --out " +
              out1.string()) == 0);
    const ordered_json tight = ordered_json::parse(slurp(out1));
    CHECK(tight.at("solver_options").at("tolerance_eps").get<double>() == 1e-11);
    CHECK(tight.at("solver").at("final_constraint_residual").get<double>() <= 1e-11);

    // Usage errors and missing files surface as exit 1.
    CHECK(run("reconstruct --config /nonexistent.json") == 1);
    CHECK(run("bogus-subcommand") == 1);

    // An unconverged solve still writes its document but signals status 2.
    ordered_json hopeless = tfim_thermal_doc();
    hopeless["solver"] = {{"tolerance_eps", 1e-13}, {"max_iterations", 1}};
    const fs::path hopeless_cfg = scratch_file("cli_hopeless.json");
    {
        std::ofstream out(hopeless_cfg);
        out << dump_deterministic(hopeless);
    }
    CHECK(run("reconstruct --config " + hopeless_cfg.string() + " --out " + out1.string()) == 2);
}
