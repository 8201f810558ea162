#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "qmaxent/json_io.hpp"

namespace {

using qmaxent::cli::CommandResult;
using qmaxent::cli::RunConfig;

void emit(const CommandResult& result, const std::string& out_path) {
    const std::string text = qmaxent::dump_deterministic(result.document) + "\n";
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw qmaxent::DomainError("cannot open output file '" + out_path + "'");
    }
    out << text;
}

/// Machine-parsable single-line error on stderr.
int fail(const std::string& message) {
    qmaxent::ordered_json doc;
    doc["error"] = message;
    std::cerr << qmaxent::dump_deterministic(doc, /*indent=*/-1) << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"maximum-entropy reconstruction of quantum states from local data"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    int jobs = 1;
    double tolerance = -1.0;
    int max_iter = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "write the result document here (default: stdout)");
        sub->add_option("--tolerance", tolerance, "override solver.tolerance_eps");
        sub->add_option("--max-iter", max_iter, "override solver.max_iterations");
    };

    CLI::App* reconstruct =
        app.add_subcommand("reconstruct", "solve one reconstruction and certify it");
    add_common(reconstruct);
    CLI::App* sweep = app.add_subcommand("sweep", "reconstruct across a range of window sizes");
    add_common(sweep);
    sweep->add_option("--jobs", jobs, "worker threads for the sweep")->check(CLI::PositiveNumber);
    CLI::App* certify = app.add_subcommand("certify", "evaluate the certificate for stored files");
    add_common(certify);
    CLI::App* fermion = app.add_subcommand("fermion", "windowed free-fermion reconstruction");
    add_common(fermion);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& err) {
        return fail(std::string("argument error: ") + err.what());
    }

    try {
        RunConfig config = qmaxent::cli::load_config(config_path);
        if (tolerance > 0.0) {
            config.solver.tolerance_eps = tolerance;
        }
        if (max_iter >= 0) {
            config.solver.max_iterations = max_iter;
        }

        CommandResult result;
        if (reconstruct->parsed()) {
            result = qmaxent::cli::cmd_reconstruct(config);
        } else if (sweep->parsed()) {
            result = qmaxent::cli::cmd_sweep(config, jobs);
        } else if (certify->parsed()) {
            result = qmaxent::cli::cmd_certify(config);
        } else {
            result = qmaxent::cli::cmd_fermion(config);
        }
        emit(result, out_path);
        return result.exit_code;
    } catch (const std::exception& err) {
        return fail(err.what());
    }
}
