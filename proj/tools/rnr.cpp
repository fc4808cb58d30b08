// rnr: offline replay, scripted simulation, stimulus rendering, calibration
// and the live session server.
//
// Exit status: 0 ok, 1 domain error (e.g. calibration failed), 2 usage error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "rnr/commands.hpp"
#include "rnr/errors.hpp"
#include "rnr/service/server.hpp"

namespace {

template <typename T>
std::optional<T> opt_if(const CLI::Option* o, const T& v) {
    return o->count() > 0 ? std::optional<T>(v) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ride rhythm engine harness"};
    app.require_subcommand(1);
    app.fallthrough();

    rnr::CommonOptions common;
    std::string config_path;
    std::string out_dir = common.out.string();
    auto* config_opt = app.add_option("--config", config_path, "Config file (key = value); defaults are built in")
                           ->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", common.seed, "Noise / stimulus-order seed")->capture_default_str();
    app.add_flag("--pretty", common.pretty, "Print the report as a table instead of JSON");

    std::string input;

    auto* replay = app.add_subcommand("replay", "Run a recorded trace through the engine");
    replay->add_option("trace", input, "Trace file (.jsonl)")->required();

    double rate_hz = 0.0;
    double duration_s = 0.0;
    auto* simulate = app.add_subcommand("simulate", "Simulate a scripted ride, then replay it");
    simulate->add_option("scenario", input, "Ride script (.json)")->required();
    auto* rate_opt = simulate->add_option("--rate-hz", rate_hz, "Sensor rate");
    auto* sim_duration_opt = simulate->add_option("--duration-s", duration_s, "Run length");

    int jobs = 1;
    auto* stimuli = app.add_subcommand("stimuli", "Render listening-test clip pairs");
    stimuli->add_option("spec", input, "Stimulus spec (.json)")->required();
    stimuli->add_option("--jobs", jobs, "Pairs rendered in parallel")->capture_default_str();

    auto* calibrate = app.add_subcommand("calibrate", "Derive posture distances from an annotated trace");
    calibrate->add_option("trace", input, "Trace with upright/forward markers")->required();

    rnr::service::ServerOptions server;
    std::string scenario_path;
    double serve_duration_s = 0.0;
    auto* serve = app.add_subcommand("serve", "Run the live session server");
    serve->add_option("--port", server.port, "Listen port (0 picks one)")->capture_default_str();
    serve->add_option("--address", server.address, "Listen address")->capture_default_str();
    serve->add_option("--speed", server.speed, "Tick clock speed-up")->capture_default_str()->check(
        CLI::Range(0.01, 1000.0));
    auto* scenario_opt = serve->add_option("--scenario", scenario_path, "Start with a scripted ride")
                             ->check(CLI::ExistingFile);
    auto* serve_duration_opt = serve->add_option("--duration-s", serve_duration_s, "Scripted ride length");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (config_opt->count() > 0) {
        common.config = config_path;
    }
    common.out = out_dir;

    try {
        if (replay->parsed()) {
            rnr::cmd_replay(input, common, std::cout);
        } else if (simulate->parsed()) {
            rnr::SimulateOptions so{opt_if(rate_opt, rate_hz), opt_if(sim_duration_opt, duration_s)};
            rnr::cmd_simulate(input, common, so, std::cout);
        } else if (stimuli->parsed()) {
            rnr::cmd_stimuli(input, common, jobs, std::cout);
        } else if (calibrate->parsed()) {
            rnr::cmd_calibrate(input, common, std::cout);
        } else if (serve->parsed()) {
            if (scenario_opt->count() > 0) server.scenario = scenario_path;
            server.duration_s = opt_if(serve_duration_opt, serve_duration_s);
            rnr::service::Server srv(rnr::resolve_config(common), common.seed, server);
            srv.start();
            std::cout << "listening on " << server.address << ":" << srv.port() << std::endl;
            srv.run_until_signal();
        }
    } catch (const rnr::UsageError& e) {
        std::cerr << "rnr: " << e.what() << "\n";
        return 2;
    } catch (const rnr::DomainError& e) {
        std::cerr << "rnr: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "rnr: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
