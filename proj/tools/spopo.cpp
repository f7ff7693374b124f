#include <spopo/errors.hpp>
#include <spopo/parallel.hpp>
#include <spopo/run.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Pulsed OPO quantum noise: analytic spectra, Langevin simulation, homodyne lab"};
    std::string config_path;
    spopo::run_overrides ov;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string task;
    unsigned threads = 0;

    app.add_option("-c,--config", config_path, "JSON run configuration")->required();
    auto* seed_opt = app.add_option("--seed", seed, "Override the RNG seed");
    auto* out_opt = app.add_option("-o,--out", out_dir, "Override the output directory");
    auto* task_opt = app.add_option("--task", task, "Override the task")
                         ->check(CLI::IsMember(spopo::task_names()));
    app.add_option("-j,--threads", threads, "Worker threads (default: SPOPO_THREADS or all cores)");
    app.set_version_flag("--version", SPOPO_VERSION);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return spopo::exit_code::config;
    }

    if (*seed_opt) {
        ov.seed = seed;
    }
    if (*out_opt) {
        ov.output_dir = out_dir;
    }
    if (*task_opt) {
        ov.task = task;
    }
    ov.threads = threads;

    try {
        auto cfg = spopo::apply_overrides(spopo::load_config(config_path), ov);
        auto outcome = spopo::run_task(cfg, ov.threads);
        std::cout << outcome.summary;
        for (const auto& f : outcome.outputs) {
            std::cout << "wrote " << (std::filesystem::path(cfg.output_dir) / f).string() << '\n';
        }
        return outcome.code;
    } catch (const spopo::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return spopo::exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return spopo::exit_code_for(e);
    }
}
