#include "toge/config.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"toge: toric Monge-Ampere vs Bergman geodesics at desk scale"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 0;

    const std::vector<std::string> names = {"validate", "qconst", "pkernel", "szego",
                                            "geodesic", "rk",     "converge", "rates",
                                            "oracle"};
    std::vector<CLI::App*> subs;
    for (const std::string& n : names) {
        CLI::App* s = app.add_subcommand(n);
        s->add_option("--config", config_path, "JSON run configuration")->required();
        s->add_option("--out", out_dir, "output directory (overrides config)");
        s->add_option("--threads", threads, "worker thread count (overrides config)");
        subs.push_back(s);
    }

    CLI11_PARSE(app, argc, argv);

    std::string command;
    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed()) command = names[i];

    try {
        toge::RunConfig cfg = toge::parse_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (threads > 0) {
            cfg.threads = threads;
        } else if (const char* env = std::getenv("TOGE_THREADS")) {
            int t = std::atoi(env);
            if (t > 0) cfg.threads = t;
        }
        return toge::run_command(command, cfg);
    } catch (const toge::Error& e) {
        std::cerr << e.what() << "\n";
        return e.code() == toge::ErrorCode::SchemaError ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
