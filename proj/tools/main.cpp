#include <CLI11.hpp>

#include <cstdlib>
#include <optional>
#include <string>

#include "srlab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for contact sub-Riemannian structures and Frenet closure"};
    app.require_subcommand(1);

    struct Shared {
        std::string config, out = ".";
        std::optional<std::uint64_t> seed;
        int threads = 0;
        std::vector<std::pair<std::string, std::string>> overrides;
    };
    std::vector<std::shared_ptr<Shared>> states;

    for (const std::string& name : srlab::command_names()) {
        auto st = std::make_shared<Shared>();
        states.push_back(st);
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", st->config, "JSON config file");
        sub->add_option("--out", st->out, "output directory");
        sub->add_option("--threads", st->threads, "worker threads (0 = SRCLAB_THREADS, then hardware)");
        auto seed_opt = sub->add_option_function<std::uint64_t>(
            "--seed", [st](std::uint64_t v) { st->seed = v; }, "RNG seed");
        (void)seed_opt;
        // per-command convenience flags, layered over the config
        auto add_override = [sub, st](const std::string& flag, const std::string& key,
                                      const std::string& help) {
            sub->add_option_function<std::string>(
                flag, [st, key](const std::string& v) { st->overrides.emplace_back(key, v); }, help);
        };
        if (name == "frenet-search" || name == "frenet-integrate" || name == "milnor") {
            add_override("--n", "n", "frame dimension");
            add_override("--m", "m", "winding multiplicity");
        }
        if (name == "martinet-cut" || name == "geodesic") add_override("--q1", "q1", "target point a,b,c");
        if (name == "martinet-sphere") add_override("--r", "r", "sphere radius");
        if (name == "diffuse") add_override("--epsilon", "epsilon", "averaging half-width");

        sub->callback([name, st]() {
            srlab::RunRequest req;
            req.command = name;
            req.config_path = st->config;
            req.out_dir = st->out;
            req.seed = st->seed;
            req.threads = st->threads;
            req.overrides = st->overrides;
            std::exit(srlab::run_command(req));
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return 0;
}
