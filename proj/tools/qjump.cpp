// qjump — quantum-trajectory simulator for a damped cavity with laser
// driving or detection-triggered feedback.
//
//   qjump <subcommand> [--config file.json] [--override key=value ...]
//         [--out dir] [--seed u64] [--threads n] [--paper-scale]
//
// Exit codes: 0 success, 1 validation error, 2 runtime/physics error,
// 3 acceptance-check failure (oracle-check only).

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qjump/app.hpp"
#include "qjump/fock.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = -1;
    bool paper_scale = false;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "JSON run configuration")
        ->check(CLI::ExistingFile);
    sub->add_option("--override", args.overrides,
                    "key=value overrides applied after the config file");
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--seed", args.seed, "base random seed")
        ->each([&](const std::string&) { args.seed_set = true; });
    sub->add_option("--threads", args.threads, "worker threads (0 = all cores)");
    sub->add_flag("--paper-scale", args.paper_scale,
                  "use publication-scale trajectory counts");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --override eta=0.4 or beta=[2,0]; the value is parsed as JSON, falling
// back to a string when it does not parse.
std::string overrides_to_json(const std::vector<std::string>& overrides) {
    std::string body;
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("override must look like key=value: " + kv);
        const std::string key = kv.substr(0, eq);
        std::string value = kv.substr(eq + 1);
        if (!nlohmann::json::accept(value))
            value = nlohmann::json(value).dump(); // treat as string

        if (!body.empty()) body += ',';
        body += nlohmann::json(key).dump() + ":" + value;
    }
    return "{" + body + "}";
}

int dispatch(qjump::app::Subcommand sub, const CommonArgs& args) {
    using namespace qjump::app;
    RunConfig cfg = default_config(sub);
    if (!args.config_path.empty())
        apply_json(cfg, read_file(args.config_path), args.config_path);
    if (!args.overrides.empty())
        apply_json(cfg, overrides_to_json(args.overrides), "--override");
    if (args.seed_set) cfg.base_seed = args.seed;
    if (args.threads >= 0) cfg.threads = args.threads;
    if (args.paper_scale) cfg.paper_scale = true;
    if (cfg.paper_scale) apply_paper_scale(cfg);

    const std::filesystem::path out_dir = args.out_dir.empty()
        ? std::filesystem::path("out") / subcommand_name(sub)
        : std::filesystem::path(args.out_dir);
    return run(sub, cfg, out_dir);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"quantum-trajectory simulator for a damped optical cavity"};
    cli.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> subs = {
        {"laser-run", "analytic spiral and emission rate of the laser-driven cavity"},
        {"feedback-run", "trajectories and ensemble statistics under feedback"},
        {"chi-map", "vacuum-return probability over a grid of initial states"},
        {"oracle-check", "trajectory ensemble versus truncated Fock master equation"},
        {"ergodicity", "time averages versus the ensemble average"},
    };
    std::vector<CommonArgs> args(subs.size());
    std::vector<CLI::App*> apps;
    for (std::size_t i = 0; i < subs.size(); ++i) {
        CLI::App* sub = cli.add_subcommand(subs[i].first, subs[i].second);
        add_common(sub, args[i]);
        apps.push_back(sub);
    }

    CLI11_PARSE(cli, argc, argv);

    try {
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (apps[i]->parsed())
                return dispatch(qjump::app::parse_subcommand(subs[i].first), args[i]);
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const qjump::fock::TruncationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
