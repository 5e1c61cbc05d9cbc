#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "fflab/harness.hpp"

using namespace fflab::harness;

int main(int argc, char** argv) {
    CLI::App app{"fflab: exact checks for the function-field circle method"};
    std::string task, config_path, out_dir, format;
    unsigned workers = 0;
    app.add_option("task", task, "task to run")->required();
    app.add_option("--config", config_path, "config file")->required();
    app.add_option("--workers", workers, "worker threads");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(Status::ConfigInvalid);
    }

    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return static_cast<int>(Status::ConfigInvalid);
    }
    if (!cfg.task.empty() && cfg.task != task) {
        std::cerr << "config error: " << cfg.where("run.task") << ": names task '" << cfg.task << "' but '" << task << "' was requested\n";
        return static_cast<int>(Status::ConfigInvalid);
    }
    cfg.task = task;
    // environment overrides the file, flags override both
    if (const char* w = std::getenv("FFLAB_WORKERS")) {
        try {
            cfg.workers = static_cast<unsigned>(std::stoul(w));
        } catch (const std::exception&) {
            std::cerr << "config error: FFLAB_WORKERS is not a number\n";
            return static_cast<int>(Status::ConfigInvalid);
        }
    }
    if (const char* o = std::getenv("FFLAB_OUT")) cfg.out_dir = o;
    if (workers) cfg.workers = workers;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!format.empty()) cfg.format = format;
    if (cfg.workers == 0) cfg.workers = 1;

    const auto t0 = std::chrono::steady_clock::now();
    auto res = run_task(cfg);
    if (res.status == Status::ConfigInvalid) {
        std::cerr << "config error: " << res.message << '\n';
        return static_cast<int>(res.status);
    }
    std::string path;
    try {
        path = emit_report(res, task, cfg.out_dir, cfg.format);
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return static_cast<int>(Status::ConfigInvalid);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << task << ": " << res.message << " (" << res.records.size() << " records, budget used " << res.budget_used << ", "
              << secs << " s) -> " << path << (res.complete ? "" : " [incomplete]") << '\n';
    return static_cast<int>(res.status);
}
