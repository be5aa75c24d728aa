// Command-line front end. Uses only the C API of libwtkp.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wtkp/wtkp.h"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kIo = 3, kParse = 4, kInternal = 5 };

struct Logger {
    bool quiet = false;
    bool json = false;

    void emit(const char* level, const std::string& event, const std::string& message,
              const nlohmann::json& extra = nlohmann::json::object()) const {
        if (json) {
            nlohmann::json line = {{"level", level}, {"event", event}, {"message", message}};
            line.update(extra);
            std::cerr << line.dump() << "\n";
        } else {
            std::cerr << (std::string(level) == "error" ? "error: " : std::string(level) == "warning" ? "warning: " : "")
                      << message << "\n";
        }
    }
    void info(const std::string& event, const std::string& message, const nlohmann::json& extra = nlohmann::json::object()) const {
        if (!quiet) emit("info", event, message, extra);
    }
    void warn(const std::string& message) const { emit("warning", "warning", message); }
    void error(const std::string& message) const { emit("error", "error", message); }
};

int exit_code(wtkp_status s) {
    switch (s) {
        case WTKP_OK: return kOk;
        case WTKP_ERROR_INVALID_ARGUMENT: return kUsage;
        case WTKP_ERROR_CONFIG: return kConfig;
        case WTKP_ERROR_IO: return kIo;
        case WTKP_ERROR_PARSE: return kParse;
        default: return kInternal;
    }
}

int report_failure(const Logger& log, wtkp_status s) {
    log.error(wtkp_last_error());
    return exit_code(s);
}

// Owns a string returned by the library.
struct LibString {
    char* p = nullptr;
    ~LibString() { wtkp_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

bool write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    return static_cast<bool>(out);
}

struct GenerateArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> count;
    std::optional<unsigned> workers;
    std::string out;
    std::string background_library;
};

int run_generate(const GenerateArgs& a, const Logger& log) {
    wtkp_generator* g = nullptr;
    wtkp_status s = a.config.empty() ? wtkp_generator_create(nullptr, &g) : wtkp_generator_create_from_file(a.config.c_str(), &g);
    if (s != WTKP_OK) return report_failure(log, s);
    std::unique_ptr<wtkp_generator, void (*)(wtkp_generator*)> guard(g, wtkp_generator_destroy);

    if (a.seed) wtkp_generator_set_seed(g, *a.seed);
    if (a.count) wtkp_generator_set_count(g, *a.count);
    if (a.workers) wtkp_generator_set_workers(g, *a.workers);
    if (!a.background_library.empty()) {
        wtkp_generator_set_background_library(g, a.background_library.c_str());
    } else if (const char* env = std::getenv("WTKP_BACKGROUND_LIBRARY"); env && *env) {
        wtkp_generator_set_background_library(g, env);
    }

    struct Ctx {
        const Logger* log;
        std::uint64_t step;
    } ctx{&log, 0};
    auto progress = [](std::uint64_t done, std::uint64_t total, void* user) {
        auto* c = static_cast<Ctx*>(user);
        if (c->step == 0) c->step = std::max<std::uint64_t>(1, total / 20);
        if (done % c->step == 0 || done == total) {
            c->log->info("progress", "generated " + std::to_string(done) + "/" + std::to_string(total),
                         {{"done", done}, {"total", total}});
        }
    };
    auto warn = [](const char* message, void* user) { static_cast<Ctx*>(user)->log->warn(message); };

    wtkp_generate_stats stats{};
    s = wtkp_generator_write_dataset(g, a.out.c_str(), progress, warn, &ctx, &stats);
    if (s != WTKP_OK) return report_failure(log, s);

    char line[256];
    std::snprintf(line, sizeof line,
                  "wrote %llu images (train %llu, val %llu, %llu annotations) to %s in %.2f s, %.1f img/s",
                  static_cast<unsigned long long>(stats.train_images + stats.val_images),
                  static_cast<unsigned long long>(stats.train_images), static_cast<unsigned long long>(stats.val_images),
                  static_cast<unsigned long long>(stats.annotations), a.out.c_str(), stats.seconds,
                  stats.images_per_second);
    // The summary goes to stdout even with --quiet unless JSON logs are on.
    if (log.json) {
        log.emit("info", "summary", line,
                 {{"train", stats.train_images}, {"val", stats.val_images}, {"annotations", stats.annotations},
                  {"seconds", stats.seconds}, {"images_per_second", stats.images_per_second}});
    } else {
        std::cout << line << "\n";
    }
    return kOk;
}

struct EvaluateArgs {
    std::string gt;
    std::string pred;
    std::string report;
    int width = 0;
    int height = 0;
};

int run_evaluate(const EvaluateArgs& a, const Logger& log) {
    wtkp_report* r = nullptr;
    wtkp_status s = wtkp_evaluate(a.gt.c_str(), a.pred.c_str(), a.width, a.height, &r);
    if (s != WTKP_OK) return report_failure(log, s);
    std::unique_ptr<wtkp_report, void (*)(wtkp_report*)> guard(r, wtkp_report_destroy);

    LibString json, table;
    if ((s = wtkp_report_json(r, &json.p)) != WTKP_OK) return report_failure(log, s);
    if ((s = wtkp_report_table(r, &table.p)) != WTKP_OK) return report_failure(log, s);
    if (!a.report.empty() && !write_text(a.report, json.str() + "\n")) {
        log.error("cannot write report " + a.report);
        return kIo;
    }
    if (!log.quiet) std::cout << table.str();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic wind-turbine keypoint datasets and permutation-invariant keypoint evaluation"};
    app.set_version_flag("--version", std::string(wtkp_version()));
    app.require_subcommand(1);
    app.fallthrough();

    Logger log;
    app.add_flag("--quiet", log.quiet, "Only print errors and the final summary");
    app.add_flag("--json-logs", log.json, "Log as JSON lines on stderr");

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate a dataset");
    generate->add_option("--config", gen.config, "JSON config file (defaults when omitted)")->check(CLI::ExistingFile);
    generate->add_option("--seed", gen.seed, "Master seed (overrides the config)");
    generate->add_option("--count", gen.count, "Number of images (overrides the config)");
    generate->add_option("--workers", gen.workers, "Worker threads, 0 = logical cores");
    generate->add_option("--background-library", gen.background_library,
                         "Directory of background images (overrides the config and WTKP_BACKGROUND_LIBRARY)");
    generate->add_option("--out", gen.out, "Output directory")->required();

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Score predictions against ground-truth labels");
    evaluate->add_option("--gt", ev.gt, "Ground-truth label directory")->required();
    evaluate->add_option("--pred", ev.pred, "Prediction label directory")->required();
    evaluate->add_option("--report", ev.report, "Write the JSON report here");
    evaluate->add_option("--width", ev.width, "Image width when no manifest is found");
    evaluate->add_option("--height", ev.height, "Image height when no manifest is found");

    std::string preview_dataset, preview_out;
    std::size_t preview_n = 8;
    auto* preview = app.add_subcommand("preview", "Draw labels onto dataset images");
    preview->add_option("--dataset", preview_dataset, "Dataset directory")->required();
    preview->add_option("--n", preview_n, "Number of images");
    preview->add_option("--out", preview_out, "Output directory")->required();

    std::string default_out;
    auto* default_config = app.add_subcommand("default-config", "Print the default configuration");
    default_config->add_option("--out", default_out, "Write to a file instead of stdout");

    std::uint64_t fixture_seed = 0;
    std::size_t fixture_count = 100;
    std::string fixture_out;
    auto* fixtures = app.add_subcommand("export-fixtures", "Export keypoint-score reference cases as JSON");
    fixtures->add_option("--seed", fixture_seed, "Seed");
    fixtures->add_option("--count", fixture_count, "Number of cases");
    fixtures->add_option("--out", fixture_out, "Output file (stdout when omitted)");

    std::string scene_config;
    std::uint64_t scene_seed = 0, scene_index = 0;
    bool scene_seed_set = false;
    auto* scene = app.add_subcommand("scene", "Print the sampled parameters of one image");
    scene->add_option("--config", scene_config, "JSON config file")->check(CLI::ExistingFile);
    scene->add_option("--seed", scene_seed, "Master seed")->each([&](const std::string&) { scene_seed_set = true; });
    scene->add_option("--index", scene_index, "Image index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (*generate) return run_generate(gen, log);
    if (*evaluate) return run_evaluate(ev, log);

    if (*preview) {
        std::size_t written = 0;
        const wtkp_status s = wtkp_preview(preview_dataset.c_str(), preview_n, preview_out.c_str(), &written);
        if (s != WTKP_OK) return report_failure(log, s);
        log.info("preview", "wrote " + std::to_string(written) + " preview images to " + preview_out,
                 {{"written", written}});
        return kOk;
    }

    if (*default_config) {
        LibString json;
        const wtkp_status s = wtkp_default_config_json(&json.p);
        if (s != WTKP_OK) return report_failure(log, s);
        if (default_out.empty()) {
            std::cout << json.str() << "\n";
        } else if (!write_text(default_out, json.str() + "\n")) {
            log.error("cannot write " + default_out);
            return kIo;
        }
        return kOk;
    }

    if (*fixtures) {
        LibString json;
        const wtkp_status s = wtkp_export_parity_fixtures(fixture_seed, fixture_count, &json.p);
        if (s != WTKP_OK) return report_failure(log, s);
        if (fixture_out.empty()) {
            std::cout << json.str() << "\n";
        } else if (!write_text(fixture_out, json.str() + "\n")) {
            log.error("cannot write " + fixture_out);
            return kIo;
        }
        return kOk;
    }

    if (*scene) {
        wtkp_generator* g = nullptr;
        wtkp_status s = scene_config.empty() ? wtkp_generator_create(nullptr, &g)
                                             : wtkp_generator_create_from_file(scene_config.c_str(), &g);
        if (s != WTKP_OK) return report_failure(log, s);
        std::unique_ptr<wtkp_generator, void (*)(wtkp_generator*)> guard(g, wtkp_generator_destroy);
        if (scene_seed_set) wtkp_generator_set_seed(g, scene_seed);
        if (const char* env = std::getenv("WTKP_BACKGROUND_LIBRARY"); env && *env) {
            wtkp_generator_set_background_library(g, env);
        }
        LibString json;
        if ((s = wtkp_generator_sample_scene_json(g, scene_index, &json.p)) != WTKP_OK) return report_failure(log, s);
        std::cout << json.str() << "\n";
        return kOk;
    }
    return kUsage;
}
