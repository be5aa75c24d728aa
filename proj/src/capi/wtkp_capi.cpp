#include "wtkp/wtkp.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/evaluation_io.hpp"
#include "core/metrics.hpp"
#include "core/parity.hpp"
#include "core/pipeline.hpp"
#include "core/preview.hpp"
#include "core/sampler.hpp"

struct wtkp_generator {
    wtkp::GeneratorConfig config;
};

struct wtkp_report {
    wtkp::MetricReport report;
};

namespace {

thread_local std::string last_error;

wtkp_status fail(wtkp_status status, const std::string& message) {
    last_error = message;
    return status;
}

// Maps exceptions from the core onto status codes.
template <typename F>
wtkp_status guarded(F&& body) {
    last_error.clear();
    try {
        body();
        return WTKP_OK;
    } catch (const wtkp::ConfigError& e) {
        return fail(WTKP_ERROR_CONFIG, e.what());
    } catch (const wtkp::IoError& e) {
        return fail(WTKP_ERROR_IO, e.what());
    } catch (const wtkp::ParseError& e) {
        return fail(WTKP_ERROR_PARSE, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(WTKP_ERROR_CONFIG, std::string("invalid JSON: ") + e.what());
    } catch (const wtkp::SceneError& e) {
        return fail(WTKP_ERROR_INVALID_ARGUMENT, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(WTKP_ERROR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(WTKP_ERROR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(WTKP_ERROR_INTERNAL, e.what());
    } catch (...) {
        return fail(WTKP_ERROR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

#define WTKP_REQUIRE(cond, what) \
    if (!(cond)) return fail(WTKP_ERROR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* wtkp_version(void) { return WTKP_VERSION_STRING; }

const char* wtkp_last_error(void) { return last_error.c_str(); }

void wtkp_string_free(char* s) { std::free(s); }

void wtkp_buffer_free(uint8_t* buffer) { std::free(buffer); }

wtkp_status wtkp_default_config_json(char** out_json) {
    WTKP_REQUIRE(out_json, "out_json is NULL");
    return guarded([&] { *out_json = dup_string(wtkp::config_to_json(wtkp::GeneratorConfig{}).dump(2)); });
}

wtkp_status wtkp_generator_create(const char* config_json, wtkp_generator** out) {
    WTKP_REQUIRE(out, "out is NULL");
    *out = nullptr;
    return guarded([&] {
        auto g = std::make_unique<wtkp_generator>();
        if (config_json && *config_json) g->config = wtkp::config_from_json(nlohmann::json::parse(config_json));
        g->config.validate();
        *out = g.release();
    });
}

wtkp_status wtkp_generator_create_from_file(const char* path, wtkp_generator** out) {
    WTKP_REQUIRE(out, "out is NULL");
    WTKP_REQUIRE(path, "path is NULL");
    *out = nullptr;
    return guarded([&] {
        auto g = std::make_unique<wtkp_generator>();
        g->config = wtkp::load_config_file(path);
        *out = g.release();
    });
}

void wtkp_generator_destroy(wtkp_generator* g) { delete g; }

wtkp_status wtkp_generator_set_seed(wtkp_generator* g, uint64_t seed) {
    WTKP_REQUIRE(g, "generator is NULL");
    g->config.seed = seed;
    return WTKP_OK;
}

wtkp_status wtkp_generator_set_count(wtkp_generator* g, uint64_t count) {
    WTKP_REQUIRE(g, "generator is NULL");
    g->config.count = count;
    return WTKP_OK;
}

wtkp_status wtkp_generator_set_workers(wtkp_generator* g, unsigned workers) {
    WTKP_REQUIRE(g, "generator is NULL");
    g->config.workers = workers;
    return WTKP_OK;
}

wtkp_status wtkp_generator_set_background_library(wtkp_generator* g, const char* directory) {
    WTKP_REQUIRE(g, "generator is NULL");
    if (directory && *directory) {
        g->config.background_library = std::filesystem::path(directory);
    } else {
        g->config.background_library.reset();
    }
    return WTKP_OK;
}

wtkp_status wtkp_generator_config_json(const wtkp_generator* g, char** out_json) {
    WTKP_REQUIRE(g, "generator is NULL");
    WTKP_REQUIRE(out_json, "out_json is NULL");
    return guarded([&] { *out_json = dup_string(wtkp::config_to_json(g->config).dump(2)); });
}

wtkp_status wtkp_generator_sample_scene_json(const wtkp_generator* g, uint64_t image_index, char** out_json) {
    WTKP_REQUIRE(g, "generator is NULL");
    WTKP_REQUIRE(out_json, "out_json is NULL");
    return guarded([&] {
        std::size_t library_size = 0;
        if (g->config.background_library) library_size = wtkp::BackgroundLibrary(*g->config.background_library).size();
        const auto scene = wtkp::sample_scene(g->config.seed, image_index, g->config, library_size);
        *out_json = dup_string(wtkp::scene_to_json(scene).dump(2));
    });
}

wtkp_status wtkp_generator_write_dataset(const wtkp_generator* g, const char* out_dir, wtkp_progress_fn progress,
                                         wtkp_log_fn warn, void* user, wtkp_generate_stats* stats) {
    WTKP_REQUIRE(g, "generator is NULL");
    WTKP_REQUIRE(out_dir && *out_dir, "out_dir is empty");
    return guarded([&] {
        wtkp::DatasetOptions options;
        if (progress) options.progress = [=](std::uint64_t d, std::uint64_t t) { progress(d, t, user); };
        if (warn) options.warn = [=](std::string_view m) { warn(std::string(m).c_str(), user); };
        const auto summary = wtkp::write_dataset(g->config, out_dir, options);
        if (stats) {
            stats->train_images = summary.train;
            stats->val_images = summary.val;
            stats->annotations = summary.annotations;
            stats->seconds = summary.seconds;
            stats->images_per_second = summary.images_per_second;
        }
    });
}

wtkp_status wtkp_generator_render(const wtkp_generator* g, uint64_t image_index, uint8_t** out_pixels, int* out_width,
                                  int* out_height) {
    WTKP_REQUIRE(g, "generator is NULL");
    WTKP_REQUIRE(out_pixels && out_width && out_height, "output pointer is NULL");
    *out_pixels = nullptr;
    return guarded([&] {
        std::unique_ptr<wtkp::BackgroundLibrary> library;
        if (g->config.background_library) library = std::make_unique<wtkp::BackgroundLibrary>(*g->config.background_library);
        const auto scene = wtkp::sample_scene(g->config.seed, image_index, g->config, library ? library->size() : 0);
        const auto image = wtkp::generate_image(scene, g->config, library.get());
        auto* buf = static_cast<uint8_t*>(std::malloc(image.pixels.pixels.size()));
        if (!buf) throw std::bad_alloc();
        std::memcpy(buf, image.pixels.pixels.data(), image.pixels.pixels.size());
        *out_pixels = buf;
        *out_width = image.pixels.width;
        *out_height = image.pixels.height;
    });
}

wtkp_status wtkp_evaluate(const char* gt_dir, const char* pred_dir, int width, int height, wtkp_report** out) {
    WTKP_REQUIRE(out, "out is NULL");
    WTKP_REQUIRE(gt_dir && pred_dir, "directory is NULL");
    WTKP_REQUIRE(width >= 0 && height >= 0 && (width == 0) == (height == 0), "width and height must both be set or both be 0");
    *out = nullptr;
    return guarded([&] {
        wtkp::ImageSize size{width, height};
        if (width == 0) {
            const auto found = wtkp::image_size_from_manifest(gt_dir);
            if (!found) throw wtkp::ConfigError("no manifest.json near " + std::string(gt_dir) + "; pass the image size");
            size = *found;
        }
        auto r = std::make_unique<wtkp_report>();
        r->report = wtkp::map_report(wtkp::load_evaluation(gt_dir, pred_dir, size));
        *out = r.release();
    });
}

void wtkp_report_destroy(wtkp_report* r) { delete r; }

wtkp_status wtkp_report_metric(const wtkp_report* r, wtkp_metric metric, double* out) {
    WTKP_REQUIRE(r && out, "NULL argument");
    switch (metric) {
        case WTKP_MAP50_BOX: *out = r->report.box.map50; return WTKP_OK;
        case WTKP_MAP50_95_BOX: *out = r->report.box.map50_95; return WTKP_OK;
        case WTKP_MAP50_POSE: *out = r->report.pose.map50; return WTKP_OK;
        case WTKP_MAP50_95_POSE: *out = r->report.pose.map50_95; return WTKP_OK;
    }
    return fail(WTKP_ERROR_INVALID_ARGUMENT, "unknown metric");
}

wtkp_status wtkp_report_json(const wtkp_report* r, char** out_json) {
    WTKP_REQUIRE(r && out_json, "NULL argument");
    return guarded([&] { *out_json = dup_string(wtkp::report_to_json(r->report).dump(2)); });
}

wtkp_status wtkp_report_table(const wtkp_report* r, char** out_text) {
    WTKP_REQUIRE(r && out_text, "NULL argument");
    return guarded([&] { *out_text = dup_string(wtkp::report_table(r->report)); });
}

wtkp_status wtkp_preview(const char* dataset_dir, size_t n, const char* out_dir, size_t* out_written) {
    WTKP_REQUIRE(dataset_dir && out_dir, "directory is NULL");
    return guarded([&] {
        const auto items = wtkp::write_previews(dataset_dir, n, out_dir);
        if (out_written) *out_written = items.size();
    });
}

wtkp_status wtkp_export_parity_fixtures(uint64_t seed, size_t count, char** out_json) {
    WTKP_REQUIRE(out_json, "out_json is NULL");
    return guarded([&] { *out_json = dup_string(wtkp::export_parity_fixtures(seed, count).dump(2)); });
}

wtkp_status wtkp_optimal_tip_permutation(const double* pred, const double* gt, const int* gt_mask, int* out_index,
                                         double* out_permuted, double* out_sum_squared) {
    WTKP_REQUIRE(pred && gt && out_index, "NULL argument");
    wtkp::TipTriplet p, q;
    std::array<bool, wtkp::kNumTips> mask{true, true, true};
    for (int i = 0; i < wtkp::kNumTips; ++i) {
        p[i] = {pred[2 * i], pred[2 * i + 1]};
        q[i] = {gt[2 * i], gt[2 * i + 1]};
        if (gt_mask) mask[i] = gt_mask[i] != 0;
        WTKP_REQUIRE(std::isfinite(pred[2 * i]) && std::isfinite(pred[2 * i + 1]) && std::isfinite(gt[2 * i]) &&
                         std::isfinite(gt[2 * i + 1]),
                     "tip coordinates must be finite");
    }
    const auto best = wtkp::optimal_tip_permutation(p, q, mask);
    *out_index = best.index + 1;
    if (out_permuted) {
        for (int i = 0; i < wtkp::kNumTips; ++i) {
            out_permuted[2 * i] = best.permuted[i].x();
            out_permuted[2 * i + 1] = best.permuted[i].y();
        }
    }
    if (out_sum_squared) *out_sum_squared = best.sum_squared;
    last_error.clear();
    return WTKP_OK;
}

wtkp_status wtkp_assign_tip_labels(const double* angles_deg, int* out_labels) {
    WTKP_REQUIRE(angles_deg && out_labels, "NULL argument");
    return guarded([&] {
        const auto labels = wtkp::assign_tip_labels({angles_deg[0], angles_deg[1], angles_deg[2]});
        for (int i = 0; i < wtkp::kNumTips; ++i) out_labels[i] = labels[i];
    });
}

wtkp_status wtkp_iou(const double* a, const double* b, double* out) {
    WTKP_REQUIRE(a && b && out, "NULL argument");
    WTKP_REQUIRE(a[0] < a[2] && a[1] < a[3] && b[0] < b[2] && b[1] < b[3], "boxes must be well-ordered");
    *out = wtkp::iou({a[0], a[1], a[2], a[3]}, {b[0], b[1], b[2], b[3]});
    last_error.clear();
    return WTKP_OK;
}

}  // extern "C"
