#include "core/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "core/annotation.hpp"
#include "core/errors.hpp"
#include "core/image.hpp"
#include "core/pipeline.hpp"
#include "core/sampler.hpp"

namespace fs = std::filesystem;

namespace wtkp {

const char* split_name(Split s) { return s == Split::Train ? "train" : "val"; }

std::vector<Split> assign_splits(std::uint64_t count, double train_fraction) {
    std::vector<std::uint64_t> order(count);
    std::iota(order.begin(), order.end(), std::uint64_t{0});
    std::sort(order.begin(), order.end(), [](std::uint64_t a, std::uint64_t b) {
        const std::uint64_t ha = splitmix64(a), hb = splitmix64(b);
        return ha != hb ? ha < hb : a < b;
    });
    const auto train = static_cast<std::uint64_t>(
        std::clamp<long long>(std::llround(train_fraction * static_cast<double>(count)), 0, static_cast<long long>(count)));
    std::vector<Split> out(count, Split::Val);
    for (std::uint64_t i = 0; i < train; ++i) out[order[i]] = Split::Train;
    return out;
}

std::string image_id(std::uint64_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06" PRIu64, index);
    return buf;
}

namespace {

struct ImageOutcome {
    std::string image_file;
    std::uint64_t digest = 0;
    std::size_t annotations = 0;
};

const char* const kManagedRoots[] = {"images", "labels", "scenes"};

void make_dirs(const fs::path& out) {
    std::error_code ec;
    for (const char* root : kManagedRoots) {
        for (Split s : {Split::Train, Split::Val}) {
            fs::create_directories(out / root / split_name(s), ec);
            if (ec) throw IoError("cannot create " + (out / root / split_name(s)).string() + ": " + ec.message());
        }
    }
}

// Removes files from an earlier run that this run will not produce.
void remove_stale(const fs::path& out, const std::set<fs::path>& keep) {
    for (const char* root : kManagedRoots) {
        for (Split s : {Split::Train, Split::Val}) {
            const fs::path dir = out / root / split_name(s);
            std::error_code ec;
            std::vector<fs::path> doomed;
            for (const auto& entry : fs::directory_iterator(dir, ec)) {
                if (entry.is_regular_file() && !keep.count(entry.path().lexically_normal())) doomed.push_back(entry.path());
            }
            for (const auto& p : doomed) {
                if (!fs::remove(p, ec) && ec) throw IoError("cannot remove stale file " + p.string() + ": " + ec.message());
            }
        }
    }
}

nlohmann::json conventions_json() {
    return {
        {"world_frame", "x right, y downrange away from the camera, z up; meters"},
        {"camera", "placed at (0, -distance, height); pitch aims at aim_height on the tower axis; roll applied last"},
        {"yaw", "psi = 0 turns the rotor toward the camera (-y); psi increases counterclockwise seen from above"},
        {"blade_angle", "measured from 12 o'clock, clockwise seen from the front of the rotor"},
        {"tip_labels", "segments [0,120), [120,240), [240,360) of blade angle give tips 1, 2, 3; segments are fixed to world vertical"},
        {"visibility", "0 = not labeled (x = y = 0), 2 = labeled and visible"},
        {"label_line", "class cx cy w h then x y v for each keypoint; normalized to [0,1]; 6 decimals"},
        {"prediction_line", "label line followed by a confidence column in [0,1]"},
    };
}

}  // namespace

DatasetSummary write_dataset(const GeneratorConfig& config, const fs::path& out_dir, const DatasetOptions& options) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();

    std::unique_ptr<BackgroundLibrary> library;
    if (config.background_library) library = std::make_unique<BackgroundLibrary>(*config.background_library);
    const std::size_t library_size = library ? library->size() : 0;

    const std::uint64_t count = config.count;
    const std::vector<Split> splits = assign_splits(count, config.train_fraction);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
    make_dirs(out_dir);

    // Images whose extension depends on the JPEG draw: sample every scene up
    // front (cheap) so stale files can be removed before any writes.
    std::vector<SceneConfig> scenes(count);
    std::set<fs::path> keep;
    std::vector<ImageOutcome> outcomes(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        scenes[i] = sample_scene(config.seed, i, config, library_size);
        const std::string id = image_id(i);
        const char* split = split_name(splits[i]);
        outcomes[i].image_file = id + (scenes[i].augment.jpeg_quality ? ".jpg" : ".png");
        keep.insert((out_dir / "images" / split / outcomes[i].image_file).lexically_normal());
        keep.insert((out_dir / "labels" / split / (id + ".txt")).lexically_normal());
        keep.insert((out_dir / "scenes" / split / (id + ".json")).lexically_normal());
    }
    remove_stale(out_dir, keep);

    unsigned workers = options.workers ? options.workers : config.workers;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(count, 1)));

    std::atomic<std::uint64_t> next{0};
    std::atomic<std::uint64_t> done{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::mutex progress_mutex;

    auto work = [&] {
        for (;;) {
            if (failed.load()) return;
            const std::uint64_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                const GeneratedImage img = generate_image(scenes[i], config, library.get(), options.warn);
                const std::string id = image_id(i);
                const char* split = split_name(splits[i]);
                const int w = img.pixels.width, h = img.pixels.height;

                ImageOutcome& o = outcomes[i];
                o.digest = fnv1a64(img.pixels.pixels);
                o.annotations = img.annotations.size();
                const auto bytes = img.jpeg_quality ? encode_jpeg(img.pixels, *img.jpeg_quality) : encode_png(img.pixels);
                write_file_atomic(out_dir / "images" / split / o.image_file, bytes);

                std::vector<AnnotationRecord> records;
                records.reserve(img.annotations.size());
                for (const auto& a : img.annotations) records.push_back(normalize_annotation(a, w, h));
                write_label_file(out_dir / "labels" / split / (id + ".txt"), records);
                write_text_atomic(out_dir / "scenes" / split / (id + ".json"), scene_to_json(scenes[i]).dump(2) + "\n");
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
            const std::uint64_t d = done.fetch_add(1) + 1;
            if (options.progress) {
                std::lock_guard lock(progress_mutex);
                options.progress(d, count);
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);

    DatasetSummary summary;
    nlohmann::json images = nlohmann::json::array();
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::string id = image_id(i);
        const char* split = split_name(splits[i]);
        (splits[i] == Split::Train ? summary.train : summary.val) += 1;
        summary.annotations += outcomes[i].annotations;
        char digest[20];
        std::snprintf(digest, sizeof digest, "%016" PRIx64, outcomes[i].digest);
        images.push_back({
            {"id", id},
            {"split", split},
            {"image", std::string("images/") + split + "/" + outcomes[i].image_file},
            {"label", std::string("labels/") + split + "/" + id + ".txt"},
            {"scene", std::string("scenes/") + split + "/" + id + ".json"},
            {"annotations", outcomes[i].annotations},
            {"pixel_fnv1a64", digest},
        });
    }

    nlohmann::json keypoint_names = nlohmann::json::array();
    for (const auto& name : kKeypointNames) keypoint_names.push_back(std::string(name));

    nlohmann::json manifest = {
        {"generator", "wtkp"},
        {"generator_version", WTKP_VERSION_STRING},
        {"master_seed", config.seed},
        {"image_count", count},
        {"image_size", {{"width", config.image_width}, {"height", config.image_height}}},
        {"train_fraction", config.train_fraction},
        {"splits",
         {{"train", {{"images", summary.train}, {"labels", summary.train}}},
          {"val", {{"images", summary.val}, {"labels", summary.val}}}}},
        {"class_names", {"wind_turbine"}},
        {"keypoint_names", keypoint_names},
        {"background_library_size", library_size},
        {"conventions", conventions_json()},
        {"config", config_to_json(config)},
        {"images", images},
    };
    write_text_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");

    summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    summary.images_per_second = summary.seconds > 0 ? static_cast<double>(count) / summary.seconds : 0.0;
    return summary;
}

nlohmann::json read_manifest(const fs::path& dataset_dir) {
    const fs::path path = dataset_dir / "manifest.json";
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), 0, e.what());
    }
}

}  // namespace wtkp
