#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/config.hpp"
#include "core/rasterizer.hpp"

namespace wtkp {

enum class Split { Train, Val };

const char* split_name(Split s);

// Deterministic split of image indices [0, count): indices are ranked by a
// hash of the index and the first round(train_fraction * count) go to train.
std::vector<Split> assign_splits(std::uint64_t count, double train_fraction);

// Zero-padded file stem for an image index ("000042").
std::string image_id(std::uint64_t index);

struct DatasetOptions {
    unsigned workers = 0;  // 0 = hardware concurrency
    std::function<void(std::uint64_t done, std::uint64_t total)> progress;
    BackgroundLibrary::Warn warn;
};

struct DatasetSummary {
    std::uint64_t train = 0;
    std::uint64_t val = 0;
    std::uint64_t annotations = 0;
    double seconds = 0.0;
    double images_per_second = 0.0;
};

// Writes images/{train,val}, labels/{train,val}, scenes/{train,val} and
// manifest.json under `out_dir`. Files left over from an earlier run in
// those directories are removed, so reruns are idempotent.
DatasetSummary write_dataset(const GeneratorConfig& config, const std::filesystem::path& out_dir,
                             const DatasetOptions& options = {});

nlohmann::json read_manifest(const std::filesystem::path& dataset_dir);

}  // namespace wtkp
