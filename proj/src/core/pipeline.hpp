#pragma once

#include <optional>
#include <vector>

#include "core/annotation.hpp"
#include "core/config.hpp"
#include "core/image.hpp"
#include "core/rasterizer.hpp"
#include "core/sampler.hpp"

namespace wtkp {

// One image ready to be written. `pixels` is the final buffer before file
// encoding; when `jpeg_quality` is set the file is written as baseline JPEG
// at that quality (the compression is the JPEG augmentation), else PNG.
struct GeneratedImage {
    SceneConfig scene;
    ImageBuffer pixels;
    std::optional<int> jpeg_quality;
    std::vector<PixelAnnotation> annotations;
};

CameraPose scene_camera_pose(const SceneConfig& scene);

// Fixed stage order: render, HSV(foreground), HSV(background), composite,
// pixel noise. JPEG happens at encoding time.
GeneratedImage generate_image(const SceneConfig& scene, const GeneratorConfig& config,
                              const BackgroundLibrary* library, const BackgroundLibrary::Warn& warn = {});

}  // namespace wtkp
