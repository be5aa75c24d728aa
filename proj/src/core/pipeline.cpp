#include "core/pipeline.hpp"

#include "core/augment.hpp"

namespace wtkp {

CameraPose scene_camera_pose(const SceneConfig& scene) {
    std::optional<Eigen::Vector3d> hub;
    if (scene.camera.center_on_hub && !scene.turbines.empty()) {
        hub = turbine_frame(scene.turbines.front()).rotor_center;
    }
    return camera_pose(scene.camera, hub);
}

GeneratedImage generate_image(const SceneConfig& scene, const GeneratorConfig& config,
                              const BackgroundLibrary* library, const BackgroundLibrary::Warn& warn) {
    const CameraPose pose = scene_camera_pose(scene);
    const int w = scene.camera.image_width;
    const int h = scene.camera.image_height;

    ImageBuffer foreground = render_foreground(scene, pose, render_settings(config));
    Rng bg_rng = derive_rng(scene.master_seed, scene.image_index, StreamTag::Background);
    ImageBuffer background = load_background(library, scene.background, w, h, bg_rng, warn);

    foreground = apply_hsv(foreground, scene.augment.hsv_foreground);
    background = apply_hsv(background, scene.augment.hsv_background);

    GeneratedImage out;
    out.scene = scene;
    out.pixels = composite(foreground, background);
    if (scene.augment.noise) {
        Rng noise_rng = derive_rng(scene.master_seed, scene.image_index, StreamTag::PixelNoise);
        out.pixels = apply_noise(out.pixels, scene.augment.noise->mean, scene.augment.noise->stddev, noise_rng);
    }
    if (scene.augment.jpeg_quality) out.jpeg_quality = jpeg_quality_for(*scene.augment.jpeg_quality);
    out.annotations = annotate_scene(scene, pose);
    return out;
}

}  // namespace wtkp
