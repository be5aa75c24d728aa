#include "core/rasterizer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Geometry>

#include "core/errors.hpp"

namespace wtkp {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr int kRingSegments = 12;
constexpr int kSupersample = 2;  // per axis
constexpr double kNearPlane = 1e-3;

using Vec3 = Eigen::Vector3d;

Face make_face(std::vector<Vec3> vertices, const Vec3& interior, bool two_sided = false) {
    Face f;
    f.vertices = std::move(vertices);
    f.two_sided = two_sided;
    Vec3 n = (f.vertices[1] - f.vertices[0]).cross(f.vertices[2] - f.vertices[0]);
    if (n.squaredNorm() > 0.0) n.normalize();
    Vec3 centroid = Vec3::Zero();
    for (const auto& v : f.vertices) centroid += v;
    centroid /= static_cast<double>(f.vertices.size());
    if (n.dot(centroid - interior) < 0.0) n = -n;
    f.normal = n;
    return f;
}

std::vector<Vec3> ring(const Vec3& center, const Vec3& axis_a, const Vec3& axis_b, double radius) {
    std::vector<Vec3> pts;
    pts.reserve(kRingSegments);
    for (int i = 0; i < kRingSegments; ++i) {
        const double a = 2.0 * std::numbers::pi * i / kRingSegments;
        pts.push_back(center + radius * (std::cos(a) * axis_a + std::sin(a) * axis_b));
    }
    return pts;
}

// Sutherland-Hodgman against z >= kNearPlane in camera coordinates.
std::vector<Vec3> clip_near(const std::vector<Vec3>& poly) {
    std::vector<Vec3> out;
    out.reserve(poly.size() + 2);
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& a = poly[i];
        const Vec3& b = poly[(i + 1) % n];
        const bool a_in = a.z() >= kNearPlane;
        const bool b_in = b.z() >= kNearPlane;
        if (a_in) out.push_back(a);
        if (a_in != b_in) {
            const double t = (kNearPlane - a.z()) / (b.z() - a.z());
            Vec3 p = a + t * (b - a);
            p.z() = kNearPlane;
            out.push_back(p);
        }
    }
    return out;
}

struct ScreenPolygon {
    std::vector<Eigen::Vector2d> points;  // supersample coordinates
    std::array<std::uint8_t, 3> color{};
    double depth = 0.0;
};

// Fills a convex polygon into the supersampled RGBA buffer. A sample is
// covered when its center lies inside [xl, xr) on its row.
void fill_convex(const ScreenPolygon& poly, std::vector<std::uint8_t>& buf, int sw, int sh) {
    if (poly.points.size() < 3) return;
    double ymin = poly.points[0].y(), ymax = ymin;
    for (const auto& p : poly.points) {
        ymin = std::min(ymin, p.y());
        ymax = std::max(ymax, p.y());
    }
    const double row_lo = std::clamp(std::ceil(ymin - 0.5), 0.0, static_cast<double>(sh));
    const double row_hi = std::clamp(std::ceil(ymax - 0.5), 0.0, static_cast<double>(sh));
    const std::size_t n = poly.points.size();
    for (int j = static_cast<int>(row_lo); j < static_cast<int>(row_hi); ++j) {
        const double yc = j + 0.5;
        double xl = std::numeric_limits<double>::infinity();
        double xr = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            const auto& p = poly.points[k];
            const auto& q = poly.points[(k + 1) % n];
            if ((p.y() <= yc && yc < q.y()) || (q.y() <= yc && yc < p.y())) {
                const double x = p.x() + (yc - p.y()) * (q.x() - p.x()) / (q.y() - p.y());
                xl = std::min(xl, x);
                xr = std::max(xr, x);
            }
        }
        if (!(xl < xr)) continue;
        const int i0 = static_cast<int>(std::clamp(std::ceil(xl - 0.5), 0.0, static_cast<double>(sw)));
        const int i1 = static_cast<int>(std::clamp(std::ceil(xr - 0.5), 0.0, static_cast<double>(sw)));
        std::uint8_t* px = buf.data() + (static_cast<std::size_t>(j) * sw + i0) * 4;
        for (int i = i0; i < i1; ++i, px += 4) {
            px[0] = poly.color[0];
            px[1] = poly.color[1];
            px[2] = poly.color[2];
            px[3] = 1;
        }
    }
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

RenderSettings render_settings(const GeneratorConfig& config) {
    return {config.turbine_color, config.sky_color, config.ambient, config.haze_distance_m};
}

std::vector<Face> turbine_faces(const TurbineInstance& turbine) {
    const auto& g = turbine.geometry;
    const TurbineFrame f = turbine_frame(turbine);
    std::vector<Face> faces;

    // Tower frustum; its top ring hides inside the nacelle.
    {
        const double top_z = g.hub_height - 0.5 * g.nacelle_height;
        const auto base = ring(f.tower_base, Vec3::UnitX(), Vec3::UnitY(), g.tower_base_radius);
        const auto top = ring(f.tower_base + top_z * f.up, Vec3::UnitX(), Vec3::UnitY(), g.tower_top_radius);
        const Vec3 interior = f.tower_base + 0.5 * top_z * f.up;
        for (int i = 0; i < kRingSegments; ++i) {
            const int k = (i + 1) % kRingSegments;
            faces.push_back(make_face({base[i], base[k], top[k], top[i]}, interior));
        }
    }

    // Nacelle box, from the hub rear end back along the axis.
    {
        const double s1 = g.hub_rear_offset;
        const double s0 = s1 - g.nacelle_length;
        const double hw = 0.5 * g.nacelle_width;
        const double hh = 0.5 * g.nacelle_height;
        auto corner = [&](double s, double l, double z) { return f.tower_top + s * f.front + l * f.right + z * f.up; };
        const Vec3 interior = corner(0.5 * (s0 + s1), 0.0, 0.0);
        const std::array<Vec3, 8> c = {corner(s0, -hw, -hh), corner(s1, -hw, -hh), corner(s1, hw, -hh),
                                       corner(s0, hw, -hh),  corner(s0, -hw, hh),  corner(s1, -hw, hh),
                                       corner(s1, hw, hh),   corner(s0, hw, hh)};
        faces.push_back(make_face({c[0], c[1], c[2], c[3]}, interior));  // bottom
        faces.push_back(make_face({c[4], c[5], c[6], c[7]}, interior));  // top
        faces.push_back(make_face({c[0], c[1], c[5], c[4]}, interior));  // left
        faces.push_back(make_face({c[3], c[2], c[6], c[7]}, interior));  // right
        faces.push_back(make_face({c[1], c[2], c[6], c[5]}, interior));  // front
        faces.push_back(make_face({c[0], c[3], c[7], c[4]}, interior));  // rear
    }

    // Hub: cylinder from the rear end to the rotor plane, cone to the front end.
    {
        const double r = g.hub_radius();
        const Vec3 rear_center = f.tower_top + g.hub_rear_offset * f.front;
        const Vec3 apex = f.tower_top + g.hub_front_offset * f.front;
        const auto rear = ring(rear_center, f.right, f.up, r);
        const auto mid = ring(f.rotor_center, f.right, f.up, r);
        const Vec3 interior = 0.5 * (rear_center + f.rotor_center);
        faces.push_back(make_face(rear, interior));
        for (int i = 0; i < kRingSegments; ++i) {
            const int k = (i + 1) % kRingSegments;
            faces.push_back(make_face({rear[i], rear[k], mid[k], mid[i]}, interior));
            faces.push_back(make_face({mid[i], mid[k], apex}, interior));
        }
    }

    // Blades: flat tapered quads in the rotor plane.
    {
        const double root = 0.8 * g.hub_radius();
        for (double angle : blade_angles(turbine.blade_rotation_deg)) {
            const Vec3 dir = f.blade_direction(angle);
            const Vec3 perp = f.front.cross(dir);
            const Vec3 root_c = f.rotor_center + root * dir;
            const Vec3 tip_c = f.rotor_center + g.blade_length * dir;
            Face blade = make_face({root_c - 0.5 * g.blade_root_width * perp, tip_c - 0.5 * g.blade_tip_width * perp,
                                    tip_c + 0.5 * g.blade_tip_width * perp, root_c + 0.5 * g.blade_root_width * perp},
                                   f.rotor_center - f.front, true);
            faces.push_back(std::move(blade));
        }
    }
    return faces;
}

std::vector<PixelPoint> silhouette_vertices(const TurbineInstance& turbine, const CameraPose& pose) {
    std::vector<PixelPoint> out;
    for (const auto& face : turbine_faces(turbine)) {
        std::vector<Vec3> cam;
        cam.reserve(face.vertices.size());
        for (const auto& v : face.vertices) cam.push_back(pose.to_camera(v));
        for (const auto& c : clip_near(cam)) out.push_back(project_camera_point(c, pose));
    }
    return out;
}

std::optional<PixelBox> turbine_bbox(const TurbineInstance& turbine, const CameraPose& pose) {
    const auto verts = silhouette_vertices(turbine, pose);
    return bbox_from_projection(verts, pose.width, pose.height);
}

ImageBuffer render_foreground(const SceneConfig& scene, const CameraPose& pose, const RenderSettings& settings) {
    const int w = pose.width;
    const int h = pose.height;
    const int sw = w * kSupersample;
    const int sh = h * kSupersample;

    const double az = scene.sun.azimuth_deg * kDegToRad;
    const double alt = scene.sun.altitude_deg * kDegToRad;
    const Vec3 sun(std::cos(alt) * std::sin(az), std::cos(alt) * std::cos(az), std::sin(alt));

    // Painter's order: farthest rotor first, scene order breaks ties.
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < scene.turbines.size(); ++i) {
        order.emplace_back(pose.to_camera(turbine_frame(scene.turbines[i]).rotor_center).z(), i);
    }
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    std::vector<ScreenPolygon> painted;
    for (const auto& [depth, index] : order) {
        (void)depth;
        std::vector<ScreenPolygon> polys;
        for (const auto& face : turbine_faces(scene.turbines[index])) {
            Vec3 centroid = Vec3::Zero();
            for (const auto& v : face.vertices) centroid += v;
            centroid /= static_cast<double>(face.vertices.size());

            const Vec3 to_camera = pose.position - centroid;
            if (!face.two_sided && face.normal.dot(to_camera) <= 0.0) continue;

            std::vector<Vec3> cam;
            cam.reserve(face.vertices.size());
            for (const auto& v : face.vertices) cam.push_back(pose.to_camera(v));
            const auto clipped = clip_near(cam);
            if (clipped.size() < 3) continue;

            ScreenPolygon poly;
            poly.depth = pose.to_camera(centroid).z();
            for (const auto& c : clipped) {
                const PixelPoint p = project_camera_point(c, pose);
                poly.points.emplace_back(p.u * kSupersample, p.v * kSupersample);
            }

            const double lambert = face.two_sided ? std::abs(face.normal.dot(sun)) : std::max(0.0, face.normal.dot(sun));
            const double shade = settings.ambient + (1.0 - settings.ambient) * lambert;
            const double haze =
                std::clamp(scene.sun.dust_density * std::max(poly.depth, 0.0) / settings.haze_distance_m, 0.0, 1.0);
            for (int ch = 0; ch < 3; ++ch) {
                const double lit = settings.turbine_color[ch] * shade;
                poly.color[ch] = to_byte((1.0 - haze) * lit + haze * settings.sky_color[ch]);
            }
            polys.push_back(std::move(poly));
        }
        std::stable_sort(polys.begin(), polys.end(), [](const auto& a, const auto& b) { return a.depth > b.depth; });
        for (auto& p : polys) painted.push_back(std::move(p));
    }

    ImageBuffer out(w, h, 4);
    if (painted.empty()) return out;

    // Only the pixel-aligned region touched by some polygon is rasterized.
    double lo_x = sw, lo_y = sh, hi_x = 0.0, hi_y = 0.0;
    for (const auto& p : painted) {
        for (const auto& q : p.points) {
            lo_x = std::min(lo_x, q.x());
            lo_y = std::min(lo_y, q.y());
            hi_x = std::max(hi_x, q.x());
            hi_y = std::max(hi_y, q.y());
        }
    }
    const int px0 = std::clamp(static_cast<int>(std::floor(lo_x / kSupersample)) - 1, 0, w);
    const int py0 = std::clamp(static_cast<int>(std::floor(lo_y / kSupersample)) - 1, 0, h);
    const int px1 = std::clamp(static_cast<int>(std::ceil(hi_x / kSupersample)) + 1, 0, w);
    const int py1 = std::clamp(static_cast<int>(std::ceil(hi_y / kSupersample)) + 1, 0, h);
    if (px0 >= px1 || py0 >= py1) return out;
    const int rw = (px1 - px0) * kSupersample;
    const int rh = (py1 - py0) * kSupersample;
    const Eigen::Vector2d shift(px0 * kSupersample, py0 * kSupersample);

    std::vector<std::uint8_t> sub(static_cast<std::size_t>(rw) * rh * 4, 0);
    for (auto& p : painted) {
        for (auto& q : p.points) q -= shift;
        fill_convex(p, sub, rw, rh);
    }

    for (int y = py0; y < py1; ++y) {
        for (int x = px0; x < px1; ++x) {
            int covered = 0;
            int sum[3] = {0, 0, 0};
            for (int dy = 0; dy < kSupersample; ++dy) {
                const std::uint8_t* s =
                    sub.data() + ((static_cast<std::size_t>(y - py0) * kSupersample + dy) * rw + (x - px0) * kSupersample) * 4;
                for (int dx = 0; dx < kSupersample; ++dx, s += 4) {
                    if (!s[3]) continue;
                    ++covered;
                    sum[0] += s[0];
                    sum[1] += s[1];
                    sum[2] += s[2];
                }
            }
            if (!covered) continue;
            std::uint8_t* o = out.at(x, y);
            for (int ch = 0; ch < 3; ++ch) o[ch] = static_cast<std::uint8_t>((sum[ch] + covered / 2) / covered);
            constexpr int kSamples = kSupersample * kSupersample;
            o[3] = static_cast<std::uint8_t>((255 * covered + kSamples / 2) / kSamples);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Backgrounds

BackgroundLibrary::BackgroundLibrary(const std::filesystem::path& directory, std::size_t cache_capacity)
    : capacity_(std::max<std::size_t>(cache_capacity, 1)) {
    std::error_code ec;
    if (!std::filesystem::is_directory(directory, ec)) {
        throw ConfigError("background library " + directory.string() + " is not a readable directory");
    }
    std::filesystem::directory_iterator it(directory, ec);
    if (ec) throw ConfigError("cannot list background library " + directory.string() + ": " + ec.message());
    for (const auto& entry : it) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp") files_.push_back(entry.path());
    }
    std::sort(files_.begin(), files_.end());
    if (files_.empty()) throw ConfigError("background library " + directory.string() + " contains no image files");
}

std::shared_ptr<const ImageBuffer> BackgroundLibrary::load(std::size_t index) const {
    {
        std::lock_guard lock(mutex_);
        for (auto it = cache_.begin(); it != cache_.end(); ++it) {
            if (it->first == index) {
                cache_.splice(cache_.begin(), cache_, it);
                return cache_.front().second;
            }
        }
    }
    auto image = std::make_shared<const ImageBuffer>(read_image(files_.at(index)));
    std::lock_guard lock(mutex_);
    cache_.emplace_front(index, image);
    if (cache_.size() > capacity_) cache_.pop_back();
    return image;
}

ImageBuffer noise_background(int width, int height, Rng& rng) {
    ImageBuffer out(width, height, 3);
    auto& px = out.pixels;
    std::size_t i = 0;
    while (i < px.size()) {
        std::uint64_t bits = rng.next_u64();
        for (int b = 0; b < 8 && i < px.size(); ++b, ++i, bits >>= 8) {
            px[i] = static_cast<std::uint8_t>(bits & 0xFF);
        }
    }
    return out;
}

ImageBuffer crop_and_resize(const ImageBuffer& source, double crop_x, double crop_y, int width, int height) {
    const double target_aspect = static_cast<double>(width) / height;
    int cw = source.width;
    int ch = source.height;
    if (static_cast<double>(source.width) / source.height > target_aspect) {
        cw = std::clamp(static_cast<int>(std::lround(source.height * target_aspect)), 1, source.width);
    } else {
        ch = std::clamp(static_cast<int>(std::lround(source.width / target_aspect)), 1, source.height);
    }
    const int slack_x = source.width - cw;
    const int slack_y = source.height - ch;
    const int ox = std::min(slack_x, static_cast<int>(std::floor(crop_x * (slack_x + 1))));
    const int oy = std::min(slack_y, static_cast<int>(std::floor(crop_y * (slack_y + 1))));

    ImageBuffer cropped(cw, ch, source.channels);
    const std::size_t row_bytes = static_cast<std::size_t>(cw) * source.channels;
    for (int y = 0; y < ch; ++y) {
        std::copy_n(source.at(ox, oy + y), row_bytes, cropped.at(0, y));
    }
    if (cw == width && ch == height) return cropped;
    return resize_bilinear(cropped, width, height);
}

ImageBuffer load_background(const BackgroundLibrary* library, const BackgroundChoice& choice, int width, int height,
                            Rng& rng, const BackgroundLibrary::Warn& warn) {
    if (choice.noise || library == nullptr) return noise_background(width, height, rng);

    std::size_t index = choice.image_index % library->size();
    double cx = choice.crop_x;
    double cy = choice.crop_y;
    const std::size_t attempts = 4 * library->size() + 16;
    for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
        try {
            const auto source = library->load(index);
            return crop_and_resize(*source, cx, cy, width, height);
        } catch (const IoError& e) {
            if (warn) warn(std::string("skipping background: ") + e.what());
            index = rng.index(library->size());
            cx = rng.uniform01();
            cy = rng.uniform01();
        }
    }
    throw IoError("no decodable image found in the background library");
}

ImageBuffer composite(const ImageBuffer& foreground_rgba, const ImageBuffer& background_rgb) {
    if (foreground_rgba.channels != 4 || background_rgb.channels != 3 ||
        foreground_rgba.width != background_rgb.width || foreground_rgba.height != background_rgb.height) {
        throw std::invalid_argument("composite needs an RGBA foreground and RGB background of equal size");
    }
    ImageBuffer out = background_rgb;
    const std::size_t n = out.pixel_count();
    const std::uint8_t* fg = foreground_rgba.pixels.data();
    std::uint8_t* o = out.pixels.data();
    for (std::size_t i = 0; i < n; ++i, fg += 4, o += 3) {
        const int a = fg[3];
        if (a == 0) continue;
        for (int ch = 0; ch < 3; ++ch) {
            o[ch] = static_cast<std::uint8_t>((fg[ch] * a + o[ch] * (255 - a) + 127) / 255);
        }
    }
    return out;
}

}  // namespace wtkp
