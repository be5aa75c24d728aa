#ifndef WTKP_WTKP_H
#define WTKP_WTKP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(WTKP_BUILDING_LIBRARY)
#    define WTKP_API __declspec(dllexport)
#  else
#    define WTKP_API __declspec(dllimport)
#  endif
#else
#  define WTKP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wtkp_status {
    WTKP_OK = 0,
    WTKP_ERROR_INVALID_ARGUMENT = 1,
    WTKP_ERROR_CONFIG = 2,
    WTKP_ERROR_IO = 3,
    WTKP_ERROR_PARSE = 4,
    WTKP_ERROR_INTERNAL = 5
} wtkp_status;

typedef struct wtkp_generator wtkp_generator;
typedef struct wtkp_report wtkp_report;

/* Library version, e.g. "1.0.0". Static storage. */
WTKP_API const char* wtkp_version(void);

/* Message of the last failed call on this thread ("" if none). Valid until
   the next call into the library from the same thread. */
WTKP_API const char* wtkp_last_error(void);

/* Frees strings returned through char** out-parameters. */
WTKP_API void wtkp_string_free(char* s);

/* Default generator configuration as pretty-printed JSON. */
WTKP_API wtkp_status wtkp_default_config_json(char** out_json);

/* ---- generation ---- */

/* config_json may be NULL for defaults; partial configs are merged onto them. */
WTKP_API wtkp_status wtkp_generator_create(const char* config_json, wtkp_generator** out);
WTKP_API wtkp_status wtkp_generator_create_from_file(const char* path, wtkp_generator** out);
WTKP_API void wtkp_generator_destroy(wtkp_generator* g);

WTKP_API wtkp_status wtkp_generator_set_seed(wtkp_generator* g, uint64_t seed);
WTKP_API wtkp_status wtkp_generator_set_count(wtkp_generator* g, uint64_t count);
/* 0 = one worker per logical core. Output does not depend on this value. */
WTKP_API wtkp_status wtkp_generator_set_workers(wtkp_generator* g, unsigned workers);
/* NULL or "" selects noise backgrounds only. */
WTKP_API wtkp_status wtkp_generator_set_background_library(wtkp_generator* g, const char* directory);

/* Effective configuration as JSON. */
WTKP_API wtkp_status wtkp_generator_config_json(const wtkp_generator* g, char** out_json);

/* Sampled scene parameters of one image as JSON. */
WTKP_API wtkp_status wtkp_generator_sample_scene_json(const wtkp_generator* g, uint64_t image_index, char** out_json);

typedef void (*wtkp_progress_fn)(uint64_t done, uint64_t total, void* user);
typedef void (*wtkp_log_fn)(const char* message, void* user);

typedef struct wtkp_generate_stats {
    uint64_t train_images;
    uint64_t val_images;
    uint64_t annotations;
    double seconds;
    double images_per_second;
} wtkp_generate_stats;

/* Writes the dataset under out_dir. progress, warn and stats may be NULL.
   Callbacks may be invoked from worker threads, one at a time. */
WTKP_API wtkp_status wtkp_generator_write_dataset(const wtkp_generator* g, const char* out_dir,
                                                  wtkp_progress_fn progress, wtkp_log_fn warn, void* user,
                                                  wtkp_generate_stats* stats);

/* Final RGB pixel buffer of one image before file encoding. *out_pixels
   (width*height*3 bytes) is released with wtkp_buffer_free. */
WTKP_API wtkp_status wtkp_generator_render(const wtkp_generator* g, uint64_t image_index, uint8_t** out_pixels,
                                           int* out_width, int* out_height);
WTKP_API void wtkp_buffer_free(uint8_t* buffer);

/* ---- evaluation ---- */

/* width/height of 0 read the image size from a manifest.json in gt_dir or
   up to two parents. */
WTKP_API wtkp_status wtkp_evaluate(const char* gt_dir, const char* pred_dir, int width, int height,
                                   wtkp_report** out);
WTKP_API void wtkp_report_destroy(wtkp_report* r);

typedef enum wtkp_metric {
    WTKP_MAP50_BOX = 0,
    WTKP_MAP50_95_BOX = 1,
    WTKP_MAP50_POSE = 2,
    WTKP_MAP50_95_POSE = 3
} wtkp_metric;

WTKP_API wtkp_status wtkp_report_metric(const wtkp_report* r, wtkp_metric metric, double* out);
WTKP_API wtkp_status wtkp_report_json(const wtkp_report* r, char** out_json);
WTKP_API wtkp_status wtkp_report_table(const wtkp_report* r, char** out_text);

/* ---- preview ---- */

/* Writes overlays of the first n images; *out_written receives the count. */
WTKP_API wtkp_status wtkp_preview(const char* dataset_dir, size_t n, const char* out_dir, size_t* out_written);

/* ---- keypoint utilities ---- */

/* Reference cases for external implementations of the permutation-invariant
   keypoint score. */
WTKP_API wtkp_status wtkp_export_parity_fixtures(uint64_t seed, size_t count, char** out_json);

/* pred and gt hold 3 tips as x0,y0,x1,y1,x2,y2. gt_mask may be NULL (all
   tips labeled). *out_index is 1..6; out_permuted (6 doubles) and
   out_sum_squared may be NULL. */
WTKP_API wtkp_status wtkp_optimal_tip_permutation(const double* pred, const double* gt, const int* gt_mask,
                                                  int* out_index, double* out_permuted, double* out_sum_squared);

/* Labels (1..3) for three blade angles in degrees, 120 apart. */
WTKP_API wtkp_status wtkp_assign_tip_labels(const double* angles_deg, int* out_labels);

/* Boxes as x1,y1,x2,y2. */
WTKP_API wtkp_status wtkp_iou(const double* a, const double* b, double* out);

#ifdef __cplusplus
}
#endif

#endif
