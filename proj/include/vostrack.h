/* C interface to the instance tracking library. All entry points return a
 * status code; on failure vostrack_last_error() describes the most recent
 * error on the calling thread. Objects returned through out-parameters are
 * owned by the caller and released with the matching _free function. */
#ifndef VOSTRACK_H
#define VOSTRACK_H

#include <stdint.h>

#if defined(_WIN32)
#define VOSTRACK_API __declspec(dllexport)
#else
#define VOSTRACK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vostrack_status {
    VOSTRACK_OK = 0,
    VOSTRACK_ERR_IO = 1,
    VOSTRACK_ERR_PARSE = 2,
    VOSTRACK_ERR_CONFIG = 3,
    VOSTRACK_ERR_INPUT = 4,
    VOSTRACK_ERR_SPEC = 5,
    VOSTRACK_ERR_MALFORMED_RLE = 6,
    VOSTRACK_ERR_DIMENSION = 7,
    VOSTRACK_ERR_MISSING_FRAME = 8,
    VOSTRACK_ERR_EMPTY_POOL = 9,
    VOSTRACK_ERR_SIZE_LIMIT = 10,
    VOSTRACK_ERR_UNKNOWN = 11
} vostrack_status;

typedef struct vostrack_sequence vostrack_sequence;
typedef struct vostrack_config vostrack_config;
typedef struct vostrack_result vostrack_result;

typedef struct vostrack_report {
    double j_mean;
    double j_recall;
    double j_decay;
    double f_mean;
    double f_recall;
    double f_decay;
    double global_mean;
} vostrack_report;

VOSTRACK_API const char* vostrack_version(void);
VOSTRACK_API const char* vostrack_status_name(vostrack_status status);

/* Message for the most recent failure on this thread; empty until one. */
VOSTRACK_API const char* vostrack_last_error(void);

/* Sequence directories hold sequence.txt, per-frame saliency maps, and an
 * optional gt/ subdirectory. */
VOSTRACK_API vostrack_status vostrack_sequence_load(const char* dir,
                                                    vostrack_sequence** out);
VOSTRACK_API void vostrack_sequence_free(vostrack_sequence* sequence);
VOSTRACK_API int vostrack_sequence_frame_count(const vostrack_sequence* sequence);
VOSTRACK_API int vostrack_sequence_width(const vostrack_sequence* sequence);
VOSTRACK_API int vostrack_sequence_height(const vostrack_sequence* sequence);

VOSTRACK_API vostrack_status vostrack_config_default(vostrack_config** out);
VOSTRACK_API vostrack_status vostrack_config_load(const char* path,
                                                  vostrack_config** out);
/* Sets one key to a value, using the same keys and syntax as config files. */
VOSTRACK_API vostrack_status vostrack_config_set(vostrack_config* config,
                                                 const char* key, const char* value);
VOSTRACK_API void vostrack_config_free(vostrack_config* config);

VOSTRACK_API vostrack_status vostrack_run(const vostrack_sequence* sequence,
                                          const vostrack_config* config,
                                          vostrack_result** out);
VOSTRACK_API void vostrack_result_free(vostrack_result* result);
VOSTRACK_API vostrack_status vostrack_result_save(const vostrack_result* result,
                                                  const char* dir);
VOSTRACK_API vostrack_status vostrack_result_load(const char* dir,
                                                  vostrack_result** out);

/* Compares label maps in pred_dir against gt_dir. tolerance <= 0 picks the
 * frame-size default. */
VOSTRACK_API vostrack_status vostrack_evaluate_dirs(const char* pred_dir,
                                                    const char* gt_dir,
                                                    double tolerance,
                                                    vostrack_report* out);
VOSTRACK_API vostrack_status vostrack_report_save(const vostrack_report* report,
                                                  const char* path);

/* Writes one frame of the result over a gray background as a binary PPM. */
VOSTRACK_API vostrack_status vostrack_render(const vostrack_sequence* sequence,
                                             const vostrack_result* result, int frame,
                                             const char* out_path);

/* Generates the synthetic sequence described by a scenario spec file into
 * out_dir (sequence.txt, saliency maps, ground truth). */
VOSTRACK_API vostrack_status vostrack_synth_generate(const char* spec_path,
                                                     const char* out_dir);

/* Random hyperparameter search over the scenario directories under
 * scenarios_dir. trials > 0 overrides the space file's budget; seed may be
 * NULL or a decimal string overriding the space file's seed. The trial log
 * goes to log_path; best_score may be NULL. */
VOSTRACK_API vostrack_status vostrack_search_run(const char* space_path,
                                                 const char* scenarios_dir, int trials,
                                                 const char* seed, const char* log_path,
                                                 double* best_score);

#ifdef __cplusplus
}
#endif

#endif /* VOSTRACK_H */
