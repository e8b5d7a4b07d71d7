/* C interface to the virtual-cache-clustering simulator.
 *
 * All objects are opaque handles created and released through this API.
 * Functions return VCC_OK or an error status; the message of the most recent
 * failure on the calling thread is available from vcc_last_error().
 * Strings returned through `char**` out-parameters are heap allocated and
 * must be released with vcc_string_free().
 */
#ifndef VCC_VCC_H
#define VCC_VCC_H

#include <stddef.h>

#if defined(VCC_BUILDING_LIBRARY)
#define VCC_API __attribute__((visibility("default")))
#else
#define VCC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vcc_status {
  VCC_OK = 0,
  VCC_ERR_INVALID_ARGUMENT = 1,
  VCC_ERR_INFEASIBLE_DIMENSION = 2,
  VCC_ERR_OVERHEAD_EXCEEDS_COHERENCE = 3,
  VCC_ERR_INVALID_CONFIGURATION = 4,
  VCC_ERR_NOT_HERMITIAN = 5,
  VCC_ERR_NUMERICAL_SINGULARITY = 6,
  VCC_ERR_UNSUPPORTED_CONFIGURATION = 7,
  VCC_ERR_GRID_MISMATCH = 8,
  VCC_ERR_UNKNOWN_KEY = 9,
  VCC_ERR_TYPE_MISMATCH = 10,
  VCC_ERR_IO = 11,
  VCC_ERR_INVARIANT_VIOLATION = 12,
  VCC_ERR_INTERNAL = 100
} vcc_status;

typedef struct vcc_config vcc_config;
typedef struct vcc_report vcc_report;

/* One result row. Optional numeric fields are NaN when absent. The scheme
 * pointer stays valid until the owning report is freed. */
typedef struct vcc_row {
  const char* scheme;
  double ptot_dbm;
  double snr_db;
  int q;
  double mean_rate_nats;
  double stderr_nats;
  double gain;
  double gain_optimized;
  int n_locations;
  int n_fadings;
} vcc_row;

VCC_API const char* vcc_status_name(vcc_status status);
VCC_API const char* vcc_last_error(void);
VCC_API void vcc_string_free(char* s);

VCC_API vcc_status vcc_config_create(vcc_config** out);
VCC_API vcc_status vcc_config_load_recipe(vcc_config* cfg, const char* name);
VCC_API vcc_status vcc_config_load_file(vcc_config* cfg, const char* path);
VCC_API vcc_status vcc_config_set(vcc_config* cfg, const char* key, const char* value);
VCC_API vcc_status vcc_config_validate(const vcc_config* cfg);
VCC_API vcc_status vcc_config_echo(const vcc_config* cfg, char** out);
VCC_API void vcc_config_free(vcc_config* cfg);

VCC_API vcc_status vcc_list_recipes(char** out);

VCC_API vcc_status vcc_run(const vcc_config* cfg, int workers, vcc_report** out);
VCC_API vcc_status vcc_report_csv(const vcc_report* report, char** out);
VCC_API vcc_status vcc_report_write_csv(const vcc_report* report, const char* path);
VCC_API vcc_status vcc_report_summary(const vcc_report* report, char** out);
VCC_API int vcc_report_invariants_ok(const vcc_report* report);
VCC_API size_t vcc_report_violation_count(const vcc_report* report);
VCC_API const char* vcc_report_violation(const vcc_report* report, size_t index);
VCC_API size_t vcc_report_row_count(const vcc_report* report);
VCC_API vcc_status vcc_report_row(const vcc_report* report, size_t index, vcc_row* out);
VCC_API void vcc_report_free(vcc_report* report);

/* Coded-caching schedule for `lambda` cache states, cache fraction `gamma`
 * ("a/b"), `users` users requesting distinct files and multiplexing `q`. */
VCC_API vcc_status vcc_schedule_dump(int lambda, const char* gamma, int users, int q, char** out);
/* Checks a schedule in the dump format against the same parameters.
 * *ok receives 1 when it delivers every file exactly once and decodably. */
VCC_API vcc_status vcc_schedule_verify(int lambda, const char* gamma, int users, const char* schedule_text, int* ok,
                                       char** report);

#ifdef __cplusplus
}
#endif

#endif /* VCC_VCC_H */
