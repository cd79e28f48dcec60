/* C interface to the low-precision ABFT library.
 *
 * All functions return ABFTLP_OK (0) on success or a negative status
 * code; abftlp_last_error() describes the most recent failure on the
 * calling thread. Handles are opaque and freed with their _free call.
 */
#ifndef ABFTLP_H
#define ABFTLP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define ABFTLP_OK 0
#define ABFTLP_ERR_INVALID_ARGUMENT (-1)
#define ABFTLP_ERR_IO (-2)
#define ABFTLP_ERR_PARSE (-3)
#define ABFTLP_ERR_INTERNAL (-4)

typedef int32_t abftlp_status;

const char* abftlp_status_str(abftlp_status status);
const char* abftlp_last_error(void);

/* ---- fault-injection campaigns ---- */

typedef struct abftlp_campaign_s abftlp_campaign;
typedef struct abftlp_report_s abftlp_report;

abftlp_status abftlp_campaign_load(const char* config_path, abftlp_campaign** out);
abftlp_status abftlp_campaign_parse(const char* config_text, abftlp_campaign** out);
void abftlp_campaign_free(abftlp_campaign* campaign);

abftlp_status abftlp_campaign_run(const abftlp_campaign* campaign, abftlp_report** out);
void abftlp_report_free(abftlp_report* report);

uint64_t abftlp_report_trials(const abftlp_report* report);
uint64_t abftlp_report_detected(const abftlp_report* report);
uint64_t abftlp_report_false_positives(const abftlp_report* report);
double abftlp_report_detection_rate(const abftlp_report* report);

abftlp_status abftlp_report_write_csv(const abftlp_report* report, const char* path);
/* Caller frees the returned string with abftlp_string_free. */
abftlp_status abftlp_report_render(const abftlp_report* report, char** out);
void abftlp_string_free(char* s);

/* ---- analytic predictions ---- */

typedef struct {
    double encode_overhead_a;   /* fraction of GEMM flops, encoding A */
    double encode_overhead_b;   /* fraction of GEMM flops, encoding B */
    double p_detect_b_bitflip;  /* 1 - (3/256)^m */
    double p_detect_b_random;   /* lower bound */
    double p_detect_c_bitflip;  /* exactly 1 */
    double p_detect_c_random;   /* lower bound, 1 - 1/127 */
    double eb_overhead;         /* 1/d + 1/(3*pool) */
    double eb_memory_overhead;  /* 32/(8*d) */
} abftlp_analysis;

abftlp_status abftlp_analyze(uint64_t m, uint64_t n, uint64_t k, uint64_t d, uint64_t pool,
                             abftlp_analysis* out);

/* ---- overhead benchmarks ---- */

typedef struct {
    double baseline_ns;       /* median over repetitions */
    double abft_ns;           /* median over repetitions */
    double overhead_fraction; /* may be negative */
} abftlp_bench_result;

abftlp_status abftlp_bench_gemm(uint64_t m, uint64_t n, uint64_t k, uint32_t repetitions,
                                uint64_t seed, abftlp_bench_result* out);
abftlp_status abftlp_bench_eb(uint64_t table_rows, uint64_t dim, uint64_t pooling,
                              uint64_t batch, uint32_t repetitions, uint64_t seed,
                              abftlp_bench_result* out);

/* ---- checked embedding lookups over files ---- */

/* table_path: binary table container ("ABEB" format). indices_path: one
 * bag per line, whitespace-separated row indices, each optionally
 * "index:weight". Row-sum validation on load can be skipped for
 * injection experiments. Returns per-bag error flags rendered to out
 * (one line per bag) and the number of flagged bags. */
abftlp_status abftlp_eb_check_files(const char* table_path, const char* indices_path,
                                    int skip_validation, uint64_t* bags_out,
                                    uint64_t* flagged_out, char** render_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ABFTLP_H */
