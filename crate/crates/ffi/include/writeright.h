#ifndef WRITERIGHT_H
#define WRITERIGHT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WrStatus {
  WR_STATUS_OK = 0,
  WR_STATUS_NULL_ARGUMENT = 1,
  WR_STATUS_INVALID_UTF8 = 2,
  WR_STATUS_INVALID_ARGUMENT = 3,
  WR_STATUS_PARSE_ERROR = 4,
  WR_STATUS_IO_ERROR = 5,
  WR_STATUS_MODEL_ERROR = 6,
  WR_STATUS_BACKEND_ERROR = 7,
  WR_STATUS_PANIC = 8,
} WrStatus;

/*
 Opaque rule and dictionary corrector.
 */
typedef struct WrCorrector WrCorrector;

/*
 Opaque trained scoring model.
 */
typedef struct WrScoreModel WrScoreModel;

/*
 Scores on the 0-100 scale; `rubrics` follows the order of [`wr_rubric_name`].
 */
typedef struct WrScores {
  double overall;
  double rubrics[8];
} WrScores;

typedef struct WrGecReport {
  uint64_t tp;
  uint64_t fp;
  uint64_t fn_;
  double precision;
  double recall;
  double f_beta;
  /*
   Set when neither side has any edit; the scores are then 1.0.
   */
  bool degenerate;
} WrGecReport;

typedef struct WrTreeMetrics {
  size_t leaves;
  double yngve_mean;
  double yngve_max;
  double frazier_mean;
} WrTreeMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Description of the last failure on this thread, or null. The pointer
 stays valid until the next call into the library on this thread.
 */
const char *wr_last_error(void);

/*
 Library version, statically allocated.
 */
const char *wr_version(void);

/*
 # Safety
 `s` is null or a string returned by this library that was not yet freed.
 */
void wr_string_free(char *s);

/*
 Name of rubric `index` (0-7), statically allocated; null when out of range.
 */
const char *wr_rubric_name(size_t index);

/*
 Creates a corrector from a rule file and a dictionary; either path may
 be null to use the bundled resources.

 # Safety
 Path arguments are null or valid strings; `out` is a valid pointer.
 */
enum WrStatus wr_corrector_new(const char *rules_path,
                               const char *dictionary_path,
                               struct WrCorrector **out);

/*
 # Safety
 `h` is null or a handle from [`wr_corrector_new`] that was not yet freed.
 */
void wr_corrector_free(struct WrCorrector *h);

/*
 Corrects one sentence; `out` receives the corrected tokens joined by spaces.

 # Safety
 `h` is a live corrector, `sentence` a valid string, `out` a valid pointer.
 */
enum WrStatus wr_corrector_correct(const struct WrCorrector *h, const char *sentence, char **out);

/*
 Corrects one sentence; `out` receives the source and its edits as an M2 block.

 # Safety
 As for [`wr_corrector_correct`].
 */
enum WrStatus wr_corrector_correct_m2(const struct WrCorrector *h,
                                      const char *sentence,
                                      char **out);

/*
 Loads a model written by `writeright train-awe`.

 # Safety
 `path` is a valid string; `out` a valid pointer.
 */
enum WrStatus wr_score_model_load(const char *path, struct WrScoreModel **out);

/*
 # Safety
 `h` is null or a handle from [`wr_score_model_load`] that was not yet freed.
 */
void wr_score_model_free(struct WrScoreModel *h);

/*
 Scores one feature vector, given as the JSON object produced by
 `writeright featurize` (the `features` field of each line).

 # Safety
 `h` is a live model, `features_json` a valid string, `out` a valid pointer.
 */
enum WrStatus wr_score_model_predict(const struct WrScoreModel *h,
                                     const char *features_json,
                                     uint8_t prompt_id,
                                     struct WrScores *out);

/*
 Aligns a source and a corrected sentence and writes their edits as an
 M2 block, typed against the bundled dictionary.

 # Safety
 `source` and `target` are valid strings; `out` a valid pointer.
 */
enum WrStatus wr_extract_edits_m2(const char *source, const char *target, char **out);

/*
 Precision, recall and F-beta of a hypothesis M2 document against gold.

 # Safety
 `hyp_m2` and `gold_m2` are valid strings; `out` a valid pointer.
 */
enum WrStatus wr_evaluate_m2(const char *hyp_m2,
                             const char *gold_m2,
                             double beta,
                             struct WrGecReport *out);

/*
 Quadratic weighted kappa of `n` rating pairs over `min..=max`.

 # Safety
 `gold` and `pred` point to `n` readable values; `out` is a valid pointer.
 */
enum WrStatus wr_qwk(const int64_t *gold,
                     const int64_t *pred,
                     size_t n,
                     int64_t min,
                     int64_t max,
                     double *out);

/*
 Yngve and Frazier metrics of one bracketed constituency tree.

 # Safety
 `bracketed` is a valid string; `out` a valid pointer.
 */
enum WrStatus wr_tree_metrics(const char *bracketed, struct WrTreeMetrics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WRITERIGHT_H */
