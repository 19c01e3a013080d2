#ifndef CONTRAFACT_H
#define CONTRAFACT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum CfStatus {
  CF_STATUS_OK = 0,
  CF_STATUS_NULL_POINTER = 1,
  CF_STATUS_INVALID_UTF8 = 2,
  CF_STATUS_IO = 3,
  CF_STATUS_PARSE = 4,
  CF_STATUS_UNKNOWN_SONG = 5,
  CF_STATUS_EMPTY_CORPUS = 6,
  CF_STATUS_INVALID_ARGUMENT = 7,
  CF_STATUS_MODEL_MISMATCH = 8,
  CF_STATUS_PANIC = 9,
} CfStatus;

// A loaded corpus.
typedef struct CfCorpus CfCorpus;

// A co-occurrence model.
typedef struct CfModel CfModel;

// Ranked search output.
typedef struct CfSearchResult CfSearchResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer
// stays valid until the next call into this library on the same thread.
const char *cf_last_error_message(void);

// Loads a JSON-lines corpus.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CfStatus cf_corpus_load(const char *path, struct CfCorpus **out);

// Number of songs in the corpus (0 for NULL).
//
// # Safety
// `corpus` must be NULL or a live handle.
uintptr_t cf_corpus_len(const struct CfCorpus *corpus);

// # Safety
// `corpus` must be NULL or a handle not freed before.
void cf_corpus_free(struct CfCorpus *corpus);

// Builds the co-occurrence model of a corpus.
//
// # Safety
// `corpus` must be a live handle and `out` a valid pointer.
enum CfStatus cf_model_build(const struct CfCorpus *corpus, struct CfModel **out);

// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CfStatus cf_model_load(const char *path, struct CfModel **out);

// # Safety
// `model` must be a live handle and `path` a NUL-terminated string.
enum CfStatus cf_model_save(const struct CfModel *model, const char *path);

// # Safety
// `model` must be NULL or a handle not freed before.
void cf_model_free(struct CfModel *model);

// Index (0..63) of a class label such as `bii7`, `iim` or `<START>`.
//
// # Safety
// `label` must be a NUL-terminated string and `out` a valid pointer.
enum CfStatus cf_class_index_from_label(const char *label, uint32_t *out);

// Cosine similarity between two class embeddings.
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum CfStatus cf_model_cosine(const struct CfModel *model, uint32_t a, uint32_t b, double *out);

// Membrane-area distance between two songs. `samples` = 0 selects the
// default resolution.
//
// # Safety
// Handles must be live, ids NUL-terminated and `out` valid.
enum CfStatus cf_distance(const struct CfCorpus *corpus,
                          const struct CfModel *model,
                          const char *song_a,
                          const char *song_b,
                          uint32_t samples,
                          double *out);

// The `k` songs closest to `query`, nearest first.
//
// # Safety
// Handles must be live, `query` NUL-terminated and `out` valid.
enum CfStatus cf_search(const struct CfCorpus *corpus,
                        const struct CfModel *model,
                        const char *query,
                        uint32_t k,
                        uint32_t samples,
                        struct CfSearchResult **out);

// # Safety
// `result` must be NULL or a live handle.
uintptr_t cf_search_result_len(const struct CfSearchResult *result);

// Song id at `rank` (0-based), or NULL when out of range. Owned by the
// result handle.
//
// # Safety
// `result` must be NULL or a live handle.
const char *cf_search_result_id(const struct CfSearchResult *result, uintptr_t rank);

// Song title at `rank`, or NULL when out of range.
//
// # Safety
// `result` must be NULL or a live handle.
const char *cf_search_result_title(const struct CfSearchResult *result, uintptr_t rank);

// Distance at `rank`, or NaN when out of range.
//
// # Safety
// `result` must be NULL or a live handle.
double cf_search_result_distance(const struct CfSearchResult *result, uintptr_t rank);

// # Safety
// `result` must be NULL or a handle not freed before.
void cf_search_result_free(struct CfSearchResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONTRAFACT_H */
