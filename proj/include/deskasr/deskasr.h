// Copyright 2026 The deskasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DESKASR_DESKASR_H_
#define DESKASR_DESKASR_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DASR_API __declspec(dllexport)
#else
#define DASR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  DASR_OK = 0,
  DASR_ERR_GENERIC = 1,
  DASR_ERR_CONFIG = 2,         /* invalid configuration or usage */
  DASR_ERR_NUMERICAL = 3,      /* non-finite loss or gradient */
  DASR_ERR_IO = 4,
  DASR_ERR_CHECKPOINT = 5,     /* malformed checkpoint or checksum mismatch */
  DASR_ERR_AUDIO = 6,
  DASR_ERR_INVALID_ARGUMENT = 7,
  DASR_ERR_PARTIAL = 8         /* some utterances failed to decode */
} dasr_status;

typedef struct dasr_model dasr_model;

/* Message of the last failed call on this thread; never NULL. */
DASR_API const char* dasr_last_error(void);
DASR_API const char* dasr_version(void);
DASR_API const char* dasr_status_name(dasr_status status);

/* Strings and buffers returned by the library. */
DASR_API void dasr_string_free(char* s);
DASR_API void dasr_buffer_free(double* p);

typedef struct {
  int has_seed;
  uint64_t seed;
  int64_t max_steps;       /* < 0 keeps the config value */
  const char* output_dir;  /* NULL keeps the config value */
  const char* resume_from; /* NULL keeps the config value */
  int verbose;             /* progress lines on stderr */
} dasr_train_options;

DASR_API void dasr_train_options_init(dasr_train_options* opts);

/* Trains per the YAML config. On success *final_checkpoint (if non-NULL)
   receives the path of the final checkpoint. */
DASR_API dasr_status dasr_train(const char* config_path,
                                const dasr_train_options* opts,
                                char** final_checkpoint);

/* Parses and validates a config; *normalized receives the full YAML with
   every field spelled out. */
DASR_API dasr_status dasr_config_normalize(const char* config_path,
                                           char** normalized);

DASR_API dasr_status dasr_count_params(const char* config_path, char** report);

DASR_API dasr_status dasr_model_load(const char* checkpoint_path,
                                     dasr_model** out);
DASR_API void dasr_model_free(dasr_model* model);
DASR_API dasr_status dasr_model_save(const dasr_model* model, const char* path);

typedef struct {
  int beam;              /* <= 0 keeps the checkpoint's value */
  int max_len;           /* <= 0 keeps the checkpoint's value */
  double length_penalty; /* < 0 keeps the checkpoint's value */
} dasr_decode_options;

DASR_API void dasr_decode_options_init(dasr_decode_options* opts);

DASR_API dasr_status dasr_model_transcribe_file(const dasr_model* model,
                                                const char* wav_path,
                                                const dasr_decode_options* opts,
                                                char** text);
/* Mono samples in [-1, 1]. */
DASR_API dasr_status dasr_model_transcribe_pcm(const dasr_model* model,
                                               const float* samples,
                                               size_t num_samples,
                                               int sample_rate,
                                               const dasr_decode_options* opts,
                                               char** text);

/* Teacher-forced logits on pseudo-random features drawn from `seed`. */
DASR_API dasr_status dasr_model_probe(const dasr_model* model, uint64_t seed,
                                      int64_t frames, double** values,
                                      size_t* count);

/* Decodes every entry of a wav list and writes `utt_id<TAB>hypothesis`
   lines in input order. Utterances whose audio cannot be read are reported
   in *failures (one `utt_id<TAB>message` line each) and yield
   DASR_ERR_PARTIAL. */
DASR_API dasr_status dasr_decode_list(const dasr_model* model,
                                      const char* list_path,
                                      const char* output_path,
                                      const dasr_decode_options* opts,
                                      char** failures);

DASR_API dasr_status dasr_inspect(const char* checkpoint_path, char** report);

/* unit: "char" or "word". baseline_path may be NULL. */
DASR_API dasr_status dasr_score(const char* ref_path, const char* hyp_path,
                                const char* unit, const char* baseline_path,
                                int machine_readable, char** report,
                                char** warnings);

/* Aggregate mode over a `system<TAB>set...` table of per-set rates. */
DASR_API dasr_status dasr_score_table(const char* table_path,
                                      const char* baseline_system,
                                      int machine_readable, char** report);

/* Writes <out_dir>/wav/<id>.wav files and <out_dir>/manifest.tsv. */
DASR_API dasr_status dasr_synth(const char* out_dir, int64_t count,
                                uint64_t seed, double noise_stddev);

#ifdef __cplusplus
}
#endif

#endif  /* DESKASR_DESKASR_H_ */
