/* C interface to the interformer reaction-generation library.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return IF_OK on success; on failure they return an error code
 * and leave a message retrievable with if_last_error() (thread-local, valid
 * until the next failing call on the same thread).
 *
 * Configuration is passed as JSON text. Every field is optional and falls
 * back to its built-in default; unknown keys are rejected.
 *
 *   synth config:      {"classes": ["push","wave","kick","approach","still"],
 *                       "samples_per_class": 40, "joint_count": 9,
 *                       "t_min": 14, "t_max": 28, "noise_sd": 0.01,
 *                       "frame_rate": 15.0, "seed": 1}
 *   model config:      {"joint_count": 9, "n_layers": 6, "temporal_heads": 3,
 *                       "spatial_heads": 3, "ffn_hidden": 0,
 *                       "use_spatial": true, "use_adjacency": true,
 *                       "use_distance": true, "mask_mode": "post_softmax",
 *                       "adjacency_hops": "one", "eos_sentinel": 5.0}
 *   train config:      {"batch_size": 128, "steps": 1000, "alpha": 1e-4,
 *                       "beta1": 0.9, "beta2": 0.98, "epsilon": 1e-9,
 *                       "lambda_ff": 1.0, "seed": 1, "checkpoint_every": 0,
 *                       "checkpoint_path": ""}
 *   gen config:        {"max_len": 0, "eos_threshold": 0, "noise_sd": 0,
 *                       "chunk_len": 50, "seed": 1}
 *   classifier config: {"hidden": 64, "layers": 2, "steps": 400,
 *                       "batch_size": 16, "alpha": 1e-3,
 *                       "holdout_fraction": 0.2, "seed": 1}
 *   eval config:       {"length_tolerance": 2, "gen": { ... gen config ... }}
 */
#ifndef INTERFORMER_C_API_H
#define INTERFORMER_C_API_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define IF_API __declspec(dllexport)
#else
#define IF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum if_status {
  IF_OK = 0,
  IF_ERR_INVALID_ARGUMENT = 1,
  IF_ERR_IO = 2,
  IF_ERR_RUNTIME = 3
} if_status;

typedef struct if_dataset if_dataset;
typedef struct if_model if_model;
typedef struct if_classifier if_classifier;

IF_API const char* if_version(void);
IF_API const char* if_last_error(void);
/* Frees strings returned through char** out-parameters. */
IF_API void if_string_free(char* text);

/* --- datasets ----------------------------------------------------------- */

IF_API if_status if_dataset_synthesize(const char* synth_config_json, if_dataset** out);
IF_API if_status if_dataset_load(const char* path, if_dataset** out);
IF_API if_status if_dataset_save(const if_dataset* dataset, const char* path);
IF_API size_t if_dataset_size(const if_dataset* dataset);
/* {"samples": n, "joint_count": k, "classes": {"push": 40, ...}} */
IF_API if_status if_dataset_summary_json(const if_dataset* dataset, char** out_json);
IF_API void if_dataset_free(if_dataset* dataset);

/* --- models -------------------------------------------------------------- */

IF_API if_status if_model_create(const char* model_config_json, uint64_t seed, if_model** out);
/* Reads the checkpoint plus its config sidecar (path + ".json"). Optimizer
 * state stored by a training run is picked up so training can resume. */
IF_API if_status if_model_load(const char* checkpoint_path, if_model** out);
IF_API if_status if_model_save(const if_model* model, const char* checkpoint_path);
IF_API if_status if_model_config_json(const if_model* model, char** out_json);
IF_API void if_model_free(if_model* model);

/* --- training ------------------------------------------------------------ */

/* Runs until train config "steps" total optimizer steps have been taken,
 * continuing from the model's embedded optimizer state when present.
 * log_csv_path may be NULL. */
IF_API if_status if_train(if_model* model, const if_dataset* dataset,
                          const char* train_config_json, const char* log_csv_path);

/* --- generation ----------------------------------------------------------- */

/* Generates the reaction to dataset sample `sample_index`, seeded with the
 * sample's ground-truth first reaction frame. With use_long_windows != 0 the
 * action is processed in chunk_len windows. out_csv_path may be NULL. */
IF_API if_status if_generate_to_file(const if_model* model, const if_dataset* dataset,
                                     size_t sample_index, const char* gen_config_json,
                                     int use_long_windows, const char* out_json_path,
                                     const char* out_csv_path);

/* Writes n_samples noisy generations to "<out_prefix><i>.json". Requires
 * noise_sd > 0 in the gen config. */
IF_API if_status if_generate_diverse_to_files(const if_model* model, const if_dataset* dataset,
                                              size_t sample_index, const char* gen_config_json,
                                              size_t n_samples, const char* out_prefix);

/* --- classifier + evaluation ---------------------------------------------- */

IF_API if_status if_classifier_train(const if_dataset* dataset, const char* config_json,
                                     if_classifier** out, double* holdout_accuracy_out);
IF_API if_status if_classifier_save(const if_classifier* classifier, const char* path);
IF_API if_status if_classifier_load(const char* path, if_classifier** out);
IF_API void if_classifier_free(if_classifier* classifier);

/* Generates a reaction for every test sample and scores the generated set,
 * the ground truth, and the zero-velocity baseline. Either output pointer
 * may be NULL. */
IF_API if_status if_evaluate(const if_model* model, const if_classifier* classifier,
                             const if_dataset* test_set, const char* eval_config_json,
                             char** report_json_out, char** report_table_out);

#ifdef __cplusplus
}
#endif

#endif /* INTERFORMER_C_API_H */
