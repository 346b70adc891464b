#pragma once

// End-to-end orchestration of the processing chain: synthesize a labeled
// phantom dataset, demodulate RF frames to envelopes, fit parametric maps
// and summarize them into feature tables, and evaluate a classifier under
// the configured cross-validation protocol. Every stage reads and writes
// plain files so each step is independently inspectable and rerunnable.
//
// Determinism contract: identical semantic configuration and inputs produce
// bit-identical outputs, regardless of worker thread count. The semantic
// configuration (models, window, depth, basis policy, CV settings, seed,
// phantom parameters) is canonicalized and hashed; the hash and the seed are
// stamped into the header of every file the pipeline writes. Execution
// details (directories, thread count, logging) do not enter the hash.

#include "classifier.hpp"
#include "common.hpp"
#include "fractal.hpp"
#include "frame_io.hpp"
#include "phantom.hpp"
#include "pmap.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace usqt {

// How the wavelet-packet subbands that feed the fractal features are chosen:
// `adaptive` selects a roughness-guided basis on a reference frame (the
// first processable one, in input order) and applies it to every frame so
// all feature rows align; `full` always uses the complete deepest level.
enum class BasisPolicy { adaptive = 0, full = 1 };

inline PhantomSpec sparse_demo_spec() {
    PhantomSpec s;
    s.density = 0.5;
    return s;
}

// Generator settings for the built-in two-class demo dataset: class A is
// the respondent class, class B the non-respondent class. The defaults pit
// a dense diffuse medium against a sparse one.
struct PhantomPair {
    PhantomSpec class_a{};
    PhantomSpec class_b = sparse_demo_spec();
    int frames_per_class = 10;
    int groups_per_class = 5;
};

struct PipelineConfig {
    std::vector<ModelKind> kinds{ModelKind::nakagami};
    WindowSpec window{};      // local-fit geometry for the parametric maps
    int wavelet_depth = 2;    // packet decomposition depth, in [1, 6]
    BasisPolicy basis_policy = BasisPolicy::adaptive;
    CvScheme cv_scheme = CvScheme::leave_one_group_out;
    int cv_k = 10;            // folds for the k-fold scheme
    int cv_repeats = 60;      // reshuffled repetitions for the k-fold scheme
    uint64_t seed = 0;        // master seed: dataset synthesis and CV
    std::string input_dir;    // optional explicit stage input directory
    std::string output_dir = "usqt_out";
    int threads = 0;          // worker pool size; 0 = hardware concurrency
    PhantomPair phantom;
    std::ostream* log = nullptr; // progress sink; null runs silently
};

// Configuration text is UTF-8 `key = value` lines with `#` comments; keys
// carry a section prefix (pipeline., map., wavelet., cv., io., phantom.).
// Later assignments override earlier ones. Unknown keys and out-of-range
// values raise config errors naming the key. `origin` labels the source in
// error messages. Parsing ends with full cross-field validation.
PipelineConfig parse_config_text(const std::string& text,
                                 const std::string& origin);
PipelineConfig load_config(const std::string& path);

// Applies one key=value assignment (same keys as the config file) without
// re-validating the whole configuration.
void apply_config_key(PipelineConfig& config, const std::string& key,
                      const std::string& value, const std::string& origin);

// Applies a long command-line flag (without the leading dashes) onto its
// config key(s): model, window (HEIGHTxWIDTH[xSTRIDE]), depth, cv, k,
// repeats, seed, in, out, threads.
void apply_flag(PipelineConfig& config, const std::string& flag,
                const std::string& value);

void validate_config(const PipelineConfig& config);

// Canonical key=value serialization of the semantic fields, in a fixed
// order, and the 64-bit FNV-1a hash over it (16 lowercase hex digits).
std::vector<std::pair<std::string, std::string>> config_dump(
    const PipelineConfig& config);
std::string config_hash(const PipelineConfig& config);

// Outcome of one stage. `failed` counts input items that were skipped after
// an error (the stage keeps going); hard errors that invalidate the whole
// stage throw instead.
struct StageReport {
    int processed = 0;
    int failed = 0;
    std::vector<std::string> failures; // one "item: reason" line per skip
    std::vector<std::string> outputs;  // notable artifacts (tables, reports)
};

// On-disk feature table: meta key=value lines, then a tab-separated header
// row (frame_id, group_id, class_label, feature names), then one row per
// frame with values printed at full double precision so reloading is exact.
// Degenerate-cell flags are not persisted; loaded rows carry clear flags.
struct FeatureTable {
    container::Entries meta;
    std::vector<std::string> names;
    std::vector<FeatureVector> rows;
    bool meta_has(const std::string& key) const;
};

void save_feature_table(const std::string& path, const FeatureTable& table);
FeatureTable load_feature_table(const std::string& path);

// Stage entry points. Layout under output_dir: frames/ (RF + truth +
// manifest), envelopes/, features/ (<model>.fractal.tsv and
// <model>.baseline.tsv), reports/. A stage reads from input_dir when one is
// configured, otherwise from the previous stage's output directory.
StageReport run_simulate(const PipelineConfig& config);
StageReport run_envelope(const PipelineConfig& config);
StageReport run_features(const PipelineConfig& config);
StageReport run_evaluate(const PipelineConfig& config);
// simulate -> envelope -> features -> evaluate within output_dir
// (input_dir is ignored); reports are aggregated.
StageReport run_all(const PipelineConfig& config);

} // namespace usqt
