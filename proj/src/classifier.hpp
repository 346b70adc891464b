#pragma once

// Gaussian naive Bayes over feature rows, with the two cross-validation
// protocols the evaluation pipeline needs: leave-one-group-out (all rows of
// one group held out per fold, so correlated slices never leak between
// train and test) and repeated stratified grouped k-fold.

#include "common.hpp"
#include "fractal.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace usqt {

struct NbcModel {
    std::array<double, 2> priors{};                 // indexed by ClassLabel
    std::array<std::vector<double>, 2> means;       // [class][feature]
    std::array<std::vector<double>, 2> variances;   // floored, always > 0
    std::vector<std::string> feature_names;
};

// Fits class priors (exact class frequencies) and one Gaussian per class
// and feature. Variances are floored at 1e-9 times the squared global range
// of the feature so constant features cannot produce singular densities.
NbcModel train(const std::vector<FeatureVector>& rows);

// Class probabilities, computed in log space and normalized to sum to 1.
std::array<double, 2> posterior(const NbcModel& model,
                                const std::vector<double>& values);

// Argmax of the posterior; exact ties go to the class with the larger
// prior, then to the lexicographically smaller class name.
ClassLabel classify(const NbcModel& model, const std::vector<double>& values);

struct Outcome {
    ClassLabel truth;
    ClassLabel predicted;
    double score; // posterior probability of the positive (respondent) class
    std::string group_id;
    std::string frame_id;
};

struct Metric {
    double value = 0.0;
    bool defined = false;
};

struct MetricsReport {
    long tp = 0, fp = 0, tn = 0, fn = 0;
    Metric fp_rate, sensitivity, specificity, accuracy, precision, dice_sc;
    Metric roc_area; // rank statistic over scores, ties counted as one half
};

// Confusion counts and the seven derived metrics. Metrics whose denominator
// is empty (e.g. specificity with no negatives) come back flagged undefined
// rather than failing.
MetricsReport compute_metrics(const std::vector<Outcome>& outcomes);

enum class CvScheme { leave_one_group_out, k_fold };

struct CvConfig {
    CvScheme scheme = CvScheme::leave_one_group_out;
    int k = 10;          // k-fold only
    int repeats = 60;    // k-fold only; each repeat reshuffles the folds
    uint64_t seed = 0;
    bool stratified = true;
};

struct CvFold {
    std::vector<size_t> test_rows; // indices into the input rows
};

struct CvResult {
    int folds = 0;
    MetricsReport pooled;                  // confusion pooled over everything
    std::vector<MetricsReport> per_repeat; // one per repeat (one for LOGO)
    std::vector<Outcome> outcomes;         // pooled in evaluation order
    std::vector<std::vector<CvFold>> partitions; // [repeat][fold], auditable
};

// Runs the configured protocol. Groups are the unit of assignment in both
// schemes: a group's rows always land in the same fold. Stratified k-fold
// deals shuffled single-class group lists round-robin onto folds; each
// repeat reshuffles with a seed derived from (config.seed, repeat).
CvResult cross_validate(const std::vector<FeatureVector>& rows,
                        const CvConfig& config);

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation (n - 1)
    int count = 0;       // how many repeats had the metric defined
};

MetricSummary summarize_metric(const std::vector<MetricsReport>& reports,
                               Metric MetricsReport::*field);

struct GroupDecision {
    std::string group_id;
    ClassLabel truth;
    ClassLabel predicted;
};

// Majority vote over each group's slice predictions; ties resolve to
// non-respondent. Rows of a group must agree on the true label.
std::vector<GroupDecision> group_decisions(const std::vector<Outcome>& outcomes);

} // namespace usqt
