#include "classifier.hpp"

#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace usqt {

namespace {

void check_labeled_rectangular(const std::vector<FeatureVector>& rows) {
    require(!rows.empty(), ErrorCode::argument,
            "need at least one feature row");
    const size_t width = rows.front().values.size();
    require(width > 0, ErrorCode::argument, "feature rows must be non-empty");
    for (const FeatureVector& row : rows) {
        if (row.values.size() != width)
            fail(ErrorCode::argument,
                 "feature row " + row.frame_id + " has " +
                     std::to_string(row.values.size()) + " values, expected " +
                     std::to_string(width));
        if (!row.class_label.has_value())
            fail(ErrorCode::argument,
                 "feature row " + row.frame_id + " carries no class label");
    }
}

} // namespace

NbcModel train(const std::vector<FeatureVector>& rows) {
    check_labeled_rectangular(rows);
    const size_t width = rows.front().values.size();

    std::array<long, 2> counts{};
    for (const FeatureVector& row : rows) ++counts[size_t(*row.class_label)];
    for (int c = 0; c < 2; ++c)
        if (counts[size_t(c)] == 0)
            fail(ErrorCode::degenerate_data,
                 std::string("training set has no examples of class ") +
                     class_label_name(ClassLabel(c)));

    NbcModel model;
    model.feature_names = rows.front().names;
    const double total = double(rows.size());
    for (int c = 0; c < 2; ++c) {
        model.priors[size_t(c)] = double(counts[size_t(c)]) / total;
        model.means[size_t(c)].assign(width, 0.0);
        model.variances[size_t(c)].assign(width, 0.0);
    }
    for (const FeatureVector& row : rows) {
        auto& mean = model.means[size_t(*row.class_label)];
        for (size_t f = 0; f < width; ++f) mean[f] += row.values[f];
    }
    for (int c = 0; c < 2; ++c)
        for (size_t f = 0; f < width; ++f)
            model.means[size_t(c)][f] /= double(counts[size_t(c)]);
    for (const FeatureVector& row : rows) {
        const size_t c = size_t(*row.class_label);
        for (size_t f = 0; f < width; ++f) {
            const double d = row.values[f] - model.means[c][f];
            model.variances[c][f] += d * d;
        }
    }

    for (size_t f = 0; f < width; ++f) {
        double lo = rows.front().values[f], hi = lo;
        for (const FeatureVector& row : rows) {
            lo = std::min(lo, row.values[f]);
            hi = std::max(hi, row.values[f]);
        }
        const double range = hi - lo;
        double floor = 1e-9 * range * range;
        if (!(floor > 0.0)) floor = 1e-9; // feature constant everywhere
        for (int c = 0; c < 2; ++c) {
            double& var = model.variances[size_t(c)][f];
            var = std::max(var / double(counts[size_t(c)]), floor);
        }
    }
    return model;
}

namespace {

std::array<double, 2> log_joint(const NbcModel& model,
                                const std::vector<double>& values) {
    require(!model.means[0].empty() &&
                model.means[0].size() == model.means[1].size(),
            ErrorCode::argument, "model has no trained features");
    if (values.size() != model.means[0].size())
        fail(ErrorCode::argument,
             "feature vector has " + std::to_string(values.size()) +
                 " values but the model was trained on " +
                 std::to_string(model.means[0].size()));
    std::array<double, 2> lj{};
    for (int c = 0; c < 2; ++c) {
        double acc = std::log(model.priors[size_t(c)]);
        for (size_t f = 0; f < values.size(); ++f) {
            const double var = model.variances[size_t(c)][f];
            const double d = values[f] - model.means[size_t(c)][f];
            acc += -0.5 * std::log(2.0 * std::numbers::pi * var) -
                   d * d / (2.0 * var);
        }
        lj[size_t(c)] = acc;
    }
    return lj;
}

} // namespace

std::array<double, 2> posterior(const NbcModel& model,
                                const std::vector<double>& values) {
    const auto lj = log_joint(model, values);
    const double top = std::max(lj[0], lj[1]);
    const double e0 = std::exp(lj[0] - top), e1 = std::exp(lj[1] - top);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

ClassLabel classify(const NbcModel& model, const std::vector<double>& values) {
    const auto p = posterior(model, values);
    if (p[0] != p[1]) return p[0] > p[1] ? ClassLabel(0) : ClassLabel(1);
    if (model.priors[0] != model.priors[1])
        return model.priors[0] > model.priors[1] ? ClassLabel(0) : ClassLabel(1);
    return std::string(class_label_name(ClassLabel(0))) <
                   class_label_name(ClassLabel(1))
               ? ClassLabel(0)
               : ClassLabel(1);
}

MetricsReport compute_metrics(const std::vector<Outcome>& outcomes) {
    require(!outcomes.empty(), ErrorCode::argument,
            "cannot compute metrics over zero outcomes");
    MetricsReport m;
    for (const Outcome& o : outcomes) {
        require(std::isfinite(o.score), ErrorCode::argument,
                "outcome scores must be finite");
        const bool truth_pos = o.truth == ClassLabel::respondent;
        const bool pred_pos = o.predicted == ClassLabel::respondent;
        if (truth_pos && pred_pos) ++m.tp;
        else if (truth_pos) ++m.fn;
        else if (pred_pos) ++m.fp;
        else ++m.tn;
    }
    auto ratio = [](long num, long den) {
        Metric metric;
        if (den > 0) {
            metric.value = double(num) / double(den);
            metric.defined = true;
        }
        return metric;
    };
    m.sensitivity = ratio(m.tp, m.tp + m.fn);
    m.specificity = ratio(m.tn, m.tn + m.fp);
    m.fp_rate = ratio(m.fp, m.fp + m.tn);
    m.accuracy = ratio(m.tp + m.tn, m.tp + m.tn + m.fp + m.fn);
    m.precision = ratio(m.tp, m.tp + m.fp);
    m.dice_sc = ratio(2 * m.tp, 2 * m.tp + m.fp + m.fn);

    // Rank statistic: probability a random positive outscores a random
    // negative, ties counting one half — computed with average ranks.
    const long n_pos = m.tp + m.fn, n_neg = m.tn + m.fp;
    if (n_pos > 0 && n_neg > 0) {
        std::vector<size_t> order(outcomes.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return outcomes[a].score < outcomes[b].score;
        });
        double rank_sum_pos = 0.0;
        size_t i = 0;
        while (i < order.size()) {
            size_t j = i;
            while (j < order.size() &&
                   outcomes[order[j]].score == outcomes[order[i]].score)
                ++j;
            const double avg_rank = 0.5 * (double(i + 1) + double(j));
            for (size_t t = i; t < j; ++t)
                if (outcomes[order[t]].truth == ClassLabel::respondent)
                    rank_sum_pos += avg_rank;
            i = j;
        }
        m.roc_area.value =
            (rank_sum_pos - 0.5 * double(n_pos) * double(n_pos + 1)) /
            (double(n_pos) * double(n_neg));
        m.roc_area.defined = true;
    }
    return m;
}

namespace {

struct GroupTable {
    std::vector<std::string> ids; // sorted unique group ids
    std::vector<ClassLabel> labels;
    std::map<std::string, std::vector<size_t>> rows_of;
};

GroupTable index_groups(const std::vector<FeatureVector>& rows) {
    GroupTable t;
    for (size_t i = 0; i < rows.size(); ++i)
        t.rows_of[rows[i].group_id].push_back(i);
    for (const auto& [id, members] : t.rows_of) {
        const ClassLabel label = *rows[members.front()].class_label;
        for (size_t idx : members)
            if (*rows[idx].class_label != label)
                fail(ErrorCode::argument,
                     "group " + id + " mixes class labels");
        t.ids.push_back(id);
        t.labels.push_back(label);
    }
    return t;
}

void evaluate_fold(const std::vector<FeatureVector>& rows,
                   const std::vector<size_t>& test_rows,
                   std::vector<Outcome>& sink) {
    std::vector<char> held(rows.size(), 0);
    for (size_t idx : test_rows) held[idx] = 1;
    std::vector<FeatureVector> training;
    training.reserve(rows.size() - test_rows.size());
    for (size_t i = 0; i < rows.size(); ++i)
        if (!held[i]) training.push_back(rows[i]);
    const NbcModel model = train(training);
    for (size_t idx : test_rows) {
        const auto p = posterior(model, rows[idx].values);
        sink.push_back({*rows[idx].class_label,
                        classify(model, rows[idx].values),
                        p[size_t(ClassLabel::respondent)], rows[idx].group_id,
                        rows[idx].frame_id});
    }
}

} // namespace

CvResult cross_validate(const std::vector<FeatureVector>& rows,
                        const CvConfig& config) {
    check_labeled_rectangular(rows);
    const GroupTable groups = index_groups(rows);
    CvResult result;

    if (config.scheme == CvScheme::leave_one_group_out) {
        require(groups.ids.size() >= 2, ErrorCode::argument,
                "leave-one-group-out needs at least two groups");
        std::vector<CvFold> folds;
        for (const std::string& id : groups.ids)
            folds.push_back({groups.rows_of.at(id)});
        for (const CvFold& fold : folds)
            evaluate_fold(rows, fold.test_rows, result.outcomes);
        result.folds = int(folds.size());
        result.partitions.push_back(std::move(folds));
        result.per_repeat.push_back(compute_metrics(result.outcomes));
        result.pooled = result.per_repeat.front();
        return result;
    }

    require(config.k >= 2, ErrorCode::argument, "k-fold needs k >= 2");
    require(config.repeats >= 1, ErrorCode::argument,
            "k-fold needs at least one repeat");
    require(groups.ids.size() >= size_t(config.k), ErrorCode::argument,
            "k-fold needs at least k groups");

    for (int rep = 0; rep < config.repeats; ++rep) {
        Rng rng(derive_seed(config.seed, uint64_t(rep)));
        // Deal shuffled group lists round-robin onto folds. With
        // stratification each class is dealt separately (one shared fold
        // cursor keeps totals balanced); otherwise all groups are dealt
        // from a single shuffled list.
        std::array<std::vector<size_t>, 2> by_class;
        for (size_t g = 0; g < groups.ids.size(); ++g)
            by_class[config.stratified ? size_t(groups.labels[g]) : 0]
                .push_back(g);
        std::vector<CvFold> folds(size_t(config.k));
        size_t cursor = 0;
        for (auto& list : by_class) {
            rng.shuffle(list);
            for (size_t g : list) {
                auto& sink = folds[cursor % size_t(config.k)].test_rows;
                const auto& members = groups.rows_of.at(groups.ids[g]);
                sink.insert(sink.end(), members.begin(), members.end());
                ++cursor;
            }
        }
        std::vector<Outcome> repeat_outcomes;
        for (const CvFold& fold : folds)
            evaluate_fold(rows, fold.test_rows, repeat_outcomes);
        result.per_repeat.push_back(compute_metrics(repeat_outcomes));
        result.outcomes.insert(result.outcomes.end(), repeat_outcomes.begin(),
                               repeat_outcomes.end());
        result.partitions.push_back(std::move(folds));
    }
    result.folds = config.k;
    result.pooled = compute_metrics(result.outcomes);
    return result;
}

MetricSummary summarize_metric(const std::vector<MetricsReport>& reports,
                               Metric MetricsReport::*field) {
    MetricSummary s;
    double sum = 0.0;
    for (const MetricsReport& r : reports)
        if ((r.*field).defined) {
            sum += (r.*field).value;
            ++s.count;
        }
    if (s.count == 0) return s;
    s.mean = sum / double(s.count);
    if (s.count >= 2) {
        double ss = 0.0;
        for (const MetricsReport& r : reports)
            if ((r.*field).defined) {
                const double d = (r.*field).value - s.mean;
                ss += d * d;
            }
        s.stddev = std::sqrt(ss / double(s.count - 1));
    }
    return s;
}

std::vector<GroupDecision> group_decisions(
    const std::vector<Outcome>& outcomes) {
    require(!outcomes.empty(), ErrorCode::argument,
            "group decisions need at least one outcome");
    struct Tally {
        long pos = 0, neg = 0;
        ClassLabel truth = ClassLabel::respondent;
        bool seen = false;
    };
    std::map<std::string, Tally> tallies;
    for (const Outcome& o : outcomes) {
        Tally& t = tallies[o.group_id];
        if (!t.seen) {
            t.truth = o.truth;
            t.seen = true;
        } else if (t.truth != o.truth) {
            fail(ErrorCode::argument,
                 "group " + o.group_id + " mixes true labels");
        }
        (o.predicted == ClassLabel::respondent ? t.pos : t.neg) += 1;
    }
    std::vector<GroupDecision> decisions;
    for (const auto& [id, t] : tallies)
        decisions.push_back({id, t.truth,
                             t.pos > t.neg ? ClassLabel::respondent
                                           : ClassLabel::non_respondent});
    return decisions;
}

} // namespace usqt
