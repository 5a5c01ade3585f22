#pragma once

// Sentence-level evaluation: confusion counts, positive-class F1, per-class
// precision/recall/F1 with macro and micro aggregation, Cohen's kappa, and
// distribution-shift deltas between two label distributions.
//
// Zero-denominator convention: undefined precision/recall/F1 are reported
// as 0 and flagged. Metric values are rounded to 3 decimals; rendered
// tables show percentages with 1 decimal.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace xclaim {

enum class Task { identification, categorization };

std::string to_string(Task task);
Task task_from_string(const std::string& name);

struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    std::int64_t total() const noexcept { return tp + fp + fn + tn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0;
    bool zero_division = false;  // some denominator was zero; that metric is 0

    bool operator==(const ClassMetrics&) const = default;
};

struct MetricsReport {
    Task task = Task::identification;
    // identification: positive-class metrics plus the confusion matrix
    std::optional<ClassMetrics> positive;
    std::optional<ConfusionMatrix> confusion;
    // categorization: one entry per label, in label-space order
    std::vector<std::pair<std::string, ClassMetrics>> per_class;
    std::optional<ClassMetrics> macro;  // unweighted means; support = total gold labels
    std::optional<ClassMetrics> micro;  // pooled one-vs-rest counts
    std::int64_t n_instances = 0;

    bool operator==(const MetricsReport&) const = default;
};

double round3(double v);

// Exact binary counts; inputs must have equal lengths.
ConfusionMatrix confusion(const std::vector<bool>& gold, const std::vector<bool>& pred);

// Precision/recall/F1 of the positive class. support = tp + fn.
ClassMetrics f1_positive(const ConfusionMatrix& cm);

using LabelSet = std::set<std::string>;

// One-vs-rest metrics per label plus macro (unweighted mean of each metric
// independently) and micro (pooled counts) aggregates. Labels outside the
// label space raise ValidationError.
MetricsReport multilabel_report(const std::vector<LabelSet>& gold,
                                const std::vector<LabelSet>& pred,
                                const std::vector<std::string>& label_space);

// Macro aggregation over externally supplied per-class metrics (micro needs
// the raw counts and is left empty).
MetricsReport report_from_per_class(
    const std::vector<std::pair<std::string, ClassMetrics>>& per_class);

// Chance-corrected agreement between two annotations over a shared label
// space. kappa = (p_o - p_e) / (1 - p_e); returns 1 when both are constant
// and identical. Empty input raises ValidationError.
double cohens_kappa(const std::vector<std::string>& ann_a,
                    const std::vector<std::string>& ann_b);

struct ShiftRow {
    std::string label;
    double pct_a = 0.0;
    double pct_b = 0.0;
    double delta = 0.0;  // pct_b - pct_a
};

// Per-class (pctA, pctB, delta), sorted by |delta| descending. Labels missing
// from one side count as 0.
std::vector<ShiftRow> distribution_shift(const std::map<std::string, double>& ref_a,
                                         const std::map<std::string, double>& ref_b);

}  // namespace xclaim
