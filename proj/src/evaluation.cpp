#include "xclaim/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "xclaim/errors.hpp"

namespace xclaim {

std::string to_string(Task task) {
    return task == Task::identification ? "identification" : "categorization";
}

Task task_from_string(const std::string& name) {
    if (name == "identification" || name == "binary") return Task::identification;
    if (name == "categorization" || name == "multilabel") return Task::categorization;
    throw ConfigError("unknown task: " + name);
}

double round3(double v) {
    return std::round(v * 1000.0) / 1000.0;
}

ConfusionMatrix confusion(const std::vector<bool>& gold, const std::vector<bool>& pred) {
    if (gold.size() != pred.size()) {
        throw ValidationError("confusion: gold has " + std::to_string(gold.size()) +
                              " items, predictions " + std::to_string(pred.size()));
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (pred[i]) {
            (gold[i] ? cm.tp : cm.fp) += 1;
        } else {
            (gold[i] ? cm.fn : cm.tn) += 1;
        }
    }
    return cm;
}

namespace {

ClassMetrics metrics_from_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
    ClassMetrics m;
    m.support = tp + fn;
    const std::int64_t pd = tp + fp;
    const std::int64_t rd = tp + fn;
    const double p = pd > 0 ? static_cast<double>(tp) / static_cast<double>(pd) : 0.0;
    const double r = rd > 0 ? static_cast<double>(tp) / static_cast<double>(rd) : 0.0;
    const double f = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    m.zero_division = pd == 0 || rd == 0 || (p + r) == 0.0;
    m.precision = round3(p);
    m.recall = round3(r);
    m.f1 = round3(f);
    return m;
}

ClassMetrics macro_of(const std::vector<std::pair<std::string, ClassMetrics>>& per_class) {
    ClassMetrics macro;
    if (per_class.empty()) return macro;
    double p = 0.0, r = 0.0, f = 0.0;
    for (const auto& [label, m] : per_class) {
        p += m.precision;
        r += m.recall;
        f += m.f1;
        macro.support += m.support;
        macro.zero_division = macro.zero_division || m.zero_division;
    }
    const auto n = static_cast<double>(per_class.size());
    macro.precision = round3(p / n);
    macro.recall = round3(r / n);
    macro.f1 = round3(f / n);
    return macro;
}

}  // namespace

ClassMetrics f1_positive(const ConfusionMatrix& cm) {
    return metrics_from_counts(cm.tp, cm.fp, cm.fn);
}

MetricsReport multilabel_report(const std::vector<LabelSet>& gold,
                                const std::vector<LabelSet>& pred,
                                const std::vector<std::string>& label_space) {
    if (gold.size() != pred.size()) {
        throw ValidationError("multilabel_report: gold has " + std::to_string(gold.size()) +
                              " items, predictions " + std::to_string(pred.size()));
    }
    const std::set<std::string> known(label_space.begin(), label_space.end());
    auto check = [&](const std::vector<LabelSet>& sets, const char* side) {
        for (const auto& labels : sets) {
            for (const auto& label : labels) {
                if (!known.contains(label)) {
                    throw ValidationError(std::string("multilabel_report: unknown ") + side +
                                          " label: " + label);
                }
            }
        }
    };
    check(gold, "gold");
    check(pred, "predicted");

    MetricsReport report;
    report.task = Task::categorization;
    report.n_instances = static_cast<std::int64_t>(gold.size());

    std::int64_t pooled_tp = 0, pooled_fp = 0, pooled_fn = 0;
    for (const auto& label : label_space) {
        std::int64_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            const bool g = gold[i].contains(label);
            const bool p = pred[i].contains(label);
            if (g && p) ++tp;
            else if (!g && p) ++fp;
            else if (g && !p) ++fn;
        }
        report.per_class.emplace_back(label, metrics_from_counts(tp, fp, fn));
        pooled_tp += tp;
        pooled_fp += fp;
        pooled_fn += fn;
    }
    report.macro = macro_of(report.per_class);
    report.micro = metrics_from_counts(pooled_tp, pooled_fp, pooled_fn);
    return report;
}

MetricsReport report_from_per_class(
    const std::vector<std::pair<std::string, ClassMetrics>>& per_class) {
    MetricsReport report;
    report.task = Task::categorization;
    report.per_class = per_class;
    report.macro = macro_of(per_class);
    return report;
}

double cohens_kappa(const std::vector<std::string>& ann_a,
                    const std::vector<std::string>& ann_b) {
    if (ann_a.empty() || ann_b.empty()) {
        throw ValidationError("cohens_kappa: empty annotation list");
    }
    if (ann_a.size() != ann_b.size()) {
        throw ValidationError("cohens_kappa: annotation lists differ in length");
    }
    const auto n = static_cast<std::int64_t>(ann_a.size());
    std::int64_t agree = 0;
    std::map<std::string, std::int64_t> marg_a, marg_b;
    for (std::int64_t i = 0; i < n; ++i) {
        if (ann_a[i] == ann_b[i]) ++agree;
        ++marg_a[ann_a[i]];
        ++marg_b[ann_b[i]];
    }
    // chance agreement from marginal products; integer arithmetic keeps the
    // hand-computable cases exact: kappa = (n*agree - S) / (n*n - S)
    std::int64_t s = 0;
    for (const auto& [label, ca] : marg_a) {
        auto it = marg_b.find(label);
        if (it != marg_b.end()) s += ca * it->second;
    }
    const std::int64_t denom = n * n - s;
    if (denom == 0) return 1.0;  // both constant on the same label => p_o = p_e = 1
    return static_cast<double>(n * agree - s) / static_cast<double>(denom);
}

std::vector<ShiftRow> distribution_shift(const std::map<std::string, double>& ref_a,
                                         const std::map<std::string, double>& ref_b) {
    std::set<std::string> labels;
    for (const auto& [label, pct] : ref_a) labels.insert(label);
    for (const auto& [label, pct] : ref_b) labels.insert(label);

    std::vector<ShiftRow> rows;
    rows.reserve(labels.size());
    for (const auto& label : labels) {
        ShiftRow row;
        row.label = label;
        if (auto it = ref_a.find(label); it != ref_a.end()) row.pct_a = it->second;
        if (auto it = ref_b.find(label); it != ref_b.end()) row.pct_b = it->second;
        row.delta = row.pct_b - row.pct_a;
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const ShiftRow& a, const ShiftRow& b) {
        if (std::abs(a.delta) != std::abs(b.delta)) return std::abs(a.delta) > std::abs(b.delta);
        return a.label < b.label;
    });
    return rows;
}

}  // namespace xclaim
