#include "xclaim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace xclaim {

using json = nlohmann::json;

SaliencyMap token_saliency(const ClaimModel& model, const std::string& sentence,
                           const std::string& target_label) {
    const auto& encoder = model.encoder();
    if (!encoder.differentiable()) {
        throw CapabilityError("saliency requires gradient access; encoder " + encoder.id() +
                              " provides none");
    }
    const auto& labels = model.labels();
    const auto label_it = std::find(labels.begin(), labels.end(), target_label);
    if (label_it == labels.end()) {
        throw ValidationError("model has no label '" + target_label + "'");
    }
    const int label = static_cast<int>(label_it - labels.begin());

    SaliencyMap map;
    map.sentence = sentence;
    map.target_label = target_label;
    map.model_id = model.id();
    map.tokens = encoder.tokenize(sentence);
    if (map.tokens.empty()) {
        throw ValidationError("sentence yields no tokens: '" + sentence + "'");
    }

    // d(score)/d(encoding) for a logistic head: sigmoid'(z) * w_label
    const auto x = encoder.encode(sentence);
    const double score = model.head().score(x, label);
    const double dsig = score * (1.0 - score);
    const auto& head = model.head();
    std::vector<double> grad(static_cast<std::size_t>(head.dim));
    const double* w =
        head.weights.data() + static_cast<std::size_t>(label) * static_cast<std::size_t>(head.dim);
    for (int i = 0; i < head.dim; ++i) grad[static_cast<std::size_t>(i)] = dsig * w[i];

    map.scores = encoder.token_gradient_norms(sentence, grad);
    const double max = *std::max_element(map.scores.begin(), map.scores.end());
    if (max > 0.0) {
        for (auto& s : map.scores) s /= max;
    } else {
        map.degenerate = true;
        std::fill(map.scores.begin(), map.scores.end(), 0.0);
    }
    return map;
}

std::string saliency_to_json(const SaliencyMap& map) {
    json j;
    j["sentence"] = map.sentence;
    j["tokens"] = map.tokens;
    j["scores"] = map.scores;
    j["target_label"] = map.target_label;
    j["model_id"] = map.model_id;
    j["degenerate"] = map.degenerate;
    j["method"] = map.method;
    return j.dump(2);
}

std::string saliency_to_text(const SaliencyMap& map) {
    std::ostringstream out;
    out << "saliency (" << map.method << ") model=" << map.model_id
        << " label=" << map.target_label << (map.degenerate ? " [degenerate]" : "") << "\n";
    for (std::size_t i = 0; i < map.tokens.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%6.3f  ", map.scores[i]);
        out << buf << map.tokens[i] << "\n";
    }
    return out.str();
}

CueReport cue_analysis(const std::vector<std::string>& fp_sentences,
                       const std::vector<std::string>& fn_sentences,
                       const std::vector<std::string>& cue_patterns, const TextMatcher& matcher) {
    CueReport report;
    report.patterns = cue_patterns;
    report.fp_total = static_cast<std::int64_t>(fp_sentences.size());
    report.fn_total = static_cast<std::int64_t>(fn_sentences.size());
    for (const auto& s : fp_sentences) {
        if (matcher.matches_any(s, cue_patterns)) ++report.fp_matches;
    }
    for (const auto& s : fn_sentences) {
        if (matcher.matches_any(s, cue_patterns)) ++report.fn_matches;
    }

    if (report.fp_total == 0 || report.fn_total == 0) {
        report.undefined = true;
        return report;
    }
    if (report.fp_matches == 0) {
        report.ratio = 0.0;  // cue never appears in FPs; ratio degenerates to 0
        return report;
    }
    if (report.fn_matches == 0) {
        report.infinite = true;
        return report;
    }
    const double fp_rate = static_cast<double>(report.fp_matches) / report.fp_total;
    const double fn_rate = static_cast<double>(report.fn_matches) / report.fn_total;
    report.ratio = fp_rate / fn_rate;
    return report;
}

std::string cue_report_to_json(const CueReport& report) {
    json j;
    j["patterns"] = report.patterns;
    j["fp_matches"] = report.fp_matches;
    j["fn_matches"] = report.fn_matches;
    j["fp_total"] = report.fp_total;
    j["fn_total"] = report.fn_total;
    j["undefined"] = report.undefined;
    j["infinite"] = report.infinite;
    if (!report.undefined && !report.infinite) j["ratio"] = report.ratio;
    return j.dump(2);
}

OverlapReport misclassification_overlap(const std::set<std::string>& errors_a,
                                        const std::set<std::string>& errors_b,
                                        std::int64_t n_test) {
    if (n_test <= 0) throw ValidationError("misclassification_overlap: n_test must be positive");
    OverlapReport report;
    report.size_a = static_cast<std::int64_t>(errors_a.size());
    report.size_b = static_cast<std::int64_t>(errors_b.size());
    report.n_test = n_test;
    if (report.size_a > n_test || report.size_b > n_test) {
        throw ValidationError("misclassification_overlap: error set larger than the test set");
    }
    if (errors_a.empty() || errors_b.empty()) {
        report.undefined = true;
        return report;
    }
    for (const auto& id : errors_a) {
        if (errors_b.contains(id)) ++report.intersection;
    }
    const auto smaller = std::min(report.size_a, report.size_b);
    const auto larger = std::max(report.size_a, report.size_b);
    report.observed_overlap = static_cast<double>(report.intersection) / smaller;
    // E|A∩B| = |A||B|/n under independent uniform errors; dividing by
    // min(|A|,|B|) leaves max(|A|,|B|)/n
    report.expected_overlap = static_cast<double>(larger) / static_cast<double>(n_test);
    return report;
}

std::string overlap_report_to_json(const OverlapReport& report) {
    json j;
    j["size_a"] = report.size_a;
    j["size_b"] = report.size_b;
    j["intersection"] = report.intersection;
    j["n_test"] = report.n_test;
    j["observed_overlap"] = report.observed_overlap;
    j["expected_overlap"] = report.expected_overlap;
    j["undefined"] = report.undefined;
    return j.dump(2);
}

}  // namespace xclaim
