#pragma once

// Error-analysis procedures: gradient token saliency, cue-word FP/FN rate
// ratios, and cross-model misclassification overlap.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "xclaim/models.hpp"
#include "xclaim/text.hpp"

namespace xclaim {

struct SaliencyMap {
    std::string sentence;
    std::vector<std::string> tokens;
    std::vector<double> scores;  // in [0,1]; max is exactly 1 unless degenerate
    std::string target_label;
    std::string model_id;
    bool degenerate = false;  // all gradients were zero
    // The aggregation (L2 norm of the embedding gradient, per-sentence
    // max-normalization) is a reconstruction; flagged so reports carry it.
    std::string method = "grad-l2/max-norm";
};

// Per-token relevance of `target_label` for the model's score on this
// sentence: the Euclidean norm of the gradient of the label score with
// respect to each token's input, normalized by the per-sentence maximum.
// Requires a differentiable encoder (CapabilityError otherwise); an
// untokenizable sentence raises ValidationError.
SaliencyMap token_saliency(const ClaimModel& model, const std::string& sentence,
                           const std::string& target_label);

std::string saliency_to_json(const SaliencyMap& map);
std::string saliency_to_text(const SaliencyMap& map);

struct CueReport {
    std::vector<std::string> patterns;
    std::int64_t fp_matches = 0;
    std::int64_t fn_matches = 0;
    std::int64_t fp_total = 0;
    std::int64_t fn_total = 0;
    // (fp_matches/fp_total) / (fn_matches/fn_total); rates, not raw counts,
    // so unequal FP/FN set sizes compare fairly
    double ratio = 0.0;
    bool undefined = false;  // empty FP or FN set
    bool infinite = false;   // cue present in FPs but absent from FNs
};

// How much more likely a cue is to appear in false positives than in false
// negatives of one model.
CueReport cue_analysis(const std::vector<std::string>& fp_sentences,
                       const std::vector<std::string>& fn_sentences,
                       const std::vector<std::string>& cue_patterns,
                       const TextMatcher& matcher = default_matcher());

std::string cue_report_to_json(const CueReport& report);

struct OverlapReport {
    std::int64_t size_a = 0;
    std::int64_t size_b = 0;
    std::int64_t intersection = 0;
    std::int64_t n_test = 0;
    double observed_overlap = 0.0;  // |A ∩ B| / min(|A|, |B|)
    double expected_overlap = 0.0;  // under independent random errors: max(|A|,|B|) / n_test
    bool undefined = false;         // either error set empty
};

// Overlap between two models' error sets against its expectation under
// independent random errors of the same sizes.
OverlapReport misclassification_overlap(const std::set<std::string>& errors_a,
                                        const std::set<std::string>& errors_b,
                                        std::int64_t n_test);

std::string overlap_report_to_json(const OverlapReport& report);

}  // namespace xclaim
