#pragma once

// Construction of a target-outlet test set temporally and topically
// compatible with a reference corpus: month frequencies, densest 7-day
// windows, keyword/actor filtering, and seeded sampling.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "xclaim/corpus.hpp"
#include "xclaim/text.hpp"

namespace xclaim {

struct CandidatePool {
    std::vector<Document> documents;  // unannotated
    std::string source;               // outlet
};

struct YearMonth {
    int year = 0;
    unsigned month = 0;

    static YearMonth of(const Date& d) { return {d.year(), d.month()}; }
    std::string str() const;
    auto operator<=>(const YearMonth&) const = default;
};

// Article count per calendar month; months with zero articles are omitted.
std::map<YearMonth, int> month_frequency(const AnnotatedCorpus& corpus);

struct DateWindow {
    Date start;
    Date end;  // inclusive; end = start + window_days - 1

    bool contains(const Date& d) const { return !(d < start) && !(end < d); }
    bool operator==(const DateWindow&) const = default;
};

// The window of `window_days` consecutive days starting within `month` that
// maximizes the reference-corpus article count; ties break to the earliest
// start date. Throws ValidationError when the month has no articles.
DateWindow top_window(const AnnotatedCorpus& corpus, YearMonth month, int window_days = 7);

// Documents matching >= 1 keyword pattern AND >= 1 actor name (conjunctive).
std::vector<Document> filter_articles(const CandidatePool& pool,
                                      const std::vector<std::string>& keywords,
                                      const std::vector<std::string>& actors,
                                      const TextMatcher& matcher = default_matcher());

struct SamplingParams {
    int top_k_months = 5;
    int window_days = 7;
    std::vector<std::string> keywords;
    std::vector<std::string> actors;
    int target_size = 36;
    std::uint64_t seed = 0;
};

struct MonthPlan {
    YearMonth month;
    int reference_count = 0;  // articles in the reference corpus
    DateWindow window;
    int quota = 0;      // proportional share of target_size
    int available = 0;  // eligible pool candidates inside the window
    int sampled = 0;
};

struct SamplingPlan {
    std::vector<MonthPlan> months;  // in selection order (count desc, month asc)
    std::vector<std::string> keywords;
    std::vector<std::string> actors;
    int window_days = 7;
    int target_size = 0;
    std::uint64_t seed = 0;
    bool shortfall = false;  // fewer eligible candidates than target_size
};

struct SampleResult {
    SamplingPlan plan;
    std::vector<Document> documents;
};

// Composes month_frequency -> top-k months -> top_window per month ->
// filter_articles, then samples uniformly without replacement inside each
// window. Per-month quotas are proportional to the reference-month
// frequency (largest-remainder rounding). Seed-deterministic; when windows
// hold fewer eligible candidates than the quota, all of them are returned
// and the shortfall flag is set.
SampleResult sample_test_set(const AnnotatedCorpus& reference, const CandidatePool& pool,
                             const SamplingParams& params,
                             const TextMatcher& matcher = default_matcher());

std::string sampling_plan_to_json(const SamplingPlan& plan);

}  // namespace xclaim
