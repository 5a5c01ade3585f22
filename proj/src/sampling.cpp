#include "xclaim/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

namespace xclaim {

using json = nlohmann::json;

std::string YearMonth::str() const {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%04d-%02u", year, month);
    return buf;
}

std::map<YearMonth, int> month_frequency(const AnnotatedCorpus& corpus) {
    std::map<YearMonth, int> freq;
    for (const auto& doc : corpus.documents) {
        ++freq[YearMonth::of(doc.date)];
    }
    return freq;
}

namespace {

unsigned days_in_month(int year, unsigned month) {
    using namespace std::chrono;
    const year_month_day_last last{std::chrono::year{year} / std::chrono::month{month} / std::chrono::last};
    return static_cast<unsigned>(last.day());
}

}  // namespace

DateWindow top_window(const AnnotatedCorpus& corpus, YearMonth month, int window_days) {
    if (window_days < 1) throw ConfigError("window_days must be positive");

    std::vector<Date> dates;
    bool month_present = false;
    for (const auto& doc : corpus.documents) {
        dates.push_back(doc.date);
        month_present = month_present || YearMonth::of(doc.date) == month;
    }
    if (!month_present) {
        throw ValidationError("top_window: no articles in month " + month.str());
    }

    DateWindow best;
    int best_count = -1;
    const unsigned last_day = days_in_month(month.year, month.month);
    for (unsigned day = 1; day <= last_day; ++day) {
        const Date start = Date::from(month.year, month.month, day);
        const DateWindow window{start, start.plus_days(window_days - 1)};
        int count = 0;
        for (const auto& d : dates) {
            if (window.contains(d)) ++count;
        }
        if (count > best_count) {  // strict: ties keep the earliest start
            best_count = count;
            best = window;
        }
    }
    return best;
}

std::vector<Document> filter_articles(const CandidatePool& pool,
                                      const std::vector<std::string>& keywords,
                                      const std::vector<std::string>& actors,
                                      const TextMatcher& matcher) {
    if (keywords.empty()) throw ConfigError("filter_articles: keyword pattern list is empty");

    std::vector<Document> kept;
    for (const auto& doc : pool.documents) {
        std::string text;
        for (const auto& s : doc.sentences) {
            text += s;
            text += '\n';
        }
        if (matcher.matches_any(text, keywords) && matcher.matches_any(text, actors)) {
            kept.push_back(doc);
        }
    }
    return kept;
}

SampleResult sample_test_set(const AnnotatedCorpus& reference, const CandidatePool& pool,
                             const SamplingParams& params, const TextMatcher& matcher) {
    if (pool.documents.empty()) throw ValidationError("sample_test_set: empty candidate pool");
    const auto freq = month_frequency(reference);
    if (freq.empty()) throw ValidationError("sample_test_set: reference corpus has no documents");

    // top-k months: by count descending, earlier month wins ties
    std::vector<std::pair<YearMonth, int>> months(freq.begin(), freq.end());
    std::sort(months.begin(), months.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (std::cmp_greater(months.size(), params.top_k_months)) {
        months.resize(static_cast<std::size_t>(params.top_k_months));
    }

    SamplingPlan plan;
    plan.keywords = params.keywords;
    plan.actors = params.actors;
    plan.window_days = params.window_days;
    plan.target_size = params.target_size;
    plan.seed = params.seed;

    const auto eligible = filter_articles(pool, params.keywords, params.actors, matcher);

    // quotas proportional to reference-month frequency, largest remainder;
    // remainder ties go to the earlier-selected month
    int total_ref = 0;
    for (const auto& [month, count] : months) total_ref += count;
    std::vector<int> quotas(months.size(), 0);
    {
        int assigned = 0;
        std::vector<std::pair<double, std::size_t>> remainders;
        for (std::size_t i = 0; i < months.size(); ++i) {
            const double share =
                static_cast<double>(params.target_size) * months[i].second / total_ref;
            quotas[i] = static_cast<int>(std::floor(share));
            assigned += quotas[i];
            remainders.emplace_back(-(share - std::floor(share)), i);
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t k = 0; assigned < params.target_size && !remainders.empty(); ++assigned) {
            quotas[remainders[k % remainders.size()].second] += 1;
            ++k;
        }
    }

    SampleResult result;
    std::mt19937_64 rng(params.seed);
    std::vector<bool> taken(eligible.size(), false);

    for (std::size_t i = 0; i < months.size(); ++i) {
        MonthPlan mp;
        mp.month = months[i].first;
        mp.reference_count = months[i].second;
        mp.window = top_window(reference, mp.month, params.window_days);
        mp.quota = quotas[i];

        // candidates inside this window that no earlier month already took,
        // sorted by (date, id) so the draw ignores pool order
        std::vector<std::size_t> candidates;
        for (std::size_t d = 0; d < eligible.size(); ++d) {
            if (!taken[d] && mp.window.contains(eligible[d].date)) candidates.push_back(d);
        }
        std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
            if (eligible[a].date != eligible[b].date) return eligible[a].date < eligible[b].date;
            return eligible[a].id < eligible[b].id;
        });
        mp.available = static_cast<int>(candidates.size());

        std::shuffle(candidates.begin(), candidates.end(), rng);
        const auto take = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(mp.quota));
        std::vector<std::size_t> picked(candidates.begin(), candidates.begin() + take);
        std::sort(picked.begin(), picked.end(), [&](std::size_t a, std::size_t b) {
            if (eligible[a].date != eligible[b].date) return eligible[a].date < eligible[b].date;
            return eligible[a].id < eligible[b].id;
        });
        for (std::size_t d : picked) {
            taken[d] = true;
            result.documents.push_back(eligible[d]);
        }
        mp.sampled = static_cast<int>(take);
        plan.months.push_back(std::move(mp));
    }

    plan.shortfall = std::cmp_less(result.documents.size(), params.target_size);
    result.plan = std::move(plan);
    return result;
}

std::string sampling_plan_to_json(const SamplingPlan& plan) {
    json j;
    j["keywords"] = plan.keywords;
    j["actors"] = plan.actors;
    j["window_days"] = plan.window_days;
    j["target_size"] = plan.target_size;
    j["seed"] = plan.seed;
    j["shortfall"] = plan.shortfall;
    json months = json::array();
    for (const auto& mp : plan.months) {
        json m;
        m["month"] = mp.month.str();
        m["reference_count"] = mp.reference_count;
        m["window_start"] = mp.window.start.iso();
        m["window_end"] = mp.window.end.iso();
        m["quota"] = mp.quota;
        m["available"] = mp.available;
        m["sampled"] = mp.sampled;
        months.push_back(std::move(m));
    }
    j["months"] = std::move(months);
    return j.dump(2);
}

}  // namespace xclaim
