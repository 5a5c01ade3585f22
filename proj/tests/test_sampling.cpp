#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "xclaim/sampling.hpp"

using namespace xclaim;

namespace {

AnnotatedCorpus corpus_on_dates(const std::vector<std::string>& dates) {
    AnnotatedCorpus corpus;
    corpus.codebook = migration_codebook();
    corpus.language = "de";
    int i = 0;
    for (const auto& date : dates) {
        corpus.documents.push_back(fixtures::make_doc("d" + std::to_string(i++), 1, date));
    }
    return corpus;
}

Document pool_doc(const std::string& id, const std::string& date,
                  const std::vector<std::string>& tokens) {
    Document doc;
    doc.id = id;
    doc.outlet = "guardian";
    doc.date = Date::parse(date);
    doc.language = "en";
    std::string text;
    for (const auto& t : tokens) {
        text += t;
        text += ' ';
    }
    doc.sentences.push_back(text);
    return doc;
}

}  // namespace

TEST_CASE("month frequency") {
    SUBCASE("counts per month, zero months omitted") {
        const auto corpus =
            corpus_on_dates({"2015-09-01", "2015-09-11", "2015-09-21", "2015-10-02"});
        const auto freq = month_frequency(corpus);
        REQUIRE(freq.size() == 2);
        CHECK(freq.at({2015, 9}) == 3);
        CHECK(freq.at({2015, 10}) == 1);
    }
    SUBCASE("empty corpus yields an empty mapping") {
        AnnotatedCorpus corpus;
        corpus.codebook = migration_codebook();
        CHECK(month_frequency(corpus).empty());
    }
}

TEST_CASE("top 7-day window") {
    SUBCASE("articles on days 1,2,3 put the window at day 1") {
        const auto corpus = corpus_on_dates({"2015-09-01", "2015-09-02", "2015-09-03"});
        const auto window = top_window(corpus, {2015, 9});
        CHECK(window.start == Date::parse("2015-09-01"));
        CHECK(window.end == Date::parse("2015-09-07"));
    }
    SUBCASE("ties break to the earliest start") {
        const auto corpus = corpus_on_dates({"2015-09-01", "2015-09-20"});
        const auto window = top_window(corpus, {2015, 9});
        CHECK(window.start == Date::parse("2015-09-01"));
    }
    SUBCASE("absent month is an error") {
        const auto corpus = corpus_on_dates({"2015-09-01"});
        CHECK_THROWS_AS(top_window(corpus, {2015, 10}), ValidationError);
    }
    SUBCASE("matches brute force on random date sets") {
        std::mt19937 rng(99);
        std::uniform_int_distribution<unsigned> day(1, 30);
        for (int round = 0; round < 50; ++round) {
            std::vector<std::string> dates;
            for (int i = 0; i < 30; ++i) {
                dates.push_back(Date::from(2015, 9, day(rng)).iso());
            }
            const auto corpus = corpus_on_dates(dates);
            const auto window = top_window(corpus, {2015, 9}, 7);

            // brute force on raw day numbers
            int best_count = -1;
            unsigned best_start = 0;
            for (unsigned start = 1; start <= 30; ++start) {
                int count = 0;
                for (const auto& doc : corpus.documents) {
                    const unsigned d = doc.date.day();
                    if (d >= start && d <= start + 6) ++count;
                }
                if (count > best_count) {
                    best_count = count;
                    best_start = start;
                }
            }
            CHECK(window.start == Date::from(2015, 9, best_start));
        }
    }
    SUBCASE("invariant under permutation of the document list") {
        std::vector<std::string> dates = {"2015-09-03", "2015-09-15", "2015-09-16",
                                          "2015-09-17", "2015-09-28", "2015-09-04"};
        const auto base = top_window(corpus_on_dates(dates), {2015, 9});
        std::mt19937 rng(5);
        for (int round = 0; round < 10; ++round) {
            std::shuffle(dates.begin(), dates.end(), rng);
            CHECK(top_window(corpus_on_dates(dates), {2015, 9}) == base);
        }
    }
}

TEST_CASE("keyword and actor filtering") {
    const std::vector<std::string> keywords = {"migrant", "refugee", "asylum"};
    const std::vector<std::string> actors = {"Merkel", "Seehofer"};

    SUBCASE("keyword and actor together retain the document") {
        CandidatePool pool;
        pool.documents.push_back(
            pool_doc("a", "2015-09-01", {"refugees", "welcomed", "by", "Merkel"}));
        CHECK(filter_articles(pool, keywords, actors).size() == 1);
    }
    SUBCASE("keyword without any actor drops the document") {
        CandidatePool pool;
        pool.documents.push_back(pool_doc("a", "2015-09-01", {"refugees", "at", "the", "border"}));
        CHECK(filter_articles(pool, keywords, actors).empty());
    }
    SUBCASE("matching is case-insensitive with prefix-stem semantics") {
        CandidatePool pool;
        pool.documents.push_back(pool_doc("a", "2015-09-01", {"Asylum-seekers", "and", "MERKEL"}));
        pool.documents.push_back(pool_doc("b", "2015-09-01", {"unrelated", "words", "Merkel"}));
        const auto kept = filter_articles(pool, keywords, actors);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0].id == "a");
    }
    SUBCASE("equals a set-intersection oracle on planted inventories") {
        std::mt19937 rng(17);
        std::bernoulli_distribution has_keyword(0.5), has_actor(0.5);
        CandidatePool pool;
        std::set<std::string> with_keyword, with_actor;
        for (int i = 0; i < 20; ++i) {
            std::vector<std::string> tokens = {"filler" + std::to_string(i), "text"};
            const std::string id = "doc" + std::to_string(i);
            if (has_keyword(rng)) {
                tokens.push_back("refugees");
                with_keyword.insert(id);
            }
            if (has_actor(rng)) {
                tokens.push_back("Seehofer");
                with_actor.insert(id);
            }
            pool.documents.push_back(pool_doc(id, "2015-09-01", tokens));
        }
        std::set<std::string> expected;
        std::set_intersection(with_keyword.begin(), with_keyword.end(), with_actor.begin(),
                              with_actor.end(), std::inserter(expected, expected.begin()));
        std::set<std::string> got;
        for (const auto& doc : filter_articles(pool, keywords, actors)) got.insert(doc.id);
        CHECK(got == expected);
    }
    SUBCASE("removing a keyword never grows the retained set; adding an actor never shrinks it") {
        std::mt19937 rng(29);
        std::uniform_int_distribution<int> pick(0, 4);
        const std::vector<std::string> vocab = {"migrants", "asylum", "Merkel", "Seehofer",
                                                "weather"};
        CandidatePool pool;
        for (int i = 0; i < 30; ++i) {
            std::vector<std::string> tokens;
            for (int k = 0; k < 4; ++k) tokens.push_back(vocab[static_cast<std::size_t>(pick(rng))]);
            pool.documents.push_back(pool_doc("d" + std::to_string(i), "2015-09-01", tokens));
        }
        const auto full = filter_articles(pool, keywords, actors).size();
        const auto fewer_keywords =
            filter_articles(pool, {"migrant"}, actors).size();
        CHECK(fewer_keywords <= full);
        auto more_actors = actors;
        more_actors.push_back("weather");
        CHECK(filter_articles(pool, keywords, more_actors).size() >= full);
    }
}

TEST_CASE("compatible test-set sampling") {
    // reference months: Jan..Jun 2015 with frequencies 10, 8, 6, 4, 2, 1;
    // each month's articles sit on days 10-12, so the top window is [6, 12]
    const std::vector<int> freqs = {10, 8, 6, 4, 2, 1};
    std::vector<std::string> ref_dates;
    for (int m = 1; m <= 6; ++m) {
        for (int i = 0; i < freqs[static_cast<std::size_t>(m - 1)]; ++i) {
            ref_dates.push_back(Date::from(2015, static_cast<unsigned>(m),
                                           static_cast<unsigned>(10 + i % 3))
                                    .iso());
        }
    }
    const auto reference = corpus_on_dates(ref_dates);

    SamplingParams params;
    params.keywords = {"refugee"};
    params.actors = {"Merkel"};
    params.target_size = 15;
    params.seed = 4;

    auto eligible_doc = [](const std::string& id, const std::string& date) {
        return pool_doc(id, date, {"refugees", "and", "Merkel"});
    };

    SUBCASE("quotas are proportional to reference frequencies and windows are correct") {
        CandidatePool pool;
        pool.source = "guardian";
        int n = 0;
        for (int m = 1; m <= 5; ++m) {
            for (int i = 0; i < 40; ++i) {  // plenty of candidates, days 6..12
                pool.documents.push_back(eligible_doc(
                    "p" + std::to_string(n++),
                    Date::from(2015, static_cast<unsigned>(m), static_cast<unsigned>(6 + i % 7))
                        .iso()));
            }
        }
        const auto result = sample_test_set(reference, pool, params);
        REQUIRE(result.plan.months.size() == 5);
        CHECK_FALSE(result.plan.shortfall);
        CHECK(result.documents.size() == 15);
        // expected quotas: 15 * (10,8,6,4,2)/30 = (5,4,3,2,1)
        const std::vector<int> expected = {5, 4, 3, 2, 1};
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(result.plan.months[i].quota == expected[i]);
            CHECK(result.plan.months[i].sampled == expected[i]);
            CHECK(result.plan.months[i].window.start.day() == 6);
            CHECK(result.plan.months[i].window.end.day() == 12);
        }
    }
    SUBCASE("a pool with exactly the eligible target is returned whole") {
        CandidatePool pool;
        int n = 0;
        const std::vector<int> quota = {5, 4, 3, 2, 1};
        for (int m = 1; m <= 5; ++m) {
            for (int i = 0; i < quota[static_cast<std::size_t>(m - 1)]; ++i) {
                pool.documents.push_back(eligible_doc(
                    "p" + std::to_string(n++),
                    Date::from(2015, static_cast<unsigned>(m), static_cast<unsigned>(7 + i)).iso()));
            }
        }
        const auto result = sample_test_set(reference, pool, params);
        CHECK(result.documents.size() == 15);
        CHECK_FALSE(result.plan.shortfall);
        std::set<std::string> got;
        for (const auto& doc : result.documents) got.insert(doc.id);
        CHECK(got.size() == 15);
    }
    SUBCASE("same seed reproduces the sample; the plan records the draw") {
        CandidatePool pool;
        int n = 0;
        for (int m = 1; m <= 5; ++m) {
            for (int i = 0; i < 20; ++i) {
                pool.documents.push_back(eligible_doc(
                    "p" + std::to_string(n++),
                    Date::from(2015, static_cast<unsigned>(m), static_cast<unsigned>(6 + i % 7))
                        .iso()));
            }
        }
        const auto a = sample_test_set(reference, pool, params);
        const auto b = sample_test_set(reference, pool, params);
        REQUIRE(a.documents.size() == b.documents.size());
        for (std::size_t i = 0; i < a.documents.size(); ++i) {
            CHECK(a.documents[i].id == b.documents[i].id);
        }
        auto other = params;
        other.seed = 5;
        const auto c = sample_test_set(reference, pool, other);
        CHECK(c.documents.size() == a.documents.size());  // size is seed-independent
    }
    SUBCASE("insufficient candidates return everything available with a shortfall flag") {
        CandidatePool pool;
        pool.documents.push_back(eligible_doc("only", "2015-01-08"));
        pool.documents.push_back(eligible_doc("other", "2015-02-09"));
        // a keyword match without an actor stays out
        pool.documents.push_back(pool_doc("no-actor", "2015-01-09", {"refugees"}));
        const auto result = sample_test_set(reference, pool, params);
        CHECK(result.plan.shortfall);
        CHECK(result.documents.size() == 2);
    }
    SUBCASE("sampled set equals brute-force eligibility when capped by availability") {
        // 200 candidates; only those with both tokens inside a top window count
        std::mt19937 rng(31);
        std::bernoulli_distribution in_window(0.5), eligible(0.6);
        CandidatePool pool;
        std::set<std::string> expected_pool;
        for (int i = 0; i < 200; ++i) {
            const int m = 1 + i % 6;  // June is never a top-5 month
            const unsigned day = in_window(rng) ? 8u : 20u;
            const std::string id = "p" + std::to_string(i);
            const std::string date =
                Date::from(2015, static_cast<unsigned>(m), day).iso();
            if (eligible(rng)) {
                pool.documents.push_back(eligible_doc(id, date));
                if (m <= 5 && day >= 6 && day <= 12) expected_pool.insert(id);
            } else {
                pool.documents.push_back(pool_doc(id, date, {"refugees", "only"}));
            }
        }
        auto big = params;
        big.target_size = 1000;  // force quota > availability everywhere
        const auto result = sample_test_set(reference, pool, big);
        CHECK(result.plan.shortfall);
        std::set<std::string> got;
        for (const auto& doc : result.documents) got.insert(doc.id);
        CHECK(got == expected_pool);
    }
}

TEST_CASE("tied month counts select the earlier months") {
    // 12 months, one article each: the top-5 selection must be Jan..May
    std::vector<std::string> dates;
    for (int m = 1; m <= 12; ++m) {
        dates.push_back(Date::from(2015, static_cast<unsigned>(m), 10).iso());
    }
    const auto reference = corpus_on_dates(dates);
    CandidatePool pool;
    for (int m = 1; m <= 12; ++m) {
        pool.documents.push_back(pool_doc("p" + std::to_string(m),
                                          Date::from(2015, static_cast<unsigned>(m), 10).iso(),
                                          {"refugees", "Merkel"}));
    }
    SamplingParams params;
    params.keywords = {"refugee"};
    params.actors = {"Merkel"};
    params.target_size = 5;
    const auto result = sample_test_set(reference, pool, params);
    REQUIRE(result.plan.months.size() == 5);
    for (int m = 1; m <= 5; ++m) {
        CHECK(result.plan.months[static_cast<std::size_t>(m - 1)].month ==
              YearMonth{2015, static_cast<unsigned>(m)});
    }
}
