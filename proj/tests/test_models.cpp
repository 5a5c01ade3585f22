#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "fixtures.hpp"
#include "xclaim/models.hpp"

using namespace xclaim;

namespace {

std::shared_ptr<HashedBowEncoder> bow(int dim = 1024, const std::string& lang = "de") {
    return std::make_shared<HashedBowEncoder>("bow-" + lang, dim, Casing::uncased,
                                              LanguageScope::mono(lang));
}

SentenceExample ex(std::string text, bool is_claim, std::set<std::string> cats = {}) {
    SentenceExample e;
    e.document_id = "d";
    e.sentence_index = 0;
    e.text = std::move(text);
    e.is_claim = is_claim;
    e.top_categories = std::move(cats);
    return e;
}

// filler tokens whose hash bucket avoids the given special tokens
std::vector<std::string> safe_fillers(const HashedBowEncoder& enc, int n,
                                      const std::vector<std::string>& special) {
    std::set<int> reserved;
    for (const auto& s : special) reserved.insert(enc.bucket(s));
    std::vector<std::string> fillers;
    for (int i = 0; fillers.size() < static_cast<std::size_t>(n); ++i) {
        const std::string w = "wort" + std::to_string(i);
        if (!reserved.contains(enc.bucket(w))) fillers.push_back(w);
    }
    return fillers;
}

// linearly separable identification data: positives contain "fordert"
std::pair<std::vector<SentenceExample>, std::vector<SentenceExample>> fordert_data(
    const HashedBowEncoder& enc, int n_per_class, std::uint64_t seed) {
    const auto fillers = safe_fillers(enc, 20, {"fordert"});
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, fillers.size() - 1);
    std::vector<SentenceExample> train, held_out;
    for (int i = 0; i < n_per_class; ++i) {
        for (bool positive : {true, false}) {
            auto make = [&] {
                std::string text = fillers[pick(rng)];
                for (int k = 0; k < 4; ++k) text += " " + fillers[pick(rng)];
                if (positive) text += " fordert";
                text += " " + fillers[pick(rng)] + ".";
                return ex(text, positive);
            };
            train.push_back(make());
            held_out.push_back(make());
        }
    }
    return {train, held_out};
}

TrainConfig quick_config(Task task, std::uint64_t seed = 1) {
    TrainConfig config;
    config.learning_rate = 0.1;
    config.warmup_steps = 10;
    config.epochs = 10;
    config.batch_size = 16;
    config.seed = seed;
    config.task = task;
    return config;
}

double binary_f1(const ClaimModel& model, const std::vector<SentenceExample>& data) {
    std::vector<std::string> sentences;
    std::vector<bool> gold;
    for (const auto& e : data) {
        sentences.push_back(e.text);
        gold.push_back(e.is_claim);
    }
    std::vector<bool> pred;
    for (const auto& [label, score] : predict_binary(model, sentences)) pred.push_back(label);
    return f1_positive(confusion(gold, pred)).f1;
}

}  // namespace

TEST_CASE("hashed bag-of-words encoder") {
    auto enc = bow(256);
    SUBCASE("deterministic fixed-dimension encoding") {
        const auto a = enc->encode("Die Regierung fordert mehr Geld.");
        const auto b = enc->encode("Die Regierung fordert mehr Geld.");
        CHECK(a == b);
        CHECK(a.size() == 256);
    }
    SUBCASE("uncased encoders fold case") {
        CHECK(enc->encode("FORDERT") == enc->encode("fordert"));
        auto cased = std::make_shared<HashedBowEncoder>("bow-cased", 256, Casing::cased,
                                                        LanguageScope::mono("de"));
        CHECK(cased->encode("FORDERT") != cased->encode("fordert"));
    }
    SUBCASE("token counts add up") {
        const auto x = enc->encode("geld geld geld");
        CHECK(x[static_cast<std::size_t>(enc->bucket("geld"))] == 3.0);
    }
}

TEST_CASE("train config validation") {
    TrainConfig config = quick_config(Task::identification);
    CHECK_NOTHROW(config.validate());
    SUBCASE("threshold above 1 is impossible") {
        config.decision_threshold = 1.0 + 1e-9;
        CHECK_THROWS_AS(config.validate(), ConfigError);
    }
    SUBCASE("threshold of exactly 0 or 1 is rejected") {
        config.decision_threshold = 0.0;
        CHECK_THROWS_AS(config.validate(), ConfigError);
        config.decision_threshold = 1.0;
        CHECK_THROWS_AS(config.validate(), ConfigError);
    }
    SUBCASE("learning rate must be positive") {
        config.learning_rate = 0.0;
        CHECK_THROWS_AS(config.validate(), ConfigError);
    }
}

TEST_CASE("binary training on separable data") {
    auto enc = bow();
    auto [train_set, held_out] = fordert_data(*enc, 20, 5);
    const auto config = quick_config(Task::identification);
    auto result = train(train_set, enc, config, held_out);

    SUBCASE("training F1 reaches 1.0 within 10 epochs") {
        CHECK(binary_f1(result.model, train_set) == 1.0);
        CHECK(result.log.epochs.size() == 10);
    }
    SUBCASE("held-out separable sentences are classified perfectly") {
        CHECK(binary_f1(result.model, held_out) == 1.0);
    }
    SUBCASE("selected epoch maximizes the dev score") {
        double best = -1.0;
        for (const auto& e : result.log.epochs) best = std::max(best, e.dev_score);
        REQUIRE(result.log.selected_epoch >= 1);
        const auto& chosen =
            result.log.epochs[static_cast<std::size_t>(result.log.selected_epoch - 1)];
        CHECK(chosen.dev_score == best);
        CHECK(chosen.selected);
    }
    SUBCASE("training log serializes one record per epoch") {
        const auto jsonl = result.log.to_jsonl();
        CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 10);
    }
}

TEST_CASE("training is deterministic for fixed seed") {
    auto enc = bow();
    auto [train_set, dev_set] = fordert_data(*enc, 15, 11);
    const auto config = quick_config(Task::identification, 3);
    const auto a = train(train_set, enc, config, dev_set);
    const auto b = train(train_set, enc, config, dev_set);
    REQUIRE(a.log.epochs.size() == b.log.epochs.size());
    for (std::size_t i = 0; i < a.log.epochs.size(); ++i) {
        CHECK(a.log.epochs[i].loss == b.log.epochs[i].loss);
        CHECK(a.log.epochs[i].dev_score == b.log.epochs[i].dev_score);
    }
    CHECK(a.model.head() == b.model.head());
}

TEST_CASE("degenerate training inputs") {
    auto enc = bow();
    SUBCASE("all-negative data yields a majority model and a warning") {
        std::vector<SentenceExample> data;
        for (int i = 0; i < 10; ++i) data.push_back(ex("nur wort " + std::to_string(i), false));
        const auto result = train(data, enc, quick_config(Task::identification), {});
        CHECK_FALSE(result.log.warnings.empty());
        const auto preds = predict_binary(result.model, {"fordert etwas", "egal was"});
        for (const auto& [label, score] : preds) {
            CHECK_FALSE(label);
            CHECK(score < 0.5);
        }
    }
    SUBCASE("empty dev set selects the last epoch with a warning") {
        auto [train_set, dev_set] = fordert_data(*enc, 10, 2);
        const auto result = train(train_set, enc, quick_config(Task::identification), {});
        CHECK(result.log.selected_epoch == 10);
        bool warned = false;
        for (const auto& w : result.log.warnings) warned = warned || w.find("dev") != std::string::npos;
        CHECK(warned);
    }
    SUBCASE("no training examples is an error") {
        CHECK_THROWS_AS(train({}, enc, quick_config(Task::identification), {}), ValidationError);
    }
    SUBCASE("empty prediction input gives empty output") {
        auto [train_set, dev_set] = fordert_data(*enc, 5, 2);
        const auto result = train(train_set, enc, quick_config(Task::identification), dev_set);
        CHECK(predict_binary(result.model, {}).empty());
    }
}

TEST_CASE("multilabel training on 8 single-category clusters") {
    auto enc = bow();
    std::vector<std::string> labels, cues;
    for (int k = 1; k <= 8; ++k) {
        labels.push_back("C" + std::to_string(k));
        cues.push_back("thema" + std::to_string(k));
    }
    const auto fillers = safe_fillers(*enc, 20, cues);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, fillers.size() - 1);
    std::vector<SentenceExample> train_set, held_out;
    for (int k = 0; k < 8; ++k) {
        for (int i = 0; i < 30; ++i) {
            auto make = [&] {
                std::string text = fillers[pick(rng)] + " " + fillers[pick(rng)] + " " +
                                   cues[static_cast<std::size_t>(k)] + " " + fillers[pick(rng)];
                return ex(text, true, {labels[static_cast<std::size_t>(k)]});
            };
            train_set.push_back(make());
            if (i < 5) held_out.push_back(make());
        }
    }
    auto config = quick_config(Task::categorization);
    config.epochs = 15;
    const auto result = train(train_set, enc, config, held_out, labels);

    SUBCASE("each cluster gets exactly its own category") {
        for (const auto& e : held_out) {
            const auto preds = predict_multilabel(result.model, {e.text});
            CHECK(preds[0].labels == e.top_categories);
        }
    }
    SUBCASE("raising the threshold never adds labels") {
        std::vector<std::string> sentences;
        for (const auto& e : held_out) sentences.push_back(e.text);
        auto with_threshold = [&](double t) {
            TrainConfig c = result.model.config();
            c.decision_threshold = t;
            return ClaimModel(result.model.encoder_ptr(), result.model.head(),
                              result.model.labels(), c);
        };
        const double thresholds[] = {0.1, 0.3, 0.5, 0.7, 0.9};
        for (std::size_t i = 1; i < std::size(thresholds); ++i) {
            const auto lo = predict_multilabel(with_threshold(thresholds[i - 1]), sentences);
            const auto hi = predict_multilabel(with_threshold(thresholds[i]), sentences);
            for (std::size_t s = 0; s < sentences.size(); ++s) {
                for (const auto& label : hi[s].labels) {
                    CHECK(lo[s].labels.contains(label));
                }
            }
        }
    }
    SUBCASE("checkpoints round-trip through disk") {
        fixtures::TempDir dir("ckpt");
        const auto path = dir / "model.json";
        result.model.save(path);
        const auto loaded = ClaimModel::load(path, enc);
        CHECK(loaded.head() == result.model.head());
        CHECK(loaded.labels() == result.model.labels());
        for (const auto& e : held_out) {
            CHECK(predict_multilabel(loaded, {e.text})[0].labels ==
                  predict_multilabel(result.model, {e.text})[0].labels);
        }
    }
    SUBCASE("loading with a mismatched encoder fails") {
        fixtures::TempDir dir("ckpt2");
        const auto path = dir / "model.json";
        result.model.save(path);
        CHECK_THROWS_AS(ClaimModel::load(path, bow(1024, "en")), ConfigError);
    }
}

TEST_CASE("an all-zero head includes every code at threshold 0.5") {
    // sigmoid(0) = 0.5 and inclusion is inclusive (score >= threshold)
    auto enc = bow(64);
    TrainConfig config = quick_config(Task::categorization);
    const std::vector<std::string> labels = {"C1", "C2", "C3"};
    const ClaimModel model(enc, LinearHead::zeros(64, 3), labels, config);
    const auto preds = predict_multilabel(model, {"irgendein satz"});
    CHECK(preds[0].labels == std::set<std::string>{"C1", "C2", "C3"});
    for (double s : preds[0].scores) CHECK(s == 0.5);
}

TEST_CASE("task/prediction mismatches are configuration errors") {
    auto enc = bow(64);
    const ClaimModel binary(enc, LinearHead::zeros(64, 1), {"claim"},
                            quick_config(Task::identification));
    const ClaimModel multi(enc, LinearHead::zeros(64, 3), {"C1", "C2", "C3"},
                           quick_config(Task::categorization));
    CHECK_THROWS_AS(predict_multilabel(binary, {"x"}), ConfigError);
    CHECK_THROWS_AS(predict_binary(multi, {"x"}), ConfigError);
}

TEST_CASE("analytic gradients match central finite differences") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> binary(0, 1);

    const int dim = 12, n_labels = 3, n_examples = 6;
    for (int round = 0; round < 5; ++round) {
        LinearHead head = LinearHead::zeros(dim, n_labels);
        for (auto& w : head.weights) w = normal(rng);
        for (auto& b : head.bias) b = normal(rng);
        std::vector<std::vector<double>> xs, ys;
        for (int n = 0; n < n_examples; ++n) {
            std::vector<double> x(dim), y(n_labels);
            for (auto& v : x) v = normal(rng);
            for (auto& v : y) v = binary(rng);
            xs.push_back(std::move(x));
            ys.push_back(std::move(y));
        }

        std::vector<double> grad_w, grad_b;
        bce_loss_and_grad(head, xs, ys, grad_w, grad_b);

        const double h = 1e-6;
        auto check_param = [&](std::vector<double>& params, std::size_t i, double analytic) {
            const double saved = params[i];
            params[i] = saved + h;
            const double up = bce_loss(head, xs, ys);
            params[i] = saved - h;
            const double down = bce_loss(head, xs, ys);
            params[i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
            CHECK(std::abs(analytic - numeric) / denom <= 1e-5);
        };
        for (std::size_t i = 0; i < head.weights.size(); i += 7) {
            check_param(head.weights, i, grad_w[i]);
        }
        for (std::size_t i = 0; i < head.bias.size(); ++i) {
            check_param(head.bias, i, grad_b[i]);
        }
    }
}
