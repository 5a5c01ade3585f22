#include "xclaim/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "xclaim/hash.hpp"

namespace xclaim {

using json = nlohmann::json;

std::string to_string(ExperimentCondition c) {
    switch (c) {
        case ExperimentCondition::baseline: return "baseline";
        case ExperimentCondition::translate_train: return "translate-train";
        case ExperimentCondition::translate_test: return "translate-test";
        case ExperimentCondition::multilingual: return "multilingual";
    }
    return "?";
}

ExperimentCondition condition_from_string(const std::string& name) {
    if (name == "baseline") return ExperimentCondition::baseline;
    if (name == "translate-train" || name == "translate_train") {
        return ExperimentCondition::translate_train;
    }
    if (name == "translate-test" || name == "translate_test") {
        return ExperimentCondition::translate_test;
    }
    if (name == "multilingual") return ExperimentCondition::multilingual;
    throw ConfigError("unknown experiment condition: " + name);
}

std::string to_string(TestRoute route) {
    switch (route) {
        case TestRoute::source: return "source";
        case TestRoute::genuine_target: return "genuine-target";
        case TestRoute::target_translated_to_source: return "target-translated-to-source";
        case TestRoute::source_back_translated: return "source-back-translated";
    }
    return "?";
}

std::vector<std::uint64_t> ExperimentConfig::run_seeds() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> out;
    for (int r = 0; r < n_runs; ++r) {
        out.push_back(train_config.seed + static_cast<std::uint64_t>(r));
    }
    return out;
}

std::string ExperimentConfig::display_name() const {
    if (!name.empty()) return name;
    return to_string(condition) + "/" + source_lang + "-" + target_lang + "/" + to_string(task);
}

std::string RoutingPlan::description() const {
    std::ostringstream out;
    out << to_string(condition) << " (" << to_string(task) << "): train on " << train_label;
    if (translate_training_data) {
        out << " (machine-translated " << source_lang << "->" << target_lang << ")";
    }
    out << ", test on " << test_label << " via " << to_string(test_route) << ", encoder "
        << encoder_id << " [" << encoder_role << "]";
    return out.str();
}

RoutingPlan plan(const ExperimentConfig& config) {
    if (config.source_lang.empty() || config.target_lang.empty()) {
        throw ConfigError("experiment requires source and target languages");
    }
    if (config.n_runs < 1 && config.seeds.empty()) {
        throw ConfigError("experiment requires at least one run");
    }

    RoutingPlan p;
    p.condition = config.condition;
    p.task = config.task;
    p.source_lang = config.source_lang;
    p.target_lang = config.target_lang;

    const std::string& s = config.source_lang;
    const std::string& t = config.target_lang;
    switch (config.condition) {
        case ExperimentCondition::baseline:
            if (s != t) {
                throw ConfigError("baseline requires source == target, got " + s + "->" + t);
            }
            p.test_route = TestRoute::source;
            p.train_label = s;
            p.test_label = s;
            p.encoder_role = "mono:" + s;
            break;
        case ExperimentCondition::translate_train:
            if (s == t) {
                throw ConfigError("translate-train requires source != target");
            }
            p.translate_training_data = true;
            p.test_route = TestRoute::genuine_target;
            p.train_label = t;
            p.test_label = t;
            p.encoder_role = "mono:" + t;
            break;
        case ExperimentCondition::translate_test:
            if (s == t) {
                throw ConfigError("translate-test requires source != target");
            }
            p.test_route = config.simulate_via_backtranslation
                               ? TestRoute::source_back_translated
                               : TestRoute::target_translated_to_source;
            p.train_label = s;
            p.test_label = s + "-" + t;
            p.encoder_role = "mono:" + s;
            break;
        case ExperimentCondition::multilingual:
            p.test_route = s == t ? TestRoute::source : TestRoute::genuine_target;
            p.train_label = s;
            p.test_label = t;
            p.encoder_role = "multilingual";
            break;
    }

    auto it = config.encoders.find(p.encoder_role);
    if (it == config.encoders.end()) {
        throw ConfigError("no encoder configured for role '" + p.encoder_role + "'");
    }
    p.encoder_id = it->second;

    const bool needs_mt = p.condition != ExperimentCondition::baseline;
    if (needs_mt && config.translation_backend.empty() &&
        config.condition != ExperimentCondition::multilingual) {
        throw ConfigError("condition " + to_string(config.condition) +
                          " requires a translation backend");
    }
    return p;
}

std::string plan_to_json(const RoutingPlan& p) {
    json j;
    j["condition"] = to_string(p.condition);
    j["task"] = to_string(p.task);
    j["source_lang"] = p.source_lang;
    j["target_lang"] = p.target_lang;
    j["translate_training_data"] = p.translate_training_data;
    j["test_route"] = to_string(p.test_route);
    j["train_label"] = p.train_label;
    j["test_label"] = p.test_label;
    j["encoder_role"] = p.encoder_role;
    j["encoder_id"] = p.encoder_id;
    j["description"] = p.description();
    return j.dump(2);
}

// --- registries -----------------------------------------------------------------

void CorpusRegistry::put(const std::string& role, const std::string& language,
                         AnnotatedCorpus corpus) {
    entries_[{role, language}] = std::move(corpus);
}

bool CorpusRegistry::has(const std::string& role, const std::string& language) const {
    return entries_.contains({role, language});
}

const AnnotatedCorpus& CorpusRegistry::get(const std::string& role,
                                           const std::string& language) const {
    auto it = entries_.find({role, language});
    if (it == entries_.end()) {
        throw ConfigError("no corpus registered for " + role + ":" + language);
    }
    return it->second;
}

std::shared_ptr<TranslationBackend> BackendRegistry::translator(const std::string& id) const {
    auto it = translators.find(id);
    if (it == translators.end()) throw ConfigError("no translation backend with id '" + id + "'");
    return it->second;
}

std::shared_ptr<const EncoderBackend> BackendRegistry::encoder(const std::string& id) const {
    auto it = encoders.find(id);
    if (it == encoders.end()) throw ConfigError("no encoder backend with id '" + id + "'");
    return it->second;
}

// --- report flattening -------------------------------------------------------------

FieldMap flatten(const MetricsReport& report) {
    FieldMap f;
    f["n_instances"] = static_cast<double>(report.n_instances);
    auto put_metrics = [&f](const std::string& prefix, const ClassMetrics& m) {
        f[prefix + ".precision"] = m.precision;
        f[prefix + ".recall"] = m.recall;
        f[prefix + ".f1"] = m.f1;
        f[prefix + ".support"] = static_cast<double>(m.support);
    };
    if (report.positive) put_metrics("positive", *report.positive);
    if (report.macro) put_metrics("macro", *report.macro);
    if (report.micro) put_metrics("micro", *report.micro);
    for (const auto& [label, m] : report.per_class) put_metrics("class." + label, m);
    if (report.confusion) {
        f["confusion.tp"] = static_cast<double>(report.confusion->tp);
        f["confusion.fp"] = static_cast<double>(report.confusion->fp);
        f["confusion.fn"] = static_cast<double>(report.confusion->fn);
        f["confusion.tn"] = static_cast<double>(report.confusion->tn);
    }
    return f;
}

FieldMap mean_fields(const std::vector<FieldMap>& fields) {
    FieldMap mean;
    if (fields.empty()) return mean;
    for (const auto& f : fields) {
        for (const auto& [key, value] : f) mean[key] += value;
    }
    for (auto& [key, value] : mean) value /= static_cast<double>(fields.size());
    return mean;
}

// --- run -----------------------------------------------------------------------------

namespace {

struct ResolvedData {
    std::vector<SentenceExample> train;
    std::vector<SentenceExample> dev;
    std::vector<SentenceExample> test;
    std::vector<std::string> label_space;
    std::map<std::string, std::string> fingerprints;
    std::vector<std::string> notes;
};

std::vector<SentenceExample> task_examples(const AnnotatedCorpus& corpus, Task task) {
    auto examples = derive_sentence_examples(corpus);
    if (task == Task::identification) return examples;
    // categorization: gold claim sentences only; uncategorizable claims are
    // identification-positive but carry no label and are excluded here
    std::vector<SentenceExample> claims;
    for (auto& ex : examples) {
        if (ex.is_claim && !ex.top_categories.empty()) claims.push_back(std::move(ex));
    }
    return claims;
}

ResolvedData resolve_data(const ExperimentConfig& config, const RoutingPlan& routing,
                          const CorpusRegistry& corpora, const BackendRegistry& backends,
                          TranslationCache& cache) {
    ResolvedData data;
    const std::string& s = config.source_lang;
    const std::string& t = config.target_lang;

    std::shared_ptr<TranslationBackend> mt;
    if (!config.translation_backend.empty()) {
        mt = backends.translator(config.translation_backend);
    }
    auto need_mt = [&]() -> TranslationBackend& {
        if (!mt) throw ConfigError("routing requires a translation backend");
        return *mt;
    };

    AnnotatedCorpus train_corpus = corpora.get("train", s);
    AnnotatedCorpus dev_corpus;
    const bool have_dev = corpora.has("dev", s);
    if (have_dev) dev_corpus = corpora.get("dev", s);
    if (routing.translate_training_data) {
        train_corpus = translate_corpus(train_corpus, need_mt(), t, cache);
        if (have_dev) dev_corpus = translate_corpus(dev_corpus, need_mt(), t, cache);
    }

    AnnotatedCorpus test_corpus;
    switch (routing.test_route) {
        case TestRoute::source:
            test_corpus = corpora.get("test", s);
            break;
        case TestRoute::genuine_target:
            if (corpora.has("test", t)) {
                test_corpus = corpora.get("test", t);
            } else {
                // no genuine target-language gold: simulate by translating the
                // source test set
                test_corpus = translate_corpus(corpora.get("test", s), need_mt(), t, cache);
                data.notes.push_back("no genuine test:" + t +
                                     " registered; simulated via machine translation");
            }
            break;
        case TestRoute::target_translated_to_source:
            test_corpus = translate_corpus(corpora.get("test", t), need_mt(), s, cache);
            break;
        case TestRoute::source_back_translated:
            test_corpus = back_translate_corpus(corpora.get("test", s), need_mt(), t, cache);
            break;
    }

    data.fingerprints["train"] = sha256_hex(corpus_to_jsonl(train_corpus));
    if (have_dev) data.fingerprints["dev"] = sha256_hex(corpus_to_jsonl(dev_corpus));
    data.fingerprints["test"] = sha256_hex(corpus_to_jsonl(test_corpus));

    data.label_space = train_corpus.codebook.top_level_codes();
    data.train = task_examples(train_corpus, config.task);
    if (have_dev) data.dev = task_examples(dev_corpus, config.task);
    data.test = task_examples(test_corpus, config.task);
    return data;
}

MetricsReport evaluate_run(const ClaimModel& model, const std::vector<SentenceExample>& test,
                           const std::vector<std::string>& label_space) {
    std::vector<std::string> sentences;
    sentences.reserve(test.size());
    for (const auto& ex : test) sentences.push_back(ex.text);

    MetricsReport report;
    if (model.task() == Task::identification) {
        std::vector<bool> gold, pred;
        for (const auto& ex : test) gold.push_back(ex.is_claim);
        for (const auto& [label, score] : predict_binary(model, sentences)) pred.push_back(label);
        report.task = Task::identification;
        report.confusion = confusion(gold, pred);
        report.positive = f1_positive(*report.confusion);
        report.n_instances = static_cast<std::int64_t>(test.size());
    } else {
        std::vector<LabelSet> gold, pred;
        for (const auto& ex : test) gold.emplace_back(ex.top_categories);
        for (const auto& p : predict_multilabel(model, sentences)) pred.push_back(p.labels);
        report = multilabel_report(gold, pred, label_space);
    }
    return report;
}

json config_to_json(const ExperimentConfig& config) {
    json j;
    j["name"] = config.display_name();
    j["condition"] = to_string(config.condition);
    j["source_lang"] = config.source_lang;
    j["target_lang"] = config.target_lang;
    j["task"] = to_string(config.task);
    j["encoders"] = config.encoders;
    j["n_runs"] = config.n_runs;
    j["seeds"] = config.run_seeds();
    j["translation_backend"] = config.translation_backend;
    j["simulate_via_backtranslation"] = config.simulate_via_backtranslation;
    j["train_config"] = {{"learning_rate", config.train_config.learning_rate},
                         {"warmup_steps", config.train_config.warmup_steps},
                         {"epochs", config.train_config.epochs},
                         {"batch_size", config.train_config.batch_size},
                         {"seed", config.train_config.seed},
                         {"task", to_string(config.train_config.task)},
                         {"decision_threshold", config.train_config.decision_threshold}};
    return j;
}

json report_to_json_obj(const MetricsReport& report) {
    json j;
    j["task"] = to_string(report.task);
    j["n_instances"] = report.n_instances;
    auto metrics_json = [](const ClassMetrics& m) {
        return json{{"precision", m.precision},
                    {"recall", m.recall},
                    {"f1", m.f1},
                    {"support", m.support},
                    {"zero_division", m.zero_division}};
    };
    if (report.positive) j["positive"] = metrics_json(*report.positive);
    if (report.confusion) {
        j["confusion"] = {{"tp", report.confusion->tp},
                          {"fp", report.confusion->fp},
                          {"fn", report.confusion->fn},
                          {"tn", report.confusion->tn}};
    }
    if (!report.per_class.empty()) {
        json per_class = json::array();
        for (const auto& [label, m] : report.per_class) {
            json row = metrics_json(m);
            row["label"] = label;
            per_class.push_back(std::move(row));
        }
        j["per_class"] = std::move(per_class);
    }
    if (report.macro) j["macro"] = metrics_json(*report.macro);
    if (report.micro) j["micro"] = metrics_json(*report.micro);
    return j;
}

MetricsReport report_from_json_obj(const json& j) {
    MetricsReport report;
    report.task = task_from_string(j.at("task").get<std::string>());
    report.n_instances = j.at("n_instances").get<std::int64_t>();
    auto metrics_from = [](const json& m) {
        ClassMetrics out;
        out.precision = m.at("precision").get<double>();
        out.recall = m.at("recall").get<double>();
        out.f1 = m.at("f1").get<double>();
        out.support = m.at("support").get<std::int64_t>();
        out.zero_division = m.at("zero_division").get<bool>();
        return out;
    };
    if (j.contains("positive")) report.positive = metrics_from(j.at("positive"));
    if (j.contains("confusion")) {
        ConfusionMatrix cm;
        cm.tp = j.at("confusion").at("tp").get<std::int64_t>();
        cm.fp = j.at("confusion").at("fp").get<std::int64_t>();
        cm.fn = j.at("confusion").at("fn").get<std::int64_t>();
        cm.tn = j.at("confusion").at("tn").get<std::int64_t>();
        report.confusion = cm;
    }
    if (j.contains("per_class")) {
        for (const auto& row : j.at("per_class")) {
            report.per_class.emplace_back(row.at("label").get<std::string>(), metrics_from(row));
        }
    }
    if (j.contains("macro")) report.macro = metrics_from(j.at("macro"));
    if (j.contains("micro")) report.micro = metrics_from(j.at("micro"));
    return report;
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const auto tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

}  // namespace

ExperimentResult run(const ExperimentConfig& config, const CorpusRegistry& corpora,
                     const BackendRegistry& backends, TranslationCache& cache,
                     const std::optional<std::filesystem::path>& run_dir) {
    ExperimentResult result;
    result.config = config;
    result.routing = plan(config);

    ResolvedData data = resolve_data(config, result.routing, corpora, backends, cache);
    result.fingerprints = data.fingerprints;
    result.notes = data.notes;
    result.fingerprints["config"] = sha256_hex(config_to_json(config).dump());

    std::string combined;
    for (const auto& [key, value] : result.fingerprints) combined += key + "=" + value + ";";
    const std::string run_id = sha256_hex(combined).substr(0, 12);

    std::filesystem::path dir;
    if (run_dir) {
        dir = *run_dir / run_id;
        const auto result_path = dir / "result.json";
        if (std::filesystem::exists(result_path)) {
            std::ifstream in(result_path);
            json j;
            in >> j;
            if (j.at("fingerprints").get<std::map<std::string, std::string>>() ==
                result.fingerprints) {
                for (const auto& r : j.at("runs")) result.runs.push_back(report_from_json_obj(r));
                result.mean = j.at("mean").get<FieldMap>();
                result.loaded_from_cache = true;
                return result;
            }
        }
        std::filesystem::create_directories(dir / "checkpoints");
        std::filesystem::create_directories(dir / "predictions");
        std::filesystem::create_directories(dir / "reports");
        std::filesystem::create_directories(dir / "plans");
        std::ofstream(dir / "plans" / "plan.json") << plan_to_json(result.routing) << '\n';
    }

    auto encoder = backends.encoder(result.routing.encoder_id);
    const auto seeds = config.run_seeds();
    std::vector<FieldMap> fields;

    for (std::size_t r = 0; r < seeds.size(); ++r) {
        TrainConfig tc = config.train_config;
        tc.seed = seeds[r];
        tc.task = config.task;
        try {
            auto trained = train(data.train, encoder, tc, data.dev, data.label_space);
            MetricsReport report = evaluate_run(trained.model, data.test, data.label_space);
            if (run_dir) {
                const std::string tag = "run" + std::to_string(r);
                trained.model.save(dir / "checkpoints" / (tag + ".json"));
                std::ofstream(dir / "checkpoints" / (tag + ".log.jsonl")) << trained.log.to_jsonl();
                std::ofstream(dir / "reports" / (tag + ".json"))
                    << report_to_json_obj(report).dump(2) << '\n';
            }
            result.runs.push_back(std::move(report));
            fields.push_back(flatten(result.runs.back()));
        } catch (const std::exception& e) {
            if (run_dir) {
                json failure;
                failure["failed_run"] = r;
                failure["seed"] = seeds[r];
                failure["error"] = e.what();
                failure["completed_runs"] = result.runs.size();
                std::ofstream(dir / "failure.json") << failure.dump(2) << '\n';
            }
            throw;
        }
    }
    result.mean = mean_fields(fields);

    if (run_dir) {
        json manifest;
        manifest["config"] = config_to_json(config);
        manifest["fingerprints"] = result.fingerprints;
        manifest["timestamp"] = iso_timestamp();
        std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';

        json out;
        out["config"] = config_to_json(config);
        out["fingerprints"] = result.fingerprints;
        out["notes"] = result.notes;
        json runs = json::array();
        for (const auto& r : result.runs) runs.push_back(report_to_json_obj(r));
        out["runs"] = std::move(runs);
        out["mean"] = result.mean;
        // written last: a present result.json marks the run complete
        std::ofstream(dir / "result.json") << out.dump(2) << '\n';
        std::filesystem::remove(dir / "failure.json");
    }
    return result;
}

std::string result_to_json(const ExperimentResult& result) {
    json out;
    out["config"] = config_to_json(result.config);
    out["plan"] = json::parse(plan_to_json(result.routing));
    out["fingerprints"] = result.fingerprints;
    out["notes"] = result.notes;
    out["loaded_from_cache"] = result.loaded_from_cache;
    json runs = json::array();
    for (const auto& r : result.runs) runs.push_back(report_to_json_obj(r));
    out["runs"] = std::move(runs);
    out["mean"] = result.mean;
    return out.dump(2);
}

// --- grid ------------------------------------------------------------------------

GridTable grid(const std::vector<ExperimentResult>& results) {
    GridTable table;
    auto row_for = [&table](const std::string& setup, const std::string& train,
                            const std::string& test) -> GridRow& {
        for (auto& row : table.rows) {
            if (row.setup == setup && row.train == train && row.test == test) return row;
        }
        table.rows.push_back(GridRow{setup, train, test, {}, {}, false, false});
        return table.rows.back();
    };

    for (const auto& result : results) {
        const std::string setup = result.routing.condition == ExperimentCondition::baseline
                                      ? "BL (mono)"
                                      : to_string(result.routing.condition);
        GridRow& row = row_for(setup, result.routing.train_label, result.routing.test_label);
        if (result.routing.task == Task::identification) {
            if (auto it = result.mean.find("positive.f1"); it != result.mean.end()) {
                row.id_f1 = it->second;
            }
        } else {
            if (auto it = result.mean.find("macro.f1"); it != result.mean.end()) {
                row.cat_f1 = it->second;
            }
        }
    }

    auto flag_best = [&table](auto member_value, auto member_flag) {
        double best = -1.0;
        for (const auto& row : table.rows) {
            if (row.*member_value && *(row.*member_value) > best) best = *(row.*member_value);
        }
        if (best < 0.0) return;
        for (auto& row : table.rows) {
            if (row.*member_value && *(row.*member_value) == best) row.*member_flag = true;
        }
    };
    flag_best(&GridRow::id_f1, &GridRow::id_best);
    flag_best(&GridRow::cat_f1, &GridRow::cat_best);
    return table;
}

namespace {

std::string format_pct(const std::optional<double>& value, bool best) {
    if (!value) return "-";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.1f%s", *value * 100.0, best ? "*" : "");
    return buf;
}

}  // namespace

std::string render_grid_text(const GridTable& table) {
    std::ostringstream out;
    std::size_t setup_w = 5, train_w = 5, test_w = 4;
    for (const auto& row : table.rows) {
        setup_w = std::max(setup_w, row.setup.size());
        train_w = std::max(train_w, row.train.size());
        test_w = std::max(test_w, row.test.size());
    }
    auto pad = [](const std::string& s, std::size_t w) {
        return s + std::string(w - s.size() + 2, ' ');
    };
    out << pad("Setup", setup_w) << pad("Train", train_w) << pad("Test", test_w) << pad("Id", 6)
        << "Cat\n";
    for (const auto& row : table.rows) {
        out << pad(row.setup, setup_w) << pad(row.train, train_w) << pad(row.test, test_w)
            << pad(format_pct(row.id_f1, row.id_best), 6)
            << format_pct(row.cat_f1, row.cat_best) << "\n";
    }
    return out.str();
}

std::string render_grid_csv(const GridTable& table) {
    std::ostringstream out;
    out << "setup,train,test,id_f1,cat_f1,id_best,cat_best\n";
    for (const auto& row : table.rows) {
        out << row.setup << ',' << row.train << ',' << row.test << ',';
        if (row.id_f1) out << *row.id_f1;
        out << ',';
        if (row.cat_f1) out << *row.cat_f1;
        out << ',' << (row.id_best ? 1 : 0) << ',' << (row.cat_best ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string grid_to_json(const GridTable& table) {
    json rows = json::array();
    for (const auto& row : table.rows) {
        json j;
        j["setup"] = row.setup;
        j["train"] = row.train;
        j["test"] = row.test;
        if (row.id_f1) j["id_f1"] = *row.id_f1;
        if (row.cat_f1) j["cat_f1"] = *row.cat_f1;
        j["id_best"] = row.id_best;
        j["cat_best"] = row.cat_best;
        rows.push_back(std::move(j));
    }
    json out;
    out["rows"] = std::move(rows);
    return out.dump(2);
}

}  // namespace xclaim
