#pragma once

// Declarative definition and execution of the experimental grid: the
// monolingual baseline plus the translate-train, translate-test and
// multilingual projection conditions, with multi-seed averaging,
// run-directory persistence and fingerprint-based resumption.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xclaim/corpus.hpp"
#include "xclaim/evaluation.hpp"
#include "xclaim/models.hpp"
#include "xclaim/translation.hpp"

namespace xclaim {

enum class ExperimentCondition { baseline, translate_train, translate_test, multilingual };

std::string to_string(ExperimentCondition c);
ExperimentCondition condition_from_string(const std::string& name);

// How the test corpus for the plan is obtained.
enum class TestRoute {
    source,                       // baseline: the source-language test set
    genuine_target,               // target-language test set (translated from
                                  // source when no genuine one is registered)
    target_translated_to_source,  // genuine target test machine-translated into source
    source_back_translated,       // source test round-tripped source->target->source
};

std::string to_string(TestRoute route);

struct ExperimentConfig {
    std::string name;  // optional; defaults to condition/langs/task
    ExperimentCondition condition = ExperimentCondition::baseline;
    std::string source_lang;
    std::string target_lang;
    Task task = Task::identification;
    // encoder ids by role: "mono:<lang>" and "multilingual"
    std::map<std::string, std::string> encoders;
    TrainConfig train_config;
    int n_runs = 2;  // averages of multiple runs reduce seed variance
    // explicit per-run seeds; when empty, runs use seed, seed+1, ...
    std::vector<std::uint64_t> seeds;
    std::string translation_backend;
    bool simulate_via_backtranslation = false;

    std::vector<std::uint64_t> run_seeds() const;
    std::string display_name() const;
};

struct RoutingPlan {
    ExperimentCondition condition = ExperimentCondition::baseline;
    Task task = Task::identification;
    std::string source_lang;
    std::string target_lang;
    bool translate_training_data = false;  // source -> target before training
    TestRoute test_route = TestRoute::source;
    std::string train_label;  // table labels: "de", "en", "de-en", ...
    std::string test_label;
    std::string encoder_role;
    std::string encoder_id;

    std::string description() const;
};

// Pure data-routing derivation; inconsistent condition/language combinations
// raise ConfigError.
RoutingPlan plan(const ExperimentConfig& config);
std::string plan_to_json(const RoutingPlan& plan);

// Corpora registered by (role, language); role is "train", "dev" or "test".
class CorpusRegistry {
public:
    void put(const std::string& role, const std::string& language, AnnotatedCorpus corpus);
    bool has(const std::string& role, const std::string& language) const;
    const AnnotatedCorpus& get(const std::string& role, const std::string& language) const;

private:
    std::map<std::pair<std::string, std::string>, AnnotatedCorpus> entries_;
};

struct BackendRegistry {
    std::map<std::string, std::shared_ptr<TranslationBackend>> translators;
    std::map<std::string, std::shared_ptr<const EncoderBackend>> encoders;

    std::shared_ptr<TranslationBackend> translator(const std::string& id) const;
    std::shared_ptr<const EncoderBackend> encoder(const std::string& id) const;
};

// Flattened numeric view of a MetricsReport, for fieldwise averaging.
using FieldMap = std::map<std::string, double>;
FieldMap flatten(const MetricsReport& report);
FieldMap mean_fields(const std::vector<FieldMap>& fields);

struct ExperimentResult {
    ExperimentConfig config;
    RoutingPlan routing;
    std::vector<MetricsReport> runs;  // one per seed
    FieldMap mean;                    // fieldwise mean over runs
    std::map<std::string, std::string> fingerprints;  // corpus/config content hashes
    bool loaded_from_cache = false;
    std::vector<std::string> notes;
};

// Executes the plan once per seed: resolves corpora (translating as the
// routing demands), trains, predicts on the test set and computes a
// MetricsReport per run plus the fieldwise mean. With a run directory,
// artifacts (plan, per-run reports, checkpoints, predictions, manifest) are
// persisted and a rerun with matching fingerprints loads the stored result
// instead of training. Categorization evaluates gold claim sentences only;
// claims without a mappable category are excluded from it.
ExperimentResult run(const ExperimentConfig& config, const CorpusRegistry& corpora,
                     const BackendRegistry& backends, TranslationCache& cache,
                     const std::optional<std::filesystem::path>& run_dir = std::nullopt);

std::string result_to_json(const ExperimentResult& result);

struct GridRow {
    std::string setup;
    std::string train;
    std::string test;
    std::optional<double> id_f1;
    std::optional<double> cat_f1;
    bool id_best = false;
    bool cat_best = false;
};

struct GridTable {
    std::vector<GridRow> rows;
};

// Folds results into Setup/Train/Test/Id/Cat rows (grouping the two tasks of
// one setup) and flags the best value per column.
GridTable grid(const std::vector<ExperimentResult>& results);

std::string render_grid_text(const GridTable& table);
std::string render_grid_csv(const GridTable& table);
std::string grid_to_json(const GridTable& table);

}  // namespace xclaim
