#pragma once

// Sentence encoders behind a backend contract, plus training and inference
// for the binary claim identifier and the 8-way multi-label categorizer.
// The classification head is a per-label logistic layer trained with an
// adaptive-moment optimizer under linear warm-up followed by linear decay.
//
// Trained models are immutable and safe for concurrent inference; training
// itself is a single logical thread of control per run.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "xclaim/corpus.hpp"
#include "xclaim/evaluation.hpp"

namespace xclaim {

enum class Casing { cased, uncased };

struct LanguageScope {
    bool multilingual = false;
    std::string language;  // empty when multilingual

    static LanguageScope mono(std::string lang) { return {false, std::move(lang)}; }
    static LanguageScope any() { return {true, ""}; }
    std::string str() const { return multilingual ? "multilingual" : "mono:" + language; }
};

class EncoderBackend {
public:
    virtual ~EncoderBackend() = default;

    virtual std::string id() const = 0;
    virtual int dim() const = 0;
    virtual Casing casing() const = 0;
    virtual LanguageScope scope() const = 0;
    virtual bool trainable() const = 0;  // false: frozen feature extractor

    virtual std::vector<std::string> tokenize(const std::string& sentence) const = 0;

    // Deterministic sentence representation in R^dim (evaluation mode).
    virtual std::vector<double> encode(const std::string& sentence) const = 0;

    // Gradient access for saliency: per-token Euclidean norm of
    // d(score)/d(token input), given d(score)/d(sentence encoding).
    // Backends without gradient access throw CapabilityError.
    virtual bool differentiable() const { return false; }
    virtual std::vector<double> token_gradient_norms(const std::string& sentence,
                                                     std::span<const double> grad_encoding) const;
};

// Deterministic hashed bag-of-words encoder: each token is bucketed by
// FNV-1a modulo dim and the sentence representation is the bucket count
// vector. A token's input is the unit intensity on its bucket, so the
// per-token gradient norm is |grad_encoding[bucket(token)]|.
class HashedBowEncoder final : public EncoderBackend {
public:
    HashedBowEncoder(std::string id, int dim, Casing casing, LanguageScope scope);

    std::string id() const override { return id_; }
    int dim() const override { return dim_; }
    Casing casing() const override { return casing_; }
    LanguageScope scope() const override { return scope_; }
    bool trainable() const override { return false; }

    std::vector<std::string> tokenize(const std::string& sentence) const override;
    std::vector<double> encode(const std::string& sentence) const override;

    bool differentiable() const override { return true; }
    std::vector<double> token_gradient_norms(const std::string& sentence,
                                             std::span<const double> grad_encoding) const override;

    int bucket(const std::string& token) const;

private:
    std::string id_;
    int dim_;
    Casing casing_;
    LanguageScope scope_;
};

struct TrainConfig {
    double learning_rate = 5e-5;
    int warmup_steps = 30;
    int epochs = 10;
    int batch_size = 16;
    std::uint64_t seed = 0;
    Task task = Task::identification;
    double decision_threshold = 0.5;  // inclusive >= on sigmoid scores

    void validate() const;  // throws ConfigError
    bool operator==(const TrainConfig&) const = default;
};

// Per-label logistic layer; weights are row-major (n_labels x dim).
struct LinearHead {
    int dim = 0;
    int n_labels = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    static LinearHead zeros(int dim, int n_labels);

    double logit(std::span<const double> x, int label) const;
    double score(std::span<const double> x, int label) const;  // sigmoid(logit)
    bool operator==(const LinearHead&) const = default;
};

// Mean binary cross-entropy over (examples x labels) and its analytic
// gradients; targets are 0/1 indicators per label.
double bce_loss_and_grad(const LinearHead& head, std::span<const std::vector<double>> inputs,
                         std::span<const std::vector<double>> targets,
                         std::vector<double>& grad_weights, std::vector<double>& grad_bias);
double bce_loss(const LinearHead& head, std::span<const std::vector<double>> inputs,
                std::span<const std::vector<double>> targets);

struct EpochLogEntry {
    int epoch = 0;       // 1-based
    double loss = 0.0;   // mean training loss over the epoch
    double dev_score = 0.0;
    bool selected = false;
};

struct TrainingLog {
    std::vector<EpochLogEntry> epochs;
    std::vector<std::string> warnings;
    int selected_epoch = 0;        // 0 = degenerate model, no epoch ran
    std::string dev_metric;        // "positive_f1" or "macro_f1"

    std::string to_jsonl() const;  // one record per epoch
};

// A trained classifier: frozen encoder reference + logistic head. Label
// space is fixed at training time; prediction is a pure function of
// (parameters, input).
class ClaimModel {
public:
    ClaimModel() = default;
    ClaimModel(std::shared_ptr<const EncoderBackend> encoder, LinearHead head,
               std::vector<std::string> labels, TrainConfig config);

    const std::string& id() const { return id_; }
    Task task() const { return config_.task; }
    const std::vector<std::string>& labels() const { return labels_; }
    const TrainConfig& config() const { return config_; }
    const LinearHead& head() const { return head_; }
    const EncoderBackend& encoder() const { return *encoder_; }
    std::shared_ptr<const EncoderBackend> encoder_ptr() const { return encoder_; }

    // Per-label sigmoid scores for one sentence.
    std::vector<double> scores(const std::string& sentence) const;

    void save(const std::filesystem::path& path) const;
    static ClaimModel load(const std::filesystem::path& path,
                           std::shared_ptr<const EncoderBackend> encoder);

private:
    std::shared_ptr<const EncoderBackend> encoder_;
    LinearHead head_;
    std::vector<std::string> labels_;
    TrainConfig config_;
    std::string id_;
};

struct TrainResult {
    ClaimModel model;
    TrainingLog log;
};

// Trains a head on the examples and returns the parameters with the best
// dev score (positive-class F1 for identification, macro F1 for
// categorization). Deterministic for a fixed (data, config, seed) with a
// deterministic encoder. Degenerate cases: single-class binary data yields
// a majority-class model with a warning; an empty dev set selects the
// last epoch with a warning.
//
// label_space is required for categorization and ignored for
// identification (whose label space is the positive class).
TrainResult train(const std::vector<SentenceExample>& examples,
                  std::shared_ptr<const EncoderBackend> encoder, const TrainConfig& config,
                  const std::vector<SentenceExample>& dev,
                  const std::vector<std::string>& label_space = {});

// label = (score >= decision_threshold); length- and order-preserving.
std::vector<std::pair<bool, double>> predict_binary(const ClaimModel& model,
                                                    const std::vector<std::string>& sentences);

struct MultilabelPrediction {
    std::set<std::string> labels;  // codes with score >= threshold (inclusive)
    std::vector<double> scores;    // per label-space entry
};

std::vector<MultilabelPrediction> predict_multilabel(const ClaimModel& model,
                                                     const std::vector<std::string>& sentences);

}  // namespace xclaim
