#include "xclaim/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "xclaim/hash.hpp"
#include "xclaim/text.hpp"

namespace xclaim {

using json = nlohmann::json;

// --- EncoderBackend -------------------------------------------------------------

std::vector<double> EncoderBackend::token_gradient_norms(const std::string&,
                                                         std::span<const double>) const {
    throw CapabilityError("encoder " + id() + " does not expose input gradients");
}

HashedBowEncoder::HashedBowEncoder(std::string id, int dim, Casing casing, LanguageScope scope)
    : id_(std::move(id)), dim_(dim), casing_(casing), scope_(std::move(scope)) {
    if (dim_ < 1) throw ConfigError("encoder dimension must be positive");
}

std::vector<std::string> HashedBowEncoder::tokenize(const std::string& sentence) const {
    auto tokens = xclaim::tokenize(sentence);
    if (casing_ == Casing::uncased) {
        for (auto& t : tokens) t = to_lower(t);
    }
    return tokens;
}

int HashedBowEncoder::bucket(const std::string& token) const {
    const std::string t = casing_ == Casing::uncased ? to_lower(token) : token;
    return static_cast<int>(fnv1a64(t) % static_cast<std::uint64_t>(dim_));
}

std::vector<double> HashedBowEncoder::encode(const std::string& sentence) const {
    std::vector<double> x(static_cast<std::size_t>(dim_), 0.0);
    for (const auto& token : tokenize(sentence)) {
        x[static_cast<std::size_t>(bucket(token))] += 1.0;
    }
    return x;
}

std::vector<double> HashedBowEncoder::token_gradient_norms(
    const std::string& sentence, std::span<const double> grad_encoding) const {
    if (std::cmp_not_equal(grad_encoding.size(), dim_)) {
        throw ValidationError("gradient vector does not match encoder dimension");
    }
    const auto tokens = tokenize(sentence);
    std::vector<double> norms;
    norms.reserve(tokens.size());
    for (const auto& token : tokens) {
        norms.push_back(std::abs(grad_encoding[static_cast<std::size_t>(bucket(token))]));
    }
    return norms;
}

// --- TrainConfig ------------------------------------------------------------------

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (warmup_steps < 0) throw ConfigError("warmup_steps must be >= 0");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(decision_threshold > 0.0 && decision_threshold < 1.0)) {
        throw ConfigError("decision_threshold must lie in (0, 1)");
    }
}

// --- LinearHead --------------------------------------------------------------------

namespace {

double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// numerically stable BCE for logit z and target y in {0,1}
double bce_term(double z, double y) {
    return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

LinearHead LinearHead::zeros(int dim, int n_labels) {
    LinearHead head;
    head.dim = dim;
    head.n_labels = n_labels;
    head.weights.assign(static_cast<std::size_t>(dim) * static_cast<std::size_t>(n_labels), 0.0);
    head.bias.assign(static_cast<std::size_t>(n_labels), 0.0);
    return head;
}

double LinearHead::logit(std::span<const double> x, int label) const {
    const double* w = weights.data() + static_cast<std::size_t>(label) * static_cast<std::size_t>(dim);
    double z = bias[static_cast<std::size_t>(label)];
    for (int i = 0; i < dim; ++i) z += w[i] * x[static_cast<std::size_t>(i)];
    return z;
}

double LinearHead::score(std::span<const double> x, int label) const {
    return sigmoid(logit(x, label));
}

double bce_loss_and_grad(const LinearHead& head, std::span<const std::vector<double>> inputs,
                         std::span<const std::vector<double>> targets,
                         std::vector<double>& grad_weights, std::vector<double>& grad_bias) {
    grad_weights.assign(head.weights.size(), 0.0);
    grad_bias.assign(head.bias.size(), 0.0);
    double loss = 0.0;
    const double scale = 1.0 / (static_cast<double>(inputs.size()) * head.n_labels);
    for (std::size_t n = 0; n < inputs.size(); ++n) {
        const auto& x = inputs[n];
        const auto& y = targets[n];
        for (int c = 0; c < head.n_labels; ++c) {
            const double z = head.logit(x, c);
            loss += bce_term(z, y[static_cast<std::size_t>(c)]);
            const double delta = (sigmoid(z) - y[static_cast<std::size_t>(c)]) * scale;
            double* gw =
                grad_weights.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(head.dim);
            for (int i = 0; i < head.dim; ++i) gw[i] += delta * x[static_cast<std::size_t>(i)];
            grad_bias[static_cast<std::size_t>(c)] += delta;
        }
    }
    return loss * scale;
}

double bce_loss(const LinearHead& head, std::span<const std::vector<double>> inputs,
                std::span<const std::vector<double>> targets) {
    double loss = 0.0;
    for (std::size_t n = 0; n < inputs.size(); ++n) {
        for (int c = 0; c < head.n_labels; ++c) {
            loss += bce_term(head.logit(inputs[n], c), targets[n][static_cast<std::size_t>(c)]);
        }
    }
    return loss / (static_cast<double>(inputs.size()) * head.n_labels);
}

// --- TrainingLog -------------------------------------------------------------------

std::string TrainingLog::to_jsonl() const {
    std::ostringstream out;
    for (const auto& e : epochs) {
        json j;
        j["epoch"] = e.epoch;
        j["loss"] = e.loss;
        j["dev_score"] = e.dev_score;
        j["selected"] = e.selected;
        out << j.dump() << '\n';
    }
    return out.str();
}

// --- ClaimModel --------------------------------------------------------------------

ClaimModel::ClaimModel(std::shared_ptr<const EncoderBackend> encoder, LinearHead head,
                       std::vector<std::string> labels, TrainConfig config)
    : encoder_(std::move(encoder)),
      head_(std::move(head)),
      labels_(std::move(labels)),
      config_(config) {
    id_ = encoder_->id() + "/" + to_string(config_.task) + "/seed" + std::to_string(config_.seed);
}

std::vector<double> ClaimModel::scores(const std::string& sentence) const {
    const auto x = encoder_->encode(sentence);
    std::vector<double> out(labels_.size());
    for (std::size_t c = 0; c < labels_.size(); ++c) {
        out[c] = head_.score(x, static_cast<int>(c));
    }
    return out;
}

void ClaimModel::save(const std::filesystem::path& path) const {
    json j;
    j["format_version"] = 1;
    j["task"] = to_string(config_.task);
    j["labels"] = labels_;
    j["encoder_id"] = encoder_->id();
    j["dim"] = head_.dim;
    j["weights"] = head_.weights;
    j["bias"] = head_.bias;
    j["train_config"] = {{"learning_rate", config_.learning_rate},
                         {"warmup_steps", config_.warmup_steps},
                         {"epochs", config_.epochs},
                         {"batch_size", config_.batch_size},
                         {"seed", config_.seed},
                         {"decision_threshold", config_.decision_threshold}};
    std::ofstream out(path);
    if (!out) throw Error("cannot write checkpoint: " + path.string());
    out << j.dump(2) << '\n';
}

ClaimModel ClaimModel::load(const std::filesystem::path& path,
                            std::shared_ptr<const EncoderBackend> encoder) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open checkpoint: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("checkpoint " + path.string() + ": " + e.what());
    }
    if (j.at("encoder_id").get<std::string>() != encoder->id()) {
        throw ConfigError("checkpoint was trained with encoder '" +
                          j.at("encoder_id").get<std::string>() + "', got '" + encoder->id() +
                          "'");
    }
    LinearHead head;
    head.dim = j.at("dim").get<int>();
    if (head.dim != encoder->dim()) {
        throw ConfigError("checkpoint dimension does not match encoder dimension");
    }
    head.weights = j.at("weights").get<std::vector<double>>();
    head.bias = j.at("bias").get<std::vector<double>>();
    head.n_labels = static_cast<int>(head.bias.size());
    TrainConfig config;
    const auto& tc = j.at("train_config");
    config.learning_rate = tc.at("learning_rate").get<double>();
    config.warmup_steps = tc.at("warmup_steps").get<int>();
    config.epochs = tc.at("epochs").get<int>();
    config.batch_size = tc.at("batch_size").get<int>();
    config.seed = tc.at("seed").get<std::uint64_t>();
    config.decision_threshold = tc.at("decision_threshold").get<double>();
    config.task = task_from_string(j.at("task").get<std::string>());
    return ClaimModel(std::move(encoder), std::move(head),
                      j.at("labels").get<std::vector<std::string>>(), config);
}

// --- training ----------------------------------------------------------------------

namespace {

double clamp_prior(double p) {
    return std::clamp(p, 1e-6, 1.0 - 1e-6);
}

double logit_of(double p) {
    return std::log(p / (1.0 - p));
}

// linear warm-up to learning_rate, then linear decay to zero
double lr_at(const TrainConfig& config, long step, long total_steps) {
    const long warmup = std::min<long>(config.warmup_steps, total_steps);
    if (step <= warmup && warmup > 0) {
        return config.learning_rate * static_cast<double>(step) / static_cast<double>(warmup);
    }
    if (total_steps <= warmup) return config.learning_rate;
    return config.learning_rate * static_cast<double>(total_steps - step) /
           static_cast<double>(total_steps - warmup);
}

double dev_score_of(const ClaimModel& model, const std::vector<SentenceExample>& dev,
                    const std::vector<std::string>& labels) {
    if (dev.empty()) return 0.0;
    std::vector<std::string> sentences;
    sentences.reserve(dev.size());
    for (const auto& ex : dev) sentences.push_back(ex.text);
    if (model.task() == Task::identification) {
        std::vector<bool> gold, pred;
        for (const auto& ex : dev) gold.push_back(ex.is_claim);
        for (const auto& [label, score] : predict_binary(model, sentences)) pred.push_back(label);
        return f1_positive(confusion(gold, pred)).f1;
    }
    std::vector<LabelSet> gold, pred;
    for (const auto& ex : dev) gold.emplace_back(ex.top_categories);
    for (const auto& p : predict_multilabel(model, sentences)) pred.push_back(p.labels);
    return multilabel_report(gold, pred, labels).macro->f1;
}

struct AdamState {
    std::vector<double> m, v;
    long t = 0;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

    void update(std::vector<double>& params, const std::vector<double>& grad, double lr) {
        constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
        ++t;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
            params[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
        }
    }
};

}  // namespace

TrainResult train(const std::vector<SentenceExample>& examples,
                  std::shared_ptr<const EncoderBackend> encoder, const TrainConfig& config,
                  const std::vector<SentenceExample>& dev,
                  const std::vector<std::string>& label_space) {
    config.validate();
    if (examples.empty()) throw ValidationError("train: no training examples");

    std::vector<std::string> labels;
    if (config.task == Task::identification) {
        labels = {"claim"};
    } else {
        if (label_space.empty()) {
            throw ConfigError("train: categorization requires an explicit label space");
        }
        labels = label_space;
    }
    const int n_labels = static_cast<int>(labels.size());

    TrainingLog log;
    log.dev_metric = config.task == Task::identification ? "positive_f1" : "macro_f1";

    // targets as 0/1 indicator rows
    std::vector<std::vector<double>> targets;
    targets.reserve(examples.size());
    for (const auto& ex : examples) {
        std::vector<double> y(static_cast<std::size_t>(n_labels), 0.0);
        if (config.task == Task::identification) {
            y[0] = ex.is_claim ? 1.0 : 0.0;
        } else {
            for (int c = 0; c < n_labels; ++c) {
                if (ex.top_categories.contains(labels[static_cast<std::size_t>(c)])) {
                    y[static_cast<std::size_t>(c)] = 1.0;
                }
            }
        }
        targets.push_back(std::move(y));
    }

    if (config.task == Task::identification) {
        std::size_t positives = 0;
        for (const auto& y : targets) positives += y[0] > 0.5 ? 1 : 0;
        if (positives == 0 || positives == targets.size()) {
            // single-class data: fall back to a majority-class model
            const double prior =
                clamp_prior(static_cast<double>(positives) / static_cast<double>(targets.size()));
            LinearHead head = LinearHead::zeros(encoder->dim(), n_labels);
            head.bias[0] = logit_of(prior);
            log.warnings.push_back(
                "training data contains a single class; returning a majority-class model");
            log.selected_epoch = 0;
            return {ClaimModel(std::move(encoder), std::move(head), labels, config),
                    std::move(log)};
        }
    }

    // encode once; the encoder is deterministic in evaluation mode
    std::vector<std::vector<double>> inputs;
    inputs.reserve(examples.size());
    for (const auto& ex : examples) inputs.push_back(encoder->encode(ex.text));

    LinearHead head = LinearHead::zeros(encoder->dim(), n_labels);
    AdamState adam_w(head.weights.size());
    AdamState adam_b(head.bias.size());

    const long steps_per_epoch =
        static_cast<long>((examples.size() + static_cast<std::size_t>(config.batch_size) - 1) /
                          static_cast<std::size_t>(config.batch_size));
    const long total_steps = steps_per_epoch * config.epochs;

    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(config.seed);

    if (dev.empty()) {
        log.warnings.push_back("empty dev set; selecting last-epoch parameters");
    }

    LinearHead best_head = head;
    double best_score = -1.0;
    int best_epoch = 0;
    long step = 0;
    std::vector<double> grad_w, grad_b;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (long b = 0; b < steps_per_epoch; ++b) {
            const auto begin = static_cast<std::size_t>(b) * static_cast<std::size_t>(config.batch_size);
            const auto end = std::min(begin + static_cast<std::size_t>(config.batch_size),
                                      examples.size());
            std::vector<std::vector<double>> bx, by;
            bx.reserve(end - begin);
            by.reserve(end - begin);
            for (std::size_t k = begin; k < end; ++k) {
                bx.push_back(inputs[order[k]]);
                by.push_back(targets[order[k]]);
            }
            const double loss = bce_loss_and_grad(head, bx, by, grad_w, grad_b);
            epoch_loss += loss * static_cast<double>(end - begin);
            ++step;
            const double lr = lr_at(config, step, total_steps);
            adam_w.update(head.weights, grad_w, lr);
            adam_b.update(head.bias, grad_b, lr);
        }
        epoch_loss /= static_cast<double>(examples.size());

        EpochLogEntry entry;
        entry.epoch = epoch;
        entry.loss = epoch_loss;
        if (!dev.empty()) {
            const ClaimModel probe(encoder, head, labels, config);
            entry.dev_score = dev_score_of(probe, dev, labels);
            if (entry.dev_score > best_score) {
                best_score = entry.dev_score;
                best_head = head;
                best_epoch = epoch;
            }
        }
        log.epochs.push_back(entry);
    }

    if (dev.empty()) {
        best_head = head;
        best_epoch = config.epochs;
    }
    log.selected_epoch = best_epoch;
    for (auto& e : log.epochs) e.selected = e.epoch == best_epoch;

    return {ClaimModel(std::move(encoder), std::move(best_head), labels, config), std::move(log)};
}

// --- prediction --------------------------------------------------------------------

std::vector<std::pair<bool, double>> predict_binary(const ClaimModel& model,
                                                    const std::vector<std::string>& sentences) {
    if (model.task() != Task::identification) {
        throw ConfigError("predict_binary requires an identification model");
    }
    std::vector<std::pair<bool, double>> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) {
        const double score = model.scores(s)[0];
        out.emplace_back(score >= model.config().decision_threshold, score);
    }
    return out;
}

std::vector<MultilabelPrediction> predict_multilabel(const ClaimModel& model,
                                                     const std::vector<std::string>& sentences) {
    if (model.task() != Task::categorization) {
        throw ConfigError("predict_multilabel requires a categorization model");
    }
    std::vector<MultilabelPrediction> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) {
        MultilabelPrediction p;
        p.scores = model.scores(s);
        for (std::size_t c = 0; c < p.scores.size(); ++c) {
            if (p.scores[c] >= model.config().decision_threshold) {
                p.labels.insert(model.labels()[c]);
            }
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace xclaim
