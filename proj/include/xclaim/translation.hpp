#pragma once

// Sentence-aligned corpus translation and back-translation behind a
// pluggable machine-translation backend with persistent, content-addressed
// caching. The translation unit is the sentence: the tasks are
// sentence-level and 1:1 alignment must hold, at the cost of lost
// cross-sentence context.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "xclaim/corpus.hpp"

namespace xclaim {

class TranslationBackend {
public:
    virtual ~TranslationBackend() = default;

    virtual std::string id() const = 0;
    virtual bool supports(const std::string& source, const std::string& target) const = 0;

    // Length- and order-preserving batch translation.
    virtual std::vector<std::string> translate(const std::vector<std::string>& texts,
                                               const std::string& source,
                                               const std::string& target) = 0;
};

// Echoes its input; supports every language pair.
class IdentityBackend final : public TranslationBackend {
public:
    std::string id() const override { return "identity"; }
    bool supports(const std::string&, const std::string&) const override { return true; }
    std::vector<std::string> translate(const std::vector<std::string>& texts, const std::string&,
                                       const std::string&) override {
        return texts;
    }
};

// Deterministic word-by-word substitution from per-pair lookup tables.
// Tokens without an entry pass through unchanged; non-word bytes are kept.
class DictionaryBackend final : public TranslationBackend {
public:
    using Table = std::map<std::string, std::string>;

    DictionaryBackend(std::string id,
                      std::map<std::pair<std::string, std::string>, Table> tables);

    std::string id() const override { return id_; }
    bool supports(const std::string& source, const std::string& target) const override;
    std::vector<std::string> translate(const std::vector<std::string>& texts,
                                       const std::string& source,
                                       const std::string& target) override;

private:
    std::string id_;
    std::map<std::pair<std::string, std::string>, Table> tables_;
};

struct HttpBackendConfig {
    std::string id = "http-mt";
    std::string base_url;            // e.g. "http://localhost:8089"
    std::string path = "/translate";
    std::string auth_token_env;      // environment variable holding the bearer token
    int batch_size = 32;
    double requests_per_second = 0;  // 0 = unthrottled
    int max_retries = 3;
    int retry_backoff_ms = 100;      // doubled per attempt
    // supported pairs; empty = accept any pair
    std::vector<std::pair<std::string, std::string>> pairs;
};

// Client for an external translation service. POSTs
// {"source", "target", "texts": [...]} and expects {"translations": [...]}.
// Retries transport failures and 5xx responses with exponential backoff and
// throttles to the configured request rate.
class HttpTranslationBackend final : public TranslationBackend {
public:
    explicit HttpTranslationBackend(HttpBackendConfig config);

    std::string id() const override { return config_.id; }
    bool supports(const std::string& source, const std::string& target) const override;
    std::vector<std::string> translate(const std::vector<std::string>& texts,
                                       const std::string& source,
                                       const std::string& target) override;

private:
    std::vector<std::string> post_batch(const std::vector<std::string>& texts,
                                        const std::string& source, const std::string& target);
    void throttle();

    HttpBackendConfig config_;
    std::mutex throttle_mutex_;
    std::chrono::steady_clock::time_point last_request_{};
};

// Persistent key-value store for translations. Keys are
// (backend id, source lang, target lang, SHA-256 of the source text), so
// switching backends never reuses stale entries. On disk the cache is an
// append-only JSONL ledger; the lookup index is rebuilt from the ledger on
// open. Concurrent readers share; writers are serialized.
class TranslationCache {
public:
    TranslationCache();                                    // in-memory only
    explicit TranslationCache(const std::filesystem::path& dir);

    std::optional<std::string> get(const std::string& backend_id, const std::string& source,
                                   const std::string& target, const std::string& text) const;
    void put(const std::string& backend_id, const std::string& source, const std::string& target,
             const std::string& text, const std::string& translation);

    std::size_t size() const;

private:
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, std::string> index_;
    std::filesystem::path ledger_path_;  // empty for in-memory caches
};

struct TranslateOptions {
    int batch_size = 64;
    int parallelism = 1;  // concurrent backend batches; results keep input order
};

// Translates texts through the cache: the backend sees each distinct uncached
// text at most once; every result is cached. Output matches input length and
// order. Unsupported pairs raise ConfigError.
std::vector<std::string> translate_texts(TranslationBackend& backend,
                                         const std::vector<std::string>& texts,
                                         const std::string& source, const std::string& target,
                                         TranslationCache& cache,
                                         const TranslateOptions& options = {});

// Sentence-by-sentence corpus translation. Document structure, sentence
// counts, claim spans and labels are preserved exactly; only sentence text
// and the language tag change. Character offsets are dropped (no word
// alignment in scope). Backend errors are rethrown with the document id.
AnnotatedCorpus translate_corpus(const AnnotatedCorpus& corpus, TranslationBackend& backend,
                                 const std::string& target, TranslationCache& cache,
                                 const TranslateOptions& options = {});

// source -> pivot -> source; the result is back in the original language.
AnnotatedCorpus back_translate_corpus(const AnnotatedCorpus& corpus, TranslationBackend& backend,
                                      const std::string& pivot, TranslationCache& cache,
                                      const TranslateOptions& options = {});

}  // namespace xclaim
