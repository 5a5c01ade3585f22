#include "xclaim/translation.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "xclaim/hash.hpp"
#include "xclaim/text.hpp"

namespace xclaim {

using json = nlohmann::json;

// --- DictionaryBackend --------------------------------------------------------

DictionaryBackend::DictionaryBackend(std::string id,
                                     std::map<std::pair<std::string, std::string>, Table> tables)
    : id_(std::move(id)), tables_(std::move(tables)) {}

bool DictionaryBackend::supports(const std::string& source, const std::string& target) const {
    return tables_.contains({source, target});
}

std::vector<std::string> DictionaryBackend::translate(const std::vector<std::string>& texts,
                                                      const std::string& source,
                                                      const std::string& target) {
    auto it = tables_.find({source, target});
    if (it == tables_.end()) {
        throw ConfigError("dictionary backend " + id_ + " has no table for " + source + "->" +
                          target);
    }
    const Table& table = it->second;

    std::vector<std::string> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        std::string result;
        std::string word;
        auto flush = [&] {
            if (word.empty()) return;
            auto entry = table.find(word);
            result += entry != table.end() ? entry->second : word;
            word.clear();
        };
        for (unsigned char c : text) {
            if (is_word_byte(c)) {
                word.push_back(static_cast<char>(c));
            } else {
                flush();
                result.push_back(static_cast<char>(c));
            }
        }
        flush();
        out.push_back(std::move(result));
    }
    return out;
}

// --- HttpTranslationBackend ----------------------------------------------------

HttpTranslationBackend::HttpTranslationBackend(HttpBackendConfig config)
    : config_(std::move(config)) {
    if (config_.base_url.empty()) throw ConfigError("http backend: base_url is required");
}

bool HttpTranslationBackend::supports(const std::string& source, const std::string& target) const {
    if (config_.pairs.empty()) return true;
    for (const auto& [s, t] : config_.pairs) {
        if (s == source && t == target) return true;
    }
    return false;
}

void HttpTranslationBackend::throttle() {
    if (config_.requests_per_second <= 0) return;
    const auto min_interval =
        std::chrono::duration<double>(1.0 / config_.requests_per_second);
    std::lock_guard lock(throttle_mutex_);
    const auto now = std::chrono::steady_clock::now();
    const auto next_allowed =
        last_request_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(min_interval);
    if (now < next_allowed) std::this_thread::sleep_until(next_allowed);
    last_request_ = std::chrono::steady_clock::now();
}

std::vector<std::string> HttpTranslationBackend::post_batch(const std::vector<std::string>& texts,
                                                            const std::string& source,
                                                            const std::string& target) {
    json body;
    body["source"] = source;
    body["target"] = target;
    body["texts"] = texts;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!config_.auth_token_env.empty()) {
        if (const char* token = std::getenv(config_.auth_token_env.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
    }

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(config_.retry_backoff_ms << (attempt - 1)));
        }
        throttle();
        httplib::Client client(config_.base_url);
        auto res = client.Post(config_.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {  // retryable server error
            last_error = "server error: HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw TransportError("translation service rejected request: HTTP " +
                                 std::to_string(res->status));
        }
        try {
            auto parsed = json::parse(res->body);
            auto translations = parsed.at("translations").get<std::vector<std::string>>();
            if (translations.size() != texts.size()) {
                throw TransportError("translation service returned " +
                                     std::to_string(translations.size()) + " items for " +
                                     std::to_string(texts.size()) + " inputs");
            }
            return translations;
        } catch (const json::exception& e) {
            throw TransportError(std::string("unparseable translation response: ") + e.what());
        }
    }
    throw TransportError("translation request failed after " +
                         std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
}

std::vector<std::string> HttpTranslationBackend::translate(const std::vector<std::string>& texts,
                                                           const std::string& source,
                                                           const std::string& target) {
    std::vector<std::string> out;
    out.reserve(texts.size());
    const auto batch = static_cast<std::size_t>(std::max(1, config_.batch_size));
    for (std::size_t pos = 0; pos < texts.size(); pos += batch) {
        const auto end = std::min(pos + batch, texts.size());
        std::vector<std::string> chunk(texts.begin() + static_cast<std::ptrdiff_t>(pos),
                                       texts.begin() + static_cast<std::ptrdiff_t>(end));
        auto translated = post_batch(chunk, source, target);
        out.insert(out.end(), translated.begin(), translated.end());
    }
    return out;
}

// --- TranslationCache -----------------------------------------------------------

namespace {

std::string cache_key(const std::string& backend_id, const std::string& source,
                      const std::string& target, const std::string& text) {
    return backend_id + '\x1f' + source + '\x1f' + target + '\x1f' + sha256_hex(text);
}

}  // namespace

TranslationCache::TranslationCache() = default;

TranslationCache::TranslationCache(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    ledger_path_ = dir / "ledger.jsonl";
    std::ifstream in(ledger_path_);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("translation cache ledger: " + std::string(e.what()), line_no);
        }
        const std::string key = j.at("backend").get<std::string>() + '\x1f' +
                                j.at("source").get<std::string>() + '\x1f' +
                                j.at("target").get<std::string>() + '\x1f' +
                                j.at("text_sha256").get<std::string>();
        index_[key] = j.at("translation").get<std::string>();
    }
}

std::optional<std::string> TranslationCache::get(const std::string& backend_id,
                                                 const std::string& source,
                                                 const std::string& target,
                                                 const std::string& text) const {
    std::shared_lock lock(mutex_);
    auto it = index_.find(cache_key(backend_id, source, target, text));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void TranslationCache::put(const std::string& backend_id, const std::string& source,
                           const std::string& target, const std::string& text,
                           const std::string& translation) {
    std::unique_lock lock(mutex_);
    const auto [it, inserted] =
        index_.emplace(cache_key(backend_id, source, target, text), translation);
    if (!inserted) return;  // first write wins; entries are immutable
    if (!ledger_path_.empty()) {
        json j;
        j["backend"] = backend_id;
        j["source"] = source;
        j["target"] = target;
        j["text_sha256"] = sha256_hex(text);
        j["translation"] = translation;
        std::ofstream out(ledger_path_, std::ios::app);
        out << j.dump() << '\n';
    }
}

std::size_t TranslationCache::size() const {
    std::shared_lock lock(mutex_);
    return index_.size();
}

// --- translate operations --------------------------------------------------------

std::vector<std::string> translate_texts(TranslationBackend& backend,
                                         const std::vector<std::string>& texts,
                                         const std::string& source, const std::string& target,
                                         TranslationCache& cache, const TranslateOptions& options) {
    if (!backend.supports(source, target)) {
        throw ConfigError("backend " + backend.id() + " does not support " + source + "->" +
                          target);
    }

    // resolve from cache, collecting distinct misses in first-seen order
    std::vector<std::optional<std::string>> resolved(texts.size());
    std::vector<std::string> misses;
    std::unordered_map<std::string, std::size_t> miss_index;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (auto hit = cache.get(backend.id(), source, target, texts[i])) {
            resolved[i] = std::move(hit);
        } else if (!miss_index.contains(texts[i])) {
            miss_index.emplace(texts[i], misses.size());
            misses.push_back(texts[i]);
        }
    }

    if (!misses.empty()) {
        const auto batch = static_cast<std::size_t>(std::max(1, options.batch_size));
        std::vector<std::vector<std::string>> batches;
        for (std::size_t pos = 0; pos < misses.size(); pos += batch) {
            const auto end = std::min(pos + batch, misses.size());
            batches.emplace_back(misses.begin() + static_cast<std::ptrdiff_t>(pos),
                                 misses.begin() + static_cast<std::ptrdiff_t>(end));
        }

        std::vector<std::vector<std::string>> outputs(batches.size());
        if (options.parallelism > 1 && batches.size() > 1) {
            const auto workers =
                std::min<std::size_t>(static_cast<std::size_t>(options.parallelism), batches.size());
            std::vector<std::future<void>> futures;
            std::atomic<std::size_t> next{0};
            for (std::size_t w = 0; w < workers; ++w) {
                futures.push_back(std::async(std::launch::async, [&] {
                    for (std::size_t b = next.fetch_add(1); b < batches.size();
                         b = next.fetch_add(1)) {
                        outputs[b] = backend.translate(batches[b], source, target);
                    }
                }));
            }
            for (auto& f : futures) f.get();
        } else {
            for (std::size_t b = 0; b < batches.size(); ++b) {
                outputs[b] = backend.translate(batches[b], source, target);
            }
        }

        std::vector<std::string> translations;
        translations.reserve(misses.size());
        for (std::size_t b = 0; b < batches.size(); ++b) {
            if (outputs[b].size() != batches[b].size()) {
                throw TransportError("backend " + backend.id() + " returned " +
                                     std::to_string(outputs[b].size()) + " items for a batch of " +
                                     std::to_string(batches[b].size()));
            }
            translations.insert(translations.end(), outputs[b].begin(), outputs[b].end());
        }
        for (std::size_t m = 0; m < misses.size(); ++m) {
            cache.put(backend.id(), source, target, misses[m], translations[m]);
        }
        for (std::size_t i = 0; i < texts.size(); ++i) {
            if (!resolved[i]) resolved[i] = translations[miss_index.at(texts[i])];
        }
    }

    std::vector<std::string> out;
    out.reserve(texts.size());
    for (auto& r : resolved) out.push_back(std::move(*r));
    return out;
}

AnnotatedCorpus translate_corpus(const AnnotatedCorpus& corpus, TranslationBackend& backend,
                                 const std::string& target, TranslationCache& cache,
                                 const TranslateOptions& options) {
    if (corpus.language == target) {
        throw ConfigError("translate_corpus: corpus is already in language '" + target + "'");
    }

    AnnotatedCorpus out;
    out.codebook = corpus.codebook;
    out.language = target;
    out.documents.reserve(corpus.documents.size());
    for (const auto& doc : corpus.documents) {
        Document translated = doc;
        translated.language = target;
        try {
            translated.sentences =
                translate_texts(backend, doc.sentences, corpus.language, target, cache, options);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw TransportError("translating document " + doc.id + " (" +
                                 std::to_string(doc.sentences.size()) +
                                 " sentences): " + e.what());
        }
        out.documents.push_back(std::move(translated));
    }
    out.claims = corpus.claims;
    for (auto& span : out.claims) {  // offsets are not alignable across languages
        span.char_start.reset();
        span.char_end.reset();
    }
    return out;
}

AnnotatedCorpus back_translate_corpus(const AnnotatedCorpus& corpus, TranslationBackend& backend,
                                      const std::string& pivot, TranslationCache& cache,
                                      const TranslateOptions& options) {
    const std::string original = corpus.language;
    auto forward = translate_corpus(corpus, backend, pivot, cache, options);
    return translate_corpus(forward, backend, original, cache, options);
}

}  // namespace xclaim
