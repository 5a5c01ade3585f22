#pragma once

// Shared test fixtures: corpora shaped to published dataset statistics,
// label-distribution fixtures, and a scratch-directory guard.

#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "xclaim/corpus.hpp"

namespace fixtures {

// Creates a unique scratch directory under the system temp dir and removes
// it on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() /
                ("xclaim-" + tag + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline xclaim::Document make_doc(std::string id, int n_sentences,
                                 const std::string& date = "2015-09-01",
                                 std::string language = "de", std::string outlet = "taz") {
    xclaim::Document doc;
    doc.id = std::move(id);
    doc.outlet = std::move(outlet);
    doc.date = xclaim::Date::parse(date);
    doc.language = std::move(language);
    for (int i = 0; i < n_sentences; ++i) {
        doc.sentences.push_back("Satz " + std::to_string(i) + " in " + doc.id + ".");
    }
    return doc;
}

// A corpus hitting exact counts: n_docs documents holding n_sentences in
// total, n_spans single-sentence spans carrying n_labels category
// assignments overall (spans get a second category until the label budget
// is used up).
inline xclaim::AnnotatedCorpus shaped_corpus(int n_docs, long n_sentences, int n_spans,
                                             int n_labels, std::string language = "de") {
    xclaim::AnnotatedCorpus corpus;
    corpus.codebook = xclaim::migration_codebook();
    corpus.language = language;

    const long base = n_sentences / n_docs;
    long extra = n_sentences % n_docs;
    for (int d = 0; d < n_docs; ++d) {
        const int len = static_cast<int>(base + (d < extra ? 1 : 0));
        corpus.documents.push_back(
            make_doc("doc-" + std::to_string(10000 + d), len, "2015-09-01", language));
    }

    int two_label_spans = n_labels - n_spans;
    std::vector<int> used(static_cast<std::size_t>(n_docs), 0);
    for (int i = 0; i < n_spans; ++i) {
        const int d = i % n_docs;
        xclaim::ClaimSpan span;
        span.document_id = corpus.documents[static_cast<std::size_t>(d)].id;
        const int n_in_doc =
            static_cast<int>(corpus.documents[static_cast<std::size_t>(d)].sentences.size());
        span.sentence_indices = {used[static_cast<std::size_t>(d)] % n_in_doc};
        ++used[static_cast<std::size_t>(d)];
        span.categories.insert("C1");
        if (two_label_spans > 0) {
            span.categories.insert("C2");
            --two_label_spans;
        }
        corpus.claims.push_back(std::move(span));
    }
    corpus.validate();
    return corpus;
}

// One single-category span per label: exact per-class label counts.
inline xclaim::AnnotatedCorpus distribution_corpus(
    const std::vector<std::pair<std::string, int>>& label_counts) {
    int total = 0;
    for (const auto& [code, count] : label_counts) total += count;

    xclaim::AnnotatedCorpus corpus;
    corpus.codebook = xclaim::migration_codebook();
    corpus.language = "de";
    corpus.documents.push_back(make_doc("dist-doc", total));
    int sentence = 0;
    for (const auto& [code, count] : label_counts) {
        for (int i = 0; i < count; ++i) {
            xclaim::ClaimSpan span;
            span.document_id = "dist-doc";
            span.sentence_indices = {sentence++};
            span.categories.insert(code);
            corpus.claims.push_back(std::move(span));
        }
    }
    corpus.validate();
    return corpus;
}

// Label shares matching the published per-category distributions (rounded
// to integer label counts summing to 100).
inline xclaim::AnnotatedCorpus debatenet_distribution_corpus() {
    return distribution_corpus({{"C1", 22},
                                {"C2", 14},
                                {"C3", 9},
                                {"C4", 3},
                                {"C5", 16},
                                {"C6", 3},
                                {"C7", 17},
                                {"C8", 16}});
}

inline xclaim::AnnotatedCorpus guardian_distribution_corpus() {
    return distribution_corpus({{"C1", 34},
                                {"C2", 2},
                                {"C3", 3},
                                {"C4", 8},
                                {"C5", 11},
                                {"C6", 7},
                                {"C7", 21},
                                {"C8", 14}});
}

// DebateNet-shaped: 700 articles, 16402 sentences, 3442 spans, 4417 labels.
inline xclaim::AnnotatedCorpus debatenet_shaped_corpus() {
    return shaped_corpus(700, 16402, 3442, 4417, "de");
}

// Guardian-shaped: 36 articles, 1347 sentences, 82 spans, 101 labels.
inline xclaim::AnnotatedCorpus guardian_shaped_corpus() {
    return shaped_corpus(36, 1347, 82, 101, "en");
}

}  // namespace fixtures
