#pragma once

// Data model for span-annotated claim corpora: documents, claim spans, a
// hierarchical codebook, JSONL ingestion, sentence-example derivation,
// document-level splitting and descriptive statistics.
//
// Corpus values are immutable after construction and safe to share across
// concurrent readers.

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xclaim/errors.hpp"

namespace xclaim {

struct Date {
    std::chrono::year_month_day ymd{};

    static Date parse(const std::string& iso);  // "YYYY-MM-DD", throws ParseError
    static Date from(int year, unsigned month, unsigned day);

    std::string iso() const;
    std::chrono::sys_days days() const { return std::chrono::sys_days{ymd}; }
    Date plus_days(int n) const;
    int year() const { return static_cast<int>(ymd.year()); }
    unsigned month() const { return static_cast<unsigned>(ymd.month()); }
    unsigned day() const { return static_cast<unsigned>(ymd.day()); }

    auto operator<=>(const Date&) const = default;
};

struct Category {
    std::string code;
    std::string label;
    std::optional<std::string> parent;  // unset for top-level categories

    bool top_level() const { return !parent.has_value(); }
    bool operator==(const Category&) const = default;
};

// Hierarchical annotation codebook. Category codes are unique and every
// non-top-level category resolves to exactly one top-level ancestor.
class Codebook {
public:
    Codebook() = default;
    Codebook(std::string name, std::vector<Category> categories);  // validates

    const std::string& name() const { return name_; }
    const std::vector<Category>& categories() const { return categories_; }
    bool contains(const std::string& code) const { return top_of_.contains(code); }

    // Top-level ancestor of a code; identity for top-level codes.
    const std::string& top_level(const std::string& code) const;
    const std::vector<std::string>& top_level_codes() const { return top_codes_; }

    bool operator==(const Codebook& other) const {
        return name_ == other.name_ && categories_ == other.categories_;
    }

private:
    std::string name_;
    std::vector<Category> categories_;
    std::vector<std::string> top_codes_;           // in declaration order
    std::map<std::string, std::string> top_of_;    // code -> top-level ancestor
};

// The 8 top-level migration-policy categories (C1..C8).
Codebook migration_codebook();

enum class Polarity { support, oppose };

struct ClaimSpan {
    std::string document_id;
    std::vector<int> sentence_indices;  // ordered, within the document's range
    std::optional<int> char_start;      // offset within the first touched sentence
    std::optional<int> char_end;        // offset within the last touched sentence
    std::set<std::string> categories;   // empty only for identified-but-uncategorizable claims
    std::optional<std::string> actor;   // stored, not modeled
    std::optional<Polarity> polarity;   // stored, not modeled

    bool uncategorized() const { return categories.empty(); }
    bool operator==(const ClaimSpan&) const = default;
};

struct Document {
    std::string id;
    std::string outlet;
    Date date;
    std::string language;  // ISO tag
    std::vector<std::string> sentences;

    bool operator==(const Document&) const = default;
};

struct AnnotatedCorpus {
    std::vector<Document> documents;
    std::vector<ClaimSpan> claims;
    Codebook codebook;
    std::string language;

    // Index of a document by id; throws ValidationError when absent.
    const Document& document(const std::string& id) const;

    // Checks all referential invariants; throws ValidationError on the first
    // violation. Called by the loaders.
    void validate() const;

    bool operator==(const AnnotatedCorpus&) const = default;
};

struct SentenceExample {
    std::string document_id;
    int sentence_index = 0;
    std::string text;
    bool is_claim = false;
    std::set<std::string> top_categories;  // top-level codes; empty for negatives
                                           // and for uncategorizable claims

    bool operator==(const SentenceExample&) const = default;
};

struct DatasetSplit {
    std::vector<SentenceExample> train;
    std::vector<SentenceExample> dev;
    std::vector<SentenceExample> test;
    std::uint64_t seed = 0;
    std::array<double, 3> ratios{0.8, 0.1, 0.1};
};

struct CorpusStats {
    std::int64_t n_documents = 0;
    std::int64_t n_sentences = 0;
    std::int64_t n_spans = 0;
    std::int64_t n_labels = 0;               // category assignments over spans
    double mean_labels_per_span = 0.0;       // 0 when there are no spans
    double positive_sentence_rate = 0.0;

    bool operator==(const CorpusStats&) const = default;
};

// --- ingestion & serialization -------------------------------------------

// Codebook file: JSON {"name", "categories": [{"code", "label", "parent"?}]}.
Codebook load_codebook(const std::filesystem::path& path);

// Corpus JSONL: one document object per line,
//   {"id", "outlet", "date", "language", "sentences": [...],
//    "claims": [{"sentences": [...], "categories": [...], "actor"?, "polarity"?}]}.
// Malformed records raise ParseError with the line number; dangling
// references raise ValidationError. An empty file yields an empty corpus.
AnnotatedCorpus load_corpus(const std::filesystem::path& path, const Codebook& codebook);

// Inverse of load_corpus; one line per document, keys in sorted order.
std::string corpus_to_jsonl(const AnnotatedCorpus& corpus);
void save_corpus(const AnnotatedCorpus& corpus, const std::filesystem::path& path);

std::string codebook_to_json(const Codebook& codebook);

// --- derived data ----------------------------------------------------------

// One example per sentence. is_claim iff >= 1 span touches the sentence;
// top_categories is the union over touching spans of the top-level ancestors
// of their codes. A span touching k sentences marks all k positive.
std::vector<SentenceExample> derive_sentence_examples(const AnnotatedCorpus& corpus);

// Document-level random assignment: all sentences of a document land in the
// same partition. Document counts follow the ratios by largest-remainder
// rounding (within +-1 document). Deterministic for a fixed seed: document
// ids are sorted lexicographically, then shuffled with the seeded engine.
DatasetSplit split_corpus(const std::vector<SentenceExample>& examples,
                          const std::array<double, 3>& ratios, std::uint64_t seed);

CorpusStats corpus_stats(const AnnotatedCorpus& corpus);

// Percentage of total claim labels per top-level code (labels, not spans);
// codes with zero labels are omitted. Throws ValidationError when the corpus
// carries no claim labels at all.
std::map<std::string, double> category_distribution(const AnnotatedCorpus& corpus);

}  // namespace xclaim
