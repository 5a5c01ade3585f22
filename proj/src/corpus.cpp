#include "xclaim/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace xclaim {

using json = nlohmann::json;

// --- Date -------------------------------------------------------------------

Date Date::parse(const std::string& iso) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    if (std::sscanf(iso.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3) {
        throw ParseError("invalid date: '" + iso + "' (expected YYYY-MM-DD)");
    }
    return from(y, m, d);
}

Date Date::from(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) {
        throw ParseError("invalid calendar date: " + std::to_string(year) + "-" +
                         std::to_string(month) + "-" + std::to_string(day));
    }
    return Date{ymd};
}

std::string Date::iso() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year(), month(), day());
    return buf;
}

Date Date::plus_days(int n) const {
    return Date{std::chrono::year_month_day{days() + std::chrono::days{n}}};
}

// --- Codebook ----------------------------------------------------------------

Codebook::Codebook(std::string name, std::vector<Category> categories)
    : name_(std::move(name)), categories_(std::move(categories)) {
    std::map<std::string, const Category*> by_code;
    for (const auto& cat : categories_) {
        if (cat.code.empty()) throw ValidationError("codebook: empty category code");
        if (!by_code.emplace(cat.code, &cat).second) {
            throw ValidationError("codebook: duplicate category code: " + cat.code);
        }
    }
    for (const auto& cat : categories_) {
        // walk parent links to the top; cycles or dangling parents are errors
        const Category* cur = &cat;
        std::size_t hops = 0;
        while (cur->parent.has_value()) {
            auto it = by_code.find(*cur->parent);
            if (it == by_code.end()) {
                throw ValidationError("codebook: category " + cat.code +
                                      " has unknown parent " + *cur->parent);
            }
            cur = it->second;
            if (++hops > categories_.size()) {
                throw ValidationError("codebook: cycle in parents of " + cat.code);
            }
        }
        top_of_[cat.code] = cur->code;
        if (cat.top_level()) top_codes_.push_back(cat.code);
    }
}

const std::string& Codebook::top_level(const std::string& code) const {
    auto it = top_of_.find(code);
    if (it == top_of_.end()) throw ValidationError("codebook: unknown category code: " + code);
    return it->second;
}

Codebook migration_codebook() {
    return Codebook("migration-policy",
                    {{"C1", "Controlling Migration", std::nullopt},
                     {"C2", "Residency", std::nullopt},
                     {"C3", "Integration", std::nullopt},
                     {"C4", "Domestic Security", std::nullopt},
                     {"C5", "Foreign Policy", std::nullopt},
                     {"C6", "Economy + Labour Market", std::nullopt},
                     {"C7", "Society", std::nullopt},
                     {"C8", "Procedures", std::nullopt}});
}

// --- AnnotatedCorpus ----------------------------------------------------------

const Document& AnnotatedCorpus::document(const std::string& id) const {
    for (const auto& doc : documents) {
        if (doc.id == id) return doc;
    }
    throw ValidationError("unknown document id: " + id);
}

void AnnotatedCorpus::validate() const {
    std::unordered_map<std::string, const Document*> docs;
    for (const auto& doc : documents) {
        if (doc.id.empty()) throw ValidationError("document with empty id");
        if (!docs.emplace(doc.id, &doc).second) {
            throw ValidationError("duplicate document id: " + doc.id);
        }
        if (doc.sentences.empty()) {
            throw ValidationError("document " + doc.id + " has no sentences");
        }
    }
    for (const auto& span : claims) {
        auto it = docs.find(span.document_id);
        if (it == docs.end()) {
            throw ValidationError("claim references unknown document: " + span.document_id);
        }
        if (span.sentence_indices.empty()) {
            throw ValidationError("claim in document " + span.document_id +
                                  " touches no sentences");
        }
        const auto n = static_cast<int>(it->second->sentences.size());
        for (int idx : span.sentence_indices) {
            if (idx < 0 || idx >= n) {
                throw ValidationError("claim in document " + span.document_id +
                                      " references sentence " + std::to_string(idx) +
                                      " outside range [0, " + std::to_string(n) + ")");
            }
        }
        if (span.char_start && span.char_end && !(*span.char_start < *span.char_end)) {
            throw ValidationError("claim in document " + span.document_id +
                                  " has char_start >= char_end");
        }
        for (const auto& code : span.categories) {
            if (!codebook.contains(code)) {
                throw ValidationError("claim in document " + span.document_id +
                                      " references unknown category: " + code);
            }
        }
    }
}

// --- JSON (de)serialization ---------------------------------------------------

namespace {

json span_to_json(const ClaimSpan& span) {
    json j;
    j["sentences"] = span.sentence_indices;
    j["categories"] = std::vector<std::string>(span.categories.begin(), span.categories.end());
    if (span.char_start) j["char_start"] = *span.char_start;
    if (span.char_end) j["char_end"] = *span.char_end;
    if (span.actor) j["actor"] = *span.actor;
    if (span.polarity) j["polarity"] = *span.polarity == Polarity::support ? "support" : "oppose";
    return j;
}

ClaimSpan span_from_json(const json& j, const std::string& document_id) {
    ClaimSpan span;
    span.document_id = document_id;
    span.sentence_indices = j.at("sentences").get<std::vector<int>>();
    for (const auto& code : j.at("categories")) {
        span.categories.insert(code.get<std::string>());
    }
    if (j.contains("char_start")) span.char_start = j.at("char_start").get<int>();
    if (j.contains("char_end")) span.char_end = j.at("char_end").get<int>();
    if (j.contains("actor")) span.actor = j.at("actor").get<std::string>();
    if (j.contains("polarity")) {
        const auto p = j.at("polarity").get<std::string>();
        if (p == "support") span.polarity = Polarity::support;
        else if (p == "oppose") span.polarity = Polarity::oppose;
        else throw ValidationError("invalid polarity: " + p);
    }
    return span;
}

json document_to_json(const Document& doc, const std::vector<const ClaimSpan*>& spans) {
    json j;
    j["id"] = doc.id;
    j["outlet"] = doc.outlet;
    j["date"] = doc.date.iso();
    j["language"] = doc.language;
    j["sentences"] = doc.sentences;
    json claims = json::array();
    for (const ClaimSpan* span : spans) claims.push_back(span_to_json(*span));
    j["claims"] = std::move(claims);
    return j;
}

}  // namespace

Codebook load_codebook(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open codebook file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("codebook " + path.string() + ": " + e.what());
    }
    try {
        std::vector<Category> categories;
        for (const auto& c : j.at("categories")) {
            Category cat;
            cat.code = c.at("code").get<std::string>();
            cat.label = c.value("label", cat.code);
            if (c.contains("parent")) cat.parent = c.at("parent").get<std::string>();
            categories.push_back(std::move(cat));
        }
        return Codebook(j.at("name").get<std::string>(), std::move(categories));
    } catch (const json::exception& e) {
        throw ParseError("codebook " + path.string() + ": " + e.what());
    }
}

std::string codebook_to_json(const Codebook& codebook) {
    json j;
    j["name"] = codebook.name();
    json cats = json::array();
    for (const auto& cat : codebook.categories()) {
        json c;
        c["code"] = cat.code;
        c["label"] = cat.label;
        if (cat.parent) c["parent"] = *cat.parent;
        cats.push_back(std::move(c));
    }
    j["categories"] = std::move(cats);
    return j.dump(2);
}

AnnotatedCorpus load_corpus(const std::filesystem::path& path, const Codebook& codebook) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open corpus file: " + path.string());

    AnnotatedCorpus corpus;
    corpus.codebook = codebook;

    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(std::string("malformed document record: ") + e.what(), line_no);
        }
        try {
            Document doc;
            doc.id = j.at("id").get<std::string>();
            doc.outlet = j.value("outlet", "");
            doc.date = Date::parse(j.at("date").get<std::string>());
            doc.language = j.at("language").get<std::string>();
            doc.sentences = j.at("sentences").get<std::vector<std::string>>();
            for (const auto& c : j.value("claims", json::array())) {
                corpus.claims.push_back(span_from_json(c, doc.id));
            }
            corpus.documents.push_back(std::move(doc));
        } catch (const json::exception& e) {
            throw ParseError(std::string("invalid document record: ") + e.what(), line_no);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
        if (corpus.language.empty()) corpus.language = corpus.documents.back().language;
    }
    corpus.validate();
    return corpus;
}

std::string corpus_to_jsonl(const AnnotatedCorpus& corpus) {
    // group spans by document, preserving span order within each document
    std::unordered_map<std::string, std::vector<const ClaimSpan*>> by_doc;
    for (const auto& span : corpus.claims) {
        by_doc[span.document_id].push_back(&span);
    }
    std::ostringstream out;
    for (const auto& doc : corpus.documents) {
        auto it = by_doc.find(doc.id);
        static const std::vector<const ClaimSpan*> none;
        out << document_to_json(doc, it == by_doc.end() ? none : it->second).dump() << '\n';
    }
    return out.str();
}

void save_corpus(const AnnotatedCorpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write corpus file: " + path.string());
    out << corpus_to_jsonl(corpus);
}

// --- derived data --------------------------------------------------------------

std::vector<SentenceExample> derive_sentence_examples(const AnnotatedCorpus& corpus) {
    // (document id, sentence index) -> union of top-level codes, claim flag
    std::unordered_map<std::string, std::vector<std::pair<bool, std::set<std::string>>>> marks;
    for (const auto& doc : corpus.documents) {
        marks[doc.id].resize(doc.sentences.size());
    }
    for (const auto& span : corpus.claims) {
        auto& doc_marks = marks.at(span.document_id);
        for (int idx : span.sentence_indices) {
            auto& [flag, codes] = doc_marks[static_cast<std::size_t>(idx)];
            flag = true;
            for (const auto& code : span.categories) {
                codes.insert(corpus.codebook.top_level(code));
            }
        }
    }

    std::vector<SentenceExample> examples;
    for (const auto& doc : corpus.documents) {
        const auto& doc_marks = marks.at(doc.id);
        for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
            SentenceExample ex;
            ex.document_id = doc.id;
            ex.sentence_index = static_cast<int>(i);
            ex.text = doc.sentences[i];
            ex.is_claim = doc_marks[i].first;
            ex.top_categories = doc_marks[i].second;
            examples.push_back(std::move(ex));
        }
    }
    return examples;
}

namespace {

// Largest-remainder apportionment of n items over the given ratios.
// Ties in the remainders go to the earlier bucket.
std::vector<std::size_t> apportion(std::size_t n, const std::vector<double>& ratios) {
    std::vector<std::size_t> counts(ratios.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;  // (-remainder, index)
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        const double quota = ratios[i] * static_cast<double>(n);
        counts[i] = static_cast<std::size_t>(std::floor(quota));
        assigned += counts[i];
        remainders.emplace_back(-(quota - std::floor(quota)), i);
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) {
        counts[remainders[k % remainders.size()].second] += 1;
    }
    return counts;
}

}  // namespace

DatasetSplit split_corpus(const std::vector<SentenceExample>& examples,
                          const std::array<double, 3>& ratios, std::uint64_t seed) {
    const double sum = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("split ratios must sum to 1, got " + std::to_string(sum));
    }
    for (double r : ratios) {
        if (r < 0.0) throw ConfigError("split ratios must be non-negative");
    }

    std::vector<std::string> doc_ids;
    {
        std::unordered_set<std::string> seen;
        for (const auto& ex : examples) {
            if (seen.insert(ex.document_id).second) doc_ids.push_back(ex.document_id);
        }
    }
    if (doc_ids.size() < 3) {
        throw ValidationError("split requires at least 3 documents, got " +
                              std::to_string(doc_ids.size()));
    }

    std::sort(doc_ids.begin(), doc_ids.end());
    std::mt19937_64 rng(seed);
    std::shuffle(doc_ids.begin(), doc_ids.end(), rng);

    const auto counts = apportion(doc_ids.size(), {ratios[0], ratios[1], ratios[2]});
    std::unordered_map<std::string, int> partition_of;
    std::size_t pos = 0;
    for (int part = 0; part < 3; ++part) {
        for (std::size_t k = 0; k < counts[static_cast<std::size_t>(part)]; ++k, ++pos) {
            partition_of[doc_ids[pos]] = part;
        }
    }

    DatasetSplit split;
    split.seed = seed;
    split.ratios = ratios;
    for (const auto& ex : examples) {
        switch (partition_of.at(ex.document_id)) {
            case 0: split.train.push_back(ex); break;
            case 1: split.dev.push_back(ex); break;
            default: split.test.push_back(ex); break;
        }
    }
    return split;
}

CorpusStats corpus_stats(const AnnotatedCorpus& corpus) {
    CorpusStats stats;
    stats.n_documents = static_cast<std::int64_t>(corpus.documents.size());
    for (const auto& doc : corpus.documents) {
        stats.n_sentences += static_cast<std::int64_t>(doc.sentences.size());
    }
    stats.n_spans = static_cast<std::int64_t>(corpus.claims.size());
    std::unordered_map<std::string, std::set<int>> touched;
    for (const auto& span : corpus.claims) {
        stats.n_labels += static_cast<std::int64_t>(span.categories.size());
        auto& idxs = touched[span.document_id];
        idxs.insert(span.sentence_indices.begin(), span.sentence_indices.end());
    }
    std::int64_t positives = 0;
    for (const auto& [doc_id, idxs] : touched) {
        positives += static_cast<std::int64_t>(idxs.size());
    }
    stats.mean_labels_per_span =
        stats.n_spans > 0 ? static_cast<double>(stats.n_labels) / static_cast<double>(stats.n_spans)
                          : 0.0;
    stats.positive_sentence_rate =
        stats.n_sentences > 0
            ? static_cast<double>(positives) / static_cast<double>(stats.n_sentences)
            : 0.0;
    return stats;
}

std::map<std::string, double> category_distribution(const AnnotatedCorpus& corpus) {
    std::map<std::string, std::int64_t> counts;
    std::int64_t total = 0;
    for (const auto& span : corpus.claims) {
        for (const auto& code : span.categories) {
            ++counts[corpus.codebook.top_level(code)];
            ++total;
        }
    }
    if (total == 0) {
        throw ValidationError("category_distribution: corpus carries no claim labels");
    }
    std::map<std::string, double> pct;
    for (const auto& [code, count] : counts) {
        pct[code] = 100.0 * static_cast<double>(count) / static_cast<double>(total);
    }
    return pct;
}

}  // namespace xclaim
