#include "xclaim/synthetic.hpp"

#include <algorithm>
#include <random>

namespace xclaim {

namespace {

const std::vector<std::string> kSourceMarkers = {"fordert", "verlangt", "kritisiert"};
const std::vector<std::string> kTargetMarkers = {"demands", "urges", "criticises"};

}  // namespace

WordInventory source_inventory(int filler_vocab) {
    WordInventory inv;
    for (int i = 0; i < filler_vocab; ++i) inv.fillers.push_back("wort" + std::to_string(i));
    inv.claim_markers = kSourceMarkers;
    for (int k = 1; k <= 8; ++k) {
        inv.category_cues["C" + std::to_string(k)] = "thema" + std::to_string(k);
    }
    return inv;
}

WordInventory target_inventory(int filler_vocab) {
    WordInventory inv;
    for (int i = 0; i < filler_vocab; ++i) inv.fillers.push_back("word" + std::to_string(i));
    inv.claim_markers = kTargetMarkers;
    for (int k = 1; k <= 8; ++k) {
        inv.category_cues["C" + std::to_string(k)] = "topic" + std::to_string(k);
    }
    return inv;
}

Codebook synthetic_codebook() {
    std::vector<Category> cats;
    for (int k = 1; k <= 8; ++k) {
        const std::string top = "C" + std::to_string(k);
        cats.push_back({top, "Category " + std::to_string(k), std::nullopt});
        cats.push_back({top + ".1", top + " fine a", top});
        cats.push_back({top + ".2", top + " fine b", top});
    }
    return Codebook("synthetic", std::move(cats));
}

namespace {

AnnotatedCorpus generate_one(const SyntheticSpec& spec, const WordInventory& inv,
                             const Codebook& codebook, const std::string& language,
                             const std::string& id_prefix, int n_docs, std::mt19937_64& rng) {
    AnnotatedCorpus corpus;
    corpus.codebook = codebook;
    corpus.language = language;

    const auto top_codes = codebook.top_level_codes();
    std::uniform_int_distribution<int> filler_count(spec.min_fillers, spec.max_fillers);
    std::uniform_int_distribution<std::size_t> filler_pick(0, inv.fillers.size() - 1);
    std::uniform_int_distribution<std::size_t> marker_pick(0, inv.claim_markers.size() - 1);
    std::uniform_int_distribution<std::size_t> cat_pick(0, top_codes.size() - 1);
    std::uniform_int_distribution<int> day_offset(0, 330);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> fine_pick(0, 2);  // top code or one of two children

    const Date base = Date::from(2015, 1, 15);
    for (int d = 0; d < n_docs; ++d) {
        Document doc;
        doc.id = id_prefix + "-" + std::to_string(1000 + d);
        doc.outlet = "synthetic-" + language;
        doc.language = language;
        doc.date = base.plus_days(day_offset(rng));

        for (int s = 0; s < spec.sentences_per_doc; ++s) {
            std::vector<std::string> tokens;
            const int n = filler_count(rng);
            for (int i = 0; i < n; ++i) tokens.push_back(inv.fillers[filler_pick(rng)]);

            if (unit(rng) < spec.claim_rate) {
                std::set<std::string> cats;
                cats.insert(top_codes[cat_pick(rng)]);
                if (unit(rng) < spec.second_category_rate) {
                    cats.insert(top_codes[cat_pick(rng)]);  // may collide; then it stays one
                }
                tokens.insert(
                    tokens.begin() + static_cast<std::ptrdiff_t>(
                                         std::uniform_int_distribution<std::size_t>(0, tokens.size())(rng)),
                    inv.claim_markers[marker_pick(rng)]);
                ClaimSpan span;
                span.document_id = doc.id;
                span.sentence_indices = {s};
                for (const auto& top : cats) {
                    tokens.push_back(inv.category_cues.at(top));
                    switch (fine_pick(rng)) {
                        case 0: span.categories.insert(top); break;
                        case 1: span.categories.insert(top + ".1"); break;
                        default: span.categories.insert(top + ".2"); break;
                    }
                }
                corpus.claims.push_back(std::move(span));
            }

            std::string text;
            for (const auto& t : tokens) {
                if (!text.empty()) text += ' ';
                text += t;
            }
            text += '.';
            doc.sentences.push_back(std::move(text));
        }
        corpus.documents.push_back(std::move(doc));
    }
    corpus.validate();
    return corpus;
}

LanguageCorpora generate_language(const SyntheticSpec& spec, const WordInventory& inv,
                                  const Codebook& codebook, const std::string& language,
                                  const std::string& prefix, std::mt19937_64& rng) {
    LanguageCorpora out;
    out.train = generate_one(spec, inv, codebook, language, prefix + "-train", spec.train_docs, rng);
    out.dev = generate_one(spec, inv, codebook, language, prefix + "-dev", spec.dev_docs, rng);
    out.test = generate_one(spec, inv, codebook, language, prefix + "-test", spec.test_docs, rng);
    return out;
}

}  // namespace

BilingualCorpus generate_bilingual_corpus(const SyntheticSpec& spec) {
    BilingualCorpus out;
    out.source_lang = spec.source_lang;
    out.target_lang = spec.target_lang;

    const auto src_inv = source_inventory(spec.filler_vocab);
    const auto tgt_inv = target_inventory(spec.filler_vocab);
    const auto codebook = synthetic_codebook();

    std::mt19937_64 rng(spec.seed);
    out.source = generate_language(spec, src_inv, codebook, spec.source_lang, "src", rng);
    out.target = generate_language(spec, tgt_inv, codebook, spec.target_lang, "tgt", rng);

    for (std::size_t i = 0; i < src_inv.fillers.size(); ++i) {
        out.source_to_target[src_inv.fillers[i]] = tgt_inv.fillers[i];
    }
    for (std::size_t i = 0; i < src_inv.claim_markers.size(); ++i) {
        out.source_to_target[src_inv.claim_markers[i]] = tgt_inv.claim_markers[i];
    }
    for (const auto& [top, cue] : src_inv.category_cues) {
        out.source_to_target[cue] = tgt_inv.category_cues.at(top);
    }
    return out;
}

std::shared_ptr<DictionaryBackend> make_dictionary_backend(const BilingualCorpus& corpus) {
    DictionaryBackend::Table forward(corpus.source_to_target.begin(),
                                     corpus.source_to_target.end());
    DictionaryBackend::Table backward;
    for (const auto& [src, tgt] : forward) backward[tgt] = src;
    return std::make_shared<DictionaryBackend>(
        "dict-" + corpus.source_lang + "-" + corpus.target_lang,
        std::map<std::pair<std::string, std::string>, DictionaryBackend::Table>{
            {{corpus.source_lang, corpus.target_lang}, std::move(forward)},
            {{corpus.target_lang, corpus.source_lang}, std::move(backward)},
        });
}

LanguageCorpora generate_annotated_corpora(const SyntheticSpec& spec) {
    const auto src_inv = source_inventory(spec.filler_vocab);
    const auto codebook = synthetic_codebook();
    std::mt19937_64 rng(spec.seed);
    return generate_language(spec, src_inv, codebook, spec.source_lang, "src", rng);
}

}  // namespace xclaim
