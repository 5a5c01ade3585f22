#pragma once

// Seeded generation of synthetic annotated corpora for classifier and
// pipeline testing. Claim sentences are marked by planted lexical cues:
// every positive sentence carries a claim-marker token and one cue token
// per category, so both tasks are linearly separable by construction. A
// parallel word inventory in a second language plus an invertible
// word-by-word dictionary make cross-lingual transfer testable end to end.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "xclaim/corpus.hpp"
#include "xclaim/translation.hpp"

namespace xclaim {

// Tokens used to realize one language side.
struct WordInventory {
    std::vector<std::string> fillers;
    std::vector<std::string> claim_markers;
    std::map<std::string, std::string> category_cues;  // top-level code -> cue token
};

// Paired inventories: entry i of one maps to entry i of the other.
WordInventory source_inventory(int filler_vocab);
WordInventory target_inventory(int filler_vocab);

// 8 top-level categories plus two fine-grained children each, so span codes
// exercise the fine-to-top mapping.
Codebook synthetic_codebook();

struct SyntheticSpec {
    int train_docs = 80;
    int dev_docs = 10;
    int test_docs = 20;
    int sentences_per_doc = 10;
    double claim_rate = 0.35;
    double second_category_rate = 0.3;  // chance a claim carries two categories
    int filler_vocab = 150;
    int min_fillers = 4;
    int max_fillers = 9;
    std::string source_lang = "de";
    std::string target_lang = "en";
    std::uint64_t seed = 0;
};

struct LanguageCorpora {
    AnnotatedCorpus train;
    AnnotatedCorpus dev;
    AnnotatedCorpus test;
};

struct BilingualCorpus {
    LanguageCorpora source;
    LanguageCorpora target;  // independently generated, same cue structure
    std::string source_lang;
    std::string target_lang;
    std::map<std::string, std::string> source_to_target;  // word table
};

BilingualCorpus generate_bilingual_corpus(const SyntheticSpec& spec);

// Deterministic word-by-word MT over the suite's vocabulary, both directions.
std::shared_ptr<DictionaryBackend> make_dictionary_backend(const BilingualCorpus& corpus);

// Single-language convenience: the source side of a bilingual suite.
LanguageCorpora generate_annotated_corpora(const SyntheticSpec& spec);

}  // namespace xclaim
