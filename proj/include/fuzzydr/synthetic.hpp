// Copyright 2026 The fuzzydr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "fuzzydr/corpus.hpp"
#include "fuzzydr/sparse.hpp"

namespace fdr::synthetic {

/// Alphabetic token for an integer id; ids map to tokens in lexicographic order.
std::string token_for(std::size_t id, char prefix = 'w');

/// Two classes with disjoint vocabularies of `words_per_class` terms each; classes alternate.
corpus::LabeledCorpus separable_corpus(std::size_t n, std::size_t words_per_class, std::size_t doc_length,
                                       std::uint64_t seed);

/**
 * Topic-mixture corpus with a rare positive class, used as a stand-in for a
 * news "one topic vs the rest" task. Negatives mix a shared Zipf background
 * with one or two background topics; positives mix the background with a
 * positive topic that shares part of its vocabulary with a few "related"
 * background topics, so the classes overlap.
 */
struct TopicCorpusSpec {
    std::size_t n = 2000;
    double positive_fraction = 0.05;
    std::size_t vocabulary = 3000;
    std::size_t background_topics = 20;
    std::size_t related_topics = 3;
    std::size_t topic_words = 150;
    double related_overlap = 0.4;
    std::size_t min_length = 30;
    std::size_t max_length = 120;
    std::uint64_t seed = 7;
};

corpus::LabeledCorpus topic_corpus(const TopicCorpusSpec& spec);

/// n x m counts with exactly min(nnz_per_row, m) distinct columns per row, values in [1, max_count].
SparseDocMatrix random_count_matrix(Index n, Index m, Index nnz_per_row, std::uint64_t seed, int max_count = 5);

}  // namespace fdr::synthetic
