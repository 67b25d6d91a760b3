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
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fuzzydr/sparse.hpp"

namespace fdr::corpus {

enum class Label : std::uint8_t { Negative = 0, Positive = 1 };

struct TokenizerConfig {
    bool lowercase = true;
    std::size_t min_token_length = 2;
    std::set<std::string> stopwords;
    std::size_t min_document_frequency = 3;

    void validate() const;
};

/// Alphabetic runs (ASCII letters); every other byte separates tokens.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg);

/// Bijection between distinct terms and column ids [0, m), lexicographic by term.
class Vocabulary {
public:
    /// `terms` must be sorted and unique.
    explicit Vocabulary(std::vector<std::string> terms);

    std::size_t size() const { return terms_.size(); }
    const std::vector<std::string>& terms() const { return terms_; }
    const std::string& term(Index id) const { return terms_[static_cast<std::size_t>(id)]; }
    std::optional<Index> find(std::string_view term) const;

private:
    std::vector<std::string> terms_;
    std::unordered_map<std::string, Index> index_;
};

struct LabeledCorpus {
    std::vector<std::string> documents;
    std::vector<Label> labels;
    /// Records the loader dropped (empty bodies, etc.).
    std::size_t skipped = 0;

    std::size_t size() const { return documents.size(); }
    std::size_t positives() const;

    /// Throws TooFewDocuments / SingleClass / InvalidParams when the corpus invariants fail.
    void validate() const;
};

std::vector<int> labels_as_int(const std::vector<Label>& labels);

/// Throws EmptyVocabulary if nothing survives the document-frequency filter.
Vocabulary build_vocabulary(const LabeledCorpus& corpus, const TokenizerConfig& cfg);

/// Raw term counts; out-of-vocabulary tokens are dropped.
SparseDocMatrix vectorize(const LabeledCorpus& corpus, const Vocabulary& vocab, const TokenizerConfig& cfg);

/// `label<delim>text` per non-blank line. Labels equal to `positive_label` are positive. If
/// `negative_label` is given every other label must match it (UnknownLabel otherwise).
LabeledCorpus load_labeled_lines(const std::filesystem::path& path, const std::string& positive_label,
                                 const std::optional<std::string>& negative_label = std::nullopt,
                                 char delimiter = '\t');

/// Reuters-21578 SGML. Documents with empty TITLE+BODY are skipped (counted in `skipped`).
LabeledCorpus load_reuters_sgml(const std::vector<std::filesystem::path>& paths, const std::string& positive_topic);

/// Parses one SGML buffer; exposed for tests. `origin` is used in error messages.
LabeledCorpus parse_reuters_sgml(std::string_view text, const std::string& positive_topic,
                                 const std::string& origin = "<memory>");

/// `root/<class>/<doc>` layout. Negatives are downsampled without replacement when
/// `negative_sample` is set.
LabeledCorpus load_class_dirs(const std::filesystem::path& root, const std::string& positive_dir,
                              std::optional<std::size_t> negative_sample, std::uint64_t seed);

void write_labels(std::ostream& os, const std::vector<Label>& labels);
std::vector<Label> read_labels(std::istream& is);

}  // namespace fdr::corpus
