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

#include "fuzzydr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>
#include <vector>

#include "fuzzydr/error.hpp"
#include "fuzzydr/rng.hpp"

namespace fdr::synthetic {

namespace {

class Discrete {
public:
    Discrete(std::vector<std::size_t> items, const std::vector<double>& weights) : items_(std::move(items)) {
        cumulative_.resize(weights.size());
        std::partial_sum(weights.begin(), weights.end(), cumulative_.begin());
    }

    std::size_t draw(Rng& rng) const {
        const double u = rng.uniform() * cumulative_.back();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), items_.size() - 1);
        return items_[i];
    }

private:
    std::vector<std::size_t> items_;
    std::vector<double> cumulative_;
};

std::vector<double> zipf(std::size_t n, double s) {
    std::vector<double> w(n);
    for (std::size_t r = 0; r < n; ++r) w[r] = 1.0 / std::pow(static_cast<double>(r + 1), s);
    return w;
}

std::vector<std::size_t> sample_distinct(Rng& rng, std::size_t universe, std::size_t count) {
    std::vector<std::size_t> all(universe);
    std::iota(all.begin(), all.end(), 0);
    rng.shuffle(all);
    all.resize(std::min(count, universe));
    return all;
}

}  // namespace

std::string token_for(std::size_t id, char prefix) {
    std::string s(4, 'a');
    for (int p = 3; p >= 0; --p) {
        s[static_cast<std::size_t>(p)] = static_cast<char>('a' + id % 26);
        id /= 26;
    }
    return std::string(1, prefix) + s;
}

corpus::LabeledCorpus separable_corpus(std::size_t n, std::size_t words_per_class, std::size_t doc_length,
                                       std::uint64_t seed) {
    Rng rng(seed);
    corpus::LabeledCorpus out;
    const std::vector<double> weights = zipf(words_per_class, 1.0);
    std::vector<std::size_t> ids(words_per_class);
    std::iota(ids.begin(), ids.end(), 0);
    const Discrete dist(ids, weights);
    for (std::size_t j = 0; j < n; ++j) {
        const bool positive = j % 2 == 1;
        std::string doc;
        for (std::size_t t = 0; t < doc_length; ++t) {
            if (!doc.empty()) doc.push_back(' ');
            doc += token_for(dist.draw(rng), positive ? 'p' : 'n');
        }
        out.documents.push_back(std::move(doc));
        out.labels.push_back(positive ? corpus::Label::Positive : corpus::Label::Negative);
    }
    return out;
}

corpus::LabeledCorpus topic_corpus(const TopicCorpusSpec& spec) {
    if (spec.background_topics < std::max<std::size_t>(spec.related_topics, 2) || spec.related_topics == 0 ||
        spec.topic_words == 0 || spec.vocabulary < spec.topic_words || spec.min_length == 0 ||
        spec.max_length < spec.min_length || spec.positive_fraction <= 0.0 || spec.positive_fraction >= 1.0) {
        fail(ErrorCode::InvalidParams, "invalid topic corpus spec");
    }
    Rng rng(spec.seed);

    std::vector<std::size_t> ranks(spec.vocabulary);
    std::iota(ranks.begin(), ranks.end(), 0);
    rng.shuffle(ranks);
    const Discrete common(ranks, zipf(spec.vocabulary, 1.1));

    std::vector<std::vector<std::size_t>> topic_sets;
    std::vector<Discrete> topics;
    for (std::size_t t = 0; t < spec.background_topics; ++t) {
        topic_sets.push_back(sample_distinct(rng, spec.vocabulary, spec.topic_words));
        topics.emplace_back(topic_sets.back(), zipf(spec.topic_words, 0.8));
    }

    std::vector<std::size_t> positive_words;
    const auto shared = static_cast<std::size_t>(spec.related_overlap * static_cast<double>(spec.topic_words));
    std::unordered_set<std::size_t> used;
    for (std::size_t i = 0; i < shared; ++i) {
        const auto& src = topic_sets[i % spec.related_topics];
        const std::size_t w = src[rng.below(src.size())];
        if (used.insert(w).second) positive_words.push_back(w);
    }
    while (positive_words.size() < spec.topic_words) {
        const std::size_t w = rng.below(spec.vocabulary);
        if (used.insert(w).second) positive_words.push_back(w);
    }
    rng.shuffle(positive_words);
    const Discrete positive_topic(positive_words, zipf(positive_words.size(), 0.8));

    const auto n_pos = static_cast<std::size_t>(std::llround(spec.positive_fraction * static_cast<double>(spec.n)));
    std::vector<bool> is_pos(spec.n, false);
    for (const auto j : sample_distinct(rng, spec.n, n_pos)) is_pos[j] = true;

    corpus::LabeledCorpus out;
    for (std::size_t j = 0; j < spec.n; ++j) {
        const std::size_t len = spec.min_length + rng.below(spec.max_length - spec.min_length + 1);
        const std::size_t primary = is_pos[j] ? rng.below(spec.related_topics) : rng.below(spec.background_topics);
        const std::size_t secondary = rng.below(spec.background_topics);
        std::string doc;
        for (std::size_t t = 0; t < len; ++t) {
            const double u = rng.uniform();
            std::size_t w = 0;
            if (is_pos[j]) {
                w = u < 0.45 ? common.draw(rng) : u < 0.75 ? positive_topic.draw(rng) : topics[primary].draw(rng);
            } else {
                w = u < 0.5 ? common.draw(rng) : u < 0.9 ? topics[primary].draw(rng) : topics[secondary].draw(rng);
            }
            if (!doc.empty()) doc.push_back(' ');
            doc += token_for(w);
        }
        out.documents.push_back(std::move(doc));
        out.labels.push_back(is_pos[j] ? corpus::Label::Positive : corpus::Label::Negative);
    }
    return out;
}

SparseDocMatrix random_count_matrix(Index n, Index m, Index nnz_per_row, std::uint64_t seed, int max_count) {
    if (n < 0 || m < 1 || nnz_per_row < 0 || max_count < 1) fail(ErrorCode::InvalidParams, "invalid random matrix shape");
    Rng rng(seed);
    const Index per_row = std::min(nnz_per_row, m);
    std::vector<std::size_t> ptr{0};
    std::vector<Index> cols;
    std::vector<double> vals;
    cols.reserve(static_cast<std::size_t>(n * per_row));
    vals.reserve(static_cast<std::size_t>(n * per_row));
    std::vector<Index> picked;
    for (Index j = 0; j < n; ++j) {
        picked.clear();
        if (per_row * 4 > m) {
            std::vector<Index> all(static_cast<std::size_t>(m));
            std::iota(all.begin(), all.end(), Index{0});
            rng.shuffle(all);
            picked.assign(all.begin(), all.begin() + per_row);
        } else {
            while (static_cast<Index>(picked.size()) < per_row) {
                const auto c = static_cast<Index>(rng.below(static_cast<std::uint64_t>(m)));
                if (std::find(picked.begin(), picked.end(), c) == picked.end()) picked.push_back(c);
            }
        }
        std::sort(picked.begin(), picked.end());
        for (const Index c : picked) {
            cols.push_back(c);
            vals.push_back(static_cast<double>(1 + rng.below(static_cast<std::uint64_t>(max_count))));
        }
        ptr.push_back(cols.size());
    }
    return SparseDocMatrix(n, m, std::move(ptr), std::move(cols), std::move(vals));
}

}  // namespace fdr::synthetic
