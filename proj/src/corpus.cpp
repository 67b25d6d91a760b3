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

#include "fuzzydr/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "fuzzydr/error.hpp"
#include "fuzzydr/rng.hpp"

namespace fdr::corpus {

namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

char to_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

void TokenizerConfig::validate() const {
    if (min_token_length < 1) fail(ErrorCode::InvalidParams, "min token length must be >= 1");
    if (min_document_frequency < 1) fail(ErrorCode::InvalidParams, "min document frequency must be >= 1");
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !is_alpha(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && is_alpha(text[i])) ++i;
        if (i == start) break;
        std::string tok(text.substr(start, i - start));
        if (tok.size() < cfg.min_token_length) continue;
        if (cfg.lowercase) std::transform(tok.begin(), tok.end(), tok.begin(), to_lower);
        if (cfg.stopwords.contains(tok)) continue;
        out.push_back(std::move(tok));
    }
    return out;
}

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
    index_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i > 0 && !(terms_[i - 1] < terms_[i])) {
            fail(ErrorCode::InvalidParams, "vocabulary terms must be sorted and distinct");
        }
        index_.emplace(terms_[i], static_cast<Index>(i));
    }
}

std::optional<Index> Vocabulary::find(std::string_view term) const {
    const auto it = index_.find(std::string(term));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t LabeledCorpus::positives() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::Positive));
}

void LabeledCorpus::validate() const {
    if (documents.size() != labels.size()) {
        fail(ErrorCode::InvalidParams, "documents and labels differ in length");
    }
    if (documents.size() < 2) fail(ErrorCode::TooFewDocuments, "corpus needs at least 2 documents");
    const auto pos = positives();
    if (pos == 0 || pos == labels.size()) fail(ErrorCode::SingleClass, "corpus contains a single class");
}

std::vector<int> labels_as_int(const std::vector<Label>& labels) {
    std::vector<int> out(labels.size());
    std::transform(labels.begin(), labels.end(), out.begin(), [](Label l) { return static_cast<int>(l); });
    return out;
}

Vocabulary build_vocabulary(const LabeledCorpus& corpus, const TokenizerConfig& cfg) {
    cfg.validate();
    if (corpus.documents.empty()) fail(ErrorCode::TooFewDocuments, "empty corpus");
    std::map<std::string, std::size_t> df;
    for (const auto& doc : corpus.documents) {
        auto toks = tokenize(doc, cfg);
        std::sort(toks.begin(), toks.end());
        toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
        for (auto& t : toks) ++df[std::move(t)];
    }
    std::vector<std::string> terms;
    for (const auto& [term, count] : df) {
        if (count >= cfg.min_document_frequency) terms.push_back(term);
    }
    if (terms.empty()) fail(ErrorCode::EmptyVocabulary, "no token meets the document-frequency threshold");
    return Vocabulary(std::move(terms));
}

SparseDocMatrix vectorize(const LabeledCorpus& corpus, const Vocabulary& vocab, const TokenizerConfig& cfg) {
    const auto n = static_cast<std::int64_t>(corpus.documents.size());
    std::vector<std::vector<std::pair<Index, double>>> rows(corpus.documents.size());

#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t j = 0; j < n; ++j) {
        std::map<Index, double> counts;
        for (const auto& tok : tokenize(corpus.documents[static_cast<std::size_t>(j)], cfg)) {
            if (const auto id = vocab.find(tok)) counts[*id] += 1.0;
        }
        rows[static_cast<std::size_t>(j)].assign(counts.begin(), counts.end());
    }

    std::vector<std::size_t> ptr{0};
    std::vector<Index> cols;
    std::vector<double> vals;
    for (const auto& r : rows) {
        for (const auto& [c, v] : r) {
            cols.push_back(c);
            vals.push_back(v);
        }
        ptr.push_back(cols.size());
    }
    return SparseDocMatrix(n, static_cast<Index>(vocab.size()), std::move(ptr), std::move(cols), std::move(vals));
}

LabeledCorpus load_labeled_lines(const std::filesystem::path& path, const std::string& positive_label,
                                 const std::optional<std::string>& negative_label, char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
    LabeledCorpus out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
        const auto tab = line.find(delimiter);
        if (tab == std::string::npos) {
            fail(ErrorCode::MalformedLine, fmt::format("{}:{}: missing delimiter", path.string(), line_no));
        }
        const std::string label = line.substr(0, tab);
        Label l = Label::Negative;
        if (label == positive_label) {
            l = Label::Positive;
        } else if (label.empty() || (negative_label && label != *negative_label)) {
            fail(ErrorCode::UnknownLabel, fmt::format("{}:{}: label '{}'", path.string(), line_no, label));
        }
        out.documents.push_back(line.substr(tab + 1));
        out.labels.push_back(l);
    }
    return out;
}

namespace {

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '&') {
            out.push_back(s[i]);
            continue;
        }
        const auto semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 8) {
            out.push_back('&');
            continue;
        }
        const auto ent = s.substr(i + 1, semi - i - 1);
        if (ent == "lt") {
            out.push_back('<');
        } else if (ent == "gt") {
            out.push_back('>');
        } else if (ent == "amp") {
            out.push_back('&');
        } else if (!ent.empty() && ent[0] == '#') {
            out.push_back(' ');  // control characters such as &#3; end the body
        } else {
            out.push_back('&');
            continue;
        }
        i = semi;
    }
    return out;
}

/// Content between <tag> and </tag> inside [begin, end); nullopt if the open tag is absent.
std::optional<std::string_view> element_text(std::string_view text, std::size_t begin, std::size_t end,
                                             std::string_view tag, const std::string& origin) {
    const std::string open = "<" + std::string(tag) + ">";
    const std::string close = "</" + std::string(tag) + ">";
    const auto o = text.substr(0, end).find(open, begin);
    if (o == std::string_view::npos) return std::nullopt;
    const auto c = text.substr(0, end).find(close, o);
    if (c == std::string_view::npos) {
        fail(ErrorCode::ParseError, fmt::format("{}: unclosed <{}> at byte {}", origin, tag, o));
    }
    return text.substr(o + open.size(), c - o - open.size());
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), to_lower);
    return out;
}

}  // namespace

LabeledCorpus parse_reuters_sgml(std::string_view text, const std::string& positive_topic,
                                 const std::string& origin) {
    LabeledCorpus out;
    const std::string topic = lower(positive_topic);
    std::size_t pos = 0;
    while (true) {
        const auto start = text.find("<REUTERS", pos);
        if (start == std::string_view::npos) break;
        const auto stop = text.find("</REUTERS>", start);
        if (stop == std::string_view::npos) {
            fail(ErrorCode::ParseError, fmt::format("{}: unterminated <REUTERS> element at byte {}", origin, start));
        }
        bool positive = false;
        if (const auto topics = element_text(text, start, stop, "TOPICS", origin)) {
            std::size_t d = 0;
            while ((d = topics->find("<D>", d)) != std::string_view::npos) {
                const auto e = topics->find("</D>", d);
                if (e == std::string_view::npos) {
                    fail(ErrorCode::ParseError, fmt::format("{}: unclosed <D> near byte {}", origin, start));
                }
                if (lower(topics->substr(d + 3, e - d - 3)) == topic) positive = true;
                d = e + 4;
            }
        }
        std::string doc;
        if (const auto title = element_text(text, start, stop, "TITLE", origin)) doc = decode_entities(*title);
        const auto body = element_text(text, start, stop, "BODY", origin);
        const auto body_text = body ? decode_entities(*body) : std::string();
        if (std::all_of(body_text.begin(), body_text.end(), [](unsigned char c) { return std::isspace(c); })) {
            ++out.skipped;
        } else {
            if (!doc.empty()) doc.push_back('\n');
            doc += body_text;
            out.documents.push_back(std::move(doc));
            out.labels.push_back(positive ? Label::Positive : Label::Negative);
        }
        pos = stop + 10;
    }
    return out;
}

LabeledCorpus load_reuters_sgml(const std::vector<std::filesystem::path>& paths, const std::string& positive_topic) {
    LabeledCorpus out;
    for (const auto& p : paths) {
        auto part = parse_reuters_sgml(read_file(p), positive_topic, p.string());
        out.documents.insert(out.documents.end(), std::make_move_iterator(part.documents.begin()),
                             std::make_move_iterator(part.documents.end()));
        out.labels.insert(out.labels.end(), part.labels.begin(), part.labels.end());
        out.skipped += part.skipped;
    }
    return out;
}

LabeledCorpus load_class_dirs(const std::filesystem::path& root, const std::string& positive_dir,
                              std::optional<std::size_t> negative_sample, std::uint64_t seed) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) fail(ErrorCode::MissingDirectory, root.string());
    if (!fs::is_directory(root / positive_dir)) fail(ErrorCode::MissingDirectory, (root / positive_dir).string());

    std::vector<fs::path> class_dirs;
    for (const auto& e : fs::directory_iterator(root)) {
        if (e.is_directory()) class_dirs.push_back(e.path());
    }
    std::sort(class_dirs.begin(), class_dirs.end());

    std::vector<fs::path> positives;
    std::vector<fs::path> negatives;
    for (const auto& dir : class_dirs) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.is_regular_file()) files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        auto& dst = dir.filename() == positive_dir ? positives : negatives;
        dst.insert(dst.end(), files.begin(), files.end());
    }

    if (negative_sample) {
        if (*negative_sample > negatives.size()) {
            fail(ErrorCode::TooFewDocuments, fmt::format("negative sample {} exceeds the {} available documents",
                                                         *negative_sample, negatives.size()));
        }
        std::vector<std::size_t> idx(negatives.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        Rng rng(seed);
        rng.shuffle(idx);
        idx.resize(*negative_sample);
        std::sort(idx.begin(), idx.end());
        std::vector<fs::path> kept;
        kept.reserve(idx.size());
        for (const auto i : idx) kept.push_back(negatives[i]);
        negatives = std::move(kept);
    }

    LabeledCorpus out;
    for (const auto& p : positives) {
        out.documents.push_back(read_file(p));
        out.labels.push_back(Label::Positive);
    }
    for (const auto& p : negatives) {
        out.documents.push_back(read_file(p));
        out.labels.push_back(Label::Negative);
    }
    return out;
}

void write_labels(std::ostream& os, const std::vector<Label>& labels) {
    for (const auto l : labels) os << static_cast<int>(l) << '\n';
}

std::vector<Label> read_labels(std::istream& is) {
    std::vector<Label> out;
    std::string tok;
    while (is >> tok) {
        if (tok == "1") {
            out.push_back(Label::Positive);
        } else if (tok == "0") {
            out.push_back(Label::Negative);
        } else {
            fail(ErrorCode::UnknownLabel, "label file entry '" + tok + "'");
        }
    }
    return out;
}

}  // namespace fdr::corpus
