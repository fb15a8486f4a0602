// Copyright 2026 The GazeBench Authors.
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

#ifndef GAZEBENCH_LANGMETRICS_H_
#define GAZEBENCH_LANGMETRICS_H_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gazebench/core.h"
#include "gazebench/error.h"
#include "gazebench/porter_stemmer.h"

namespace gazebench {

inline constexpr std::string_view kTokenizerVersion = "tok-v1";

struct TokenSeq {
  std::vector<std::string> tokens;
  std::string text;  // source

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  std::string joined() const {
    std::string out;
    for (const auto& t : tokens) {
      if (!out.empty()) out += ' ';
      out += t;
    }
    return out;
  }
};

namespace lang_detail {

inline bool word_char(unsigned char c) {
  return std::isalnum(c) || c >= 0x80;
}

}  // namespace lang_detail

// tok-v1: ASCII lowercase; hyphens and apostrophes survive only between
// word characters; every other punctuation mark splits; whitespace splits.
inline TokenSeq tokenize(std::string_view text) {
  TokenSeq seq;
  seq.text = std::string(text);
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (lang_detail::word_char(c)) {
      cur += static_cast<char>(std::tolower(c));
      continue;
    }
    const bool joiner = c == '-' || c == '\'';
    if (joiner && !cur.empty() && i + 1 < text.size() &&
        lang_detail::word_char(static_cast<unsigned char>(text[i + 1]))) {
      cur += static_cast<char>(c);
      continue;
    }
    if (!cur.empty()) seq.tokens.push_back(std::move(cur));
    cur.clear();
  }
  if (!cur.empty()) seq.tokens.push_back(std::move(cur));
  return seq;
}

using NGramCounts = std::map<std::vector<std::string>, int>;

inline NGramCounts ngram_counts(const std::vector<std::string>& tokens,
                                std::size_t n) {
  NGramCounts counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + i,
                                      tokens.begin() + i + n)];
  }
  return counts;
}

inline constexpr double kBleuEpsilon = 1e-9;

// Sentence BLEU-4: geometric mean of clipped 1..4-gram precisions, zero
// precisions replaced by kBleuEpsilon, times the brevity penalty against
// the closest reference length. An empty candidate scores 0.
inline double bleu4(const TokenSeq& cand, std::span<const TokenSeq> refs) {
  if (cand.empty() || refs.empty()) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const NGramCounts c = ngram_counts(cand.tokens, n);
    NGramCounts max_ref;
    for (const auto& r : refs) {
      for (const auto& [g, k] : ngram_counts(r.tokens, n)) {
        max_ref[g] = std::max(max_ref[g], k);
      }
    }
    int clipped = 0, total = 0;
    for (const auto& [g, k] : c) {
      total += k;
      const auto it = max_ref.find(g);
      if (it != max_ref.end()) clipped += std::min(k, it->second);
    }
    const double p = clipped > 0 ? static_cast<double>(clipped) / total
                                 : kBleuEpsilon;
    log_sum += std::log(p);
  }
  const double c = static_cast<double>(cand.size());
  double r = 0.0, best_gap = std::numeric_limits<double>::infinity();
  for (const auto& ref : refs) {
    const double len = static_cast<double>(ref.size());
    const double gap = std::abs(len - c);
    if (gap < best_gap || (gap == best_gap && len < r)) {
      best_gap = gap;
      r = len;
    }
  }
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum / 4.0);
}

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
};

namespace lang_detail {

// Unigram alignment: exact matches first, then Porter-stem matches among the
// leftovers. Within a stage each candidate token, left to right, takes the
// reference token that extends the current chunk if possible, else the
// leftmost free one. Returns (candidate index, reference index) pairs.
inline std::vector<std::pair<int, int>> meteor_align(const TokenSeq& cand,
                                                     const TokenSeq& ref) {
  const int n = static_cast<int>(cand.size());
  const int m = static_cast<int>(ref.size());
  std::vector<int> cand_to_ref(n, -1);
  std::vector<bool> ref_used(m, false);
  auto stage = [&](const std::vector<std::string>& cw,
                   const std::vector<std::string>& rw) {
    for (int i = 0; i < n; ++i) {
      if (cand_to_ref[i] >= 0) continue;
      const int prefer =
          i > 0 && cand_to_ref[i - 1] >= 0 ? cand_to_ref[i - 1] + 1 : -1;
      int pick = -1;
      if (prefer >= 0 && prefer < m && !ref_used[prefer] && rw[prefer] == cw[i]) {
        pick = prefer;
      } else {
        for (int j = 0; j < m; ++j) {
          if (!ref_used[j] && rw[j] == cw[i]) {
            pick = j;
            break;
          }
        }
      }
      if (pick >= 0) {
        cand_to_ref[i] = pick;
        ref_used[pick] = true;
      }
    }
  };
  stage(cand.tokens, ref.tokens);
  PorterStemmer stemmer;
  std::vector<std::string> cs, rs;
  for (const auto& t : cand.tokens) cs.push_back(stemmer.stem(t));
  for (const auto& t : ref.tokens) rs.push_back(stemmer.stem(t));
  stage(cs, rs);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    if (cand_to_ref[i] >= 0) pairs.push_back({i, cand_to_ref[i]});
  }
  return pairs;
}

inline double meteor_single(const TokenSeq& cand, const TokenSeq& ref,
                            const MeteorParams& params) {
  if (cand.empty() || ref.empty()) return 0.0;
  const auto pairs = meteor_align(cand, ref);
  if (pairs.empty()) return 0.0;
  const double matches = static_cast<double>(pairs.size());
  int chunks = 1;
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (pairs[i].first != pairs[i - 1].first + 1 ||
        pairs[i].second != pairs[i - 1].second + 1) {
      ++chunks;
    }
  }
  const double p = matches / static_cast<double>(cand.size());
  const double r = matches / static_cast<double>(ref.size());
  const double fmean = p * r / (params.alpha * p + (1.0 - params.alpha) * r);
  const double penalty = params.gamma * std::pow(chunks / matches, params.beta);
  return fmean * (1.0 - penalty);
}

inline std::size_t lcs_length(const std::vector<std::string>& a,
                              const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace lang_detail

// METEOR with exact and stem matching only (no synonym tables); best
// reference wins.
inline double meteor(const TokenSeq& cand, std::span<const TokenSeq> refs,
                     const MeteorParams& params = {}) {
  double best = 0.0;
  for (const auto& r : refs) {
    best = std::max(best, lang_detail::meteor_single(cand, r, params));
  }
  return best;
}

inline constexpr double kRougeBeta = 1.2;

// LCS F-measure, best reference wins; empty references are skipped.
inline double rouge_l(const TokenSeq& cand, std::span<const TokenSeq> refs,
                      double beta = kRougeBeta) {
  if (cand.empty()) return 0.0;
  double best = 0.0;
  for (const auto& r : refs) {
    if (r.empty()) continue;
    const double lcs =
        static_cast<double>(lang_detail::lcs_length(cand.tokens, r.tokens));
    if (lcs == 0) continue;
    const double p = lcs / static_cast<double>(cand.size());
    const double rec = lcs / static_cast<double>(r.size());
    const double b2 = beta * beta;
    best = std::max(best, (1 + b2) * p * rec / (rec + b2 * p));
  }
  return best;
}

struct CiderParams {
  int max_n = 4;
  double length_sigma = 6.0;  // tokens
};

// Fraction of candidate n-grams that are not surplus repeats; an n-gram may
// occur as often as in the reference (at least once) without penalty.
inline double repetition_penalty(const TokenSeq& cand, const TokenSeq& ref,
                                 std::size_t n) {
  const NGramCounts c = ngram_counts(cand.tokens, n);
  const NGramCounts r = ngram_counts(ref.tokens, n);
  int total = 0, excess = 0;
  for (const auto& [g, k] : c) {
    total += k;
    const auto it = r.find(g);
    const int allowed = std::max(1, it == r.end() ? 0 : it->second);
    excess += std::max(0, k - allowed);
  }
  return total == 0 ? 1.0 : 1.0 - static_cast<double>(excess) / total;
}

inline double length_penalty(const TokenSeq& cand, const TokenSeq& ref,
                             double sigma) {
  const double d = static_cast<double>(cand.size()) -
                   static_cast<double>(ref.size());
  return std::exp(-(d * d) / (2 * sigma * sigma));
}

// CIDEr-R over a fixed reference corpus. Each document is the reference set
// of one item; document frequencies come from the corpus alone.
class CiderCorpus {
 public:
  explicit CiderCorpus(const std::vector<std::vector<TokenSeq>>& documents,
                       CiderParams params = {})
      : params_(params) {
    std::set<std::vector<std::vector<std::string>>> distinct;
    for (const auto& doc : documents) {
      std::vector<std::vector<std::string>> key;
      for (const auto& r : doc) key.push_back(r.tokens);
      std::sort(key.begin(), key.end());
      distinct.insert(std::move(key));
    }
    if (distinct.size() < 2) {
      throw ValidationError(
          "CIDEr-R needs at least two distinct reference documents");
    }
    num_docs_ = static_cast<double>(documents.size());
    df_.resize(params_.max_n);
    for (const auto& doc : documents) {
      for (int n = 1; n <= params_.max_n; ++n) {
        std::set<std::vector<std::string>> seen;
        for (const auto& r : doc) {
          for (const auto& [g, k] : ngram_counts(r.tokens, n)) seen.insert(g);
        }
        for (const auto& g : seen) ++df_[n - 1][g];
      }
    }
  }

  double idf(const std::vector<std::string>& gram) const {
    const auto& df = df_[gram.size() - 1];
    const auto it = df.find(gram);
    const double d = it == df.end() ? 0.0 : static_cast<double>(it->second);
    return std::log(num_docs_) - std::log(std::max(1.0, d));
  }

  // Raw scale: 10 for a candidate identical to its only reference when no
  // n-gram appears in every document.
  double score(const TokenSeq& cand, std::span<const TokenSeq> refs) const {
    if (refs.empty()) throw ValidationError("CIDEr-R needs a reference");
    double total = 0.0;
    for (const auto& ref : refs) {
      const double lp = length_penalty(cand, ref, params_.length_sigma);
      double per_ref = 0.0;
      for (int n = 1; n <= params_.max_n; ++n) {
        per_ref += cosine(cand, ref, n) * lp * repetition_penalty(cand, ref, n);
      }
      total += per_ref / params_.max_n;
    }
    return 10.0 * total / static_cast<double>(refs.size());
  }

  const CiderParams& params() const { return params_; }

 private:
  double cosine(const TokenSeq& a, const TokenSeq& b, int n) const {
    const NGramCounts ca = ngram_counts(a.tokens, n);
    const NGramCounts cb = ngram_counts(b.tokens, n);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [g, k] : ca) {
      const double w = k * idf(g);
      na += w * w;
      const auto it = cb.find(g);
      if (it != cb.end()) dot += w * it->second * idf(g);
    }
    for (const auto& [g, k] : cb) {
      const double w = k * idf(g);
      nb += w * w;
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
  }

  CiderParams params_;
  double num_docs_ = 0.0;
  std::vector<std::map<std::vector<std::string>, int>> df_;
};

struct DiversityStats {
  std::size_t vocabulary = 0;
  double length = 0.0;          // mean words per scanpath
  double unique_percent = 0.0;  // mean unique sentences per scanpath, in %
};

// Fixations without an explanation are ignored; scanpaths with none at all
// do not enter the means.
inline DiversityStats diversity_stats(std::span<const ExplainedScanpath> paths) {
  std::set<std::string> vocab;
  double len_sum = 0.0, unp_sum = 0.0;
  std::size_t counted = 0;
  for (const auto& sp : paths) {
    std::set<std::string> unique;
    std::size_t explained = 0, words = 0;
    for (const auto& f : sp.fixations) {
      if (!f.explanation) continue;
      const TokenSeq t = tokenize(*f.explanation);
      vocab.insert(t.tokens.begin(), t.tokens.end());
      unique.insert(t.joined());
      words += t.size();
      ++explained;
    }
    if (explained == 0) continue;
    ++counted;
    len_sum += static_cast<double>(words);
    unp_sum += 100.0 * static_cast<double>(unique.size()) / explained;
  }
  if (counted == 0) throw ValidationError("no explanations to summarize");
  return {vocab.size(), len_sum / counted, unp_sum / counted};
}

using TokenDistribution = std::unordered_map<std::string, double>;

// One generated explanation: a distribution per ground-truth token.
struct ExplanationLikelihood {
  std::vector<TokenDistribution> steps;
  TokenSeq ground_truth;
};

// Mean over every ground-truth token of every fixation of -log p(token).
inline LikelihoodTerm explanation_nll(
    std::span<const ExplanationLikelihood> fixations) {
  double total = 0.0;
  std::size_t count = 0;
  bool saturated = false;
  for (std::size_t k = 0; k < fixations.size(); ++k) {
    const auto& fx = fixations[k];
    if (fx.steps.size() != fx.ground_truth.size()) {
      throw ValidationError("fixation " + std::to_string(k) + " has " +
                            std::to_string(fx.steps.size()) +
                            " distributions for " +
                            std::to_string(fx.ground_truth.size()) + " tokens");
    }
    for (std::size_t l = 0; l < fx.steps.size(); ++l) {
      double sum = 0.0;
      for (const auto& [tok, p] : fx.steps[l]) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
          throw ValidationError("token probability must be finite and >= 0");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-6) {
        throw ValidationError("token distribution " + std::to_string(l) +
                              " of fixation " + std::to_string(k) +
                              " sums to " + std::to_string(sum));
      }
      const auto it = fx.steps[l].find(fx.ground_truth.tokens[l]);
      const double p = it == fx.steps[l].end() ? 0.0 : it->second;
      if (p == 0.0) {
        saturated = true;
      } else {
        total -= std::log(p);
      }
      ++count;
    }
  }
  if (count == 0) throw ValidationError("no ground-truth tokens");
  if (saturated) return {std::numeric_limits<double>::infinity(), true};
  return {total / static_cast<double>(count), false};
}

}  // namespace gazebench

#endif  // GAZEBENCH_LANGMETRICS_H_
