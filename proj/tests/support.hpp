// Shared test utilities: random annotated-unit generators, brute-force
// oracles kept independent of the library code, and temp-file helpers.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cogeval/cogeval.hpp"

namespace testsupport {

using cogeval::AnnotatedUnit;
using cogeval::Chunk;
using cogeval::Clause;
using cogeval::DiscourseAnnotation;
using cogeval::DiscourseRelation;
using cogeval::Token;
using cogeval::UnitPair;
using cogeval::WordClass;

// ---------------------------------------------------------------------------
// Random generation

inline std::vector<Token> make_tokens(const std::vector<std::string>& surfaces,
                                      WordClass cls = WordClass::unknown) {
  std::vector<Token> tokens;
  for (std::size_t i = 0; i < surfaces.size(); ++i)
    tokens.push_back({surfaces[i], std::nullopt, cls, i});
  return tokens;
}

inline std::vector<Token> random_sentence(std::mt19937& rng, std::size_t max_len,
                                          std::size_t vocab_size,
                                          std::size_t min_len = 1) {
  std::uniform_int_distribution<std::size_t> len_dist(min_len, max_len);
  std::uniform_int_distribution<std::size_t> word_dist(0, vocab_size - 1);
  std::vector<std::string> surfaces;
  const std::size_t n = len_dist(rng);
  for (std::size_t i = 0; i < n; ++i)
    surfaces.push_back("w" + std::to_string(word_dist(rng)));
  return make_tokens(surfaces);
}

struct UnitGenOptions {
  bool with_classes = true;
  bool with_chunks = true;
  bool with_clauses = true;
  bool with_discourse = true;
  bool with_entities = true;
};

// A random unit satisfying every annotation invariant.
inline AnnotatedUnit random_unit(std::mt19937& rng,
                                 const UnitGenOptions& opt = {}) {
  std::uniform_int_distribution<std::size_t> n_dist(3, 12);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<std::size_t> word_dist(0, 19);

  AnnotatedUnit unit;
  const std::size_t n = n_dist(rng);
  for (std::size_t i = 0; i < n; ++i) {
    Token tok;
    tok.surface = "w" + std::to_string(word_dist(rng));
    if (coin(rng)) tok.lemma = "l" + std::to_string(word_dist(rng) % 10);
    if (opt.with_classes)
      tok.word_class = coin(rng) ? WordClass::content : WordClass::function;
    tok.index = i;
    unit.tokens.push_back(std::move(tok));
    unit.raw_text += (i ? " " : "") + unit.tokens.back().surface;
  }

  if (opt.with_chunks) {
    std::vector<Chunk> chunks;
    std::size_t pos = 0;
    while (pos < n) {
      std::uniform_int_distribution<std::size_t> len_dist(
          1, std::min<std::size_t>(3, n - pos));
      const std::size_t len = len_dist(rng);
      Chunk chunk;
      chunk.span = {pos, pos + len};
      std::uniform_int_distribution<std::size_t> head_dist(pos, pos + len - 1);
      chunk.head = head_dist(rng);
      for (std::size_t t = pos; t < pos + len; ++t)
        if (t != chunk.head && coin(rng) == 0 && chunk.function_markers.empty())
          chunk.function_markers.push_back(t);
      chunk.is_named_entity = coin(rng) == 0;
      chunk.id = chunks.size();
      chunks.push_back(std::move(chunk));
      pos += len;
    }
    unit.chunks = std::move(chunks);
  }

  if (opt.with_clauses && unit.chunks && !unit.chunks->empty()) {
    std::vector<Clause> clauses;
    std::size_t cid = 0;
    const std::size_t n_chunks = unit.chunks->size();
    while (cid < n_chunks) {
      std::uniform_int_distribution<std::size_t> span_dist(
          1, std::min<std::size_t>(3, n_chunks - cid));
      const std::size_t take = span_dist(rng);
      Clause clause;
      for (std::size_t k = 0; k < take; ++k) clause.chunk_ids.push_back(cid + k);
      clause.id = clauses.size();
      if (clause.id > 0 && coin(rng) == 0) {
        std::uniform_int_distribution<std::size_t> parent_dist(0, clause.id - 1);
        clause.parent = parent_dist(rng);
        clause.relation_label =
            std::vector<std::string>{"cond", "seq", "elab"}[clause.id % 3];
      }
      clauses.push_back(std::move(clause));
      cid += take;
    }
    unit.clauses = std::move(clauses);
  }

  if (opt.with_discourse) {
    DiscourseAnnotation disc;
    if (coin(rng) == 0) disc.topic = "E" + std::to_string(word_dist(rng) % 5);
    if (coin(rng) == 0) disc.focus = "E" + std::to_string(word_dist(rng) % 5);
    if (unit.clauses && unit.clauses->size() >= 2 && coin(rng) == 0) {
      std::uniform_int_distribution<std::size_t> clause_dist(
          0, unit.clauses->size() - 1);
      DiscourseRelation rel;
      rel.from_clause = clause_dist(rng);
      rel.to_clause = clause_dist(rng);
      rel.label = "contrast";
      disc.relations.push_back(rel);
    }
    unit.discourse = std::move(disc);
  }

  if (opt.with_entities) {
    std::uniform_int_distribution<std::size_t> len_dist(1, 6);
    std::vector<std::string> entities;
    const std::size_t len = len_dist(rng);
    for (std::size_t i = 0; i < len; ++i)
      entities.push_back("E" + std::to_string(word_dist(rng) % 8));
    unit.entity_sequence = std::move(entities);
  }
  return unit;
}

// Unit paired with itself: the perfect translation.
inline UnitPair self_pair(const AnnotatedUnit& unit, std::string id) {
  UnitPair pair;
  pair.id = std::move(id);
  pair.source = unit;
  pair.candidate = unit;
  pair.references = {unit};
  return pair;
}

inline std::map<std::string, double> random_simplex(
    std::mt19937& rng, const std::vector<std::string>& names) {
  std::exponential_distribution<double> exp_dist(1.0);
  std::map<std::string, double> weights;
  double total = 0.0;
  for (const std::string& name : names) {
    const double v = exp_dist(rng) + 1e-6;
    weights[name] = v;
    total += v;
  }
  for (auto& [_, v] : weights) v /= total;
  return weights;
}

// Random full profile over all five levels with the default parameter names.
inline cogeval::WeightProfile random_profile(std::mt19937& rng) {
  using cogeval::Level;
  std::uniform_real_distribution<double> gamma_dist(0.0, 1.0);
  std::uniform_real_distribution<double> delta_dist(0.5, 2.0);
  cogeval::WeightProfile profile = cogeval::default_profile();

  std::vector<std::string> level_keys;
  for (const auto& [level, _] : profile.levels)
    level_keys.push_back(std::string(cogeval::level_name(level)));
  auto level_w = random_simplex(rng, level_keys);

  for (auto& [level, lw] : profile.levels) {
    lw.w = level_w[std::string(cogeval::level_name(level))];
    lw.gamma = gamma_dist(rng);
    lw.delta = delta_dist(rng);
    std::vector<std::string> alpha_names, beta_names;
    for (const auto& [name, _] : lw.alpha) alpha_names.push_back(name);
    for (const auto& [name, _] : lw.beta) beta_names.push_back(name);
    lw.alpha = random_simplex(rng, alpha_names);
    if (!beta_names.empty()) lw.beta = random_simplex(rng, beta_names);
  }
  return profile;
}

// A lexicon whose common set and averages are easy to reason about.
inline cogeval::Lexicon simple_lexicon(double ave_sentence_len = 20.0,
                                       double ave_chunks = 4.0) {
  std::unordered_map<std::string, std::int64_t> freq;
  for (int i = 0; i < 20; ++i) freq["w" + std::to_string(i)] = 100 - i;
  return cogeval::Lexicon(std::move(freq), {}, ave_sentence_len, ave_chunks,
                          /*common_rank_cutoff=*/20);
}

// ---------------------------------------------------------------------------
// Independent oracles

// Exhaustive maximum-cardinality matching size over an arbitrary edge
// predicate; exponential, fine for the small sentences it is used on.
inline std::size_t oracle_max_matching(
    std::size_t n_candidates, std::size_t n_references,
    const std::function<bool(std::size_t, std::size_t)>& edge) {
  std::function<std::size_t(std::size_t, unsigned)> go =
      [&](std::size_t c, unsigned used) -> std::size_t {
    if (c == n_candidates) return 0;
    std::size_t best = go(c + 1, used);
    for (std::size_t r = 0; r < n_references; ++r) {
      if (used & (1u << r)) continue;
      if (!edge(c, r)) continue;
      best = std::max(best, 1 + go(c + 1, used | (1u << r)));
    }
    return best;
  };
  return go(0, 0);
}

// Textbook recursive edit distance, deliberately naive.
inline std::size_t oracle_edit_distance(const std::vector<std::string>& a,
                                        const std::vector<std::string>& b,
                                        std::size_t i, std::size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  const std::size_t sub =
      oracle_edit_distance(a, b, i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
  const std::size_t del = oracle_edit_distance(a, b, i + 1, j) + 1;
  const std::size_t ins = oracle_edit_distance(a, b, i, j + 1) + 1;
  return std::min({sub, del, ins});
}

inline std::size_t oracle_edit_distance(const std::vector<std::string>& a,
                                        const std::vector<std::string>& b) {
  return oracle_edit_distance(a, b, 0, 0);
}

// ---------------------------------------------------------------------------
// Temp files

class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0;; ++attempt) {
      auto candidate =
          base / ("cogeval_test_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter_++) + "_" + std::to_string(attempt));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        break;
      }
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name, const std::string& contents) const {
    auto p = path_ / name;
    std::ofstream out(p);
    out << contents;
    return p.string();
  }
  std::string path(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

}  // namespace testsupport
