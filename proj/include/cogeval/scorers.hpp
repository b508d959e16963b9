#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cogeval/alignment.hpp"
#include "cogeval/calculus.hpp"
#include "cogeval/lexicon.hpp"
#include "cogeval/types.hpp"

namespace cogeval {

// Scorer knobs that are not weight-profile parameters: the chunk/clause
// sizes treated as the maximum comfortable load for the ratio penalties.
struct ScoringOptions {
  double max_chunk_tokens = 5.0;
  double max_chunks_per_clause = 6.0;
};

namespace detail {

inline double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

inline double ratio_or_zero(double num, double den) {
  return den > 0.0 ? num / den : 0.0;
}

inline bool match_any_stage(const Token& a, const Token& b,
                            const MatchResources& resources) {
  if (match_tokens(a, b, MatchStage::exact, resources)) return true;
  if (match_tokens(a, b, MatchStage::stem, resources)) return true;
  return !resources.synonyms.empty() &&
         match_tokens(a, b, MatchStage::synonym, resources);
}

inline std::optional<std::string> folded(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  return fold_case(*s);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Word level

// Adequacy from aligned tokens (all tokens, and function-class tokens when
// both sides carry at least one); disfluency from sentence length, uncommon
// words and terms, each relative to the language's average sentence length.
// An empty candidate scores zero across the board.
inline LevelScore score_word_level(const AnnotatedUnit& candidate,
                                   const AnnotatedUnit& reference,
                                   const WordAlignment& alignment,
                                   const Lexicon& lexicon,
                                   const LevelWeights& weights) {
  std::map<std::string, double> p_values;
  std::map<std::string, double> q_values;

  const double n_cand = static_cast<double>(candidate.tokens.size());
  const double n_ref = static_cast<double>(reference.tokens.size());
  const double matched = static_cast<double>(alignment.pairs.size());
  p_values["lex"] = f_mean(detail::ratio_or_zero(matched, n_cand),
                           detail::ratio_or_zero(matched, n_ref));

  auto count_function = [](const AnnotatedUnit& unit) {
    std::size_t n = 0;
    for (const Token& tok : unit.tokens)
      if (tok.word_class == WordClass::function) ++n;
    return n;
  };
  const std::size_t cand_func = count_function(candidate);
  const std::size_t ref_func = count_function(reference);
  if (cand_func > 0 && ref_func > 0) {
    std::size_t matched_func = 0;
    for (const AlignedToken& pair : alignment.pairs)
      if (candidate.tokens[pair.candidate].word_class == WordClass::function &&
          reference.tokens[pair.reference].word_class == WordClass::function)
        ++matched_func;
    p_values["pos"] =
        f_mean(static_cast<double>(matched_func) / cand_func,
               static_cast<double>(matched_func) / ref_func);
  }

  const double ave_len = lexicon.ave_sentence_len();
  std::size_t uncommon = 0;
  std::size_t terms = 0;
  for (const Token& tok : candidate.tokens) {
    if (!lexicon.is_common(tok.surface)) ++uncommon;
    if (lexicon.is_term(tok.surface)) ++terms;
  }
  q_values["nword"] = detail::clamp01(n_cand / ave_len);
  q_values["uncom"] = detail::clamp01(uncommon / ave_len);
  q_values["term"] = detail::clamp01(terms / ave_len);

  return finish_level(p_values, q_values, weights);
}

// ---------------------------------------------------------------------------
// Chunk level

// Adequacy from aligned chunk pairs with matching heads and matching
// function-marker multisets; disfluency from chunk length, chunk count and
// uncommon named entities. Callers deactivate the level when either side has
// no chunks.
inline LevelScore score_chunk_level(const AnnotatedUnit& candidate,
                                    const AnnotatedUnit& reference,
                                    const ChunkAlignment& chunk_alignment,
                                    const Lexicon& lexicon,
                                    const LevelWeights& weights,
                                    const ScoringOptions& options,
                                    const MatchResources& resources) {
  const auto& cand_chunks = *candidate.chunks;
  const auto& ref_chunks = *reference.chunks;
  const double n_cand = static_cast<double>(cand_chunks.size());
  const double n_ref = static_cast<double>(ref_chunks.size());

  auto marker_multiset = [](const AnnotatedUnit& unit, const Chunk& chunk) {
    std::multiset<std::string> markers;
    for (std::size_t t : chunk.function_markers)
      markers.insert(fold_case(unit.tokens[t].surface));
    return markers;
  };

  std::size_t heads_correct = 0;
  std::size_t markers_correct = 0;
  for (const auto& [cid, rid] : chunk_alignment.pairs) {
    const Chunk& cc = cand_chunks[cid];
    const Chunk& rc = ref_chunks[rid];
    if (detail::match_any_stage(candidate.tokens[cc.head],
                                reference.tokens[rc.head], resources))
      ++heads_correct;
    if (marker_multiset(candidate, cc) == marker_multiset(reference, rc))
      ++markers_correct;
  }

  std::map<std::string, double> p_values;
  p_values["head"] = f_mean(heads_correct / n_cand, heads_correct / n_ref);
  p_values["vibh"] = f_mean(markers_correct / n_cand, markers_correct / n_ref);

  double total_len = 0.0;
  std::size_t uncommon_ne = 0;
  for (const Chunk& chunk : cand_chunks) {
    total_len += static_cast<double>(chunk.span.size());
    if (chunk.is_named_entity &&
        !lexicon.is_common(candidate.tokens[chunk.head].surface))
      ++uncommon_ne;
  }

  std::map<std::string, double> q_values;
  q_values["words_per_chunk"] =
      detail::clamp01(total_len / n_cand / options.max_chunk_tokens);
  q_values["nchunk"] =
      detail::clamp01(n_cand / lexicon.ave_chunks_per_sentence());
  q_values["uncom_ne"] = detail::clamp01(uncommon_ne / n_cand);

  return finish_level(p_values, q_values, weights);
}

// ---------------------------------------------------------------------------
// Clause level

namespace detail {

// Clauses pair by the number of aligned chunks they share, greedily,
// larger counts first.
inline std::vector<Edge> induce_clause_alignment(
    const std::vector<Clause>& cand_clauses,
    const std::vector<Clause>& ref_clauses,
    const ChunkAlignment& chunk_alignment) {
  std::unordered_map<std::size_t, std::size_t> cand_chunk_clause;
  for (const Clause& clause : cand_clauses)
    for (std::size_t cid : clause.chunk_ids) cand_chunk_clause[cid] = clause.id;
  std::unordered_map<std::size_t, std::size_t> ref_chunk_clause;
  for (const Clause& clause : ref_clauses)
    for (std::size_t cid : clause.chunk_ids) ref_chunk_clause[cid] = clause.id;

  std::map<Edge, std::size_t> overlap;
  for (const auto& [c, r] : chunk_alignment.pairs) {
    auto ci = cand_chunk_clause.find(c);
    auto ri = ref_chunk_clause.find(r);
    if (ci == cand_chunk_clause.end() || ri == ref_chunk_clause.end()) continue;
    ++overlap[{ci->second, ri->second}];
  }
  return greedy_overlap_assignment(overlap);
}

// Heads of a clause: the head token of its earliest-starting chunk.
inline std::size_t clause_head_token(const Clause& clause,
                                     const std::vector<Chunk>& chunks) {
  std::size_t best = clause.chunk_ids.front();
  for (std::size_t cid : clause.chunk_ids)
    if (chunks[cid].span.begin < chunks[best].span.begin) best = cid;
  return chunks[best].head;
}

}  // namespace detail

// Adequacy from chunk-alignment links that stay inside aligned clauses and
// from matched (parent, child, label) clause-relation triples; disfluency
// from clause size, clause fragmentation over the token span, and head
// distance of related clauses. Callers deactivate the level when either side
// lacks clauses.
inline LevelScore score_clause_level(const AnnotatedUnit& candidate,
                                     const AnnotatedUnit& reference,
                                     const ChunkAlignment& chunk_alignment,
                                     const LevelWeights& weights,
                                     const ScoringOptions& options) {
  const auto& cand_clauses = *candidate.clauses;
  const auto& ref_clauses = *reference.clauses;
  const auto& cand_chunks = *candidate.chunks;

  const auto clause_pairs = detail::induce_clause_alignment(
      cand_clauses, ref_clauses, chunk_alignment);
  std::set<detail::Edge> aligned_clauses(clause_pairs.begin(),
                                         clause_pairs.end());
  std::unordered_map<std::size_t, std::size_t> cand_to_ref_clause;
  for (const auto& [c, r] : clause_pairs) cand_to_ref_clause[c] = r;

  std::unordered_map<std::size_t, std::size_t> cand_chunk_clause;
  for (const Clause& clause : cand_clauses)
    for (std::size_t cid : clause.chunk_ids) cand_chunk_clause[cid] = clause.id;
  std::unordered_map<std::size_t, std::size_t> ref_chunk_clause;
  for (const Clause& clause : ref_clauses)
    for (std::size_t cid : clause.chunk_ids) ref_chunk_clause[cid] = clause.id;

  // Chunk links preserved by the clause correspondence.
  std::size_t preserved = 0;
  for (const auto& [c, r] : chunk_alignment.pairs) {
    auto ci = cand_chunk_clause.find(c);
    auto ri = ref_chunk_clause.find(r);
    if (ci == cand_chunk_clause.end() || ri == ref_chunk_clause.end()) continue;
    if (aligned_clauses.count({ci->second, ri->second})) ++preserved;
  }
  const double cand_in_clauses = static_cast<double>(cand_chunk_clause.size());
  const double ref_in_clauses = static_cast<double>(ref_chunk_clause.size());

  std::map<std::string, double> p_values;
  p_values["intra"] =
      f_mean(detail::ratio_or_zero(preserved, cand_in_clauses),
             detail::ratio_or_zero(preserved, ref_in_clauses));

  // (parent, child, label) triples matched across the clause correspondence.
  using Triple = std::tuple<std::size_t, std::size_t, std::optional<std::string>>;
  auto triples_of = [](const std::vector<Clause>& clauses) {
    std::vector<Triple> triples;
    for (const Clause& clause : clauses)
      if (clause.parent)
        triples.emplace_back(*clause.parent, clause.id,
                             clause.relation_label);
    return triples;
  };
  const auto cand_triples = triples_of(cand_clauses);
  const auto ref_triples = triples_of(ref_clauses);
  if (!cand_triples.empty() || !ref_triples.empty()) {
    std::multiset<Triple> ref_pool(ref_triples.begin(), ref_triples.end());
    std::size_t matched = 0;
    for (const auto& [parent, child, label] : cand_triples) {
      auto pi = cand_to_ref_clause.find(parent);
      auto ci = cand_to_ref_clause.find(child);
      if (pi == cand_to_ref_clause.end() || ci == cand_to_ref_clause.end())
        continue;
      Triple mapped{pi->second, ci->second, detail::folded(label)};
      auto hit = std::find_if(ref_pool.begin(), ref_pool.end(),
                              [&](const Triple& t) {
                                return std::get<0>(t) == std::get<0>(mapped) &&
                                       std::get<1>(t) == std::get<1>(mapped) &&
                                       detail::folded(std::get<2>(t)) ==
                                           std::get<2>(mapped);
                              });
      if (hit != ref_pool.end()) {
        ref_pool.erase(hit);
        ++matched;
      }
    }
    p_values["inter"] = f_mean(
        detail::ratio_or_zero(matched, static_cast<double>(cand_triples.size())),
        detail::ratio_or_zero(matched, static_cast<double>(ref_triples.size())));
  }

  // Disfluency over the candidate side only.
  double chunk_load = 0.0;
  double fragmentation = 0.0;
  for (const Clause& clause : cand_clauses) {
    chunk_load += static_cast<double>(clause.chunk_ids.size());
    std::size_t token_count = 0;
    std::size_t lo = cand_chunks[clause.chunk_ids.front()].span.begin;
    std::size_t hi = cand_chunks[clause.chunk_ids.front()].span.end;
    for (std::size_t cid : clause.chunk_ids) {
      token_count += cand_chunks[cid].span.size();
      lo = std::min(lo, cand_chunks[cid].span.begin);
      hi = std::max(hi, cand_chunks[cid].span.end);
    }
    const double span = static_cast<double>(hi - lo);
    if (span > 0)
      fragmentation += 1.0 - static_cast<double>(token_count) / span;
  }
  const double n_clauses = static_cast<double>(cand_clauses.size());

  double long_dist = 0.0;
  std::size_t related = 0;
  for (const Clause& clause : cand_clauses) {
    if (!clause.parent) continue;
    ++related;
    const double a = static_cast<double>(
        detail::clause_head_token(clause, cand_chunks));
    const double b = static_cast<double>(detail::clause_head_token(
        cand_clauses[*clause.parent], cand_chunks));
    long_dist += detail::ratio_or_zero(
        std::abs(a - b), static_cast<double>(candidate.tokens.size()));
  }

  std::map<std::string, double> q_values;
  q_values["chunks_per_clause"] = detail::clamp01(
      chunk_load / n_clauses / options.max_chunks_per_clause);
  q_values["fragmentation"] = detail::clamp01(fragmentation / n_clauses);
  q_values["long_dist"] =
      detail::clamp01(related ? long_dist / static_cast<double>(related) : 0.0);

  return finish_level(p_values, q_values, weights);
}

// ---------------------------------------------------------------------------
// Discourse level

// Adequacy from topic/focus agreement (half credit each) and matched
// discourse-relation triples; disfluency from the clause-id distance of
// linked clauses. Callers deactivate the level when either side lacks the
// discourse layer.
inline LevelScore score_discourse_level(const AnnotatedUnit& candidate,
                                        const AnnotatedUnit& reference,
                                        const LevelWeights& weights) {
  const DiscourseAnnotation& cd = *candidate.discourse;
  const DiscourseAnnotation& rd = *reference.discourse;

  std::map<std::string, double> p_values;
  const int agreements = (detail::folded(cd.topic) == detail::folded(rd.topic)) +
                         (detail::folded(cd.focus) == detail::folded(rd.focus));
  p_values["topic_focus"] = agreements / 2.0;

  if (!cd.relations.empty() || !rd.relations.empty()) {
    using Triple = std::tuple<std::size_t, std::size_t, std::string>;
    std::multiset<Triple> ref_pool;
    for (const DiscourseRelation& rel : rd.relations)
      ref_pool.insert({rel.from_clause, rel.to_clause, fold_case(rel.label)});
    std::size_t matched = 0;
    for (const DiscourseRelation& rel : cd.relations) {
      Triple key{rel.from_clause, rel.to_clause, fold_case(rel.label)};
      auto hit = ref_pool.find(key);
      if (hit != ref_pool.end()) {
        ref_pool.erase(hit);
        ++matched;
      }
    }
    p_values["relations"] = f_mean(
        detail::ratio_or_zero(matched, static_cast<double>(cd.relations.size())),
        detail::ratio_or_zero(matched, static_cast<double>(rd.relations.size())));
  }

  double linked_dist = 0.0;
  const double n_clauses =
      candidate.clauses ? static_cast<double>(candidate.clauses->size()) : 0.0;
  if (!cd.relations.empty() && n_clauses > 0) {
    double total = 0.0;
    for (const DiscourseRelation& rel : cd.relations)
      total += std::abs(static_cast<double>(rel.to_clause) -
                        static_cast<double>(rel.from_clause));
    linked_dist =
        detail::clamp01(total / static_cast<double>(cd.relations.size()) /
                        n_clauses);
  }
  std::map<std::string, double> q_values;
  q_values["linked_dist"] = linked_dist;

  return finish_level(p_values, q_values, weights);
}

// ---------------------------------------------------------------------------
// Entity flow (semantic level)

// Step-wise length agreement between the source entity sequence and the
// candidate's: equal lengths score 1, up to 20% difference 0.9, up to 30%
// difference 0.75, anything beyond 0.
inline double compare_length(std::size_t source_len, std::size_t candidate_len) {
  const double d = std::abs(static_cast<double>(source_len) -
                            static_cast<double>(candidate_len)) /
                   static_cast<double>(source_len);
  if (d == 0.0) return 1.0;
  if (d <= 0.2) return 0.9;
  if (d <= 0.3) return 0.75;
  return 0.0;
}

inline double compare_length(const std::vector<std::string>& source_seq,
                             const std::vector<std::string>& candidate_seq) {
  return compare_length(source_seq.size(), candidate_seq.size());
}

// Unit-cost insert/delete/substitute distance over entity strings.
inline std::size_t edit_distance(const std::vector<std::string>& a,
                                 const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Similarity in [0,1]: 1 minus the edit distance normalized by the longer
// sequence. Equal only to 1 when the sequences are identical.
inline double entity_edit_similarity(const std::vector<std::string>& source_seq,
                                     const std::vector<std::string>& candidate_seq) {
  const std::size_t longest =
      std::max(source_seq.size(), candidate_seq.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(source_seq, candidate_seq)) /
                   static_cast<double>(longest);
}

// Compares the candidate's entity sequence with the SOURCE's (unlike the
// other levels, which compare against the reference). Disfluency stays at
// zero unless the profile names the `seq` parameter.
inline LevelScore score_entity_flow(const AnnotatedUnit& source,
                                    const AnnotatedUnit& candidate,
                                    const LevelWeights& weights) {
  const auto& src_seq = *source.entity_sequence;
  const auto& cand_seq = *candidate.entity_sequence;

  std::map<std::string, double> p_values;
  p_values["seq_len"] = compare_length(src_seq, cand_seq);
  p_values["seq_edit"] = entity_edit_similarity(src_seq, cand_seq);

  std::map<std::string, double> q_values;
  q_values["seq"] = 1.0 - p_values["seq_edit"];

  return finish_level(p_values, q_values, weights);
}

}  // namespace cogeval
