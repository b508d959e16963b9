#pragma once

#include <atomic>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cogeval/alignment.hpp"
#include "cogeval/calculus.hpp"
#include "cogeval/ingest.hpp"
#include "cogeval/lexicon.hpp"
#include "cogeval/profile.hpp"
#include "cogeval/scorers.hpp"
#include "cogeval/types.hpp"

namespace cogeval {

// Everything shared, read-only, across unit evaluations.
struct ScoringContext {
  WeightProfile profile;
  Lexicon lexicon;
  MatchResources resources;
  ScoringOptions options;
};

namespace detail {

inline bool has_chunks(const AnnotatedUnit& unit) {
  return unit.chunks && !unit.chunks->empty();
}
inline bool has_clauses(const AnnotatedUnit& unit) {
  return unit.clauses && !unit.clauses->empty();
}

}  // namespace detail

// Score every profile level of the candidate against one reference. Levels
// whose annotation layers are missing on either side come back inactive;
// entity flow needs an entity sequence on the source and the candidate.
inline std::map<Level, LevelScore> score_against_reference(
    const UnitPair& pair, const AnnotatedUnit& reference,
    const ScoringContext& ctx) {
  const AnnotatedUnit& candidate = pair.candidate;
  std::map<Level, LevelScore> levels;

  const WordAlignment word_alignment =
      align_words(candidate.tokens, reference.tokens, ctx.resources);
  if (ctx.profile.has(Level::word))
    levels[Level::word] =
        score_word_level(candidate, reference, word_alignment, ctx.lexicon,
                         ctx.profile.levels.at(Level::word));

  const bool chunks_ok =
      detail::has_chunks(candidate) && detail::has_chunks(reference);
  std::optional<ChunkAlignment> chunk_alignment;
  if (chunks_ok)
    chunk_alignment =
        align_chunks(*candidate.chunks, *reference.chunks, word_alignment);

  if (ctx.profile.has(Level::chunk))
    levels[Level::chunk] =
        chunks_ok ? score_chunk_level(candidate, reference, *chunk_alignment,
                                      ctx.lexicon,
                                      ctx.profile.levels.at(Level::chunk),
                                      ctx.options, ctx.resources)
                  : LevelScore{};

  const bool clauses_ok = chunks_ok && detail::has_clauses(candidate) &&
                          detail::has_clauses(reference);
  if (ctx.profile.has(Level::clause))
    levels[Level::clause] =
        clauses_ok ? score_clause_level(candidate, reference, *chunk_alignment,
                                        ctx.profile.levels.at(Level::clause),
                                        ctx.options)
                   : LevelScore{};

  const bool discourse_ok =
      candidate.discourse.has_value() && reference.discourse.has_value();
  if (ctx.profile.has(Level::discourse))
    levels[Level::discourse] =
        discourse_ok ? score_discourse_level(
                           candidate, reference,
                           ctx.profile.levels.at(Level::discourse))
                     : LevelScore{};

  const bool entities_ok = pair.source && pair.source->entity_sequence &&
                           !pair.source->entity_sequence->empty() &&
                           candidate.entity_sequence.has_value();
  if (ctx.profile.has(Level::entity_flow))
    levels[Level::entity_flow] =
        entities_ok ? score_entity_flow(*pair.source, candidate,
                                        ctx.profile.levels.at(Level::entity_flow))
                    : LevelScore{};

  return levels;
}

// Score a unit against each reference independently and keep the reference
// with the highest overall score (first one on ties).
inline UnitEvaluation evaluate_pair(const UnitPair& pair,
                                    const ScoringContext& ctx) {
  if (pair.references.empty())
    throw EvalError("unit '" + pair.id + "' has no references");

  std::optional<UnitEvaluation> best;
  for (std::size_t r = 0; r < pair.references.size(); ++r) {
    std::map<Level, LevelScore> levels =
        score_against_reference(pair, pair.references[r], ctx);
    double overall;
    try {
      overall = aggregate(levels, ctx.profile);
    } catch (const EvalError&) {
      continue;  // nothing scorable against this reference
    }
    if (!best || overall > best->overall)
      best = UnitEvaluation{pair.id, std::move(levels), overall, r};
  }
  if (!best)
    throw EvalError("unit '" + pair.id + "': no level could be scored");
  return *best;
}

struct CorpusEvaluation {
  EvaluationReport report;
  std::vector<Diagnostic> diagnostics;  // units that could not be scored
};

// Evaluate a corpus, optionally across threads. Output order always matches
// input order; units that cannot be scored are skipped with a diagnostic.
inline CorpusEvaluation evaluate_corpus(const std::vector<UnitPair>& pairs,
                                        const ScoringContext& ctx,
                                        unsigned jobs = 1) {
  std::vector<std::optional<UnitEvaluation>> slots(pairs.size());
  std::vector<std::string> errors(pairs.size());

  auto work = [&](std::size_t i) {
    try {
      slots[i] = evaluate_pair(pairs[i], ctx);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };

  if (jobs <= 1 || pairs.size() < 2) {
    for (std::size_t i = 0; i < pairs.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    const unsigned n_workers =
        std::min<std::size_t>(jobs, pairs.size());
    workers.reserve(n_workers);
    for (unsigned t = 0; t < n_workers; ++t)
      workers.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < pairs.size();
             i = next.fetch_add(1))
          work(i);
      });
    for (std::thread& t : workers) t.join();
  }

  CorpusEvaluation out;
  out.report.profile_hash = profile_hash(ctx.profile);
  std::map<Level, std::pair<double, std::size_t>> level_totals;
  double total = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!slots[i]) {
      out.diagnostics.push_back(
          {"unit '" + pairs[i].id + "' skipped: " + errors[i]});
      continue;
    }
    total += slots[i]->overall;
    for (const auto& [level, score] : slots[i]->levels)
      if (score.active) {
        level_totals[level].first += score.ease;
        level_totals[level].second += 1;
      }
    out.report.units.push_back(std::move(*slots[i]));
  }
  if (!out.report.units.empty())
    out.report.corpus_mean = total / static_cast<double>(out.report.units.size());
  for (const auto& [level, acc] : level_totals)
    out.report.per_level_mean[level] =
        acc.first / static_cast<double>(acc.second);
  return out;
}

// ---------------------------------------------------------------------------
// Report JSON

inline nlohmann::json level_score_to_json(const LevelScore& score) {
  nlohmann::json j;
  j["active"] = score.active;
  if (!score.active) return j;
  j["A"] = score.adequacy;
  j["B"] = score.disfluency;
  j["G"] = score.ease;
  j["P"] = score.adequacy_params;
  j["Q"] = score.disfluency_params;
  return j;
}

inline nlohmann::json report_to_json(const EvaluationReport& report,
                                     const WeightProfile& profile) {
  nlohmann::json units = nlohmann::json::array();
  for (const UnitEvaluation& unit : report.units) {
    nlohmann::json uj;
    uj["id"] = unit.id;
    uj["overall_G"] = unit.overall;
    uj["reference_index"] = unit.reference_index;
    nlohmann::json levels = nlohmann::json::object();
    for (const auto& [level, score] : unit.levels)
      levels[std::string(level_name(level))] = level_score_to_json(score);
    uj["levels"] = std::move(levels);
    units.push_back(std::move(uj));
  }
  nlohmann::json per_level = nlohmann::json::object();
  for (const auto& [level, mean] : report.per_level_mean)
    per_level[std::string(level_name(level))] = mean;

  return nlohmann::json{{"profile_hash", report.profile_hash},
                        {"profile", profile_to_json(profile)},
                        {"corpus_mean_G", report.corpus_mean},
                        {"per_level_mean", std::move(per_level)},
                        {"units", std::move(units)}};
}

}  // namespace cogeval
