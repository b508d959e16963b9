#pragma once

#include <cmath>
#include <map>
#include <string>

#include "cogeval/diagnostics.hpp"
#include "cogeval/registry.hpp"

namespace cogeval {

inline constexpr double kSimplexTolerance = 1e-9;

// Free parameters of one level: its share `w` of the overall score, the
// disfluency shape (gamma, delta), and the simplex weights over the level's
// named adequacy/disfluency parameters.
struct LevelWeights {
  double w = 0.0;
  double gamma = 0.5;
  double delta = 1.0;
  std::map<std::string, double> alpha;  // adequacy weights, sum to 1
  std::map<std::string, double> beta;   // disfluency weights, sum to 1 (may be empty)

  bool operator==(const LevelWeights&) const = default;
};

// The calculus's entire free-parameter set. Levels may be omitted; the
// `w` values of the levels present must sum to 1.
struct WeightProfile {
  std::map<Level, LevelWeights> levels;

  bool has(Level level) const { return levels.count(level) > 0; }
  bool operator==(const WeightProfile&) const = default;
};

namespace detail {

inline double map_sum(const std::map<std::string, double>& m) {
  double s = 0.0;
  for (const auto& [k, v] : m) s += v;
  return s;
}

}  // namespace detail

// Uniform starting point: equal level shares, equal parameter weights,
// gamma = 0.5 and delta = 1 everywhere. The entity-flow level carries no
// disfluency weight by default.
inline WeightProfile default_profile() {
  WeightProfile profile;
  auto& word = profile.levels[Level::word];
  word.w = 0.2;
  word.alpha = {{"lex", 0.5}, {"pos", 0.5}};
  word.beta = {{"nword", 1.0 / 3}, {"uncom", 1.0 / 3}, {"term", 1.0 / 3}};

  auto& chunk = profile.levels[Level::chunk];
  chunk.w = 0.2;
  chunk.alpha = {{"head", 0.5}, {"vibh", 0.5}};
  chunk.beta = {{"words_per_chunk", 1.0 / 3},
                {"nchunk", 1.0 / 3},
                {"uncom_ne", 1.0 / 3}};

  auto& clause = profile.levels[Level::clause];
  clause.w = 0.2;
  clause.alpha = {{"intra", 0.5}, {"inter", 0.5}};
  clause.beta = {{"chunks_per_clause", 1.0 / 3},
                 {"fragmentation", 1.0 / 3},
                 {"long_dist", 1.0 / 3}};

  auto& discourse = profile.levels[Level::discourse];
  discourse.w = 0.2;
  discourse.alpha = {{"topic_focus", 0.5}, {"relations", 0.5}};
  discourse.beta = {{"linked_dist", 1.0}};

  auto& entity = profile.levels[Level::entity_flow];
  entity.w = 0.2;
  entity.alpha = {{"seq_len", 0.5}, {"seq_edit", 0.5}};
  // beta left empty: entity-flow disfluency is covered at the chunk level.
  return profile;
}

// Structural validation: simplex sums within tolerance, gamma in [0,1],
// delta > 0, non-negative weights, and every parameter name admitted by the
// registry. Returns one diagnostic per violation; empty means valid.
inline std::vector<Diagnostic> validate_profile(
    const WeightProfile& profile,
    const ParameterRegistry& registry = default_registry()) {
  std::vector<Diagnostic> diags;
  auto report = [&diags](std::string msg) {
    diags.push_back({std::move(msg)});
  };

  if (profile.levels.empty()) {
    report("profile has no levels");
    return diags;
  }

  double level_sum = 0.0;
  for (const auto& [level, lw] : profile.levels) {
    const std::string name(level_name(level));
    level_sum += lw.w;
    if (lw.w < 0.0) report(name + ": level weight " + std::to_string(lw.w) + " < 0");
    if (lw.gamma < 0.0 || lw.gamma > 1.0)
      report(name + ": gamma " + std::to_string(lw.gamma) + " outside [0,1]");
    if (!(lw.delta > 0.0))
      report(name + ": delta " + std::to_string(lw.delta) + " must be > 0");

    for (const auto& [pname, value] : lw.alpha) {
      if (value < 0.0)
        report(name + ": alpha." + pname + " " + std::to_string(value) + " < 0");
      if (!registry.has_adequacy(level, pname))
        report(name + ": unknown adequacy parameter '" + pname + "'");
    }
    for (const auto& [qname, value] : lw.beta) {
      if (value < 0.0)
        report(name + ": beta." + qname + " " + std::to_string(value) + " < 0");
      if (!registry.has_disfluency(level, qname))
        report(name + ": unknown disfluency parameter '" + qname + "'");
    }
    if (!lw.alpha.empty()) {
      double s = detail::map_sum(lw.alpha);
      if (std::abs(s - 1.0) > kSimplexTolerance)
        report(name + ": alpha sum " + std::to_string(s) + " != 1");
    }
    if (!lw.beta.empty()) {
      double s = detail::map_sum(lw.beta);
      if (std::abs(s - 1.0) > kSimplexTolerance)
        report(name + ": beta sum " + std::to_string(s) + " != 1");
    }
  }
  if (std::abs(level_sum - 1.0) > kSimplexTolerance)
    report("level weight sum " + std::to_string(level_sum) + " != 1");
  return diags;
}

}  // namespace cogeval
