#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "cogeval/diagnostics.hpp"
#include "cogeval/profile.hpp"
#include "cogeval/registry.hpp"

namespace cogeval {

// Recall-weighted harmonic mean used for every adequacy parameter.
// Defined as 0 at (0,0), where the ratio degenerates.
inline double f_mean(double prec, double recall) {
  if (prec <= 0.0 || recall <= 0.0) return 0.0;
  return 10.0 * prec * recall / (recall + 9.0 * prec);
}

// Convex combination of named parameters. The two maps must carry exactly
// the same names and the weights must lie on the unit simplex.
inline double weighted_sum(const std::map<std::string, double>& params,
                           const std::map<std::string, double>& weights) {
  if (params.size() != weights.size())
    throw ConfigError("weighted_sum: parameter/weight name sets differ in size");
  double total = 0.0;
  for (const auto& [name, value] : params) {
    auto it = weights.find(name);
    if (it == weights.end())
      throw ConfigError("weighted_sum: no weight for parameter '" + name + "'");
    total += it->second * value;
  }
  return total;
}

// Per-level cognition: adequacy discounted by disfluency,
// ease = A * (1 - gamma * B^delta).
inline double level_cognition(double adequacy, double disfluency, double gamma,
                              double delta) {
  return adequacy * (1.0 - gamma * std::pow(disfluency, delta));
}

// Scores of one level: the named P/Q values that actually participated,
// their convex combinations A and B, and the resulting ease G.
struct LevelScore {
  bool active = false;
  double adequacy = 0.0;    // A
  double disfluency = 0.0;  // B
  double ease = 0.0;        // G
  std::map<std::string, double> adequacy_params;    // P, by name
  std::map<std::string, double> disfluency_params;  // Q, by name
};

namespace detail {

// Restrict `weights` to `names` and renormalize to the simplex. Falls back
// to uniform when the restricted mass is zero.
inline std::map<std::string, double> renormalize_over(
    const std::map<std::string, double>& weights,
    const std::map<std::string, double>& names) {
  std::map<std::string, double> out;
  double sum = 0.0;
  for (const auto& [name, _] : names) {
    auto it = weights.find(name);
    if (it != weights.end()) {
      out[name] = it->second;
      sum += it->second;
    }
  }
  if (out.empty()) return out;
  if (sum > 0.0) {
    for (auto& [_, v] : out) v /= sum;
  } else {
    for (auto& [_, v] : out) v = 1.0 / static_cast<double>(out.size());
  }
  return out;
}

}  // namespace detail

// Combine computed parameter values with the level's weights. Parameters
// the profile does not name are dropped; weight mass for parameters that
// were not computed folds into the remaining ones by renormalization, so A
// and B stay convex combinations. A level with no participating adequacy
// parameter is inactive.
inline LevelScore finish_level(
    const std::map<std::string, double>& adequacy_params,
    const std::map<std::string, double>& disfluency_params,
    const LevelWeights& weights) {
  LevelScore score;
  auto alpha = detail::renormalize_over(weights.alpha, adequacy_params);
  if (alpha.empty()) return score;  // inactive

  score.active = true;
  for (const auto& [name, _] : alpha)
    score.adequacy_params[name] = adequacy_params.at(name);
  score.adequacy = weighted_sum(score.adequacy_params, alpha);

  auto beta = detail::renormalize_over(weights.beta, disfluency_params);
  for (const auto& [name, _] : beta)
    score.disfluency_params[name] = disfluency_params.at(name);
  score.disfluency =
      beta.empty() ? 0.0 : weighted_sum(score.disfluency_params, beta);

  score.ease = level_cognition(score.adequacy, score.disfluency, weights.gamma,
                               weights.delta);
  return score;
}

// Linear aggregation over active levels, with the level weights
// renormalized to the active set so the result stays in [0,1].
inline double aggregate(const std::map<Level, LevelScore>& level_scores,
                        const WeightProfile& profile) {
  double active_weight = 0.0;
  double total = 0.0;
  for (const auto& [level, score] : level_scores) {
    if (!score.active) continue;
    auto it = profile.levels.find(level);
    if (it == profile.levels.end()) continue;
    active_weight += it->second.w;
    total += it->second.w * score.ease;
  }
  if (active_weight <= 0.0)
    throw EvalError("aggregate: no active level carries weight");
  return total / active_weight;
}

struct UnitEvaluation {
  std::string id;
  std::map<Level, LevelScore> levels;
  double overall = 0.0;              // aggregated G
  std::size_t reference_index = 0;   // reference that produced the scores
};

struct EvaluationReport {
  std::vector<UnitEvaluation> units;
  double corpus_mean = 0.0;               // mean overall G over units
  std::map<Level, double> per_level_mean; // mean G per level over active units
  std::string profile_hash;
};

}  // namespace cogeval
