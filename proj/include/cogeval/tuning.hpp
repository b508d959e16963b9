#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cogeval/calculus.hpp"
#include "cogeval/evaluate.hpp"
#include "cogeval/profile.hpp"

namespace cogeval {

// ---------------------------------------------------------------------------
// Correlation (meta-evaluation against human judgments)

struct Correlations {
  double pearson = 0.0;
  double spearman = 0.0;
};

inline double pearson_correlation(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  if (x.size() != y.size())
    throw EvalError("correlation: length mismatch");
  if (x.empty()) throw EvalError("correlation: empty input");
  const double n = static_cast<double>(x.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= n;
  mean_y /= n;
  double cov = 0.0, var_x = 0.0, var_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    cov += dx * dy;
    var_x += dx * dx;
    var_y += dy * dy;
  }
  if (var_x <= 0.0 || var_y <= 0.0)
    throw EvalError("correlation undefined: zero variance");
  return cov / std::sqrt(var_x * var_y);
}

// 1-based ranks with ties receiving the average of their positions.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

inline Correlations correlation(const std::vector<double>& metric_scores,
                                const std::vector<double>& human_scores) {
  Correlations c;
  c.pearson = pearson_correlation(metric_scores, human_scores);
  c.spearman = pearson_correlation(average_ranks(metric_scores),
                                   average_ranks(human_scores));
  return c;
}

// ---------------------------------------------------------------------------
// Weight fitting

enum class TuningLoss { squared_error };

struct TuningConfig {
  int max_iterations = 200;
  double step = 0.05;  // halved when a full pass brings no improvement
  std::uint64_t seed = 0;
  TuningLoss loss = TuningLoss::squared_error;
  std::set<std::string> frozen;  // paths like "word.w", "word.alpha.lex"
  bool optimize_gamma = false;
};

struct TuningResult {
  WeightProfile profile;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double pearson = 0.0;
  double spearman = 0.0;
  int iterations = 0;
};

namespace detail {

// Per-unit, per-reference parameter values. The P/Q maps are independent of
// the weight values, so the descent can re-combine them cheaply.
struct UnitFeatures {
  std::vector<std::map<Level, LevelScore>> per_reference;
  double human = 0.0;
};

inline std::vector<UnitFeatures> collect_features(
    const std::vector<UnitPair>& dataset, const ScoringContext& ctx) {
  std::vector<UnitFeatures> features;
  features.reserve(dataset.size());
  for (const UnitPair& pair : dataset) {
    UnitFeatures f;
    f.human = *pair.human_score;
    for (const AnnotatedUnit& ref : pair.references)
      f.per_reference.push_back(score_against_reference(pair, ref, ctx));
    features.push_back(std::move(f));
  }
  return features;
}

inline double unit_score(const UnitFeatures& features,
                         const WeightProfile& profile) {
  double best = 0.0;
  bool have = false;
  for (const auto& ref_levels : features.per_reference) {
    std::map<Level, LevelScore> rescored;
    for (const auto& [level, score] : ref_levels) {
      auto it = profile.levels.find(level);
      if (it == profile.levels.end()) continue;
      rescored[level] =
          score.active
              ? finish_level(score.adequacy_params, score.disfluency_params,
                             it->second)
              : LevelScore{};
    }
    double overall;
    try {
      overall = aggregate(rescored, profile);
    } catch (const EvalError&) {
      continue;
    }
    if (!have || overall > best) {
      best = overall;
      have = true;
    }
  }
  if (!have) throw EvalError("tuning: unit has no scorable level");
  return best;
}

inline double dataset_loss(const std::vector<UnitFeatures>& features,
                           const WeightProfile& profile) {
  double total = 0.0;
  for (const UnitFeatures& f : features) {
    const double diff = unit_score(f, profile) - f.human;
    total += diff * diff;
  }
  return total / static_cast<double>(features.size());
}

struct Coordinate {
  enum class Kind { level_weight, alpha, beta, gamma };
  Level level = Level::word;
  Kind kind = Kind::level_weight;
  std::string name;  // parameter name for alpha/beta

  std::string path() const {
    std::string p(level_name(level));
    switch (kind) {
      case Kind::level_weight: return p + ".w";
      case Kind::alpha: return p + ".alpha." + name;
      case Kind::beta: return p + ".beta." + name;
      case Kind::gamma: return p + ".gamma";
    }
    return p;
  }
};

// Nudge one simplex coordinate and re-project: the coordinate is clipped to
// the mass not pinned by frozen entries, and the other unfrozen entries are
// rescaled to absorb the difference.
inline bool perturb_simplex(std::vector<double>& values,
                            const std::vector<bool>& frozen, std::size_t k,
                            double delta) {
  double frozen_mass = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (frozen[i]) frozen_mass += values[i];
  const double avail = std::max(0.0, 1.0 - frozen_mass);
  const double target = std::min(avail, std::max(0.0, values[k] + delta));
  if (target == values[k]) return false;

  double rest = 0.0;
  std::size_t n_rest = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (i != k && !frozen[i]) {
      rest += values[i];
      ++n_rest;
    }
  if (n_rest == 0) return false;  // single free coordinate cannot move

  const double remaining = avail - target;
  if (rest > 0.0) {
    const double scale = remaining / rest;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (i != k && !frozen[i]) values[i] *= scale;
  } else {
    const double share = remaining / static_cast<double>(n_rest);
    for (std::size_t i = 0; i < values.size(); ++i)
      if (i != k && !frozen[i]) values[i] = share;
  }
  values[k] = target;
  return true;
}

}  // namespace detail

// Fit the free weights to human judgments by projected coordinate descent:
// perturb one simplex coordinate at a time by +/-step, re-project, and keep
// the move only when the mean squared error strictly decreases. A pass with
// no accepted move halves the step; the search stops at max_iterations
// passes or once the step becomes negligible. Deterministic for a given
// seed, which drives the coordinate visit order.
inline TuningResult fit_weights(const std::vector<UnitPair>& dataset,
                                const ScoringContext& ctx,
                                const TuningConfig& config) {
  if (dataset.empty()) throw EvalError("tuning: empty dataset");
  for (const UnitPair& pair : dataset)
    if (!pair.human_score)
      throw EvalError("tuning: unit '" + pair.id + "' lacks a human score");
  {
    std::vector<Diagnostic> diags = validate_profile(ctx.profile);
    if (!diags.empty())
      throw ConfigError("tuning: invalid initial profile: " +
                        join_diagnostics(diags));
  }
  if (!(config.step > 0.0) || config.max_iterations <= 0)
    throw ConfigError("tuning: step and max_iterations must be positive");

  const std::vector<detail::UnitFeatures> features =
      detail::collect_features(dataset, ctx);

  WeightProfile profile = ctx.profile;
  TuningResult result;
  result.initial_loss = detail::dataset_loss(features, profile);
  double best_loss = result.initial_loss;

  // Movable coordinates, in a stable base order.
  std::vector<detail::Coordinate> coords;
  for (const auto& [level, lw] : profile.levels) {
    coords.push_back({level, detail::Coordinate::Kind::level_weight, ""});
    for (const auto& [name, _] : lw.alpha)
      coords.push_back({level, detail::Coordinate::Kind::alpha, name});
    for (const auto& [name, _] : lw.beta)
      coords.push_back({level, detail::Coordinate::Kind::beta, name});
    if (config.optimize_gamma)
      coords.push_back({level, detail::Coordinate::Kind::gamma, ""});
  }
  std::erase_if(coords, [&](const detail::Coordinate& c) {
    return config.frozen.count(c.path()) > 0;
  });

  // Apply one perturbation; returns false when the move is a no-op.
  auto apply = [&](WeightProfile& p, const detail::Coordinate& coord,
                   double delta) -> bool {
    using Kind = detail::Coordinate::Kind;
    if (coord.kind == Kind::gamma) {
      double& gamma = p.levels.at(coord.level).gamma;
      const double target = std::min(1.0, std::max(0.0, gamma + delta));
      if (target == gamma) return false;
      gamma = target;
      return true;
    }
    if (coord.kind == Kind::level_weight) {
      std::vector<Level> keys;
      std::vector<double> values;
      std::vector<bool> frozen;
      std::size_t k = 0;
      for (const auto& [level, lw] : p.levels) {
        if (level == coord.level) k = keys.size();
        keys.push_back(level);
        values.push_back(lw.w);
        frozen.push_back(config.frozen.count(
                             std::string(level_name(level)) + ".w") > 0);
      }
      if (!detail::perturb_simplex(values, frozen, k, delta)) return false;
      for (std::size_t i = 0; i < keys.size(); ++i)
        p.levels.at(keys[i]).w = values[i];
      return true;
    }
    auto& table = coord.kind == Kind::alpha ? p.levels.at(coord.level).alpha
                                            : p.levels.at(coord.level).beta;
    const char* kind_name = coord.kind == Kind::alpha ? ".alpha." : ".beta.";
    std::vector<std::string> keys;
    std::vector<double> values;
    std::vector<bool> frozen;
    std::size_t k = 0;
    for (const auto& [name, value] : table) {
      if (name == coord.name) k = keys.size();
      keys.push_back(name);
      values.push_back(value);
      frozen.push_back(config.frozen.count(std::string(level_name(coord.level)) +
                                           kind_name + name) > 0);
    }
    if (!detail::perturb_simplex(values, frozen, k, delta)) return false;
    for (std::size_t i = 0; i < keys.size(); ++i) table.at(keys[i]) = values[i];
    return true;
  };

  std::mt19937_64 rng(config.seed);
  double step = config.step;
  for (int pass = 0; pass < config.max_iterations; ++pass) {
    result.iterations = pass + 1;
    std::shuffle(coords.begin(), coords.end(), rng);
    bool improved = false;
    for (const detail::Coordinate& coord : coords) {
      for (double delta : {step, -step}) {
        WeightProfile trial = profile;
        if (!apply(trial, coord, delta)) continue;
        const double loss = detail::dataset_loss(features, trial);
        if (loss < best_loss) {
          profile = std::move(trial);
          best_loss = loss;
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      step /= 2.0;
      if (step < 1e-6) break;
    }
  }

  result.profile = std::move(profile);
  result.final_loss = best_loss;

  std::vector<double> metric, human;
  metric.reserve(features.size());
  human.reserve(features.size());
  for (const detail::UnitFeatures& f : features) {
    metric.push_back(detail::unit_score(f, result.profile));
    human.push_back(f.human);
  }
  try {
    Correlations c = correlation(metric, human);
    result.pearson = c.pearson;
    result.spearman = c.spearman;
  } catch (const EvalError&) {
    result.pearson = std::numeric_limits<double>::quiet_NaN();
    result.spearman = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

}  // namespace cogeval
