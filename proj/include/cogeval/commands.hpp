#pragma once

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "cogeval/evaluate.hpp"
#include "cogeval/ingest.hpp"
#include "cogeval/tuning.hpp"

namespace cogeval {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;      // bad usage or unreadable files
inline constexpr int kExitValidation = 2; // readable but invalid content

struct CommandPaths {
  std::string corpus;
  std::string profile;
  std::string lexicon;   // frequency table
  std::string terms;     // optional
  std::string stats;
  std::string synonyms;  // optional
  std::string out;       // optional; empty means stdout
};

struct ScoreFlags {
  bool strict = false;
  bool summary = false;
  unsigned jobs = 1;
};

struct TuneFlags {
  std::uint64_t seed = 0;
  int max_iters = 200;
};

namespace detail {

inline std::optional<std::ifstream> open_input(const std::string& path,
                                               std::ostream& err) {
  std::ifstream in(path);
  if (!in) {
    err << "error: cannot open " << path << "\n";
    return std::nullopt;
  }
  return in;
}

// Load profile + lexicon + matching resources. On failure prints to `err`
// and reports the exit code through `code`.
inline std::optional<ScoringContext> load_context(const CommandPaths& paths,
                                                  std::ostream& err,
                                                  int& code) {
  ScoringContext ctx;

  auto profile_in = open_input(paths.profile, err);
  if (!profile_in) {
    code = kExitUsage;
    return std::nullopt;
  }
  try {
    ctx.profile = load_profile(*profile_in);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    code = kExitValidation;
    return std::nullopt;
  }

  auto freq_in = open_input(paths.lexicon, err);
  auto stats_in = open_input(paths.stats, err);
  if (!freq_in || !stats_in) {
    code = kExitUsage;
    return std::nullopt;
  }
  std::optional<std::ifstream> terms_file;
  if (!paths.terms.empty()) {
    terms_file = open_input(paths.terms, err);
    if (!terms_file) {
      code = kExitUsage;
      return std::nullopt;
    }
  }
  std::istringstream no_terms;
  try {
    ctx.lexicon = load_lexicon(*freq_in, terms_file ? static_cast<std::istream&>(*terms_file)
                                                    : static_cast<std::istream&>(no_terms),
                               *stats_in);
  } catch (const IngestError& e) {
    err << "error: " << e.what() << "\n";
    code = kExitValidation;
    return std::nullopt;
  }

  // The language stats may carry optional suffix-strip rules for the stem
  // matching stage (used when tokens have no lemmas).
  {
    std::ifstream stats_again(paths.stats);
    auto sj = nlohmann::json::parse(stats_again, nullptr, false);
    if (sj.is_object() && sj.contains("stem_suffixes"))
      ctx.resources.stem_suffixes =
          sj["stem_suffixes"].get<std::vector<std::string>>();
  }

  if (!paths.synonyms.empty()) {
    auto syn_in = open_input(paths.synonyms, err);
    if (!syn_in) {
      code = kExitUsage;
      return std::nullopt;
    }
    ctx.resources.synonyms = parse_synonym_table(*syn_in);
  }
  code = kExitOk;
  return ctx;
}

inline std::optional<ParseResult> load_corpus(const std::string& path,
                                              std::ostream& err, int& code) {
  auto in = open_input(path, err);
  if (!in) {
    code = kExitUsage;
    return std::nullopt;
  }
  ParseResult parsed = parse_corpus(*in);
  for (const Diagnostic& d : parsed.diagnostics)
    err << "corpus " << d.str() << "\n";
  code = kExitOk;
  return parsed;
}

inline std::string format_score(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

}  // namespace detail

// Score a corpus and write the per-unit, per-level report as JSON.
inline int cmd_score(const CommandPaths& paths, const ScoreFlags& flags,
                     std::ostream& out, std::ostream& err) {
  int code = kExitOk;
  auto ctx = detail::load_context(paths, err, code);
  if (!ctx) return code;
  auto parsed = detail::load_corpus(paths.corpus, err, code);
  if (!parsed) return code;
  if (flags.strict && !parsed->diagnostics.empty()) return kExitValidation;

  CorpusEvaluation evaluation =
      evaluate_corpus(parsed->pairs, *ctx, flags.jobs);
  for (const Diagnostic& d : evaluation.diagnostics) err << d.str() << "\n";
  if (flags.strict && !evaluation.diagnostics.empty()) return kExitValidation;

  const nlohmann::json report_json =
      report_to_json(evaluation.report, ctx->profile);
  if (!paths.out.empty()) {
    std::ofstream report_out(paths.out);
    if (!report_out) {
      err << "error: cannot write " << paths.out << "\n";
      return kExitUsage;
    }
    report_out << report_json.dump(2) << '\n';
  } else if (!flags.summary) {
    out << report_json.dump(2) << '\n';
  }
  if (flags.summary)
    out << detail::format_score(evaluation.report.corpus_mean) << "\n";
  return kExitOk;
}

// Fit the profile weights against human scores and write the result.
inline int cmd_tune(const CommandPaths& paths, const TuneFlags& flags,
                    std::ostream& out, std::ostream& err) {
  int code = kExitOk;
  auto ctx = detail::load_context(paths, err, code);
  if (!ctx) return code;
  auto parsed = detail::load_corpus(paths.corpus, err, code);
  if (!parsed) return code;

  if (parsed->pairs.empty()) {
    err << "error: no valid records in dataset\n";
    return kExitValidation;
  }
  for (const UnitPair& pair : parsed->pairs)
    if (!pair.human_score) {
      err << "error: unit '" << pair.id << "' lacks a human_score\n";
      return kExitValidation;
    }

  TuningConfig config;
  config.seed = flags.seed;
  config.max_iterations = flags.max_iters;

  // Correlations before fitting, for the printed comparison.
  std::optional<Correlations> before;
  try {
    std::vector<double> metric, human;
    for (const UnitPair& pair : parsed->pairs) {
      metric.push_back(evaluate_pair(pair, *ctx).overall);
      human.push_back(*pair.human_score);
    }
    before = correlation(metric, human);
  } catch (const EvalError&) {
    before = std::nullopt;
  }

  TuningResult result;
  try {
    result = fit_weights(parsed->pairs, *ctx, config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  auto show = [&](double v) { return detail::format_score(v); };
  out << "initial loss: " << std::setprecision(10) << result.initial_loss
      << "\n";
  out << "final loss:   " << std::setprecision(10) << result.final_loss
      << "\n";
  out << "iterations:   " << result.iterations << "\n";
  out << "pearson:      " << (before ? show(before->pearson) : "n/a") << " -> "
      << (std::isnan(result.pearson) ? "n/a" : show(result.pearson)) << "\n";
  out << "spearman:     " << (before ? show(before->spearman) : "n/a")
      << " -> "
      << (std::isnan(result.spearman) ? "n/a" : show(result.spearman))
      << "\n";

  if (!paths.out.empty()) {
    std::ofstream profile_out(paths.out);
    if (!profile_out) {
      err << "error: cannot write " << paths.out << "\n";
      return kExitUsage;
    }
    save_profile(result.profile, profile_out);
  } else {
    save_profile(result.profile, out);
  }
  return kExitOk;
}

// Print the per-level breakdown of one unit: every named parameter, the
// per-level combinations, the renormalized level weights, and the
// aggregation they produce.
inline int cmd_explain(const CommandPaths& paths, const std::string& unit_id,
                       std::ostream& out, std::ostream& err) {
  int code = kExitOk;
  auto ctx = detail::load_context(paths, err, code);
  if (!ctx) return code;
  auto parsed = detail::load_corpus(paths.corpus, err, code);
  if (!parsed) return code;

  const UnitPair* pair = nullptr;
  for (const UnitPair& p : parsed->pairs)
    if (p.id == unit_id) {
      pair = &p;
      break;
    }
  if (!pair) {
    err << "error: unknown unit id '" << unit_id << "'\n";
    return kExitValidation;
  }

  UnitEvaluation evaluation;
  try {
    evaluation = evaluate_pair(*pair, *ctx);
  } catch (const EvalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  double active_weight = 0.0;
  for (const auto& [level, score] : evaluation.levels)
    if (score.active) active_weight += ctx->profile.levels.at(level).w;

  out << "unit " << evaluation.id << "  (scored against reference "
      << evaluation.reference_index + 1 << " of " << pair->references.size()
      << ")\n";
  out << "profile " << profile_hash(ctx->profile) << "\n\n";

  auto show = [&](double v) { return detail::format_score(v); };
  for (const auto& [level, score] : evaluation.levels) {
    out << std::left << std::setw(12) << level_name(level);
    if (!score.active) {
      out << "inactive\n";
      continue;
    }
    const double w_norm = ctx->profile.levels.at(level).w / active_weight;
    out << "A=" << show(score.adequacy) << "  B=" << show(score.disfluency)
        << "  G=" << show(score.ease) << "  w'=" << show(w_norm) << "\n";
    out << "  P ";
    for (const auto& [name, value] : score.adequacy_params)
      out << name << "=" << show(value) << "  ";
    out << "\n";
    if (!score.disfluency_params.empty()) {
      out << "  Q ";
      for (const auto& [name, value] : score.disfluency_params)
        out << name << "=" << show(value) << "  ";
      out << "\n";
    }
  }
  out << "\noverall G = " << show(evaluation.overall) << "\n";
  return kExitOk;
}

}  // namespace cogeval
