// Command-line front end: score corpora, tune weight profiles, and explain
// per-unit scores.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cogeval/commands.hpp"

namespace {

void add_context_options(CLI::App* cmd, cogeval::CommandPaths& paths) {
  cmd->add_option("--corpus", paths.corpus, "corpus file (JSON lines)")
      ->required();
  cmd->add_option("--profile", paths.profile, "weight profile (JSON)")
      ->required();
  cmd->add_option("--lexicon", paths.lexicon,
                  "word frequency table (token<TAB>count)")
      ->required();
  cmd->add_option("--stats", paths.stats, "language statistics (JSON)")
      ->required();
  cmd->add_option("--terms", paths.terms, "term list, one per line");
  cmd->add_option("--synonyms", paths.synonyms,
                  "synonym sets, tab-separated per line");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cogeval - layered cognitive-ease scoring of MT output"};
  app.require_subcommand(1);

  cogeval::CommandPaths score_paths;
  cogeval::ScoreFlags score_flags;
  CLI::App* score = app.add_subcommand("score", "score a corpus");
  add_context_options(score, score_paths);
  score->add_option("--out", score_paths.out, "report output path");
  score->add_flag("--strict", score_flags.strict,
                  "fail on any invalid record");
  score->add_flag("--summary", score_flags.summary,
                  "print the corpus mean score to stdout");
  score->add_option("--jobs", score_flags.jobs, "worker threads")
      ->check(CLI::PositiveNumber);

  cogeval::CommandPaths tune_paths;
  cogeval::TuneFlags tune_flags;
  CLI::App* tune = app.add_subcommand("tune", "fit profile weights");
  add_context_options(tune, tune_paths);
  tune->add_option("--out", tune_paths.out, "fitted profile output path");
  tune->add_option("--seed", tune_flags.seed, "random seed");
  tune->add_option("--max-iters", tune_flags.max_iters,
                   "maximum descent passes")
      ->check(CLI::PositiveNumber);

  cogeval::CommandPaths explain_paths;
  std::string unit_id;
  CLI::App* explain = app.add_subcommand("explain", "explain one unit");
  explain->add_option("unit", unit_id, "unit id")->required();
  add_context_options(explain, explain_paths);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cogeval::kExitUsage;
  }

  if (score->parsed())
    return cogeval::cmd_score(score_paths, score_flags, std::cout, std::cerr);
  if (tune->parsed())
    return cogeval::cmd_tune(tune_paths, tune_flags, std::cout, std::cerr);
  if (explain->parsed())
    return cogeval::cmd_explain(explain_paths, unit_id, std::cout, std::cerr);
  return cogeval::kExitUsage;
}
