#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cogeval/diagnostics.hpp"
#include "cogeval/types.hpp"

#include "json.hpp"

namespace cogeval {

// Language-side statistics feeding the disfluency ratios: word frequencies
// (for the common-word test), domain terms, and per-language averages used
// as ratio denominators. Lookups are case-folded.
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::unordered_map<std::string, std::int64_t> frequency,
          std::unordered_set<std::string> terms, double ave_sentence_len,
          double ave_chunks_per_sentence, std::int64_t common_rank_cutoff = 5000)
      : frequency_(std::move(frequency)),
        terms_(std::move(terms)),
        ave_sentence_len_(ave_sentence_len),
        ave_chunks_per_sentence_(ave_chunks_per_sentence),
        common_rank_cutoff_(common_rank_cutoff) {
    if (!(ave_sentence_len_ > 0.0))
      throw IngestError("lexicon: ave_sentence_len must be > 0");
    if (!(ave_chunks_per_sentence_ > 0.0))
      throw IngestError("lexicon: ave_chunks_per_sentence must be > 0");
    if (common_rank_cutoff_ <= 0)
      throw IngestError("lexicon: common_rank_cutoff must be > 0");
    build_ranks();
  }

  // A token is common when its frequency rank (1 = most frequent, ties
  // broken alphabetically) is within the cutoff.
  bool is_common(const std::string& surface) const {
    auto it = rank_.find(fold_case(surface));
    return it != rank_.end() &&
           it->second <= static_cast<std::size_t>(common_rank_cutoff_);
  }

  bool is_term(const std::string& surface) const {
    return terms_.count(fold_case(surface)) > 0;
  }

  double ave_sentence_len() const { return ave_sentence_len_; }
  double ave_chunks_per_sentence() const { return ave_chunks_per_sentence_; }
  std::int64_t common_rank_cutoff() const { return common_rank_cutoff_; }

 private:
  void build_ranks() {
    std::vector<std::pair<std::string, std::int64_t>> sorted(frequency_.begin(),
                                                             frequency_.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    for (std::size_t i = 0; i < sorted.size(); ++i)
      rank_[sorted[i].first] = i + 1;
  }

  std::unordered_map<std::string, std::int64_t> frequency_;  // folded keys
  std::unordered_set<std::string> terms_;                     // folded
  std::unordered_map<std::string, std::size_t> rank_;         // 1-based
  double ave_sentence_len_ = 1.0;
  double ave_chunks_per_sentence_ = 1.0;
  std::int64_t common_rank_cutoff_ = 5000;
};

// Frequency file: `token<TAB>count` per line. Counts must be >= 1; repeated
// tokens accumulate (case-folded).
inline std::unordered_map<std::string, std::int64_t> parse_frequency_table(
    std::istream& in) {
  std::unordered_map<std::string, std::int64_t> freq;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw IngestError("frequency table line " + std::to_string(line_no) +
                        ": expected token<TAB>count");
    std::int64_t count = 0;
    try {
      count = std::stoll(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw IngestError("frequency table line " + std::to_string(line_no) +
                        ": count is not an integer");
    }
    if (count < 1)
      throw IngestError("frequency table line " + std::to_string(line_no) +
                        ": count must be >= 1");
    freq[fold_case(line.substr(0, tab))] += count;
  }
  return freq;
}

// Term list: one term per line; blank lines ignored.
inline std::unordered_set<std::string> parse_term_list(std::istream& in) {
  std::unordered_set<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    terms.insert(fold_case(line));
  }
  return terms;
}

// Language stats: JSON object with "ave_sentence_len",
// "ave_chunks_per_sentence" and optional "common_rank_cutoff".
inline Lexicon load_lexicon(std::istream& frequency_file, std::istream& term_file,
                            std::istream& stats_file) {
  auto freq = parse_frequency_table(frequency_file);
  auto terms = parse_term_list(term_file);

  nlohmann::json stats;
  try {
    stats = nlohmann::json::parse(stats_file);
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("language stats: ") + e.what());
  }
  if (!stats.is_object() || !stats.contains("ave_sentence_len") ||
      !stats.contains("ave_chunks_per_sentence"))
    throw IngestError(
        "language stats: need ave_sentence_len and ave_chunks_per_sentence");
  double ave_len = stats["ave_sentence_len"].get<double>();
  double ave_chunks = stats["ave_chunks_per_sentence"].get<double>();
  std::int64_t cutoff = stats.value("common_rank_cutoff", std::int64_t{5000});
  return Lexicon(std::move(freq), std::move(terms), ave_len, ave_chunks, cutoff);
}

inline std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open file: " + path);
  return in;
}

inline Lexicon load_lexicon(const std::string& frequency_path,
                            const std::string& term_path,
                            const std::string& stats_path) {
  auto freq = open_or_throw(frequency_path);
  auto terms = open_or_throw(term_path);
  auto stats = open_or_throw(stats_path);
  return load_lexicon(freq, terms, stats);
}

}  // namespace cogeval
