#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cogeval {

// The five scoring dimensions, combined linearly into the overall score.
enum class Level { word, chunk, clause, discourse, entity_flow };

inline constexpr std::array<Level, 5> kAllLevels = {
    Level::word, Level::chunk, Level::clause, Level::discourse,
    Level::entity_flow};

inline std::string_view level_name(Level level) {
  switch (level) {
    case Level::word: return "word";
    case Level::chunk: return "chunk";
    case Level::clause: return "clause";
    case Level::discourse: return "discourse";
    case Level::entity_flow: return "entity_flow";
  }
  return "?";
}

inline std::optional<Level> level_from_name(std::string_view name) {
  for (Level level : kAllLevels)
    if (level_name(level) == name) return level;
  return std::nullopt;
}

// Named adequacy (P) and disfluency (Q) parameters admitted at each level.
// The default set below covers the shipped scorers; new names can be
// registered to admit extension parameters without touching the calculus.
class ParameterRegistry {
 public:
  struct LevelEntry {
    std::vector<std::string> adequacy;    // P parameter names
    std::vector<std::string> disfluency;  // Q parameter names
  };

  void add_adequacy(Level level, std::string name) {
    levels_[level].adequacy.push_back(std::move(name));
  }
  void add_disfluency(Level level, std::string name) {
    levels_[level].disfluency.push_back(std::move(name));
  }

  bool has_adequacy(Level level, const std::string& name) const {
    return contains(level, name, true);
  }
  bool has_disfluency(Level level, const std::string& name) const {
    return contains(level, name, false);
  }

  const std::map<Level, LevelEntry>& levels() const { return levels_; }

 private:
  bool contains(Level level, const std::string& name, bool adequacy) const {
    auto it = levels_.find(level);
    if (it == levels_.end()) return false;
    const auto& names = adequacy ? it->second.adequacy : it->second.disfluency;
    for (const auto& n : names)
      if (n == name) return true;
    return false;
  }

  std::map<Level, LevelEntry> levels_;
};

inline ParameterRegistry default_registry() {
  ParameterRegistry reg;
  reg.add_adequacy(Level::word, "lex");
  reg.add_adequacy(Level::word, "pos");
  reg.add_disfluency(Level::word, "nword");
  reg.add_disfluency(Level::word, "uncom");
  reg.add_disfluency(Level::word, "term");

  reg.add_adequacy(Level::chunk, "head");
  reg.add_adequacy(Level::chunk, "vibh");
  reg.add_disfluency(Level::chunk, "words_per_chunk");
  reg.add_disfluency(Level::chunk, "nchunk");
  reg.add_disfluency(Level::chunk, "uncom_ne");

  reg.add_adequacy(Level::clause, "intra");
  reg.add_adequacy(Level::clause, "inter");
  reg.add_disfluency(Level::clause, "chunks_per_clause");
  reg.add_disfluency(Level::clause, "fragmentation");
  reg.add_disfluency(Level::clause, "long_dist");

  reg.add_adequacy(Level::discourse, "topic_focus");
  reg.add_adequacy(Level::discourse, "relations");
  reg.add_disfluency(Level::discourse, "linked_dist");

  reg.add_adequacy(Level::entity_flow, "seq_len");
  reg.add_adequacy(Level::entity_flow, "seq_edit");
  reg.add_disfluency(Level::entity_flow, "seq");
  return reg;
}

}  // namespace cogeval
