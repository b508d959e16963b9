#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cogeval {

enum class WordClass { content, function, unknown };

// ASCII-only case folding; no locale handling.
inline std::string fold_case(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

struct Token {
  std::string surface;
  std::optional<std::string> lemma;
  WordClass word_class = WordClass::unknown;
  std::size_t index = 0;  // position within the unit, 0-based

  bool operator==(const Token&) const = default;
};

// Half-open token-index interval [begin, end).
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  bool overlaps(const TokenSpan& other) const {
    return begin < other.end && other.begin < end;
  }
  bool operator==(const TokenSpan&) const = default;
};

// Non-recursive phrase: a token span with a head word and optional
// function markers (prepositions, postpositions, case endings).
struct Chunk {
  TokenSpan span;
  std::size_t head = 0;  // token index, must lie in span
  std::vector<std::size_t> function_markers;
  bool is_named_entity = false;
  std::size_t id = 0;

  bool operator==(const Chunk&) const = default;
};

struct Clause {
  std::vector<std::size_t> chunk_ids;
  std::optional<std::size_t> parent;  // clause id
  std::optional<std::string> relation_label;
  std::size_t id = 0;

  bool operator==(const Clause&) const = default;
};

struct DiscourseRelation {
  std::size_t from_clause = 0;
  std::size_t to_clause = 0;
  std::string label;

  bool operator==(const DiscourseRelation&) const = default;
};

struct DiscourseAnnotation {
  std::optional<std::string> topic;
  std::optional<std::string> focus;
  std::vector<DiscourseRelation> relations;

  bool operator==(const DiscourseAnnotation&) const = default;
};

// One sentence or paragraph with whatever annotation layers the corpus
// provides. Tokens are always materialized; the other layers are optional
// and, when absent, deactivate the levels that need them.
struct AnnotatedUnit {
  std::string raw_text;
  std::vector<Token> tokens;
  std::optional<std::vector<Chunk>> chunks;
  std::optional<std::vector<Clause>> clauses;
  std::optional<DiscourseAnnotation> discourse;
  std::optional<std::vector<std::string>> entity_sequence;

  bool operator==(const AnnotatedUnit&) const = default;
};

struct UnitPair {
  std::string id;
  std::optional<AnnotatedUnit> source;
  AnnotatedUnit candidate;
  std::vector<AnnotatedUnit> references;
  std::optional<double> human_score;  // in [0,1] when present

  bool operator==(const UnitPair&) const = default;
};

}  // namespace cogeval
