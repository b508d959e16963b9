#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "cogeval/diagnostics.hpp"
#include "cogeval/profile.hpp"
#include "cogeval/types.hpp"

#include "json.hpp"

namespace cogeval {

// Fallback tokenizer for records that carry no token layer: whitespace
// split, with terminal punctuation peeled off into tokens of its own.
inline std::vector<Token> tokenize_text(const std::string& text) {
  static const std::string kTerminal = ".,!?;:";
  std::vector<std::string> surfaces;
  std::string piece;
  auto flush_piece = [&]() {
    if (piece.empty()) return;
    std::vector<std::string> tail;
    while (!piece.empty() && kTerminal.find(piece.back()) != std::string::npos) {
      tail.emplace_back(1, piece.back());
      piece.pop_back();
    }
    if (!piece.empty()) surfaces.push_back(piece);
    for (auto it = tail.rbegin(); it != tail.rend(); ++it)
      surfaces.push_back(*it);
    piece.clear();
  };
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
      flush_piece();
    else
      piece += c;
  }
  flush_piece();

  std::vector<Token> tokens;
  tokens.reserve(surfaces.size());
  for (std::size_t i = 0; i < surfaces.size(); ++i)
    tokens.push_back({surfaces[i], std::nullopt, WordClass::unknown, i});
  return tokens;
}

// ---------------------------------------------------------------------------
// Annotation validation

inline std::vector<Diagnostic> validate_annotations(const AnnotatedUnit& unit) {
  std::vector<Diagnostic> diags;
  auto report = [&diags](std::string msg) { diags.push_back({std::move(msg)}); };

  for (std::size_t i = 0; i < unit.tokens.size(); ++i) {
    const Token& tok = unit.tokens[i];
    if (tok.surface.empty())
      report("token " + std::to_string(i) + " has empty surface");
    if (tok.index != i)
      report("token indices not contiguous at position " + std::to_string(i));
  }

  const std::size_t n_tokens = unit.tokens.size();
  if (unit.chunks) {
    const auto& chunks = *unit.chunks;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      const Chunk& chunk = chunks[i];
      const std::string tag = "chunk " + std::to_string(i);
      if (chunk.id != i) report(tag + " has id " + std::to_string(chunk.id));
      if (chunk.span.begin >= chunk.span.end)
        report(tag + " span is empty");
      else if (chunk.span.end > n_tokens)
        report(tag + " span out of bounds");
      if (!chunk.span.contains(chunk.head))
        report(tag + " head outside span");
      for (std::size_t m : chunk.function_markers)
        if (!chunk.span.contains(m))
          report(tag + " function marker outside span");
      for (std::size_t j = i + 1; j < chunks.size(); ++j)
        if (chunk.span.overlaps(chunks[j].span))
          report(tag + " overlaps chunk " + std::to_string(j));
    }
  }

  if (unit.clauses) {
    if (!unit.chunks)
      report("clauses present without a chunk layer");
    const std::size_t n_chunks = unit.chunks ? unit.chunks->size() : 0;
    const auto& clauses = *unit.clauses;
    std::set<std::size_t> claimed;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      const Clause& clause = clauses[i];
      const std::string tag = "clause " + std::to_string(i);
      if (clause.id != i) report(tag + " has id " + std::to_string(clause.id));
      if (clause.chunk_ids.empty()) report(tag + " has no chunks");
      for (std::size_t cid : clause.chunk_ids) {
        if (cid >= n_chunks)
          report(tag + " references missing chunk " + std::to_string(cid));
        else if (!claimed.insert(cid).second)
          report("chunk " + std::to_string(cid) + " belongs to two clauses");
      }
      if (clause.parent && *clause.parent >= clauses.size())
        report(tag + " references missing parent clause");
    }
    // Parent links must not cycle.
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      std::set<std::size_t> seen{i};
      std::optional<std::size_t> cur = clauses[i].parent;
      while (cur && *cur < clauses.size()) {
        if (!seen.insert(*cur).second) {
          report("clause parent links form a cycle at clause " +
                 std::to_string(i));
          break;
        }
        cur = clauses[*cur].parent;
      }
    }
  }

  if (unit.discourse) {
    const std::size_t n_clauses = unit.clauses ? unit.clauses->size() : 0;
    for (const DiscourseRelation& rel : unit.discourse->relations)
      if (rel.from_clause >= n_clauses || rel.to_clause >= n_clauses)
        report("discourse relation references missing clause");
  }

  if (unit.entity_sequence) {
    for (std::size_t i = 0; i < unit.entity_sequence->size(); ++i)
      if ((*unit.entity_sequence)[i].empty())
        report("entity " + std::to_string(i) + " is empty");
  }
  return diags;
}

inline std::vector<Diagnostic> validate_pair(const UnitPair& pair) {
  std::vector<Diagnostic> diags;
  auto absorb = [&diags](const std::string& prefix,
                         std::vector<Diagnostic> unit_diags) {
    for (Diagnostic& d : unit_diags)
      diags.push_back({prefix + ": " + d.message});
  };

  if (pair.references.empty())
    diags.push_back({"record has no references"});
  if (pair.human_score && (*pair.human_score < 0.0 || *pair.human_score > 1.0))
    diags.push_back({"human_score outside [0,1]"});

  if (pair.source) absorb("source", validate_annotations(*pair.source));
  absorb("candidate", validate_annotations(pair.candidate));
  for (std::size_t i = 0; i < pair.references.size(); ++i)
    absorb("reference " + std::to_string(i),
           validate_annotations(pair.references[i]));
  return diags;
}

// ---------------------------------------------------------------------------
// Corpus JSON (one object per line)

namespace detail {

inline std::size_t json_index(const nlohmann::json& j, const char* what) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
    throw IngestError(std::string(what) + " must be a non-negative integer");
  return static_cast<std::size_t>(j.get<std::int64_t>());
}

inline AnnotatedUnit unit_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw IngestError("unit must be a JSON object");
  AnnotatedUnit unit;
  if (!j.contains("text") || !j.at("text").is_string())
    throw IngestError("unit needs a string 'text'");
  unit.raw_text = j.at("text").get<std::string>();

  if (j.contains("tokens")) {
    if (!j.at("tokens").is_array()) throw IngestError("'tokens' must be an array");
    std::size_t index = 0;
    for (const auto& tj : j.at("tokens")) {
      Token tok;
      if (!tj.is_object() || !tj.contains("t") || !tj.at("t").is_string())
        throw IngestError("token needs a string 't'");
      tok.surface = tj.at("t").get<std::string>();
      if (tj.contains("lemma")) tok.lemma = tj.at("lemma").get<std::string>();
      if (tj.contains("cls")) {
        std::string cls = tj.at("cls").get<std::string>();
        if (cls == "content")
          tok.word_class = WordClass::content;
        else if (cls == "function")
          tok.word_class = WordClass::function;
        else
          throw IngestError("token cls must be 'content' or 'function'");
      }
      tok.index = index++;
      unit.tokens.push_back(std::move(tok));
    }
  } else {
    unit.tokens = tokenize_text(unit.raw_text);
  }

  if (j.contains("chunks")) {
    if (!j.at("chunks").is_array()) throw IngestError("'chunks' must be an array");
    std::vector<Chunk> chunks;
    for (const auto& cj : j.at("chunks")) {
      Chunk chunk;
      if (!cj.is_object() || !cj.contains("span") || !cj.at("span").is_array() ||
          cj.at("span").size() != 2)
        throw IngestError("chunk needs a two-element 'span'");
      chunk.span.begin = json_index(cj.at("span")[0], "chunk span");
      chunk.span.end = json_index(cj.at("span")[1], "chunk span");
      if (!cj.contains("head")) throw IngestError("chunk needs a 'head'");
      chunk.head = json_index(cj.at("head"), "chunk head");
      if (cj.contains("func"))
        for (const auto& fj : cj.at("func"))
          chunk.function_markers.push_back(json_index(fj, "chunk func"));
      chunk.is_named_entity = cj.value("ne", false);
      chunk.id = chunks.size();
      chunks.push_back(std::move(chunk));
    }
    unit.chunks = std::move(chunks);
  }

  if (j.contains("clauses")) {
    if (!j.at("clauses").is_array())
      throw IngestError("'clauses' must be an array");
    std::vector<Clause> clauses;
    for (const auto& cj : j.at("clauses")) {
      Clause clause;
      if (!cj.is_object() || !cj.contains("chunks") || !cj.at("chunks").is_array())
        throw IngestError("clause needs a 'chunks' array");
      for (const auto& idj : cj.at("chunks"))
        clause.chunk_ids.push_back(json_index(idj, "clause chunk id"));
      if (cj.contains("parent"))
        clause.parent = json_index(cj.at("parent"), "clause parent");
      if (cj.contains("rel")) clause.relation_label = cj.at("rel").get<std::string>();
      clause.id = clauses.size();
      clauses.push_back(std::move(clause));
    }
    unit.clauses = std::move(clauses);
  }

  if (j.contains("discourse")) {
    const auto& dj = j.at("discourse");
    if (!dj.is_object()) throw IngestError("'discourse' must be an object");
    DiscourseAnnotation disc;
    if (dj.contains("topic")) disc.topic = dj.at("topic").get<std::string>();
    if (dj.contains("focus")) disc.focus = dj.at("focus").get<std::string>();
    if (dj.contains("relations")) {
      for (const auto& rj : dj.at("relations")) {
        if (!rj.is_object() || !rj.contains("from") || !rj.contains("to") ||
            !rj.contains("label"))
          throw IngestError("discourse relation needs from/to/label");
        DiscourseRelation rel;
        rel.from_clause = json_index(rj.at("from"), "relation from");
        rel.to_clause = json_index(rj.at("to"), "relation to");
        rel.label = rj.at("label").get<std::string>();
        disc.relations.push_back(std::move(rel));
      }
    }
    unit.discourse = std::move(disc);
  }

  if (j.contains("entities")) {
    if (!j.at("entities").is_array())
      throw IngestError("'entities' must be an array");
    std::vector<std::string> entities;
    for (const auto& ej : j.at("entities")) {
      if (!ej.is_string()) throw IngestError("entities must be strings");
      entities.push_back(ej.get<std::string>());
    }
    unit.entity_sequence = std::move(entities);
  }
  return unit;
}

inline nlohmann::json unit_to_json(const AnnotatedUnit& unit) {
  nlohmann::json j;
  j["text"] = unit.raw_text;
  nlohmann::json tokens = nlohmann::json::array();
  for (const Token& tok : unit.tokens) {
    nlohmann::json tj;
    tj["t"] = tok.surface;
    if (tok.lemma) tj["lemma"] = *tok.lemma;
    if (tok.word_class == WordClass::content) tj["cls"] = "content";
    if (tok.word_class == WordClass::function) tj["cls"] = "function";
    tokens.push_back(std::move(tj));
  }
  j["tokens"] = std::move(tokens);

  if (unit.chunks) {
    nlohmann::json chunks = nlohmann::json::array();
    for (const Chunk& chunk : *unit.chunks) {
      nlohmann::json cj;
      cj["span"] = {chunk.span.begin, chunk.span.end};
      cj["head"] = chunk.head;
      if (!chunk.function_markers.empty()) cj["func"] = chunk.function_markers;
      if (chunk.is_named_entity) cj["ne"] = true;
      chunks.push_back(std::move(cj));
    }
    j["chunks"] = std::move(chunks);
  }
  if (unit.clauses) {
    nlohmann::json clauses = nlohmann::json::array();
    for (const Clause& clause : *unit.clauses) {
      nlohmann::json cj;
      cj["chunks"] = clause.chunk_ids;
      if (clause.parent) cj["parent"] = *clause.parent;
      if (clause.relation_label) cj["rel"] = *clause.relation_label;
      clauses.push_back(std::move(cj));
    }
    j["clauses"] = std::move(clauses);
  }
  if (unit.discourse) {
    nlohmann::json dj = nlohmann::json::object();
    if (unit.discourse->topic) dj["topic"] = *unit.discourse->topic;
    if (unit.discourse->focus) dj["focus"] = *unit.discourse->focus;
    if (!unit.discourse->relations.empty()) {
      nlohmann::json rels = nlohmann::json::array();
      for (const DiscourseRelation& rel : unit.discourse->relations)
        rels.push_back({{"from", rel.from_clause},
                        {"to", rel.to_clause},
                        {"label", rel.label}});
      dj["relations"] = std::move(rels);
    }
    j["discourse"] = std::move(dj);
  }
  if (unit.entity_sequence) j["entities"] = *unit.entity_sequence;
  return j;
}

}  // namespace detail

inline UnitPair pair_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw IngestError("record must be a JSON object");
  UnitPair pair;
  if (!j.contains("id") || !j.at("id").is_string())
    throw IngestError("record needs a string 'id'");
  pair.id = j.at("id").get<std::string>();
  if (j.contains("source")) pair.source = detail::unit_from_json(j.at("source"));
  if (!j.contains("candidate")) throw IngestError("record needs a 'candidate'");
  pair.candidate = detail::unit_from_json(j.at("candidate"));
  if (!j.contains("references") || !j.at("references").is_array())
    throw IngestError("record needs a 'references' array");
  for (const auto& rj : j.at("references"))
    pair.references.push_back(detail::unit_from_json(rj));
  if (j.contains("human_score")) {
    if (!j.at("human_score").is_number())
      throw IngestError("human_score must be a number");
    pair.human_score = j.at("human_score").get<double>();
  }
  return pair;
}

inline nlohmann::json pair_to_json(const UnitPair& pair) {
  nlohmann::json j;
  j["id"] = pair.id;
  if (pair.source) j["source"] = detail::unit_to_json(*pair.source);
  j["candidate"] = detail::unit_to_json(pair.candidate);
  nlohmann::json refs = nlohmann::json::array();
  for (const AnnotatedUnit& ref : pair.references)
    refs.push_back(detail::unit_to_json(ref));
  j["references"] = std::move(refs);
  if (pair.human_score) j["human_score"] = *pair.human_score;
  return j;
}

struct ParseResult {
  std::vector<UnitPair> pairs;
  std::vector<Diagnostic> diagnostics;
};

// Parse a JSON Lines corpus. Structurally invalid records are skipped with
// line-numbered diagnostics; blank lines are ignored; order is preserved.
inline ParseResult parse_corpus(std::istream& in) {
  if (!in) throw IngestError("corpus stream is not readable");
  ParseResult result;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    bool blank = true;
    for (char c : line)
      if (c != ' ' && c != '\t' && c != '\r') {
        blank = false;
        break;
      }
    if (blank) continue;

    UnitPair pair;
    try {
      pair = pair_from_json(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      result.diagnostics.push_back({e.what(), line_no});
      continue;
    }
    std::vector<Diagnostic> issues = validate_pair(pair);
    if (!issues.empty()) {
      for (Diagnostic& d : issues)
        result.diagnostics.push_back({std::move(d.message), line_no});
      continue;
    }
    result.pairs.push_back(std::move(pair));
  }
  return result;
}

inline void serialize_corpus(const std::vector<UnitPair>& pairs,
                             std::ostream& out) {
  for (const UnitPair& pair : pairs) out << pair_to_json(pair).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Weight profile JSON

inline nlohmann::json profile_to_json(const WeightProfile& profile) {
  nlohmann::json levels = nlohmann::json::object();
  for (const auto& [level, lw] : profile.levels) {
    nlohmann::json lj;
    lj["w"] = lw.w;
    lj["gamma"] = lw.gamma;
    lj["delta"] = lw.delta;
    lj["alpha"] = lw.alpha;
    lj["beta"] = lw.beta;
    levels[std::string(level_name(level))] = std::move(lj);
  }
  return nlohmann::json{{"levels", std::move(levels)}};
}

inline WeightProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("levels") || !j.at("levels").is_object())
    throw ConfigError("profile needs a 'levels' object");
  WeightProfile profile;
  for (const auto& [name, lj] : j.at("levels").items()) {
    auto level = level_from_name(name);
    if (!level) throw ConfigError("unknown level '" + name + "'");
    LevelWeights lw;
    if (!lj.contains("w") || !lj.at("w").is_number())
      throw ConfigError("level '" + name + "' needs a numeric 'w'");
    lw.w = lj.at("w").get<double>();
    lw.gamma = lj.value("gamma", 0.5);
    lw.delta = lj.value("delta", 1.0);
    if (lj.contains("alpha"))
      lw.alpha = lj.at("alpha").get<std::map<std::string, double>>();
    if (lj.contains("beta"))
      lw.beta = lj.at("beta").get<std::map<std::string, double>>();
    profile.levels[*level] = std::move(lw);
  }
  return profile;
}

// Load and validate; throws ConfigError carrying every diagnostic.
inline WeightProfile load_profile(
    std::istream& in, const ParameterRegistry& registry = default_registry()) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("profile: ") + e.what());
  }
  WeightProfile profile = profile_from_json(j);
  std::vector<Diagnostic> diags = validate_profile(profile, registry);
  if (!diags.empty())
    throw ConfigError("invalid profile: " + join_diagnostics(diags));
  return profile;
}

inline void save_profile(const WeightProfile& profile, std::ostream& out) {
  out << profile_to_json(profile).dump(2) << '\n';
}

// Stable content hash of the canonical profile serialization (FNV-1a).
inline std::string profile_hash(const WeightProfile& profile) {
  std::string s = profile_to_json(profile).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace cogeval
