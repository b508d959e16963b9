#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cogeval/types.hpp"

namespace cogeval {

enum class MatchStage { exact, stem, synonym };

inline std::string_view stage_name(MatchStage stage) {
  switch (stage) {
    case MatchStage::exact: return "exact";
    case MatchStage::stem: return "stem";
    case MatchStage::synonym: return "synonym";
  }
  return "?";
}

// Synonym sets keyed by case-folded surface. A word may belong to several
// sets; two words match when they share at least one.
class SynonymTable {
 public:
  bool empty() const { return members_.empty(); }

  void add_set(const std::vector<std::string>& words) {
    for (const std::string& w : words) members_[fold_case(w)].push_back(next_id_);
    ++next_id_;
  }

  bool related(const std::string& a, const std::string& b) const {
    auto ia = members_.find(a);
    auto ib = members_.find(b);
    if (ia == members_.end() || ib == members_.end()) return false;
    for (int x : ia->second)
      for (int y : ib->second)
        if (x == y) return true;
    return false;
  }

 private:
  std::unordered_map<std::string, std::vector<int>> members_;
  int next_id_ = 0;
};

// One synonym set per line, members tab-separated.
inline SynonymTable parse_synonym_table(std::istream& in) {
  SynonymTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> members;
    std::size_t start = 0;
    while (start <= line.size()) {
      auto tab = line.find('\t', start);
      if (tab == std::string::npos) tab = line.size();
      if (tab > start) members.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (members.size() >= 2) table.add_set(members);
  }
  return table;
}

// Matching resources: suffix-strip rules standing in for lemmas when the
// corpus carries none, and an optional synonym table.
struct MatchResources {
  std::vector<std::string> stem_suffixes;  // first matching suffix is stripped
  SynonymTable synonyms;
};

namespace detail {

inline std::string stem_key(const Token& token, const MatchResources& res) {
  if (token.lemma) return fold_case(*token.lemma);
  std::string surface = fold_case(token.surface);
  for (const std::string& suffix : res.stem_suffixes) {
    if (surface.size() > suffix.size() &&
        surface.compare(surface.size() - suffix.size(), suffix.size(), suffix) == 0)
      return surface.substr(0, surface.size() - suffix.size());
  }
  return surface;
}

}  // namespace detail

inline bool match_tokens(const Token& a, const Token& b, MatchStage stage,
                         const MatchResources& resources) {
  switch (stage) {
    case MatchStage::exact:
      return fold_case(a.surface) == fold_case(b.surface);
    case MatchStage::stem:
      return detail::stem_key(a, resources) == detail::stem_key(b, resources);
    case MatchStage::synonym:
      return resources.synonyms.related(fold_case(a.surface),
                                        fold_case(b.surface));
  }
  return false;
}

struct AlignedToken {
  std::size_t candidate = 0;
  std::size_t reference = 0;
  MatchStage stage = MatchStage::exact;

  bool operator==(const AlignedToken&) const = default;
};

// Injective candidate<->reference token correspondence.
struct WordAlignment {
  std::vector<AlignedToken> pairs;
  std::size_t candidate_size = 0;
  std::size_t reference_size = 0;
};

struct ChunkAlignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (cand id, ref id)
};

namespace detail {

using Edge = std::pair<std::size_t, std::size_t>;

inline std::size_t count_crossings(const std::vector<Edge>& pairs) {
  std::size_t crossings = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      const auto& [c1, r1] = pairs[i];
      const auto& [c2, r2] = pairs[j];
      if ((c1 < c2 && r1 > r2) || (c1 > c2 && r1 < r2)) ++crossings;
    }
  return crossings;
}

// Deterministic augmenting-path maximum matching: candidates visited in
// increasing index, neighbours in increasing reference index.
inline std::vector<Edge> max_matching_augmenting(const std::vector<Edge>& edges) {
  std::map<std::size_t, std::vector<std::size_t>> adj;
  for (const auto& [c, r] : edges) adj[c].push_back(r);
  for (auto& [_, refs] : adj) std::sort(refs.begin(), refs.end());

  std::map<std::size_t, std::size_t> ref_match;  // ref -> cand
  std::map<std::size_t, std::size_t> cand_match;

  auto augment = [&](auto&& self, std::size_t c,
                     std::map<std::size_t, bool>& visited) -> bool {
    for (std::size_t r : adj[c]) {
      if (visited[r]) continue;
      visited[r] = true;
      auto held = ref_match.find(r);
      if (held == ref_match.end() || self(self, held->second, visited)) {
        ref_match[r] = c;
        cand_match[c] = r;
        return true;
      }
    }
    return false;
  };

  for (const auto& [c, _] : adj) {
    std::map<std::size_t, bool> visited;
    augment(augment, c, visited);
  }

  std::vector<Edge> out;
  for (const auto& [c, r] : cand_match) out.emplace_back(c, r);
  return out;
}

// Exhaustive search over edge subsets: maximum cardinality first, then
// fewest crossings against earlier pairs and within the subset, then the
// lexicographically smallest pair list.
inline std::vector<Edge> best_matching_exhaustive(
    std::vector<Edge> edges, const std::vector<Edge>& fixed) {
  std::sort(edges.begin(), edges.end());

  std::vector<Edge> best;
  std::size_t best_crossings = 0;
  bool have_best = false;

  std::vector<Edge> chosen;
  auto consider = [&]() {
    std::vector<Edge> all = fixed;
    all.insert(all.end(), chosen.begin(), chosen.end());
    std::size_t crossings = count_crossings(all);
    if (!have_best || chosen.size() > best.size() ||
        (chosen.size() == best.size() &&
         (crossings < best_crossings ||
          (crossings == best_crossings && chosen < best)))) {
      best = chosen;
      best_crossings = crossings;
      have_best = true;
    }
  };

  auto conflicts = [&](const Edge& e) {
    for (const auto& [c, r] : chosen)
      if (c == e.first || r == e.second) return true;
    return false;
  };

  auto recurse = [&](auto&& self, std::size_t idx) -> void {
    // Cardinality bound: no point continuing a branch that cannot reach
    // the best size seen so far.
    if (chosen.size() + (edges.size() - idx) < best.size()) return;
    if (idx == edges.size()) {
      consider();
      return;
    }
    if (!conflicts(edges[idx])) {
      chosen.push_back(edges[idx]);
      self(self, idx + 1);
      chosen.pop_back();
    }
    self(self, idx + 1);
  };
  recurse(recurse, 0);
  return best;
}

// Resolve crossings a maximum matching does not have to have: whenever two
// chosen pairs cross and the swapped pairs are also valid edges, swap them.
// Each swap strictly lowers the total crossing count (including crossings
// against pairs fixed by earlier stages), so the sweep terminates.
inline void untangle_crossings(std::vector<Edge>& chosen,
                               const std::vector<Edge>& stage_edges) {
  std::set<Edge> edge_set(stage_edges.begin(), stage_edges.end());
  std::sort(chosen.begin(), chosen.end());
  bool swapped = true;
  while (swapped) {
    swapped = false;
    for (std::size_t i = 0; i < chosen.size(); ++i)
      for (std::size_t j = i + 1; j < chosen.size(); ++j) {
        auto& [c1, r1] = chosen[i];
        auto& [c2, r2] = chosen[j];
        if (!(c1 < c2 && r1 > r2)) continue;
        if (!edge_set.count({c1, r2}) || !edge_set.count({c2, r1})) continue;
        std::swap(r1, r2);
        swapped = true;
      }
  }
}

// Greedy injective assignment over (count, a, b) entries: larger counts
// first, ties towards smaller ids.
inline std::vector<Edge> greedy_overlap_assignment(
    const std::map<Edge, std::size_t>& overlap) {
  std::vector<std::pair<std::size_t, Edge>> entries;
  for (const auto& [edge, count] : overlap)
    if (count >= 1) entries.emplace_back(count, edge);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  std::vector<Edge> pairs;
  std::unordered_map<std::size_t, bool> a_used, b_used;
  for (const auto& [count, edge] : entries) {
    if (a_used[edge.first] || b_used[edge.second]) continue;
    a_used[edge.first] = b_used[edge.second] = true;
    pairs.push_back(edge);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace detail

// Edge counts up to which the crossing tie-break is resolved exhaustively.
inline constexpr std::size_t kExhaustiveEdgeLimit = 12;

// Stage-ordered injective word alignment: exact, then stem, then synonym
// matches over still-unmatched tokens. Each stage takes a maximum-cardinality
// matching; among those, small stages pick the one with fewest crossings
// (leftmost pair list breaking remaining ties). Empty input on either side
// yields an empty alignment.
inline WordAlignment align_words(const std::vector<Token>& candidate,
                                 const std::vector<Token>& reference,
                                 const MatchResources& resources) {
  WordAlignment alignment;
  alignment.candidate_size = candidate.size();
  alignment.reference_size = reference.size();
  if (candidate.empty() || reference.empty()) return alignment;

  std::vector<bool> cand_used(candidate.size(), false);
  std::vector<bool> ref_used(reference.size(), false);
  std::vector<detail::Edge> fixed;

  for (MatchStage stage :
       {MatchStage::exact, MatchStage::stem, MatchStage::synonym}) {
    if (stage == MatchStage::synonym && resources.synonyms.empty()) continue;

    std::vector<detail::Edge> edges;
    for (std::size_t c = 0; c < candidate.size(); ++c) {
      if (cand_used[c]) continue;
      for (std::size_t r = 0; r < reference.size(); ++r) {
        if (ref_used[r]) continue;
        if (match_tokens(candidate[c], reference[r], stage, resources))
          edges.emplace_back(c, r);
      }
    }
    if (edges.empty()) continue;

    std::vector<detail::Edge> chosen;
    if (edges.size() <= kExhaustiveEdgeLimit) {
      chosen = detail::best_matching_exhaustive(edges, fixed);
    } else {
      chosen = detail::max_matching_augmenting(edges);
      detail::untangle_crossings(chosen, edges);
    }

    for (const auto& [c, r] : chosen) {
      cand_used[c] = true;
      ref_used[r] = true;
      fixed.emplace_back(c, r);
      alignment.pairs.push_back({c, r, stage});
    }
  }

  std::sort(alignment.pairs.begin(), alignment.pairs.end(),
            [](const AlignedToken& a, const AlignedToken& b) {
              return a.candidate < b.candidate;
            });
  return alignment;
}

// Injective chunk correspondence by shared word-alignment links: pairs with
// more links win, ties go to the smaller reference id; chunks sharing no
// link stay unpaired.
inline ChunkAlignment align_chunks(const std::vector<Chunk>& candidate_chunks,
                                   const std::vector<Chunk>& reference_chunks,
                                   const WordAlignment& word_alignment) {
  std::unordered_map<std::size_t, std::size_t> cand_token_chunk;
  for (const Chunk& chunk : candidate_chunks)
    for (std::size_t t = chunk.span.begin; t < chunk.span.end; ++t)
      cand_token_chunk[t] = chunk.id;
  std::unordered_map<std::size_t, std::size_t> ref_token_chunk;
  for (const Chunk& chunk : reference_chunks)
    for (std::size_t t = chunk.span.begin; t < chunk.span.end; ++t)
      ref_token_chunk[t] = chunk.id;

  std::map<detail::Edge, std::size_t> overlap;
  for (const AlignedToken& pair : word_alignment.pairs) {
    auto c = cand_token_chunk.find(pair.candidate);
    auto r = ref_token_chunk.find(pair.reference);
    if (c == cand_token_chunk.end() || r == ref_token_chunk.end()) continue;
    ++overlap[{c->second, r->second}];
  }

  ChunkAlignment alignment;
  alignment.pairs = detail::greedy_overlap_assignment(overlap);
  return alignment;
}

}  // namespace cogeval
