#pragma once

// Access policies over a scene's documents.
//
//   free        every document is available at all times
//   conditional a document unlocks once all of its prerequisites are viewed
//   sequential  documents unlock one at a time in a fixed order; earlier
//               ones remain available for re-viewing
//
// A session is an immutable GuidanceState; record_view returns the next one.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "geomedia/error.hpp"

namespace geomedia {

enum class GuidanceMode { free, conditional, sequential };

constexpr std::string_view to_string(GuidanceMode m) {
  switch (m) {
    case GuidanceMode::free: return "free";
    case GuidanceMode::conditional: return "conditional";
    case GuidanceMode::sequential: return "sequential";
  }
  return "free";
}

inline std::optional<GuidanceMode> guidance_mode_from_string(std::string_view s) {
  for (GuidanceMode m : {GuidanceMode::free, GuidanceMode::conditional, GuidanceMode::sequential}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

using DocumentIdSet = std::set<std::string>;

struct GuidanceGraph {
  std::map<std::string, DocumentIdSet> prerequisites;  // document -> all-of requirement
  std::vector<std::string> order;

  friend bool operator==(const GuidanceGraph&, const GuidanceGraph&) = default;
};

struct GuidanceState {
  GuidanceMode mode = GuidanceMode::free;
  DocumentIdSet viewed;
  std::string scene_ref;

  friend bool operator==(const GuidanceState&, const GuidanceState&) = default;
};

enum class GuidanceIssue {
  cycle,
  unreachable,
  dangling_reference,
  order_duplicate,
  order_omission,
};

constexpr std::string_view to_string(GuidanceIssue i) {
  switch (i) {
    case GuidanceIssue::cycle: return "cycle";
    case GuidanceIssue::unreachable: return "unreachable";
    case GuidanceIssue::dangling_reference: return "dangling-reference";
    case GuidanceIssue::order_duplicate: return "order-duplicate";
    case GuidanceIssue::order_omission: return "order-omission";
  }
  return "cycle";
}

struct GuidanceFinding {
  GuidanceIssue issue;
  std::string document_id;
  std::string message;
};

using GuidanceReport = std::vector<GuidanceFinding>;

namespace detail {

inline const DocumentIdSet& prerequisites_of(const GuidanceGraph& graph, const std::string& doc) {
  static const DocumentIdSet kNone;
  const auto it = graph.prerequisites.find(doc);
  return it == graph.prerequisites.end() ? kNone : it->second;
}

/// Fixpoint of "unlock anything whose prerequisites are all unlocked".
inline DocumentIdSet greedy_unlock(const DocumentIdSet& documents, const GuidanceGraph& graph) {
  DocumentIdSet unlocked;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& doc : documents) {
      if (unlocked.contains(doc)) continue;
      const auto& pre = prerequisites_of(graph, doc);
      if (std::includes(unlocked.begin(), unlocked.end(), pre.begin(), pre.end())) {
        unlocked.insert(doc);
        changed = true;
      }
    }
  }
  return unlocked;
}

inline void find_cycles(const DocumentIdSet& documents, const GuidanceGraph& graph,
                        GuidanceReport& report) {
  enum class Mark { unvisited, active, done };
  std::map<std::string, Mark> marks;
  std::vector<std::string> stack;
  std::set<std::string> reported;

  std::function<void(const std::string&)> visit = [&](const std::string& doc) {
    marks[doc] = Mark::active;
    stack.push_back(doc);
    for (const auto& pre : prerequisites_of(graph, doc)) {
      if (!documents.contains(pre)) continue;
      const Mark m = marks.contains(pre) ? marks[pre] : Mark::unvisited;
      if (m == Mark::unvisited) {
        visit(pre);
      } else if (m == Mark::active) {
        const auto first = std::find(stack.begin(), stack.end(), pre);
        std::string path;
        for (auto it = first; it != stack.end(); ++it) path += *it + " -> ";
        path += pre;
        for (auto it = first; it != stack.end(); ++it) {
          if (reported.insert(*it).second) {
            report.push_back({GuidanceIssue::cycle, *it, "prerequisite cycle: " + path});
          }
        }
      }
    }
    stack.pop_back();
    marks[doc] = Mark::done;
  };

  for (const auto& doc : documents) {
    if (!marks.contains(doc)) visit(doc);
  }
}

}  // namespace detail

inline GuidanceReport validate_prerequisites(const DocumentIdSet& documents,
                                             const GuidanceGraph& graph) {
  GuidanceReport report;
  for (const auto& [doc, pres] : graph.prerequisites) {
    if (!documents.contains(doc)) {
      report.push_back({GuidanceIssue::dangling_reference, doc,
                        "prerequisites declared for unknown document '" + doc + "'"});
    }
    for (const auto& pre : pres) {
      if (!documents.contains(pre)) {
        report.push_back({GuidanceIssue::dangling_reference, doc,
                          "document '" + doc + "' requires unknown document '" + pre + "'"});
      }
    }
  }
  detail::find_cycles(documents, graph, report);

  const DocumentIdSet unlocked = detail::greedy_unlock(documents, graph);
  for (const auto& doc : documents) {
    if (!unlocked.contains(doc)) {
      report.push_back({GuidanceIssue::unreachable, doc,
                        "document '" + doc + "' can never be unlocked"});
    }
  }
  return report;
}

/// Checks a non-empty sequential order: every document exactly once.
inline GuidanceReport validate_order(const DocumentIdSet& documents, const GuidanceGraph& graph) {
  GuidanceReport report;
  if (graph.order.empty()) return report;
  DocumentIdSet seen;
  for (const auto& doc : graph.order) {
    if (!documents.contains(doc)) {
      report.push_back({GuidanceIssue::dangling_reference, doc,
                        "sequential order lists unknown document '" + doc + "'"});
    } else if (!seen.insert(doc).second) {
      report.push_back({GuidanceIssue::order_duplicate, doc,
                        "document '" + doc + "' appears more than once in the order"});
    }
  }
  for (const auto& doc : documents) {
    if (!seen.contains(doc)) {
      report.push_back({GuidanceIssue::order_omission, doc,
                        "document '" + doc + "' is missing from the sequential order"});
    }
  }
  return report;
}

/// Structural check of a guidance graph against the scene's documents.
///
/// Reports prerequisite cycles, dangling references, documents that can
/// never unlock under conditional access, and (when an order is given)
/// duplicate or missing entries in the sequential order. An empty report
/// means every document is eventually viewable.
inline GuidanceReport validate_guidance_graph(const DocumentIdSet& documents,
                                              const GuidanceGraph& graph) {
  GuidanceReport report = validate_prerequisites(documents, graph);
  for (auto& f : validate_order(documents, graph)) report.push_back(std::move(f));
  return report;
}

/// Starts a session with nothing viewed. Fails when the part of the graph
/// the mode relies on is absent or broken.
inline GuidanceState new_session(const DocumentIdSet& documents, const GuidanceGraph& graph,
                                 GuidanceMode mode, std::string scene_ref = {}) {
  auto fail = [&](const std::string& why) {
    return Error(ErrorCode::misconfigured_guidance,
                 std::string(to_string(mode)) + " guidance unavailable: " + why);
  };
  if (mode == GuidanceMode::conditional) {
    if (const auto r = validate_prerequisites(documents, graph); !r.empty()) throw fail(r.front().message);
  } else if (mode == GuidanceMode::sequential) {
    if (graph.order.empty() && !documents.empty()) throw fail("scene defines no document order");
    if (const auto r = validate_order(documents, graph); !r.empty()) throw fail(r.front().message);
  }
  return {mode, {}, std::move(scene_ref)};
}

inline DocumentIdSet available_documents(const GuidanceState& state, const DocumentIdSet& documents,
                                         const GuidanceGraph& graph) {
  switch (state.mode) {
    case GuidanceMode::free:
      return documents;
    case GuidanceMode::conditional: {
      DocumentIdSet out = state.viewed;
      for (const auto& doc : documents) {
        const auto& pre = detail::prerequisites_of(graph, doc);
        if (std::includes(state.viewed.begin(), state.viewed.end(), pre.begin(), pre.end())) {
          out.insert(doc);
        }
      }
      return out;
    }
    case GuidanceMode::sequential: {
      DocumentIdSet out = state.viewed;
      if (state.viewed.size() < graph.order.size()) out.insert(graph.order[state.viewed.size()]);
      return out;
    }
  }
  return {};
}

inline GuidanceState record_view(GuidanceState state, const std::string& doc_id,
                                 const DocumentIdSet& documents, const GuidanceGraph& graph) {
  if (!documents.contains(doc_id)) {
    throw Error(ErrorCode::dangling_reference, "unknown document '" + doc_id + "'")
        .with_document(doc_id);
  }
  if (!available_documents(state, documents, graph).contains(doc_id)) {
    throw Error(ErrorCode::locked_content, "document '" + doc_id + "' is locked")
        .with_document(doc_id);
  }
  state.viewed.insert(doc_id);
  return state;
}

/// Fraction of governed documents viewed. Sequential mode governs the
/// ordered documents; the other modes govern all of them. Empty scopes count
/// as complete.
inline double progress(const GuidanceState& state, const DocumentIdSet& documents,
                       const GuidanceGraph& graph) {
  const DocumentIdSet governed = state.mode == GuidanceMode::sequential
                                     ? DocumentIdSet(graph.order.begin(), graph.order.end())
                                     : documents;
  if (governed.empty()) return 1.0;
  const auto seen = std::count_if(governed.begin(), governed.end(),
                                  [&](const std::string& d) { return state.viewed.contains(d); });
  return static_cast<double>(seen) / static_cast<double>(governed.size());
}

}  // namespace geomedia
