#include <gtest/gtest.h>

#include "geomedia/guidance.hpp"
#include "support/guidance_oracle.hpp"

namespace {

using namespace geomedia;
using geomedia::testing::Mask;

const DocumentIdSet kDocs{"a", "b", "c"};

GuidanceGraph chain() {
  GuidanceGraph g;
  g.prerequisites["b"] = {"a"};
  g.prerequisites["c"] = {"b"};
  g.order = {"a", "b", "c"};
  return g;
}

bool has_issue(const GuidanceReport& r, GuidanceIssue issue, const std::string& doc) {
  return std::any_of(r.begin(), r.end(),
                     [&](const GuidanceFinding& f) { return f.issue == issue && f.document_id == doc; });
}

TEST(GuidanceMode, NamesRoundTrip) {
  for (auto m : {GuidanceMode::free, GuidanceMode::conditional, GuidanceMode::sequential}) {
    EXPECT_EQ(guidance_mode_from_string(to_string(m)), m);
  }
  EXPECT_FALSE(guidance_mode_from_string("strict"));
}

TEST(Guidance, FreeModeExposesEverything) {
  const auto s = new_session(kDocs, {}, GuidanceMode::free);
  EXPECT_EQ(available_documents(s, kDocs, {}), kDocs);
  EXPECT_EQ(progress(s, kDocs, {}), 0.0);
}

TEST(Guidance, ConditionalChainUnlocksStepwise) {
  const auto g = chain();
  auto s = new_session(kDocs, g, GuidanceMode::conditional, "scene");
  EXPECT_EQ(s.scene_ref, "scene");
  EXPECT_EQ(available_documents(s, kDocs, g), (DocumentIdSet{"a"}));
  try {
    record_view(s, "c", kDocs, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::locked_content);
    EXPECT_EQ(e.document_id(), "c");
  }
  s = record_view(s, "a", kDocs, g);
  EXPECT_EQ(available_documents(s, kDocs, g), (DocumentIdSet{"a", "b"}));
  s = record_view(s, "b", kDocs, g);
  s = record_view(s, "c", kDocs, g);
  EXPECT_EQ(progress(s, kDocs, g), 1.0);
}

TEST(Guidance, AllOfPrerequisites) {
  GuidanceGraph g;
  g.prerequisites["c"] = {"a", "b"};
  auto s = new_session(kDocs, g, GuidanceMode::conditional);
  s = record_view(s, "a", kDocs, g);
  EXPECT_FALSE(available_documents(s, kDocs, g).contains("c"));
  s = record_view(s, "b", kDocs, g);
  EXPECT_TRUE(available_documents(s, kDocs, g).contains("c"));
}

TEST(Guidance, SequentialFollowsOrder) {
  GuidanceGraph g;
  g.order = {"c", "a", "b"};
  auto s = new_session(kDocs, g, GuidanceMode::sequential);
  EXPECT_EQ(available_documents(s, kDocs, g), (DocumentIdSet{"c"}));
  EXPECT_THROW(record_view(s, "a", kDocs, g), Error);
  s = record_view(s, "c", kDocs, g);
  EXPECT_EQ(available_documents(s, kDocs, g), (DocumentIdSet{"a", "c"}));
  EXPECT_NEAR(progress(s, kDocs, g), 1.0 / 3.0, 1e-15);
}

TEST(Guidance, ReviewingIsIdempotent) {
  const auto g = chain();
  auto s = record_view(new_session(kDocs, g, GuidanceMode::conditional), "a", kDocs, g);
  EXPECT_EQ(record_view(s, "a", kDocs, g), s);
}

TEST(Guidance, UnknownDocumentIsDangling) {
  const auto s = new_session(kDocs, {}, GuidanceMode::free);
  try {
    record_view(s, "zzz", kDocs, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dangling_reference);
  }
}

TEST(Validation, CycleDanglingAndUnreachable) {
  GuidanceGraph g;
  g.prerequisites["a"] = {"b"};
  g.prerequisites["b"] = {"a"};
  g.prerequisites["c"] = {"ghost"};
  const auto r = validate_guidance_graph(kDocs, g);
  EXPECT_TRUE(has_issue(r, GuidanceIssue::cycle, "a"));
  EXPECT_TRUE(has_issue(r, GuidanceIssue::cycle, "b"));
  EXPECT_TRUE(has_issue(r, GuidanceIssue::dangling_reference, "c"));
  EXPECT_TRUE(has_issue(r, GuidanceIssue::unreachable, "c"));
  EXPECT_FALSE(has_issue(r, GuidanceIssue::cycle, "c"));
}

TEST(Validation, SelfLoopIsCycle) {
  GuidanceGraph g;
  g.prerequisites["a"] = {"a"};
  EXPECT_TRUE(has_issue(validate_guidance_graph(kDocs, g), GuidanceIssue::cycle, "a"));
}

TEST(Validation, OrderDuplicatesAndOmissions) {
  GuidanceGraph g;
  g.order = {"a", "a", "x"};
  const auto r = validate_guidance_graph(kDocs, g);
  EXPECT_TRUE(has_issue(r, GuidanceIssue::order_duplicate, "a"));
  EXPECT_TRUE(has_issue(r, GuidanceIssue::dangling_reference, "x"));
  EXPECT_TRUE(has_issue(r, GuidanceIssue::order_omission, "b"));
  EXPECT_TRUE(has_issue(r, GuidanceIssue::order_omission, "c"));
  EXPECT_TRUE(validate_guidance_graph(kDocs, chain()).empty());
}

TEST(Validation, SessionsRefuseBrokenGraphs) {
  GuidanceGraph cyclic;
  cyclic.prerequisites["a"] = {"b"};
  cyclic.prerequisites["b"] = {"a"};
  try {
    new_session(kDocs, cyclic, GuidanceMode::conditional);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::misconfigured_guidance);
  }
  EXPECT_NO_THROW(new_session(kDocs, cyclic, GuidanceMode::free));
  EXPECT_THROW(new_session(kDocs, {}, GuidanceMode::sequential), Error);
  EXPECT_NO_THROW(new_session({}, {}, GuidanceMode::sequential));
  EXPECT_NO_THROW(new_session(kDocs, {}, GuidanceMode::conditional));
}

TEST(Guidance, AllOfPrerequisiteEnumeration) {
  // C requires {A, B}; A and B are free. Availability for all 8 viewed-sets.
  const DocumentIdSet docs{"A", "B", "C"};
  GuidanceGraph g;
  g.prerequisites["C"] = {"A", "B"};
  const std::vector<std::pair<DocumentIdSet, DocumentIdSet>> table{
      {{}, {"A", "B"}},
      {{"A"}, {"A", "B"}},
      {{"B"}, {"A", "B"}},
      {{"C"}, {"A", "B", "C"}},
      {{"A", "B"}, {"A", "B", "C"}},
      {{"A", "C"}, {"A", "B", "C"}},
      {{"B", "C"}, {"A", "B", "C"}},
      {{"A", "B", "C"}, {"A", "B", "C"}},
  };
  for (const auto& [viewed, want] : table) {
    EXPECT_EQ(available_documents({GuidanceMode::conditional, viewed, ""}, docs, g), want);
  }
  auto s = new_session(docs, g, GuidanceMode::conditional);
  for (const char* d : {"A", "B", "C"}) EXPECT_NO_THROW(s = record_view(s, d, docs, g));
  EXPECT_EQ(s.viewed, docs);
}

TEST(Guidance, SequentialAllowsReviewing) {
  GuidanceGraph g;
  g.order = {"a", "b", "c"};
  auto s = new_session(kDocs, g, GuidanceMode::sequential);
  s = record_view(s, "a", kDocs, g);
  s = record_view(s, "b", kDocs, g);
  EXPECT_EQ(record_view(s, "a", kDocs, g), s);
  EXPECT_EQ(available_documents(s, kDocs, g), kDocs);
}

// Exhaustive comparison against the reference model on small random DAGs.
TEST(GuidanceProperty, MatchesReferenceModelOnAllSubsets) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> size(0, 6);
  for (int round = 0; round < 60; ++round) {
    const auto g = geomedia::testing::random_dag(rng, size(rng));
    ASSERT_TRUE(validate_guidance_graph(g.documents, g.graph).empty());
    const auto pre = geomedia::testing::prerequisite_masks(g);
    const auto reach = geomedia::testing::oracle_reachable(pre);
    EXPECT_TRUE(reach.back());
    for (Mask m = 0; m < reach.size(); ++m) {
      GuidanceState s{GuidanceMode::conditional, geomedia::testing::set_of(g, m), ""};
      EXPECT_EQ(geomedia::testing::mask_of(g, available_documents(s, g.documents, g.graph)),
                geomedia::testing::oracle_available(pre, m));
    }
  }
}

}  // namespace
