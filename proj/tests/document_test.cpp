#include <gtest/gtest.h>
#include <algorithm>
#include <random>

#include "geomedia/document.hpp"

namespace {

using namespace geomedia;
using std::chrono::day;
using std::chrono::month;
using std::chrono::year;

Date ymd(int y, unsigned m, unsigned d) { return Date{year{y}, month{m}, day{d}}; }

MultimediaDocument doc(std::string id, std::string title, std::optional<Date> ref,
                       std::set<std::string> tags = {}, MediaKind kind = MediaKind::image) {
  MultimediaDocument d;
  d.id = std::move(id);
  d.title = std::move(title);
  d.kind = kind;
  d.source = "https://example.org/" + d.id;
  d.reference_date = ref;
  d.tags = std::move(tags);
  return d;
}

std::vector<std::string> ids(const std::vector<MultimediaDocument>& docs) {
  std::vector<std::string> out;
  for (const auto& d : docs) out.push_back(d.id);
  return out;
}

TEST(MediaKind, NamesRoundTrip) {
  for (MediaKind k : kAllMediaKinds) EXPECT_EQ(media_kind_from_string(to_string(k)), k);
  EXPECT_EQ(to_string(MediaKind::video_360), "video_360");
  EXPECT_EQ(to_string(MediaKind::web_page), "web_page");
  EXPECT_FALSE(media_kind_from_string("audio"));
  EXPECT_TRUE(is_video(MediaKind::video_360));
  EXPECT_FALSE(is_video(MediaKind::pdf));
}

TEST(Date, ParseAndFormat) {
  EXPECT_EQ(parse_date("1760-01-31"), ymd(1760, 1, 31));
  EXPECT_EQ(format_date(ymd(2017, 6, 5)), "2017-06-05");
  EXPECT_FALSE(parse_date("2017-02-30"));
  EXPECT_FALSE(parse_date("2017-2-3"));
  EXPECT_FALSE(parse_date("yesterday"));
  EXPECT_FALSE(parse_date("2017-02-03T00:00"));
}

TEST(Filter, EmptyFilterKeepsEverything) {
  const std::vector docs{doc("a", "A", ymd(1900, 1, 1)), doc("b", "B", std::nullopt)};
  EXPECT_EQ(filter_documents(docs, {}), docs);
}

TEST(Filter, CriteriaAreConjunctive) {
  const std::vector docs{
      doc("a", "Place Bellecour 1760", ymd(1760, 1, 1), {"square", "engraving"}),
      doc("b", "Bellecour today", ymd(2017, 5, 1), {"square"}),
      doc("c", "Chemistry building", ymd(1990, 1, 1), {"campus"}, MediaKind::pdf),
      doc("d", "Bellecour undated", std::nullopt, {"square"}),
  };
  DocumentFilter f;
  f.title_substring = "BELLECOUR";
  EXPECT_EQ(ids(filter_documents(docs, f)), (std::vector<std::string>{"a", "b", "d"}));
  f.date_range = DateRange{ymd(1700, 1, 1), ymd(1900, 12, 31)};
  EXPECT_EQ(ids(filter_documents(docs, f)), (std::vector<std::string>{"a"}));

  DocumentFilter tags;
  tags.tags = std::set<std::string>{"square", "engraving"};
  EXPECT_EQ(ids(filter_documents(docs, tags)), (std::vector<std::string>{"a"}));

  DocumentFilter kinds;
  kinds.kinds = std::set<MediaKind>{MediaKind::pdf};
  EXPECT_EQ(ids(filter_documents(docs, kinds)), (std::vector<std::string>{"c"}));
}

TEST(Filter, DateRangeIsInclusive) {
  const std::vector docs{doc("a", "A", ymd(1900, 1, 1)), doc("b", "B", ymd(1900, 12, 31))};
  DocumentFilter f;
  f.date_range = DateRange{ymd(1900, 1, 1), ymd(1900, 12, 31)};
  EXPECT_EQ(filter_documents(docs, f).size(), 2u);
}

TEST(Filter, InvertedRangeRejected) {
  DocumentFilter f;
  f.date_range = DateRange{ymd(2000, 1, 1), ymd(1999, 1, 1)};
  try {
    filter_documents({}, f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_range);
  }
}

TEST(Sort, StableWithUndatedLast) {
  const std::vector docs{
      doc("u1", "", std::nullopt), doc("late", "", ymd(2017, 1, 1)), doc("tie1", "", ymd(1900, 1, 1)),
      doc("u2", "", std::nullopt), doc("tie2", "", ymd(1900, 1, 1)), doc("early", "", ymd(1760, 1, 1)),
  };
  EXPECT_EQ(ids(sort_by_reference_date(docs)),
            (std::vector<std::string>{"early", "tie1", "tie2", "late", "u1", "u2"}));
}

TEST(Filter, ArchivalDateRange) {
  const std::vector docs{doc("p1760", "", ymd(1760, 1, 1)), doc("p1900", "", ymd(1900, 1, 1)),
                         doc("p2017", "", ymd(2017, 1, 1))};
  DocumentFilter f;
  f.date_range = DateRange{ymd(1750, 1, 1), ymd(1800, 12, 31)};
  EXPECT_EQ(ids(filter_documents(docs, f)), (std::vector<std::string>{"p1760"}));
}

TEST(Filter, TitleIsCaseInsensitive) {
  const std::vector docs{doc("a", "Vallee de la chimie - Observatoire photographique", std::nullopt),
                         doc("b", "Gratte-Ciel", std::nullopt)};
  for (const char* needle : {"chimie", "CHIMIE", "Chimie"}) {
    DocumentFilter f;
    f.title_substring = needle;
    EXPECT_EQ(ids(filter_documents(docs, f)), (std::vector<std::string>{"a"})) << needle;
  }
}

TEST(Filter, SequentialEqualsConjunction) {
  const std::vector docs{doc("a", "Bellecour", ymd(1760, 1, 1), {"x"}), doc("b", "Bellecour", ymd(1900, 1, 1)),
                         doc("c", "Other", ymd(1760, 1, 1), {"x"})};
  DocumentFilter a, b, both;
  a.title_substring = both.title_substring = "bell";
  b.tags = both.tags = std::set<std::string>{"x"};
  EXPECT_EQ(filter_documents(filter_documents(docs, a), b), filter_documents(docs, both));
  EXPECT_EQ(filter_documents(filter_documents(docs, both), both), filter_documents(docs, both));
}

TEST(Sort, ArchivalYears) {
  const std::vector docs{doc("p2017", "", ymd(2017, 1, 1)), doc("p1760", "", ymd(1760, 1, 1)),
                         doc("p1900", "", ymd(1900, 1, 1))};
  EXPECT_EQ(ids(sort_by_reference_date(docs)), (std::vector<std::string>{"p1760", "p1900", "p2017"}));
}

TEST(SortProperty, StablePermutation) {
  std::mt19937 rng(5);
  for (int round = 0; round < 200; ++round) {
    std::vector<MultimediaDocument> docs;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      std::optional<Date> ref;
      if (rng() % 4 != 0) ref = ymd(1900 + static_cast<int>(rng() % 4), 1, 1);
      docs.push_back(doc("d" + std::to_string(i), "", ref));
    }
    const auto sorted = sort_by_reference_date(docs);
    ASSERT_EQ(sorted.size(), docs.size());
    EXPECT_TRUE(std::is_permutation(sorted.begin(), sorted.end(), docs.begin(), docs.end()));
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      const auto& a = sorted[i - 1];
      const auto& b = sorted[i];
      if (!b.reference_date) continue;
      ASSERT_TRUE(a.reference_date);
      EXPECT_LE(*a.reference_date, *b.reference_date);
      // Equal keys keep input order; ids encode the input position.
      if (*a.reference_date == *b.reference_date) {
        EXPECT_LT(std::stoi(a.id.substr(1)), std::stoi(b.id.substr(1)));
      }
    }
  }
}

TEST(FilterProperty, SubsetAndIdempotent) {
  std::mt19937 rng(8);
  const std::vector<std::string> titles{"Bellecour", "bellecour nord", "Chimie", "Campus", ""};
  for (int round = 0; round < 200; ++round) {
    std::vector<MultimediaDocument> docs;
    for (int i = 0; i < 10; ++i) {
      auto d = doc("d" + std::to_string(i), titles[rng() % titles.size()],
                   ymd(1750 + static_cast<int>(rng() % 300), 1 + rng() % 12, 1), {}, kAllMediaKinds[rng() % 7]);
      if (rng() % 2) d.tags.insert("t" + std::to_string(rng() % 3));
      docs.push_back(d);
    }
    DocumentFilter f;
    if (rng() % 2) f.title_substring = "BELL";
    if (rng() % 2) f.date_range = DateRange{ymd(1800, 1, 1), ymd(1950, 1, 1)};
    if (rng() % 2) f.tags = std::set<std::string>{"t1"};
    if (rng() % 2) f.kinds = std::set<MediaKind>{MediaKind::image, MediaKind::pdf};
    const auto out = filter_documents(docs, f);
    for (const auto& d : out) EXPECT_TRUE(std::find(docs.begin(), docs.end(), d) != docs.end());
    EXPECT_EQ(filter_documents(out, f), out);
    std::size_t expected = 0;
    for (const auto& d : docs) expected += matches(d, f) ? 1 : 0;
    EXPECT_EQ(out.size(), expected);
  }
}

}  // namespace
