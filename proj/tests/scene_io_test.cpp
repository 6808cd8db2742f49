#include <gtest/gtest.h>

#include "geomedia/scene_io.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace geomedia;
using geomedia::testing::fixture;

template <class F>
Error expect_error(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected geomedia::Error";
  return Error(ErrorCode::io_error, "none");
}

TEST(SceneIo, MinimalScene) {
  const Scene s = parse_scene(fixture("scenes/minimal.json"));
  EXPECT_EQ(s.scene_id, "minimal");
  EXPECT_EQ(s.title, "Empty scene");
  EXPECT_EQ(s.schema_version, "1");
  EXPECT_EQ(s.guidance.mode, GuidanceMode::free);
  EXPECT_TRUE(validate_scene(s).empty());
}

TEST(SceneIo, FourModalitiesFields) {
  const Scene s = parse_scene(fixture("scenes/four_modalities.json"));
  EXPECT_EQ(s.documents.size(), 6u);
  ASSERT_EQ(s.pins.size(), 1u);
  EXPECT_EQ(s.pins[0].anchor, (Vec3{120.5, -40.25, 12}));
  EXPECT_EQ(s.pins[0].thumbnail.locked_image_source, "thumbs/chemistry-lock.jpg");
  EXPECT_EQ(s.web_boards.at(0).size, (BoardSize{16, 9}));
  EXPECT_EQ(s.extended_documents.at(0).overlay_opacity, 0.8);
  EXPECT_EQ(s.slideshows.at(0).heading_deg, 15.0);
  EXPECT_EQ(s.guidance.mode, GuidanceMode::conditional);
  EXPECT_EQ(s.guidance.graph.prerequisites.at("bellecour-2017"), (DocumentIdSet{"bellecour-1900"}));
  EXPECT_EQ(s.layers.at(1).kind, GeoserviceKind::wfs);
  EXPECT_EQ(s.documents[0].reference_date, parse_date("1760-01-01"));
  ASSERT_TRUE(s.origin);
  EXPECT_EQ(s.origin->latitude_deg, 45.7578);
  EXPECT_TRUE(s.extensions.contains(""));
  EXPECT_TRUE(s.extensions.contains("/documents/4"));
  EXPECT_TRUE(validate_scene(s).empty());
}

TEST(SceneIo, RoundTripIsIdentity) {
  for (const char* name : {"scenes/minimal.json", "scenes/four_modalities.json"}) {
    const Scene s = parse_scene(fixture(name));
    const std::string text = serialize_scene(s);
    EXPECT_EQ(parse_scene(text), s) << name;
    EXPECT_EQ(serialize_scene(parse_scene(text)), text) << name;
  }
}

TEST(SceneIo, ExtensionsSurviveRoundTrip) {
  const std::string text = serialize_scene(parse_scene(fixture("scenes/four_modalities.json")));
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["viewer"]["background"], "#202830");
  EXPECT_EQ(j["documents"][4]["x-duration-s"], 95);
}

TEST(SceneIo, CanonicalForm) {
  const std::string text = serialize_scene(parse_scene(R"({"title":"T","id":"x"})"));
  EXPECT_EQ(text.back(), '\n');
  EXPECT_LT(text.find("\"id\""), text.find("\"title\""));
  EXPECT_NE(text.find("\n  \"id\": \"x\""), std::string::npos);
}

TEST(SceneIo, TruncatedInputReportsByteOffset) {
  const std::string full = fixture("scenes/four_modalities.json");
  const Error e = expect_error([&] { parse_scene(full.substr(0, 200)); });
  EXPECT_EQ(e.code(), ErrorCode::syntax_error);
  ASSERT_TRUE(e.byte_offset());
  EXPECT_LE(*e.byte_offset(), 201u);
  EXPECT_GT(*e.byte_offset(), 0u);
}

TEST(SceneIo, NumberOverflowIsSyntaxError) {
  const Error e = expect_error([] { parse_scene(R"({"id":"x","title":"t","origin":{"longitude_deg":18E43700}})"); });
  EXPECT_EQ(e.code(), ErrorCode::syntax_error);
}

TEST(SceneIo, MissingRequiredFieldHasPath) {
  const Error e = expect_error([] { parse_scene(R"({"id":"x","title":"t","documents":[{"id":"d"}]})"); });
  EXPECT_EQ(e.code(), ErrorCode::field_error);
  EXPECT_EQ(e.field_path(), "/documents/0/kind");
}

TEST(SceneIo, WrongTypeHasPath) {
  const Error e = expect_error([] {
    parse_scene(R"({"id":"x","title":"t","pins":[{"id":"p","document_id":"d","anchor":{"x":1,"y":true,"z":0}}]})");
  });
  EXPECT_EQ(e.code(), ErrorCode::field_error);
  EXPECT_EQ(e.field_path(), "/pins/0/anchor/y");
  const Error bad_kind = expect_error(
      [] { parse_scene(R"({"id":"x","title":"t","documents":[{"id":"d","kind":"hologram","source":"s"}]})"); });
  EXPECT_EQ(bad_kind.field_path(), "/documents/0/kind");
  const Error bad_root = expect_error([] { parse_scene("[1,2]"); });
  EXPECT_EQ(bad_root.code(), ErrorCode::field_error);
}

TEST(SceneIo, NumericStringsOnlyWhereAllowed) {
  EXPECT_NO_THROW(parse_scene(
      R"({"id":"x","title":"t","documents":[{"id":"d","kind":"image","source":"s"}],
          "pins":[{"id":"p","document_id":"d","anchor":{"x":"1e3","y":"-2","z":"0.5"},"thumbnail":{"image":"i"}}]})"));
  const Error e = expect_error([] {
    parse_scene(R"({"id":"x","title":"t","pins":[{"id":"p","document_id":"d","anchor":{"x":"1 ","y":0,"z":0}}]})");
  });
  EXPECT_EQ(e.field_path(), "/pins/0/anchor/x");
}

TEST(Validate, ReportsDanglingAndCycles) {
  Scene s = parse_scene(fixture("scenes/four_modalities.json"));
  s.pins[0].document_id = "gone";
  s.pins[0].thumbnail.document_id = "gone";
  s.guidance.graph.prerequisites["bellecour-1760"] = {"bellecour-2017"};
  const auto r = validate_scene(s);
  auto has = [&](const std::string& path, const std::string& needle) {
    return std::any_of(r.begin(), r.end(), [&](const SceneFinding& f) {
      return f.path == path && f.message.find(needle) != std::string::npos;
    });
  };
  EXPECT_TRUE(has("/pins/0/document_id", "gone"));
  EXPECT_TRUE(has("/guidance", "cycle"));
}

TEST(Validate, SingleDefectsGiveSingleFindings) {
  auto j = nlohmann::json::parse(fixture("scenes/four_modalities.json"));
  j["pins"][0]["document_id"] = "ghost";
  const auto dangling = validate_scene(parse_scene(j.dump()));
  ASSERT_EQ(dangling.size(), 1u);
  EXPECT_EQ(dangling[0].path, "/pins/0/document_id");

  j = nlohmann::json::parse(fixture("scenes/four_modalities.json"));
  j["slideshows"][0]["size"]["width_m"] = -40;
  const auto negative = validate_scene(parse_scene(j.dump()));
  ASSERT_EQ(negative.size(), 1u);
  EXPECT_EQ(negative[0].path, "/slideshows/0/size");
}

TEST(Validate, StructuralFindings) {
  Scene s = parse_scene(fixture("scenes/four_modalities.json"));
  s.documents.push_back(s.documents[0]);
  s.web_boards[0].size.width_m = 0;
  s.extended_documents[0].document_id = "campus-map";
  s.extended_documents[0].overlay_opacity = 1.5;
  s.slideshows[0].current_index = 9;
  s.schema_version = "2";
  const auto r = validate_scene(s);
  std::set<std::string> paths;
  for (const auto& f : r) paths.insert(f.path);
  for (const char* p : {"/documents/6/id", "/web_boards/0/size", "/extended_documents/0/document_id",
                        "/extended_documents/0/overlay_opacity", "/slideshows/0/current_index",
                        "/schema_version"}) {
    EXPECT_TRUE(paths.contains(p)) << p;
  }
}

TEST(Validate, SequentialWithoutOrder) {
  Scene s = parse_scene(fixture("scenes/four_modalities.json"));
  s.guidance.mode = GuidanceMode::sequential;
  s.guidance.graph.order.clear();
  const auto r = validate_scene(s);
  EXPECT_TRUE(std::any_of(r.begin(), r.end(), [](const SceneFinding& f) { return f.path == "/guidance/order"; }));
}

TEST(SceneIoFuzz, MutatedInputsRaiseOnlyDomainErrors) {
  std::mt19937_64 rng(99);
  const std::string base = fixture("scenes/four_modalities.json");
  for (int i = 0; i < 1000; ++i) {
    std::string text = base;
    const int edits = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < edits; ++k) text = geomedia::testing::mutate(std::move(text), rng);
    try {
      const Scene s = parse_scene(text);
      (void)validate_scene(s);
      EXPECT_EQ(parse_scene(serialize_scene(s)), s);
    } catch (const Error&) {
    }
  }
}

}  // namespace
