#include <gtest/gtest.h>

#include "support.hpp"

using namespace sei;
using nlohmann::json;

namespace {

json root_doc() {
  return json::parse(R"J({
    "name": "root_zero_map", "dim": 1,
    "h": "if x1 > 0 then sqrt(x1) else 0",
    "E": ["0"],
    "psi": ["if x1 != x2 then -x2 else 0"],
    "region": {"box": [[-3, 3]]},
    "constraints": []
  })J");
}

std::string error_path(const json& doc) {
  try {
    load_scenario(doc);
  } catch (const ScenarioError& e) {
    return e.path();
  }
  return "<accepted>";
}

}  // namespace

TEST(Model, LoadsOneDimensionalScenario) {
  const auto sc = load_scenario(root_doc());
  EXPECT_EQ(sc.dim, 1u);
  EXPECT_EQ(sc.name, "root_zero_map");
  EXPECT_EQ(sc.apply_e(Point{2.0}), Point{0.0});
  EXPECT_EQ(sc.apply_psi(Point{1.0}, Point{2.0}), Point{-2.0});
  EXPECT_EQ(sc.apply_psi(Point{2.0}, Point{2.0}), Point{0.0});
  EXPECT_FALSE(sc.grad_h);
}

TEST(Model, LoadsTwoDimensionalScenario) {
  const auto sc = testing_support::worked("cubic_quadrant");
  EXPECT_EQ(sc.dim, 2u);
  EXPECT_EQ(sc.apply_e(Point{-1.0, -0.5}), (Point{0.0, -0.5}));
  EXPECT_EQ(sc.apply_psi(Point{-1.0, -0.5}, Point{-0.25, -2.0}), (Point{-0.75, 1.5}));
}

TEST(Model, MissingFieldIsNamed) {
  for (const char* field : {"dim", "h", "E", "psi", "region", "constraints"}) {
    json doc = root_doc();
    doc.erase(field);
    EXPECT_EQ(error_path(doc), field);
  }
  json doc = root_doc();
  doc["region"].erase("box");
  EXPECT_EQ(error_path(doc), "region.box");
}

TEST(Model, UnknownKeysRejected) {
  json doc = root_doc();
  doc["colour"] = "blue";
  EXPECT_EQ(error_path(doc), "colour");
  doc = root_doc();
  doc["region"]["shape"] = 1;
  EXPECT_EQ(error_path(doc), "region.shape");
}

TEST(Model, ShapeErrorsNamed) {
  json doc = root_doc();
  doc["E"] = json::array({"0", "1"});
  EXPECT_EQ(error_path(doc), "E");
  doc = root_doc();
  doc["psi"] = json::array({"x3"});
  EXPECT_NE(error_path(doc), "<accepted>");
  doc = root_doc();
  doc["region"]["box"] = json::parse("[[3, -3]]");
  EXPECT_EQ(error_path(doc), "region.box[0]");
  doc = root_doc();
  doc["dim"] = 0;
  EXPECT_EQ(error_path(doc), "dim");
  doc = root_doc();
  doc["h"] = "sqrt(";
  EXPECT_EQ(error_path(doc), "h");
  doc = root_doc();
  doc["constraints"] = json::array({"x1 +"});
  EXPECT_EQ(error_path(doc), "constraints[0]");
  EXPECT_THROW(load_scenario_text("{ not json"), ScenarioError);
  EXPECT_THROW(load_scenario_file("/nonexistent/scenario.json"), ScenarioError);
}

// Deleting or corrupting any single field never crashes the loader.
TEST(ModelProperty, FieldDeletionFuzz) {
  const json base = json::parse(R"J({"name":"x","dim":1,"h":"x1","grad_h":["1"],"E":["x1"],
                                "psi":["x1 - x2"],"region":{"box":[[-1,1]],"membership":"x1",
                                "description":"d"},"constraints":["x1"],"e_preimage":["x1"],"b":"1"})J");
  ASSERT_NO_THROW(load_scenario(base));
  const std::set<std::string> required = {"dim", "h", "E", "psi", "region", "constraints"};
  for (const auto& [key, _] : base.items()) {
    json doc = base;
    doc.erase(key);
    if (required.contains(key))
      EXPECT_EQ(error_path(doc), key);
    else
      EXPECT_NO_THROW(load_scenario(doc)) << key;
    for (const json& junk : {json(nullptr), json(42), json("x9"), json::array(), json::object()}) {
      doc = base;
      doc[key] = junk;
      try {
        load_scenario(doc);
      } catch (const ScenarioError&) {
      }
    }
  }
}

TEST(Model, OrthantMembership) {
  const auto sc = load_scenario(json::parse(R"J({"dim":2,"h":"x1^3 + x2^3","E":["0","x2"],
      "psi":["x1 - x3","x2 - x4"],"region":{"box":[[-10,0],[-10,0]],"membership":"max(x1, x2)"},
      "constraints":[]})J"));
  EXPECT_TRUE(member(sc.region, Point{-1.0, -1.0}, 0.0));
  EXPECT_FALSE(member(sc.region, Point{0.5, -1.0}, 1e-9));
  EXPECT_TRUE(member(sc.region, Point{0.0, 0.0}, 1e-9));
  EXPECT_DOUBLE_EQ(sc.region.violation(Point{0.5, -1.0}), 0.5);
  EXPECT_THROW(sc.region.violation(Point{0.0}), Error);
}

TEST(Model, ReportRegionRoundTrip) {
  const auto sc = testing_support::worked("root_zero_map");
  const auto j = to_json(sc.region);
  EXPECT_EQ(j["box"][0][0], -3.0);
  EXPECT_EQ(j["box"][0][1], 3.0);
}
