#include <gtest/gtest.h>

#include <random>

#include "builders.h"
#include "tabproc/error.h"
#include "tabproc/ingest.h"
#include "tabproc/score_json.h"

namespace tabproc {
namespace {

TEST(ScoreJson, RoundTripsRandomScores) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    Score raw = testing::randomRawScore(rng);
    EXPECT_EQ(parseScoreJson(serializeScore(raw)), raw);
    Score merged = normalizeScore(raw);
    merged.annotation = ClipAnnotation{Structure::bridge, 1, 2, "r"};
    EXPECT_EQ(parseScoreJson(serializeScore(merged)), merged);
  }
}

TEST(ScoreJson, TechniquesAndTiesSurvive) {
  testing::ScoreBuilder b;
  b.bar().notes(0, 2, {{3, 2}}).technique(TechniqueKind::slideOut, 7).tie(true, false).notes(2, 2, {{3, 2}});
  Score s = b.build();
  EXPECT_EQ(parseScoreJson(serializeScore(s)), s);
}

TEST(ScoreJson, CanonicalText) {
  testing::ScoreBuilder b;
  b.bar().notes(0, Rational(3, 2), {{2, 1}});
  std::string text = serializeScore(b.build());
  EXPECT_EQ(text.back(), '\n');
  EXPECT_NE(text.find("\"duration\": \"3/2\""), std::string::npos);
  EXPECT_EQ(serializeScore(parseScoreJson(text)), text);
}

TEST(ScoreJson, RejectsBadDocuments) {
  EXPECT_THROW(parseScoreJson("{"), Error);
  EXPECT_THROW(parseScoreJson("{\"measures\": 3}"), Error);
}

TEST(ReportJson, CarriesWarnings) {
  ParseReport r;
  r.warn(3, "something odd");
  r.droppedNodes = 2;
  Json j = toJson(r);
  EXPECT_EQ(j["droppedNodes"], 2);
  EXPECT_EQ(j["warnings"][0]["bar"], 3);
  EXPECT_EQ(j["warnings"][0]["message"], "something odd");
}

}  // namespace
}  // namespace tabproc
