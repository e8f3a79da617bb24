#include <gtest/gtest.h>

#include <cstring>
#include <random>
#include <sstream>

#include "builders.h"
#include "tabproc/error.h"
#include "tabproc/token_codec.h"

namespace tabproc {
namespace {

TEST(PitchToken, Encode) {
  EXPECT_EQ(encodePitchToken(PitchSpec{'C', 1, 4}, TokenMode::pitchOctave), "C4#");
  EXPECT_EQ(encodePitchToken(PitchSpec{'C', 1, 4}, TokenMode::octavePitch), "4C#");
  EXPECT_EQ(encodePitchToken(PitchSpec{'A', 0, 2}, TokenMode::octavePitch), "2A");
  EXPECT_EQ(encodePitchToken(PitchSpec{'B', -1, 3}, TokenMode::pitchOctave), "B3b");
  EXPECT_EQ(encodePitchToken(std::nullopt, TokenMode::pitchOctave), "R");
  EXPECT_THROW(encodePitchToken(PitchSpec{'C', 2, 4}, TokenMode::pitchOctave), EncodeError);
}

TEST(PitchToken, Decode) {
  EXPECT_EQ(decodePitchToken("R", TokenMode::pitchOctave), std::nullopt);
  EXPECT_EQ(decodePitchToken("C4#", TokenMode::pitchOctave), (PitchSpec{'C', 1, 4}));
  EXPECT_EQ(decodePitchToken("4C#", TokenMode::octavePitch), (PitchSpec{'C', 1, 4}));
  EXPECT_EQ(decodePitchToken("E5b", TokenMode::pitchOctave), (PitchSpec{'E', -1, 5}));
  EXPECT_THROW(decodePitchToken("4C#", TokenMode::pitchOctave), DecodeError);
  EXPECT_THROW(decodePitchToken("C4##", TokenMode::pitchOctave), DecodeError);
  EXPECT_THROW(decodePitchToken("", TokenMode::pitchOctave), DecodeError);
  EXPECT_THROW(decodePitchToken("H4", TokenMode::pitchOctave), DecodeError);
  try {
    decodePitchToken("X9", TokenMode::pitchOctave);
  } catch (const DecodeError& e) {
    EXPECT_NE(std::string(e.what()).find("X9"), std::string::npos);
  }
  EXPECT_EQ(pitchTokenToMidi("C4#", TokenMode::pitchOctave), 61);
}

TEST(PitchToken, EveryMidiRoundTrips) {
  for (TokenMode mode : {TokenMode::pitchOctave, TokenMode::octavePitch}) {
    for (int midi = 12; midi <= 127; ++midi) {
      for (bool flats : {false, true}) {
        PitchSpec p = spellMidi(midi, flats);
        EXPECT_EQ(decodePitchToken(encodePitchToken(p, mode), mode), p);
      }
    }
  }
}

TEST(EncodeClip, ClusterRestAndEighth) {
  testing::ScoreBuilder b;
  b.bar().notes(0, 1, {{1, 0}, {5, 3}}).rest(1, 1).notes(2, Rational(1, 2), {{1, 3}}).rest(Rational(5, 2), Rational(3, 2));
  EncodedClip clip = encodeClip(b.build(), TokenMode::pitchOctave);
  ASSERT_EQ(clip.pitchTokens.size(), 4u);
  EXPECT_EQ(clip.pitchTokens[0], "E4 C3");
  EXPECT_EQ(clip.fingerTokens[0], "(1,0) (5,3)");
  EXPECT_EQ(clip.timeStamps[0], 1.0f);
  EXPECT_EQ(clip.pitchTokens[1], "R");
  EXPECT_EQ(clip.fingerTokens[1], "(R,R)");
  EXPECT_EQ(clip.timeStamps[1], 1.0f);
  EXPECT_EQ(clip.pitchTokens[2], "G4");
  EXPECT_EQ(clip.timeStamps[2], 0.5f);
}

TEST(EncodeClip, HighE5OverLowC3) {
  testing::ScoreBuilder b;
  b.bar().notes(0, 4, {{1, 12}, {5, 3}});
  EncodedClip clip = encodeClip(b.build(), TokenMode::pitchOctave);
  EXPECT_EQ(clip.pitchTokens, std::vector<std::string>{"E5 C3"});
  EXPECT_EQ(clip.fingerTokens, std::vector<std::string>{"(1,12) (5,3)"});
  EXPECT_EQ(clip.timeStamps, std::vector<float>{4.0f});
}

TEST(EncodeClip, SustainedBassIsRepeatedAcrossSegments) {
  testing::ScoreBuilder m;
  m.bar().notes(0, 2, {{6, 0}, {1, 0}}).notes(1, 1, {{1, 3}}).notes(2, 2, {{6, 3}});
  Score score = m.build();
  score.measures[0].clusters[0].events[0].duration = 1;  // E4 lasts a quarter, E2 a half
  EncodedClip clip = encodeClip(score, TokenMode::pitchOctave);
  EXPECT_EQ(clip.pitchTokens, (std::vector<std::string>{"E4 E2", "G4 E2", "G2"}));
  EXPECT_EQ(clip.timeStamps, (std::vector<float>{1.0f, 1.0f, 2.0f}));
}

TEST(EncodeClip, Errors) {
  EXPECT_THROW(encodeClip(Score{}, TokenMode::pitchOctave), EncodeError);
  testing::ScoreBuilder b;
  b.bar().notes(0, 4, {{1, 0}});
  EXPECT_THROW(encodeClip(b.build(false), TokenMode::pitchOctave), EncodeError);
  Score tied = b.build();
  tied.measures[0].clusters[0].events[0].tieStart = true;
  EXPECT_THROW(encodeClip(tied, TokenMode::pitchOctave), EncodeError);
}

TEST(DecodeClip, WholeNote) {
  EncodedClip clip;
  clip.pitchTokens = {"C4"};
  clip.timeStamps = {4.0f};
  clip.fingerTokens = {"(2,1)"};
  ParseReport report;
  Score s = decodeClip(clip, &report);
  ASSERT_EQ(s.measures.size(), 1u);
  EXPECT_EQ(s.measures[0].time, (TimeSignature{4, 4}));
  ASSERT_EQ(s.measures[0].clusters.size(), 1u);
  EXPECT_EQ(s.measures[0].clusters[0].events[0].duration, Rational(4));
  EXPECT_TRUE(report.warnings.empty());
}

TEST(DecodeClip, Errors) {
  EncodedClip clip;
  clip.pitchTokens = {"C4", "D4"};
  clip.timeStamps = {4.0f};
  clip.fingerTokens = {"(2,1)"};
  EXPECT_THROW(decodeClip(clip), DecodeError);

  clip.pitchTokens = {"C4"};
  clip.timeStamps = {3.0f};
  EXPECT_THROW(decodeClip(clip), DecodeError);  // stops mid-bar

  clip.pitchTokens = {"C4", "C4"};
  clip.fingerTokens = {"(2,1)", "(2,1)"};
  clip.timeStamps = {3.0f, 2.0f};
  EXPECT_THROW(decodeClip(clip), DecodeError);  // crosses the barline

  clip.pitchTokens = {"C4 E4"};
  clip.fingerTokens = {"(2,1)"};
  clip.timeStamps = {4.0f};
  EXPECT_THROW(decodeClip(clip), DecodeError);  // note count mismatch

  clip.pitchTokens = {"C4"};
  clip.timeStamps = {0.0f};
  EXPECT_THROW(decodeClip(clip), DecodeError);
}

TEST(DecodeClip, PositionMismatchIsWarning) {
  EncodedClip clip;
  clip.pitchTokens = {"C4"};
  clip.timeStamps = {4.0f};
  clip.fingerTokens = {"(2,3)"};
  ParseReport report;
  decodeClip(clip, &report);
  EXPECT_EQ(report.warnings.size(), 1u);
}

TEST(DecodeClip, ReproducesClusterSizes) {
  // A two-bar excerpt laid out like a tablature figure: bass + chord + melody.
  EncodedClip clip;
  clip.pitchTokens = {"C4 E3 C3", "D4", "E4 G3", "R", "F4 A3 F2", "G4", "A4", "B4 G2"};
  clip.timeStamps = {1.0f, 1.0f, 1.0f, 1.0f, 2.0f, 0.5f, 0.5f, 1.0f};
  clip.fingerTokens = {"(2,1) (4,2) (5,3)", "(2,3)", "(1,0) (3,0)", "(R,R)",
                       "(1,1) (3,2) (6,1)", "(1,3)", "(1,5)", "(1,7) (6,3)"};
  clip.timeSignatures = {{1, {4, 4}}};
  Score s = decodeClip(clip);
  ASSERT_EQ(s.measures.size(), 2u);
  std::vector<int> sizes;
  for (const auto& m : s.measures) {
    for (const auto& c : m.clusters) sizes.push_back(c.pitchedCount());
  }
  EXPECT_EQ(sizes, (std::vector<int>{3, 1, 2, 0, 3, 1, 1, 2}));
  EXPECT_EQ(encodeClip(s, TokenMode::pitchOctave), clip);
}

TEST(DecodeClip, TimeSignatureChanges) {
  EncodedClip clip;
  clip.pitchTokens = {"C4", "D4", "E4"};
  clip.timeStamps = {3.0f, 1.5f, 1.5f};
  clip.fingerTokens = {"(2,1)", "(2,3)", "(1,0)"};
  clip.timeSignatures = {{1, {3, 4}}, {2, {6, 8}}};
  Score s = decodeClip(clip);
  ASSERT_EQ(s.measures.size(), 2u);
  EXPECT_EQ(s.measures[1].time, (TimeSignature{6, 8}));
  EXPECT_EQ(encodeClip(s, TokenMode::pitchOctave), clip);
}

TEST(Codec, RandomRoundTripAndLaws) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 150; ++i) {
    Score s = normalizeScore(testing::randomRawScore(rng));
    for (TokenMode mode : {TokenMode::pitchOctave, TokenMode::octavePitch}) {
      EncodedClip clip = encodeClip(s, mode);
      EXPECT_TRUE(checkClipInvariants(clip).empty());
      EncodedClip again = encodeClip(decodeClip(clip), mode);
      EXPECT_EQ(again, clip);
      EXPECT_EQ(clipFromJson(clipToJson(clip)), clip);
      // Sum law per bar, allowing one float ulp per addition.
      float total = 0;
      for (float t : clip.timeStamps) total += t;
      Rational expected = 0;
      for (const auto& m : s.measures) expected += measureLength(m);
      EXPECT_NEAR(total, static_cast<float>(toDouble(expected)),
                  static_cast<float>(clip.timeStamps.size()) * 1e-6f * total);
    }
  }
}

TEST(Codec, JsonAndTextExport) {
  testing::ScoreBuilder b;
  b.bar().notes(0, 1, {{1, 0}, {5, 3}}).rest(1, 1).notes(2, Rational(1, 3), {{2, 1}}).notes(Rational(7, 3), Rational(5, 3), {{3, 2}});
  Score s = b.build();
  s.annotation = ClipAnnotation{Structure::chorus, 3, 3, "x"};
  EncodedClip clip = encodeClip(s, TokenMode::pitchOctave);
  EXPECT_EQ(clip.annotation, s.annotation);
  EncodedClip back = clipFromJson(clipToJson(clip));
  EXPECT_EQ(back, clip);
  EXPECT_EQ(std::memcmp(&back.timeStamps[2], &clip.timeStamps[2], sizeof(float)), 0);
  std::string text = clipToText(clip);
  std::istringstream lines(text);
  std::string pitch, time, finger;
  std::getline(lines, pitch);
  std::getline(lines, time);
  std::getline(lines, finger);
  EXPECT_EQ(pitch, "E4 C3\tR\tC4\tA3");
  EXPECT_EQ(finger, "(1,0) (5,3)\t(R,R)\t(2,1)\t(3,2)");
  EXPECT_EQ(time.substr(0, 4), "1\t1\t");
  EXPECT_THROW(clipFromJson("{}"), Error);
}

}  // namespace
}  // namespace tabproc
