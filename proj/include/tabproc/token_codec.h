// Text-token representation of a clip: parallel lists of pitch tokens,
// float32 time stamps and (string,fret) finger tokens, plus the tuning.
//
//   pitch:  "E5 C3"          notes of one cluster, high to low; rest = "R"
//   time:   1.0              cluster duration in quarter notes
//   finger: "(1,0) (5,3)"    same order as the pitch token; rest = "(R,R)"

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tabproc/ingest.h"
#include "tabproc/model.h"

namespace tabproc {

/// pitchOctave writes "C4#", octavePitch writes "4C#".
enum class TokenMode { pitchOctave, octavePitch };

/// "pitch-octave" / "octave-pitch".
std::string_view toString(TokenMode mode);
std::optional<TokenMode> tokenModeFromString(std::string_view name);

/// Throws EncodeError for double accidentals.
std::string encodePitchToken(const std::optional<PitchSpec>& pitch, TokenMode mode);

/// Returns nullopt for "R". Throws DecodeError naming the offending token.
std::optional<PitchSpec> decodePitchToken(std::string_view token, TokenMode mode);

/// MIDI of a single-note pitch token. Throws DecodeError for rests.
int pitchTokenToMidi(std::string_view token, TokenMode mode);

struct TimeSignatureChange {
  int bar = 1;
  TimeSignature time;

  friend bool operator==(const TimeSignatureChange&, const TimeSignatureChange&) = default;
};

struct EncodedClip {
  TokenMode mode = TokenMode::pitchOctave;
  std::vector<std::string> pitchTokens;
  std::vector<float> timeStamps;
  std::vector<std::string> fingerTokens;
  Tuning tuning = kStandardTuning;
  int capo = 0;
  std::vector<TimeSignatureChange> timeSignatures;
  std::optional<ClipAnnotation> annotation;

  friend bool operator==(const EncodedClip&, const EncodedClip&) = default;
};

/// One token triple per time segment of a normalized score (voices merged,
/// ties cleaned). A segment ends at the next attack, release or barline, so
/// a note that outlasts shorter neighbours is repeated as a continuation in
/// the following segments. Throws EncodeError for an empty or
/// unnormalized score.
EncodedClip encodeClip(const Score& score, TokenMode mode);

/// Rebuilds a Score by laying the stamps against the declared time
/// signatures (4/4 when none). Throws DecodeError when the lists differ in
/// length, a token is malformed, a stamp crosses a barline or the clip
/// stops mid-bar. Pitch/position disagreements are reported as warnings.
Score decodeClip(const EncodedClip& clip, ParseReport* report = nullptr);

/// Broken length, note-count, grammar or high-to-low laws; empty when valid.
std::vector<std::string> checkClipInvariants(const EncodedClip& clip);

/// The .antab.json document (sorted keys, trailing newline).
std::string clipToJson(const EncodedClip& clip);
EncodedClip clipFromJson(std::string_view text);

/// Three lines (pitch, time, finger); tokens separated by tabs because
/// single spaces already join the notes of one cluster.
std::string clipToText(const EncodedClip& clip);

}  // namespace tabproc
