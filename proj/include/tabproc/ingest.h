// GuitarPro-flavoured MusicXML ingestion and score normalization.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tabproc/model.h"
#include "tabproc/technique_dict.h"

namespace tabproc {

struct ParseWarning {
  int bar = 0;  // 0 when not tied to a bar
  std::string message;

  friend bool operator==(const ParseWarning&, const ParseWarning&) = default;
};

struct ParseReport {
  std::vector<ParseWarning> warnings;
  int droppedNodes = 0;

  void warn(int bar, std::string message) { warnings.push_back({bar, std::move(message)}); }
  void append(const ParseReport& other);
};

struct ParseOptions {
  TechniqueDictionary techniques = TechniqueDictionary::defaults();
  // Join every tablature part into one score instead of taking the first.
  bool mergeTracks = false;
  int maxFret = kMaxFret;
};

struct ParsedScore {
  Score score;
  ParseReport report;
};

/// Parses a score-partwise document. Voices are left unmerged: each cluster
/// holds the simultaneous notes of a single voice.
///
/// Throws ParseError for malformed XML and StructuralError for
/// score-timewise documents, missing parts or missing divisions. Pitch and
/// fret disagreements are repaired (fret recomputed from pitch) with a
/// warning.
ParsedScore parseScore(std::string_view document, const ParseOptions& options = {});

/// loadMusicXmlDocument + parseScore.
ParsedScore readScoreFile(const std::filesystem::path& path, const ParseOptions& options = {});

/// One voice of one measure, events in time order.
struct RawVoiceStream {
  int track = 0;
  int voice = 1;
  std::vector<NoteEvent> events;
};

std::vector<RawVoiceStream> voiceStreams(const Measure& measure);

/// Joins the clusters of all voices that share an onset. Two pitched notes
/// on one string at one onset keep the higher voice; the other is recorded
/// in `report` as a dropped node.
Score mergeVoices(const Score& score, ParseReport* report = nullptr);

/// Collapses every tie chain into its first note, summing durations. Chains
/// may cross barlines, so a collapsed note can outlast its measure.
Score cleanTies(const Score& score, ParseReport* report = nullptr);

/// mergeVoices followed by cleanTies.
Score normalizeScore(const Score& score, ParseReport* report = nullptr);

/// Sets the capo to 0, lowering every pitch by the old capo while keeping
/// strings and frets.
Score normalizeCapo(const Score& score);

/// Extracts bars [startBar, endBar] renumbered from 1, capo normalized and
/// tagged with the annotation. Ties crossing the clip edges are cut with a
/// warning. Throws RangeError when the range exceeds the score.
Score sliceClip(const Score& score, const ClipAnnotation& annotation, ParseReport* report = nullptr);

/// Reads clip annotations from CSV with the header
/// sourceId,structure,startBar,endBar.
std::vector<ClipAnnotation> parseAnnotationCsv(std::string_view csv);
std::string annotationCsv(const std::vector<ClipAnnotation>& annotations);

}  // namespace tabproc
