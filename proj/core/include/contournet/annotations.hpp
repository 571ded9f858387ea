#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "contournet/detection.hpp"
#include "contournet/label_gen.hpp"

namespace contournet {

enum class DatasetFormat { kIcdar2015, kCtw1500, kTotalText, kCanonicalJsonl };

const char* to_string(DatasetFormat format);
/// Accepts "icdar2015", "ctw1500", "totaltext" and "canonical_jsonl".
DatasetFormat parse_dataset_format(std::string_view name);

struct ParseOptions {
  /// CTW1500 lines carry xmin, ymin, xmax, ymax followed by 28 offsets
  /// relative to (xmin, ymin) instead of 28 absolute coordinates.
  bool ctw_relative = false;
};

/// One record per non-empty line. Throws ParseError naming the 1-based
/// line on malformed input.
std::vector<AnnotationRecord> parse_annotations(std::string_view text, DatasetFormat format,
                                                const ParseOptions& options = {});

/// Canonical JSONL: {"polygon": [x1, y1, ...], "ignore": bool,
/// "transcription": string|null}, one object per line.
std::string to_canonical_jsonl(const std::vector<AnnotationRecord>& records);

/// Detections use the canonical layout plus a "score" field.
std::string detections_to_jsonl(const std::vector<Detection>& detections);
/// Reads canonical JSONL as detections; a missing score defaults to 1.
std::vector<Detection> parse_detections_jsonl(std::string_view text);

}  // namespace contournet
