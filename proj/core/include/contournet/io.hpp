#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "contournet/decode.hpp"
#include "contournet/evaluation.hpp"
#include "contournet/lotm.hpp"

namespace contournet {

// Heatmap files: "CTHM", u32 LE height, u32 LE width, then height * width
// f32 LE values in row-major order. Values are narrowed to float on write.

std::string encode_heatmap(const FloatGrid& grid);
/// Throws FormatError on a bad magic, zero dimensions, a payload length
/// that disagrees with the header, or non-finite values.
FloatGrid decode_heatmap(std::string_view bytes);

void write_heatmap(const std::filesystem::path& path, const FloatGrid& grid);
FloatGrid read_heatmap(const std::filesystem::path& path);

/// Whole file as bytes; throws InvalidInput if it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Candidate rows {"row", "col", "confidence"}, one per line.
std::string candidates_to_jsonl(const std::vector<Candidate>& candidates);
std::vector<Candidate> parse_candidates_jsonl(std::string_view text);

/// key = value text, doubles printed with 17 significant digits so the
/// round trip is exact. Several kernels are separated by blank lines.
std::string kernel_to_text(const DirectionalKernel& kernel);
std::vector<DirectionalKernel> parse_kernels(std::string_view text);

/// Binary (P5) PGM with maxval <= 255, scaled to [0, 1].
FloatGrid parse_pgm(std::string_view bytes);
/// Values are clamped to [0, 1] and quantized to 8 bits.
std::string encode_pgm(const FloatGrid& grid);

/// key = value lines, as read by `--config`.
/// Blank lines and lines starting with '#' are skipped.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

struct EvaluationSummary {
  double iou_threshold = kDefaultMatchIou;
  std::size_t images = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t ignored = 0;
  std::vector<double> bucket_boundaries;
  std::vector<BucketMetrics> buckets;
};

/// Metrics report: key = value header lines followed by a CSV table of
/// recall, precision and F per bucket (the first row covers everything).
std::string format_metrics_report(const EvaluationSummary& summary);

}  // namespace contournet
