#include "contournet/annotations.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <regex>

#include <json.hpp>

namespace contournet {

using nlohmann::json;

const char* to_string(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::kIcdar2015: return "icdar2015";
    case DatasetFormat::kCtw1500: return "ctw1500";
    case DatasetFormat::kTotalText: return "totaltext";
    case DatasetFormat::kCanonicalJsonl: return "canonical_jsonl";
  }
  return "unknown";
}

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "icdar2015") return DatasetFormat::kIcdar2015;
  if (name == "ctw1500") return DatasetFormat::kCtw1500;
  if (name == "totaltext") return DatasetFormat::kTotalText;
  if (name == "canonical_jsonl" || name == "jsonl") return DatasetFormat::kCanonicalJsonl;
  throw InvalidConfig("unknown dataset format '" + std::string(name) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::optional<double> to_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

// Calls fn(line_number, line) for every non-blank line.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  // UTF-8 byte order mark, common in ICDAR ground-truth files.
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find('\n', start);
    const auto line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                                       : pos - start);
    ++line_no;
    if (!trim(line).empty()) fn(line_no, trim(line));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
}

Polygon polygon_from_flat(const std::vector<double>& coords, std::size_t line_no) {
  if (coords.size() % 2 != 0) throw ParseError(line_no, "odd coordinate count");
  Polygon poly;
  for (std::size_t i = 0; i < coords.size(); i += 2) poly.vertices.push_back({coords[i], coords[i + 1]});
  try {
    validate_polygon(poly);
  } catch (const InvalidPolygon& e) {
    throw ParseError(line_no, e.what());
  }
  return poly;
}

bool is_dont_care(std::string_view transcription) {
  transcription = trim(transcription);
  return transcription == "###" || transcription == "#";
}

AnnotationRecord parse_icdar(std::size_t line_no, std::string_view line) {
  const auto fields = split(line, ',');
  if (fields.size() < 8) {
    throw ParseError(line_no, "expected 8 coordinates and a transcription, got " +
                                  std::to_string(fields.size()) + " fields");
  }
  std::vector<double> coords;
  for (std::size_t i = 0; i < 8; ++i) {
    const auto v = to_number(fields[i]);
    if (!v) throw ParseError(line_no, "coordinate " + std::to_string(i + 1) + " is not a number");
    coords.push_back(*v);
  }
  AnnotationRecord rec{polygon_from_flat(coords, line_no), false, std::nullopt};
  if (fields.size() > 8) {
    // Transcriptions may themselves contain commas.
    const auto rest = line.substr(static_cast<std::size_t>(fields[8].data() - line.data()));
    rec.transcription = std::string(rest);
    rec.ignore = trim(rest) == "###";
  }
  return rec;
}

AnnotationRecord parse_ctw(std::size_t line_no, std::string_view line, const ParseOptions& opts) {
  const auto fields = split(line, ',');
  std::vector<double> values;
  std::size_t i = 0;
  for (; i < fields.size(); ++i) {
    const auto v = to_number(fields[i]);
    if (!v) break;
    values.push_back(*v);
  }
  std::optional<std::string> transcription;
  if (i < fields.size()) {
    const auto rest = line.substr(static_cast<std::size_t>(fields[i].data() - line.data()));
    transcription = std::string(trim(rest));
  }
  const std::size_t expected = opts.ctw_relative ? 32 : 28;
  if (values.size() % 2 != 0) throw ParseError(line_no, "odd coordinate count");
  if (values.size() != expected) {
    throw ParseError(line_no, "expected " + std::to_string(expected) + " numbers, got " +
                                  std::to_string(values.size()));
  }
  std::vector<double> coords;
  if (opts.ctw_relative) {
    for (std::size_t k = 4; k < values.size(); k += 2) {
      coords.push_back(values[0] + values[k]);
      coords.push_back(values[1] + values[k + 1]);
    }
  } else {
    coords = values;
  }
  AnnotationRecord rec{polygon_from_flat(coords, line_no), false, transcription};
  if (transcription) {
    // Some releases prefix the word with "####".
    auto& t = *rec.transcription;
    if (t.rfind("####", 0) == 0) t = t.substr(4);
    rec.ignore = t.empty() ? false : is_dont_care(t);
  }
  return rec;
}

std::vector<double> numbers_in(std::string_view s, std::size_t line_no) {
  std::vector<double> out;
  std::string buf(s);
  for (auto& ch : buf) {
    if (ch == ',') ch = ' ';
  }
  std::string_view rest(buf);
  while (true) {
    rest = trim(rest);
    if (rest.empty()) break;
    const auto end = rest.find_first_of(" \t");
    const auto token = rest.substr(0, end);
    const auto v = to_number(token);
    if (!v) throw ParseError(line_no, "bad coordinate '" + std::string(token) + "'");
    out.push_back(*v);
    if (end == std::string_view::npos) break;
    rest.remove_prefix(end);
  }
  return out;
}

AnnotationRecord parse_totaltext(std::size_t line_no, std::string_view line) {
  static const std::regex kX(R"((?:^|[^a-zA-Z])x\s*:?\s*\[+([^\]]*)\])");
  static const std::regex kY(R"((?:^|[^a-zA-Z])y\s*:?\s*\[+([^\]]*)\])");
  static const std::regex kText(R"(transcriptions\s*:\s*\[\s*u?'([^']*)')");
  const std::string s(line);
  std::smatch mx, my, mt;
  if (!std::regex_search(s, mx, kX) || !std::regex_search(s, my, kY)) {
    throw ParseError(line_no, "expected x[...] and y[...] coordinate lists");
  }
  const auto xs = numbers_in(mx[1].str(), line_no);
  const auto ys = numbers_in(my[1].str(), line_no);
  if (xs.size() != ys.size()) throw ParseError(line_no, "odd coordinate count (x/y lengths differ)");
  std::vector<double> coords;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    coords.push_back(xs[i]);
    coords.push_back(ys[i]);
  }
  AnnotationRecord rec{polygon_from_flat(coords, line_no), false, std::nullopt};
  if (std::regex_search(s, mt, kText)) {
    rec.transcription = mt[1].str();
    rec.ignore = is_dont_care(*rec.transcription);
  }
  return rec;
}

json polygon_json(const Polygon& poly) {
  json flat = json::array();
  for (const auto& v : poly.vertices) {
    flat.push_back(v.x);
    flat.push_back(v.y);
  }
  return flat;
}

struct CanonicalRow {
  AnnotationRecord record;
  std::optional<double> score;
};

CanonicalRow parse_canonical_row(std::size_t line_no, std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("polygon") || !j["polygon"].is_array()) {
    throw ParseError(line_no, "record needs a 'polygon' array");
  }
  std::vector<double> coords;
  for (const auto& v : j["polygon"]) {
    if (!v.is_number()) throw ParseError(line_no, "polygon entries must be numbers");
    coords.push_back(v.get<double>());
  }
  CanonicalRow row{{polygon_from_flat(coords, line_no), false, std::nullopt}, std::nullopt};
  if (j.contains("ignore")) {
    if (!j["ignore"].is_boolean()) throw ParseError(line_no, "'ignore' must be a boolean");
    row.record.ignore = j["ignore"].get<bool>();
  }
  if (j.contains("transcription") && !j["transcription"].is_null()) {
    if (!j["transcription"].is_string()) throw ParseError(line_no, "'transcription' must be a string");
    row.record.transcription = j["transcription"].get<std::string>();
  }
  if (j.contains("score")) {
    if (!j["score"].is_number()) throw ParseError(line_no, "'score' must be a number");
    row.score = j["score"].get<double>();
  }
  return row;
}

}  // namespace

std::vector<AnnotationRecord> parse_annotations(std::string_view text, DatasetFormat format,
                                                const ParseOptions& options) {
  std::vector<AnnotationRecord> records;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    switch (format) {
      case DatasetFormat::kIcdar2015: records.push_back(parse_icdar(line_no, line)); break;
      case DatasetFormat::kCtw1500: records.push_back(parse_ctw(line_no, line, options)); break;
      case DatasetFormat::kTotalText: records.push_back(parse_totaltext(line_no, line)); break;
      case DatasetFormat::kCanonicalJsonl:
        records.push_back(parse_canonical_row(line_no, line).record);
        break;
    }
  });
  return records;
}

std::string to_canonical_jsonl(const std::vector<AnnotationRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json j;
    j["polygon"] = polygon_json(r.polygon);
    j["ignore"] = r.ignore;
    j["transcription"] = r.transcription ? json(*r.transcription) : json(nullptr);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string detections_to_jsonl(const std::vector<Detection>& detections) {
  std::string out;
  for (const auto& d : detections) {
    json j;
    j["polygon"] = polygon_json(d.polygon);
    j["ignore"] = false;
    j["transcription"] = nullptr;
    j["score"] = d.score;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<Detection> parse_detections_jsonl(std::string_view text) {
  std::vector<Detection> dets;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    auto row = parse_canonical_row(line_no, line);
    dets.push_back({std::move(row.record.polygon), row.score.value_or(1.0)});
  });
  return dets;
}

}  // namespace contournet
