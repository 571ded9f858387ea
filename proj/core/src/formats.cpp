#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "contournet/io.hpp"

namespace contournet {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find('\n', start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                                   : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view s, const std::string& what) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError(what + ": '" + std::string(s) + "' is not a number");
  }
  return v;
}

int parse_int(std::string_view s, const std::string& what) {
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError(what + ": '" + std::string(s) + "' is not an integer");
  }
  return v;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0;
  for (auto line : lines_of(text)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, "empty key");
    out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

std::string candidates_to_jsonl(const std::vector<Candidate>& candidates) {
  std::string out;
  for (const auto& c : candidates) {
    out += json{{"row", c.row}, {"col", c.col}, {"confidence", c.confidence}}.dump();
    out += '\n';
  }
  return out;
}

std::vector<Candidate> parse_candidates_jsonl(std::string_view text) {
  std::vector<Candidate> out;
  std::size_t line_no = 0;
  for (auto line : lines_of(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("row") || !j.contains("col") ||
        !j["row"].is_number_integer() || !j["col"].is_number_integer()) {
      throw ParseError(line_no, "candidate needs integer 'row' and 'col'");
    }
    Candidate c{j["row"].get<int>(), j["col"].get<int>(), 1.0};
    if (j.contains("confidence")) {
      if (!j["confidence"].is_number()) throw ParseError(line_no, "'confidence' must be a number");
      c.confidence = j["confidence"].get<double>();
    }
    out.push_back(c);
  }
  return out;
}

std::string kernel_to_text(const DirectionalKernel& kernel) {
  kernel.validate();
  std::string out;
  out += "orientation = " + std::string(to_string(kernel.orientation)) + "\n";
  out += "k = " + std::to_string(kernel.k) + "\n";
  out += "channels = " + std::to_string(kernel.channels_in) + "\n";
  out += "weights =";
  for (double w : kernel.weights) out += " " + fmt17(w);
  out += "\nbias = " + fmt17(kernel.bias) + "\n";
  return out;
}

std::vector<DirectionalKernel> parse_kernels(std::string_view text) {
  std::vector<DirectionalKernel> kernels;
  std::vector<std::pair<std::string, std::string>> block;

  auto flush = [&]() {
    if (block.empty()) return;
    DirectionalKernel k;
    bool seen[5] = {};
    for (const auto& [key, value] : block) {
      if (key == "orientation") {
        if (value == "horizontal") k.orientation = Orientation::kHorizontal;
        else if (value == "vertical") k.orientation = Orientation::kVertical;
        else throw FormatError("kernel: unknown orientation '" + value + "'");
        seen[0] = true;
      } else if (key == "k") {
        k.k = parse_int(value, "kernel k");
        seen[1] = true;
      } else if (key == "channels") {
        k.channels_in = parse_int(value, "kernel channels");
        seen[2] = true;
      } else if (key == "weights") {
        std::istringstream ss(value);
        std::string tok;
        while (ss >> tok) k.weights.push_back(parse_double(tok, "kernel weight"));
        seen[3] = true;
      } else if (key == "bias") {
        k.bias = parse_double(value, "kernel bias");
        seen[4] = true;
      } else {
        throw FormatError("kernel: unknown key '" + key + "'");
      }
    }
    if (!std::all_of(std::begin(seen), std::end(seen), [](bool b) { return b; })) {
      throw FormatError("kernel: missing one of orientation, k, channels, weights, bias");
    }
    try {
      k.validate();
    } catch (const InvalidConfig& e) {
      throw FormatError(std::string("kernel: ") + e.what());
    }
    kernels.push_back(std::move(k));
    block.clear();
  };

  std::size_t line_no = 0;
  for (auto line : lines_of(text)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    block.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }
  flush();
  return kernels;
}

FloatGrid parse_pgm(std::string_view bytes) {
  std::size_t pos = 0;
  // Header tokens are separated by whitespace; '#' starts a comment.
  auto next_token = [&]() -> std::string_view {
    while (pos < bytes.size()) {
      const char c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  if (next_token() != "P5") throw FormatError("pgm: expected binary P5 magic");
  const int w = parse_int(next_token(), "pgm width");
  const int h = parse_int(next_token(), "pgm height");
  const int maxval = parse_int(next_token(), "pgm maxval");
  if (w <= 0 || h <= 0) throw FormatError("pgm: non-positive dimensions");
  if (maxval <= 0 || maxval > 255) throw FormatError("pgm: only 8-bit maxval is supported");
  ++pos;  // single whitespace byte before the raster
  const auto count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() < pos || bytes.size() - pos != count) {
    throw FormatError("pgm: raster length does not match " + std::to_string(w) + "x" +
                      std::to_string(h));
  }
  FloatGrid grid(h, w, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    grid.values()[i] = static_cast<unsigned char>(bytes[pos + i]) / static_cast<double>(maxval);
  }
  return grid;
}

std::string encode_pgm(const FloatGrid& grid) {
  std::string out = "P5\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) +
                    "\n255\n";
  for (double v : grid.values()) {
    out.push_back(static_cast<char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  }
  return out;
}

std::string format_metrics_report(const EvaluationSummary& s) {
  auto fixed4 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  const Prf all = prf(s.tp, s.fp, s.fn);
  std::string out;
  out += "protocol = IoU-protocol (greedy one-to-one matching; not DetEval)\n";
  out += "iou_threshold = " + fmt17(s.iou_threshold) + "\n";
  out += "images = " + std::to_string(s.images) + "\n";
  out += "tp = " + std::to_string(s.tp) + "\n";
  out += "fp = " + std::to_string(s.fp) + "\n";
  out += "fn = " + std::to_string(s.fn) + "\n";
  out += "ignored_detections = " + std::to_string(s.ignored) + "\n";
  out += "recall = " + fmt17(all.recall) + "\n";
  out += "precision = " + fmt17(all.precision) + "\n";
  out += "f_measure = " + fmt17(all.f) + "\n";
  out += "bucket_boundaries =";
  for (std::size_t i = 0; i < s.bucket_boundaries.size(); ++i) {
    out += (i == 0 ? " " : ",") + fmt17(s.bucket_boundaries[i]);
  }
  out += "\n\nbucket,tp,fp,fn,recall,precision,f\n";
  out += "all," + std::to_string(s.tp) + "," + std::to_string(s.fp) + "," + std::to_string(s.fn) +
         "," + fixed4(all.recall) + "," + fixed4(all.precision) + "," + fixed4(all.f) + "\n";
  for (const auto& b : s.buckets) {
    out += b.name + "," + std::to_string(b.tp) + "," + std::to_string(b.fp) + "," +
           std::to_string(b.fn) + "," + fixed4(b.metrics.recall) + "," +
           fixed4(b.metrics.precision) + "," + fixed4(b.metrics.f) + "\n";
  }
  return out;
}

}  // namespace contournet
