// contournet command-line front end.
//
// Exit codes: 0 ok, 1 usage or configuration error, 2 data error, 3 a
// gradient check failed.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "contournet/annotations.hpp"
#include "contournet/decode.hpp"
#include "contournet/evaluation.hpp"
#include "contournet/gradcheck.hpp"
#include "contournet/io.hpp"
#include "contournet/label_gen.hpp"
#include "contournet/parallel.hpp"
#include "contournet/pipeline.hpp"

namespace cn = contournet;
namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kCheckFailed = 3 };

// Library errors re-thrown with the file they came from.
struct CliError : std::runtime_error {
  CliError(int code, const std::string& msg) : std::runtime_error(msg), code(code) {}
  int code;
};

int exit_code_for(const cn::Error& e) {
  return e.kind() == cn::ErrorKind::kInvalidConfig ? kUsage : kDataError;
}

template <typename Fn>
auto with_context(const fs::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const cn::Error& e) {
    throw CliError(exit_code_for(e), path.string() + ": " + e.what());
  }
}

std::vector<fs::path> list_inputs(const fs::path& input) {
  if (!fs::exists(input)) throw CliError(kDataError, input.string() + ": no such file or directory");
  if (!fs::is_directory(input)) return {input};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(input)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

cn::RescoreMode mode_from_flags(bool single_direction, bool no_rescoring) {
  if (single_direction) return cn::RescoreMode::kSingleDirection;
  if (no_rescoring) return cn::RescoreMode::kNone;
  return cn::RescoreMode::kOrthogonal;
}

std::string fixed(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------- labelgen

struct LabelgenArgs {
  std::string format;
  fs::path input;
  fs::path out;
  int height = 0;
  int width = 0;
  double band = cn::kDefaultBandWidth;
  bool ctw_relative = false;
};

int run_labelgen(const LabelgenArgs& a, int threads) {
  const cn::DatasetFormat format = cn::parse_dataset_format(a.format);
  if (a.height < 1 || a.width < 1) throw cn::InvalidConfig("--height and --width must be positive");
  if (!(a.band > 0.0)) throw cn::InvalidConfig("--band must be positive");
  const auto files = list_inputs(a.input);
  fs::create_directories(a.out);

  std::vector<std::size_t> counts(files.size());
  cn::parallel_for(files.size(), threads, [&](std::size_t i) {
    const fs::path& file = files[i];
    with_context(file, [&] {
      const auto records =
          cn::parse_annotations(cn::read_file(file), format, {.ctw_relative = a.ctw_relative});
      const cn::TrainingSample sample =
          cn::build_training_sample(records, a.height, a.width, a.band);
      const std::string stem = file.stem().string();
      cn::write_heatmap(a.out / (stem + ".band.cthm"), cn::FloatGrid(a.height, a.width,
          std::vector<double>(sample.contour.values().begin(), sample.contour.values().end())));
      cn::write_heatmap(a.out / (stem + ".ignore.cthm"), cn::FloatGrid(a.height, a.width,
          std::vector<double>(sample.ignore.values().begin(), sample.ignore.values().end())));

      std::vector<cn::AnnotationRecord> boxes;
      for (const auto& r : records) {
        const cn::AABox b = cn::proposal_gt_box(r.polygon);
        boxes.push_back({cn::Polygon{{{b.x_tl, b.y_tl}, {b.x_rb, b.y_tl}, {b.x_rb, b.y_rb},
                                      {b.x_tl, b.y_rb}}},
                         r.ignore, r.transcription});
      }
      cn::write_file_atomic(a.out / (stem + ".boxes.jsonl"), cn::to_canonical_jsonl(boxes));
      counts[i] = records.size();
      return 0;
    });
  });
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::cout << files[i].filename().string() << ": " << counts[i] << " records\n";
  }
  return kOk;
}

// ----------------------------------------------------------------- rescore

struct RescoreArgs {
  fs::path hmap;
  fs::path vmap;
  fs::path out;
  cn::DecodeConfig cfg;
  std::string ties = "keep-all";
  bool single_direction = false;
  bool no_rescoring = false;
};

cn::NmsTies parse_ties(const std::string& s) {
  if (s == "keep-all") return cn::NmsTies::kKeepAll;
  if (s == "first-wins") return cn::NmsTies::kFirstWins;
  throw cn::InvalidConfig("--ties must be keep-all or first-wins");
}

int run_rescore(RescoreArgs a) {
  a.cfg.nms_ties = parse_ties(a.ties);
  a.cfg.mode = mode_from_flags(a.single_direction, a.no_rescoring);
  a.cfg.validate();
  const cn::FloatGrid h = with_context(a.hmap, [&] { return cn::read_heatmap(a.hmap); });
  const cn::FloatGrid v = with_context(a.vmap, [&] { return cn::read_heatmap(a.vmap); });
  const cn::ContourCandidates cands = cn::rescore(h, v, a.cfg);
  cn::write_file_atomic(a.out, cn::candidates_to_jsonl(cands.points));
  std::cout << cands.points.size() << " candidates\n";
  return kOk;
}

// ------------------------------------------------------------- reconstruct

struct ReconstructArgs {
  fs::path candidates;
  fs::path out;
  cn::DecodeConfig cfg;
  bool single_region = false;
};

int run_reconstruct(const ReconstructArgs& a) {
  a.cfg.validate();
  const auto cands = with_context(a.candidates, [&] {
    return cn::parse_candidates_jsonl(cn::read_file(a.candidates));
  });
  std::vector<std::vector<cn::Candidate>> regions;
  if (a.single_region) regions.push_back(cands);
  else regions = cn::cluster_candidates(cands, a.cfg.cluster_link);

  std::vector<cn::Detection> dets;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    cn::RegionDecode r = cn::reconstruct(regions[i], a.cfg);
    if (r.detection) dets.push_back(std::move(*r.detection));
    else std::cerr << "region " << i << " (" << regions[i].size() << " candidates): " << r.diagnostic << "\n";
  }
  cn::write_file_atomic(a.out, cn::detections_to_jsonl(dets));
  std::cout << dets.size() << " detections from " << regions.size() << " regions\n";
  return kOk;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
  fs::path dets;
  fs::path gts;
  fs::path out;
  std::string gt_format = "canonical_jsonl";
  double iou = cn::kDefaultMatchIou;
  std::string buckets = "auto";
  int resolution = cn::kDefaultIouResolution;
};

std::vector<double> parse_buckets(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw cn::InvalidConfig("--buckets must be 'auto' or comma-separated areas, got '" + text + "'");
    }
  }
  if (out.empty() || !std::is_sorted(out.begin(), out.end())) {
    throw cn::InvalidConfig("--buckets boundaries must be ascending");
  }
  return out;
}

int run_eval(const EvalArgs& a) {
  if (!(a.iou > 0.0 && a.iou < 1.0)) throw cn::InvalidConfig("--iou must be in (0, 1)");
  const cn::DatasetFormat gt_format = cn::parse_dataset_format(a.gt_format);

  struct Image {
    std::vector<cn::Detection> dets;
    std::vector<cn::AnnotationRecord> gts;
  };
  std::vector<Image> images;
  auto load_gts = [&](const fs::path& p) {
    return with_context(p, [&] { return cn::parse_annotations(cn::read_file(p), gt_format); });
  };
  auto load_dets = [&](const fs::path& p) {
    return with_context(p, [&] { return cn::parse_detections_jsonl(cn::read_file(p)); });
  };
  if (fs::is_directory(a.gts)) {
    if (!fs::is_directory(a.dets)) throw cn::InvalidConfig("--dets must be a directory when --gts is");
    for (const auto& gt_file : list_inputs(a.gts)) {
      Image img{{}, load_gts(gt_file)};
      const fs::path det_file = a.dets / (gt_file.stem().string() + ".jsonl");
      if (fs::exists(det_file)) img.dets = load_dets(det_file);
      images.push_back(std::move(img));
    }
  } else {
    images.push_back({load_dets(a.dets), load_gts(a.gts)});
  }

  cn::EvaluationSummary s;
  s.iou_threshold = a.iou;
  s.images = images.size();
  if (a.buckets == "auto") {
    std::vector<cn::AnnotationRecord> all;
    for (const auto& img : images) all.insert(all.end(), img.gts.begin(), img.gts.end());
    s.bucket_boundaries = cn::auto_bucket_boundaries(all);
  } else {
    s.bucket_boundaries = parse_buckets(a.buckets);
  }
  for (const auto& img : images) {
    const cn::MatchResult m = cn::match_detections(img.dets, img.gts, a.iou, a.resolution);
    s.tp += m.tp;
    s.fp += m.fp;
    s.fn += m.fn;
    s.ignored += m.ignored;
    cn::accumulate_buckets(s.buckets, cn::bucketed_prf(img.dets, img.gts, s.bucket_boundaries,
                                                       a.iou, a.resolution));
  }
  const std::string report = cn::format_metrics_report(s);
  cn::write_file_atomic(a.out, report);
  std::cout << report;
  return kOk;
}

// --------------------------------------------------------------- gradcheck

int run_gradcheck(std::uint64_t seed, int instances) {
  const auto results = cn::run_gradient_suites(seed, instances);
  std::cout << "suite,instances,failures,max_relative_error,worst_instance,step\n";
  bool ok = true;
  for (const auto& r : results) {
    char line[160];
    std::snprintf(line, sizeof line, "%s,%d,%d,%.3e,%d,%.0e\n", r.name.c_str(), r.instances,
                  r.failures, r.max_relative_error, r.worst_instance, r.step);
    std::cout << line;
    ok = ok && r.failures == 0;
  }
  std::cout << (ok ? "gradcheck: PASS\n" : "gradcheck: FAIL\n");
  return ok ? kOk : kCheckFailed;
}

// -------------------------------------------------------------------- demo

struct DemoArgs {
  fs::path out;
  cn::DemoConfig cfg;
  bool single_direction = false;
  bool no_rescoring = false;
};

int run_demo(DemoArgs a, int threads) {
  a.cfg.threads = threads;
  a.cfg.decode.mode = mode_from_flags(a.single_direction, a.no_rescoring);
  const cn::DemoResult r = cn::run_demo(a.cfg);
  cn::write_demo_artifacts(r, a.out);
  const auto& curve = r.training.loss_curve;
  std::printf("loss %.6f -> %.6f (%.1f%% lower)\n", curve.front(), curve.back(),
              100.0 * (1.0 - curve.back() / curve.front()));
  std::printf("tp %zu fp %zu fn %zu  recall %s precision %s F %s\n", r.summary.tp, r.summary.fp,
              r.summary.fn, fixed(r.metrics.recall).c_str(), fixed(r.metrics.precision).c_str(),
              fixed(r.metrics.f).c_str());
  std::printf("streak candidates %zu of %zu streak pixels\n", r.streak_candidates, r.streak_pixels);
  std::printf("artifacts in %s\n", a.out.string().c_str());
  return kOk;
}

// ------------------------------------------------------------------ config

// Appends `--key=value` for config entries the command line does not set.
// Only keys known to the selected subcommand (or global options) are
// accepted.
std::vector<std::string> merge_config(CLI::App& app, std::vector<std::string> args) {
  fs::path config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (config.empty()) return args;

  CLI::App* sub = nullptr;
  for (const auto& a : args) {
    if (a.rfind("-", 0) == 0) continue;
    if (auto* s = app.get_subcommand_no_throw(a)) {
      sub = s;
      break;
    }
  }
  const auto entries = with_context(config, [&] { return cn::parse_key_values(cn::read_file(config)); });
  for (const auto& [key, value] : entries) {
    if (key == "config") continue;
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (given) continue;
    const CLI::Option* opt = sub ? sub->get_option_no_throw(flag) : nullptr;
    if (!opt) opt = app.get_option_no_throw(flag);
    if (!opt) throw CliError(kUsage, config.string() + ": unknown key '" + key + "'");
    args.push_back(flag + "=" + value);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ContourNet text-detection toolkit: labels, re-scoring, reconstruction, evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 1;
  std::string config_path;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", config_path, "key = value file; command-line flags take precedence");

  LabelgenArgs lg;
  auto* labelgen = app.add_subcommand("labelgen", "Contour-band and ignore heatmaps plus a GT-box sidecar");
  labelgen->add_option("--format", lg.format, "icdar2015 | ctw1500 | totaltext | canonical_jsonl")->required();
  labelgen->add_option("--input", lg.input, "Annotation file or directory of files")->required();
  labelgen->add_option("--out", lg.out, "Output directory")->required();
  labelgen->add_option("--height", lg.height, "Label height in pixels")->required();
  labelgen->add_option("--width", lg.width, "Label width in pixels")->required();
  labelgen->add_option("--band", lg.band, "Band width in pixels")->capture_default_str();
  labelgen->add_flag("--ctw-relative", lg.ctw_relative, "CTW1500 lines hold a box plus relative offsets");

  RescoreArgs rs;
  auto* rescore = app.add_subcommand("rescore", "Contour candidates from Hmap/Vmap heatmap files");
  rescore->add_option("--hmap", rs.hmap, "Horizontal heatmap (.cthm)")->required();
  rescore->add_option("--vmap", rs.vmap, "Vertical heatmap (.cthm)")->required();
  rescore->add_option("--theta", rs.cfg.theta, "Score threshold")->capture_default_str();
  rescore->add_option("--nms-window", rs.cfg.nms_window, "Odd NMS window length")->capture_default_str();
  rescore->add_option("--nms-tolerance", rs.cfg.nms_tolerance, "Keep values this close to the window max")
      ->capture_default_str();
  rescore->add_option("--ties", rs.ties, "keep-all | first-wins")->capture_default_str();
  auto* rs_single = rescore->add_flag("--single-direction", rs.single_direction, "Use the horizontal map only");
  rescore->add_flag("--no-rescoring", rs.no_rescoring, "Skip NMS; max of both maps")->excludes(rs_single);
  rescore->add_option("--out", rs.out, "Candidate JSONL")->required();

  ReconstructArgs rc;
  auto* reconstruct = app.add_subcommand("reconstruct", "Polygons from a candidate list");
  reconstruct->add_option("--candidates", rc.candidates, "Candidate JSONL")->required();
  reconstruct->add_option("--alpha-scale", rc.cfg.alpha_scale, "Alpha as a multiple of the median NN distance")
      ->capture_default_str();
  reconstruct->add_option("--min-candidates", rc.cfg.min_candidates)->capture_default_str();
  reconstruct->add_option("--cluster-link", rc.cfg.cluster_link, "Linkage distance between regions")
      ->capture_default_str();
  reconstruct->add_flag("--single-region", rc.single_region, "Treat all candidates as one region");
  reconstruct->add_option("--out", rc.out, "Detection JSONL")->required();

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "IoU-protocol precision, recall and F-measure");
  eval->add_option("--dets", ev.dets, "Detection JSONL file or directory")->required();
  eval->add_option("--gts", ev.gts, "Ground-truth file or directory")->required();
  eval->add_option("--gt-format", ev.gt_format)->capture_default_str();
  eval->add_option("--iou", ev.iou, "Match threshold")->capture_default_str();
  eval->add_option("--buckets", ev.buckets, "auto or ascending area boundaries a,b")->capture_default_str();
  eval->add_option("--resolution", ev.resolution, "Raster resolution for polygon IoU")->capture_default_str();
  eval->add_option("--out", ev.out, "Report path")->required();

  std::uint64_t gc_seed = 0;
  int gc_instances = 100;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference checks of every analytic gradient");
  gradcheck->add_option("--seed", gc_seed)->capture_default_str();
  gradcheck->add_option("--instances", gc_instances, "Random instances per suite")->capture_default_str();

  DemoArgs dm;
  dm.cfg.train = cn::default_demo_training();
  dm.cfg.decode = cn::default_demo_decode();
  auto* demo = app.add_subcommand("demo", "Train on synthetic scenes, decode held-out scenes, report metrics");
  demo->add_option("--seed", dm.cfg.seed)->capture_default_str();
  demo->add_option("--out", dm.out, "Artifact directory")->required();
  auto* dm_single = demo->add_flag("--single-direction", dm.single_direction, "Horizontal map only");
  demo->add_flag("--no-rescoring", dm.no_rescoring, "Skip NMS and orthogonal filtering")->excludes(dm_single);
  demo->add_option("--height", dm.cfg.height)->capture_default_str();
  demo->add_option("--width", dm.cfg.width)->capture_default_str();
  demo->add_option("--train-scenes", dm.cfg.train_scenes)->capture_default_str();
  demo->add_option("--test-scenes", dm.cfg.test_scenes)->capture_default_str();
  demo->add_option("--texts", dm.cfg.texts_per_scene, "Texts per scene (-1: by image size)")->capture_default_str();
  demo->add_option("--streaks", dm.cfg.streaks_per_scene, "Streaks per scene (-1: by text count)")
      ->capture_default_str();
  demo->add_option("--steps", dm.cfg.train.steps)->capture_default_str();
  demo->add_option("--lr", dm.cfg.train.learning_rate)->capture_default_str();
  demo->add_option("--k", dm.cfg.train.k, "Directional kernel length")->capture_default_str();
  demo->add_option("--theta", dm.cfg.decode.theta)->capture_default_str();
  demo->add_option("--nms-tolerance", dm.cfg.decode.nms_tolerance)->capture_default_str();
  demo->add_option("--alpha-scale", dm.cfg.decode.alpha_scale)->capture_default_str();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(app, std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const cn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }

  try {
    if (*labelgen) return run_labelgen(lg, threads);
    if (*rescore) return run_rescore(rs);
    if (*reconstruct) return run_reconstruct(rc);
    if (*eval) return run_eval(ev);
    if (*gradcheck) return run_gradcheck(gc_seed, gc_instances);
    if (*demo) return run_demo(dm, threads);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const cn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}
