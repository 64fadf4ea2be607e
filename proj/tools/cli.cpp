#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "irisbench/error.hpp"
#include "irisbench/manifest.hpp"
#include "irisbench/match.hpp"
#include "irisbench/metrics.hpp"
#include "irisbench/pipeline.hpp"
#include "irisbench/protocols.hpp"
#include "irisbench/quality.hpp"
#include "irisbench/random.hpp"
#include "irisbench/report.hpp"
#include "irisbench/synth.hpp"
#include "irisbench/templates.hpp"

namespace irisbench::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError {
  std::string message;
};

bool g_quiet = false;

template <typename... Args>
void log(const char* fmt, Args... args) {
  if (g_quiet) return;
  std::fprintf(stderr, "irisbench: ");
  if constexpr (sizeof...(Args) == 0) {
    std::fputs(fmt, stderr);
  } else {
    std::fprintf(stderr, fmt, args...);
  }
  std::fputc('\n', stderr);
}

std::map<std::string, std::string> read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    auto sp = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), sp));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), sp).base(), s.end());
    return s;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Parse, path.string() + " line " + std::to_string(line_no) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

// Config values fill options the command line left unset.
void merge_config(const std::map<std::string, std::string>& config, std::vector<CLI::App*> scopes) {
  for (const auto& [key, value] : config) {
    for (CLI::App* app : scopes) {
      CLI::Option* opt = app->get_option_no_throw("--" + key);
      if (opt == nullptr || opt->count() > 0) continue;
      opt->add_result(value);
      opt->run_callback();
      break;
    }
  }
}

void require(CLI::Option* opt) {
  if (opt->count() == 0) throw UsageError{"missing required flag " + opt->get_name()};
}

unsigned g_workers = 1;

// ---- shared flag groups

struct ThresholdFlags {
  std::optional<double> eyelid, eyelash, pupil_ratio, gaze_dev, reflection;

  void attach(CLI::App* app) {
    app->add_option("--eyelid", eyelid, "eyelid occlusion threshold");
    app->add_option("--eyelash", eyelash, "eyelash occlusion threshold");
    app->add_option("--pupil-ratio", pupil_ratio, "pupil-to-iris ratio threshold");
    app->add_option("--gaze-dev", gaze_dev, "gaze deviation threshold");
    app->add_option("--reflection", reflection, "reflection threshold");
  }

  QualityThresholds resolve() const {
    QualityThresholds t;
    if (eyelid) t.eyelid = *eyelid;
    if (eyelash) t.eyelash = *eyelash;
    if (pupil_ratio) t.pupil_ratio = *pupil_ratio;
    if (gaze_dev) t.gaze_dev = *gaze_dev;
    if (reflection) t.reflection = *reflection;
    if (!t.valid()) throw Error(ErrorKind::InvalidSpec, "quality thresholds must lie in (0, 1)");
    return t;
  }
};

ProtocolSpec spec_from_pairs(const fs::path& path) { return load_pairs(path).spec; }

// ---- commands

struct SynthGenerate {
  int subjects = 0;
  std::uint64_t seed = 0;
  fs::path out;
  bool images = false;
  std::string image_format = "pgm";
  SynthConfig config;
  CleaningProfile cleaning;
  CLI::Option *subjects_opt, *seed_opt, *out_opt;

  void attach(CLI::App* app) {
    subjects_opt = app->add_option("--subjects", subjects, "number of subjects")->check(CLI::PositiveNumber);
    seed_opt = app->add_option("--seed", seed, "corpus seed");
    out_opt = app->add_option("--out", out, "output directory");
    app->add_flag("--images", images, "write image files instead of on-demand render refs");
    app->add_option("--image-format", image_format, "pgm or png")->check(CLI::IsMember({"pgm", "png"}));
    app->add_option("--tilt", config.camera_tilt_deg, "camera tilt in degrees");
    app->add_option("--yaw", config.gaze_yaw_deg, "yaw between gaze columns in degrees");
    app->add_option("--pitch", config.gaze_pitch_deg, "pitch between gaze rows in degrees");
    app->add_option("--noise-sigma", config.noise_sigma, "sensor noise in gray levels");
    app->add_option("--droop", config.quality.droop, "eyelid droop probability")->check(CLI::Range(0.0, 1.0));
    app->add_option("--heavy-lash", config.quality.heavy_lash, "heavy eyelash probability")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--glare", config.quality.glare, "large glare probability")->check(CLI::Range(0.0, 1.0));
    app->add_option("--closed-eye", cleaning.closed_eye, "closed eye probability")->check(CLI::Range(0.0, 1.0));
    app->add_option("--out-of-frame", cleaning.out_of_frame, "out of frame probability")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--motion-blur", cleaning.motion_blur, "motion blur probability")->check(CLI::Range(0.0, 1.0));
  }

  void run() {
    require(subjects_opt);
    require(seed_opt);
    require(out_opt);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + out.string());
    SessionOptions options{seed, config};
    log("generating %d subjects", subjects);
    auto records = generate_corpus(subjects, options, g_workers);
    records = inject_degradations(std::move(records), cleaning, derive_seed(seed, "degradations"));
    const auto broken = std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.annotation; });
    if (images) {
      log("rendering %zu images", records.size());
      materialize_images(records, out, "." + image_format, g_workers);
    }
    save_manifest(records, out / "manifest.jsonl");
    log("wrote %zu records (%td without annotation) to %s", records.size(), broken,
        (out / "manifest.jsonl").c_str());
  }
};

struct Clean {
  fs::path in, out;
  CLI::Option *in_opt, *out_opt;

  void attach(CLI::App* app) {
    in_opt = app->add_option("--in", in, "input manifest");
    out_opt = app->add_option("--out", out, "output manifest");
  }

  void run() {
    require(in_opt);
    require(out_opt);
    auto result = irisbench::clean(load_manifest(in));
    save_manifest(result.kept, out);
    log("kept %zu, dropped %zu", result.kept.size(), result.dropped);
  }
};

struct QualityScore {
  fs::path in, out;
  ThresholdFlags thresholds;
  GazeGrid grid;
  CLI::Option *in_opt, *out_opt;

  void attach(CLI::App* app) {
    in_opt = app->add_option("--in", in, "input manifest");
    out_opt = app->add_option("--out", out, "output manifest");
    thresholds.attach(app);
    app->add_option("--yaw", grid.yaw_deg, "yaw between gaze columns in degrees");
    app->add_option("--pitch", grid.pitch_deg, "pitch between gaze rows in degrees");
  }

  void run() {
    require(in_opt);
    require(out_opt);
    const QualityThresholds t = thresholds.resolve();
    auto records = load_manifest(in);
    assess_quality(records, t, grid, g_workers);
    std::size_t challenging = 0;
    std::size_t per_dim[kQualityDims] = {};
    for (const auto& r : records) {
      const auto c = categorize(*r.quality, t);
      if (c.category == Category::Challenging) ++challenging;
      for (int d = 0; d < kQualityDims; ++d)
        if (c.exceeded.has(static_cast<QualityDim>(d))) ++per_dim[d];
    }
    save_manifest(records, out);
    log("scored %zu records, %zu challenging (%.1f%%)", records.size(), challenging,
        records.empty() ? 0.0 : 100.0 * static_cast<double>(challenging) / static_cast<double>(records.size()));
    for (int d = 0; d < kQualityDims; ++d)
      log("  %-12s %zu", std::string(to_string(static_cast<QualityDim>(d))).c_str(), per_dim[d]);
  }
};

struct SplitCmd {
  fs::path in, out;
  std::uint64_t seed = 0;
  double ratio = 0.7;
  CLI::Option *in_opt, *out_opt, *seed_opt;

  void attach(CLI::App* app) {
    in_opt = app->add_option("--in", in, "input manifest");
    out_opt = app->add_option("--out", out, "output manifest");
    seed_opt = app->add_option("--seed", seed, "split seed");
    app->add_option("--ratio", ratio, "train fraction of subjects");
  }

  void run() {
    require(in_opt);
    require(out_opt);
    require(seed_opt);
    auto records = split_dataset(load_manifest(in), ratio, seed);
    std::map<std::string, Split> subjects;
    for (const auto& r : records) subjects[r.subject_id] = *r.split;
    const auto train = std::count_if(subjects.begin(), subjects.end(),
                                     [](const auto& kv) { return kv.second == Split::Train; });
    save_manifest(records, out);
    log("%td train subjects, %td test subjects", train, static_cast<std::ptrdiff_t>(subjects.size()) - train);
  }
};

struct ProtocolBuild {
  fs::path in, out;
  std::string name, task = "verification", eye = "left";
  std::uint64_t seed = 0;
  std::size_t genuine_cap = kGenuineCap;
  std::optional<std::size_t> impostor_cap;
  std::size_t probes_per_class = kProbesPerClassCap;
  ThresholdFlags thresholds;
  CLI::Option *in_opt, *out_opt, *name_opt, *seed_opt;

  void attach(CLI::App* app) {
    in_opt = app->add_option("--in", in, "input manifest (scored and split)");
    out_opt = app->add_option("--out", out, "output pair list");
    name_opt = app->add_option("--name", name, "protocol name");
    app->add_option("--task", task, "verification or identification");
    app->add_option("--eye", eye, "left, right or dual");
    seed_opt = app->add_option("--seed", seed, "sampling seed");
    app->add_option("--genuine-cap", genuine_cap, "maximum genuine pairs");
    app->add_option("--impostor-cap", impostor_cap, "maximum impostor pairs");
    app->add_option("--probes-per-class", probes_per_class, "maximum identification probes per class");
    thresholds.attach(app);
  }

  void run() {
    require(name_opt);
    ProtocolSpec spec;
    auto n = parse_protocol_name(name);
    if (!n) throw UsageError{"--name: unknown protocol '" + name + "'"};
    auto t = parse_task(task);
    if (!t) throw UsageError{"--task: unknown task '" + task + "'"};
    auto e = parse_eye_mode(eye);
    if (!e) throw UsageError{"--eye: unknown eye mode '" + eye + "'"};
    spec.name = *n;
    spec.task = *t;
    spec.eye_mode = *e;
    spec.seed = seed;
    spec.caps.genuine = genuine_cap;
    spec.caps.impostor = impostor_cap;
    spec.caps.probes_per_class = probes_per_class;
    spec.thresholds = thresholds.resolve();
    spec.validate();
    require(seed_opt);
    require(in_opt);
    require(out_opt);
    const auto records = load_manifest(in);
    const PairList pairs = build_protocol(spec, records);
    for (const auto& w : pairs.warnings) log("warning: %s", w.c_str());
    save_pairs(pairs, out);
    log("%s/%s/%s: %zu pairs (%zu genuine)", name.c_str(), task.c_str(), eye.c_str(), pairs.pairs.size(),
        pairs.genuine_count());
  }
};

struct Encode {
  fs::path in, out, pairs_path;
  std::optional<fs::path> image_root;
  std::string method = "bbox";
  std::string split = "all";
  PipelineConfig config;
  CLI::Option *in_opt, *out_opt;

  void attach(CLI::App* app) {
    in_opt = app->add_option("--in", in, "input manifest");
    out_opt = app->add_option("--out", out, "output template store");
    app->add_option("--method", method, "bbox, norm, gabor or ordinal");
    app->add_option("--pairs", pairs_path, "only encode samples used by this pair list");
    app->add_option("--split", split, "train, test or all")->check(CLI::IsMember({"train", "test", "all"}));
    app->add_option("--image-root", image_root, "base directory for relative image paths");
    app->add_option("--expand", config.crop.expand_factor, "bbox expansion factor");
    app->add_option("--crop-size", config.crop.out_size, "crop output side in pixels");
  }

  void run() {
    require(in_opt);
    require(out_opt);
    auto m = parse_encode_method(method);
    if (!m) throw UsageError{"--method: unknown method '" + method + "'"};
    if (!config.crop.valid()) throw UsageError{"--expand must be >= 1 and --crop-size > 0"};
    auto records = load_manifest(in);
    if (!pairs_path.empty()) records = records_in_pairs(records, load_pairs(pairs_path));
    std::vector<SampleRecord> selected;
    std::size_t skipped = 0;
    for (auto& r : records) {
      if (split != "all" && (!r.split || to_string(*r.split) != split)) continue;
      if (!r.annotation) {
        ++skipped;
        continue;
      }
      selected.push_back(std::move(r));
    }
    if (skipped > 0) log("skipping %zu samples without annotation", skipped);
    log("encoding %zu samples with %s", selected.size(), method.c_str());
    const fs::path root = image_root ? *image_root : in.parent_path();
    const TemplateMap templates = encode_records(selected, *m, config, root, g_workers);
    const TemplateKind kind = *m == EncodeMethod::Gabor     ? TemplateKind::Gabor
                              : *m == EncodeMethod::Ordinal ? TemplateKind::Ordinal
                                                            : TemplateKind::Embedding;
    save_templates(templates, out, kind);
    log("wrote %zu templates to %s", templates.size(), out.c_str());
  }
};

struct Match {
  fs::path pairs, templates, out;
  MatchConfig config;
  CLI::Option *pairs_opt, *templates_opt, *out_opt;

  void attach(CLI::App* app) {
    pairs_opt = app->add_option("--pairs", pairs, "pair list");
    templates_opt = app->add_option("--templates", templates, "template store");
    out_opt = app->add_option("--out", out, "output score sheet");
    app->add_option("--max-shift", config.max_shift, "rotation search range in grid columns")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--min-valid", config.min_valid_fraction, "minimum jointly valid bit fraction")
        ->check(CLI::Range(0.0, 1.0));
  }

  void run() {
    require(pairs_opt);
    require(templates_opt);
    require(out_opt);
    config.workers = g_workers;
    const PairList list = load_pairs(pairs);
    const TemplateMap store = load_templates(templates);
    const ScoreSheet sheet = match_pairs(list, store, config);
    save_scores(sheet, out);
    log("scored %zu comparisons", sheet.rows.size());
  }
};

struct EvalVerify {
  fs::path pairs, scores, out;
  std::vector<double> fars = {1e-1, 1e-3, 1e-5};
  CLI::Option *pairs_opt, *scores_opt, *out_opt;

  void attach(CLI::App* app) {
    pairs_opt = app->add_option("--pairs", pairs, "pair list the scores came from");
    scores_opt = app->add_option("--scores", scores, "score sheet");
    out_opt = app->add_option("--out", out, "output report JSON");
    app->add_option("--far", fars, "comma separated FAR targets")->delimiter(',');
  }

  void run() {
    require(pairs_opt);
    require(scores_opt);
    require(out_opt);
    for (double f : fars)
      if (!(f > 0.0 && f <= 1.0)) throw UsageError{"--far: targets must lie in (0, 1]"};
    const ProtocolSpec spec = spec_from_pairs(pairs);
    const EvalResult result = evaluate_verification(spec, load_scores(scores), fars);
    for (const auto& p : result.points)
      if (!p.det) log("warning: too few impostors for FAR %g", p.far_target);
    write_text(report_json({result}));
  }

  void write_text(const std::string& text) const {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + out.string());
    f << text;
    if (!f.flush()) throw Error(ErrorKind::Io, "write failed: " + out.string());
    log("wrote %s", out.c_str());
  }
};

struct EvalIdentify {
  fs::path pairs, scores, out;
  CLI::Option *pairs_opt, *scores_opt, *out_opt;

  void attach(CLI::App* app) {
    pairs_opt = app->add_option("--pairs", pairs, "pair list the scores came from");
    scores_opt = app->add_option("--scores", scores, "score sheet");
    out_opt = app->add_option("--out", out, "output report JSON");
  }

  void run() {
    require(pairs_opt);
    require(scores_opt);
    require(out_opt);
    const ProtocolSpec spec = spec_from_pairs(pairs);
    const EvalResult result = evaluate_identification(spec, load_scores(scores));
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + out.string());
    f << report_json({result});
    if (!f.flush()) throw Error(ErrorKind::Io, "write failed: " + out.string());
    log("rank-1 %.4f, wrote %s", result.rank1.value_or(0.0), out.c_str());
  }
};

struct Report {
  std::vector<fs::path> inputs;
  fs::path out;
  std::string format = "table";
  CLI::Option *in_opt, *out_opt;

  void attach(CLI::App* app) {
    in_opt = app->add_option("--in", inputs, "report JSON files, merged in order");
    out_opt = app->add_option("--out", out, "output file");
    app->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));
  }

  void run() {
    require(in_opt);
    require(out_opt);
    std::vector<EvalResult> all;
    for (const auto& p : inputs) {
      auto part = load_report(p);
      std::move(part.begin(), part.end(), std::back_inserter(all));
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + out.string());
    f << (format == "json" ? report_json(all) : report_table(all));
    if (!f.flush()) throw Error(ErrorKind::Io, "write failed: " + out.string());
    log("%zu results written to %s", all.size(), out.c_str());
  }
};

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Iris recognition benchmark harness on synthetic or manifest data", "irisbench"};
  app.require_subcommand(1);
  app.fallthrough(false);

  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::optional<fs::path> config_path;
  bool quiet = false;
  auto* workers_opt = app.add_option("--workers", workers, "worker threads (results do not depend on it)")
                          ->check(CLI::PositiveNumber);
  app.add_option("--config", config_path, "key=value file; explicit flags win");
  app.add_flag("-q,--quiet", quiet, "suppress log output");

  SynthGenerate synth_generate;
  Clean clean_cmd;
  QualityScore quality_score;
  SplitCmd split_cmd;
  ProtocolBuild protocol_build;
  Encode encode_cmd;
  Match match_cmd;
  EvalVerify eval_verify;
  EvalIdentify eval_identify;
  Report report_cmd;

  auto* synth = app.add_subcommand("synth", "synthetic corpus");
  synth->require_subcommand(1);
  auto* synth_gen_app = synth->add_subcommand("generate", "render a seeded synthetic corpus manifest");
  synth_generate.attach(synth_gen_app);

  auto* clean_app = app.add_subcommand("clean", "drop records without a valid annotation");
  clean_cmd.attach(clean_app);

  auto* quality = app.add_subcommand("quality", "quality assessment");
  quality->require_subcommand(1);
  auto* quality_score_app = quality->add_subcommand("score", "score and categorize records");
  quality_score.attach(quality_score_app);

  auto* split_app = app.add_subcommand("split", "subject-disjoint train/test split");
  split_cmd.attach(split_app);

  auto* protocol = app.add_subcommand("protocol", "evaluation protocols");
  protocol->require_subcommand(1);
  auto* protocol_build_app = protocol->add_subcommand("build", "emit a pair list for one protocol");
  protocol_build.attach(protocol_build_app);

  auto* encode_app = app.add_subcommand("encode", "extract templates");
  encode_cmd.attach(encode_app);

  auto* match_app = app.add_subcommand("match", "score a pair list");
  match_cmd.attach(match_app);

  auto* eval = app.add_subcommand("eval", "metrics");
  eval->require_subcommand(1);
  auto* eval_verify_app = eval->add_subcommand("verify", "FRR at FAR targets");
  eval_verify.attach(eval_verify_app);
  auto* eval_identify_app = eval->add_subcommand("identify", "rank-1 accuracy");
  eval_identify.attach(eval_identify_app);

  auto* report_app = app.add_subcommand("report", "merge reports into a table");
  report_cmd.attach(report_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, std::cout, std::cerr);
    return code == 0 ? kExitOk : kExitUsage;
  }
  g_quiet = quiet;

  CLI::App* leaf = &app;
  while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();

  try {
    if (config_path) merge_config(read_config(*config_path), {leaf, &app});
    if (workers_opt->count() > 0 && workers == 0) throw UsageError{"--workers must be positive"};
    g_workers = workers;

    if (leaf == synth_gen_app) synth_generate.run();
    else if (leaf == clean_app) clean_cmd.run();
    else if (leaf == quality_score_app) quality_score.run();
    else if (leaf == split_app) split_cmd.run();
    else if (leaf == protocol_build_app) protocol_build.run();
    else if (leaf == encode_app) encode_cmd.run();
    else if (leaf == match_app) match_cmd.run();
    else if (leaf == eval_verify_app) eval_verify.run();
    else if (leaf == eval_identify_app) eval_identify.run();
    else if (leaf == report_app) report_cmd.run();
    else throw UsageError{"no command given"};
  } catch (const UsageError& e) {
    std::fprintf(stderr, "irisbench: usage error: %s\n", e.message.c_str());
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "irisbench: usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "irisbench: error: %s\n", e.what());
    return kExitDomain;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "irisbench: error: %s\n", e.what());
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace irisbench::cli
