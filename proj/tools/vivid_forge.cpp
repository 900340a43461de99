// vivid-forge: dataset construction, batch planning, KIVE inputs, evaluation
// and QC serving from one binary.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include "vforge/batch_plan.hpp"
#include "vforge/corpus.hpp"
#include "vforge/error.hpp"
#include "vforge/eval_report.hpp"
#include "vforge/gateway.hpp"
#include "vforge/image_io.hpp"
#include "vforge/kive.hpp"
#include "vforge/manifest.hpp"
#include "vforge/mask_ops.hpp"
#include "vforge/mock_backend.hpp"
#include "vforge/qc_server.hpp"
#include "vforge/qc_store.hpp"
#include "vforge/random.hpp"

namespace fs = std::filesystem;
using namespace vforge;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  unsigned workers = std::max(1U, std::thread::hardware_concurrency());
  bool quiet = false;
  bool verbose = false;
};

GatewayConfig load_backends(const std::string& path) {
  GatewayConfig cfg = path.empty() ? GatewayConfig::all_mock() : GatewayConfig::from_json_file(path);
  cfg.apply_env_overrides();
  return cfg;
}

VocabularyConfig load_vocab(const std::string& path) {
  return path.empty() ? VocabularyConfig::defaults() : VocabularyConfig::from_json_file(path);
}

std::vector<AugmentationKind> parse_kinds(const std::vector<std::string>& names) {
  if (names.empty()) {
    return {std::begin(kAllAugmentations), std::end(kAllAugmentations)};
  }
  std::vector<AugmentationKind> kinds;
  for (const auto& n : names) {
    kinds.push_back(parse_augmentation(n));
  }
  return kinds;
}

// ingest ---------------------------------------------------------------------

struct IngestArgs {
  std::string input;
  std::string out;
  std::string fps;
  std::string extract_cmd;
  std::string listing;
  bool strict = false;
};

int run_ingest(const IngestArgs& a) {
  const Rational fps = Rational::parse(a.fps);
  fs::path frames = a.input;
  const bool ready = fs::is_directory(frames) || frames.extension() == ".png";
  if (!ready) {
    std::string cmd = a.extract_cmd;
    if (cmd.empty()) {
      if (const char* env = std::getenv("VFORGE_EXTRACT_CMD")) {
        cmd = env;
      }
    }
    if (cmd.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "media input needs --extract-cmd (or VFORGE_EXTRACT_CMD), e.g. "
                  "\"ffmpeg -loglevel error -i {input} {output}/frame_%05d.png\"");
    }
    if (a.out.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "media input needs --out for the extracted frames");
    }
    frames = a.out;
    run_frame_extraction(cmd, a.input, frames);
  }
  const std::size_t n = fs::is_directory(frames) ? count_frames(frames) : 1;
  if (n == 0) {
    throw Error(ErrorCode::kIo, "no frames found in " + frames.string());
  }
  const Image first = read_png(fs::is_directory(frames) ? frames / frame_filename(0) : frames);
  const IngestCheck check = check_ingest_quality(first.size(), n, fps);
  std::cout << frames.string() << ": " << n << " frame(s), " << first.width() << "x"
            << first.height() << ", " << check.duration_seconds << " s\n";
  for (const auto& p : check.problems()) {
    if (a.strict) {
      spdlog::error("{}: {}", frames.string(), p);
    } else {
      spdlog::warn("{}: {}", frames.string(), p);
    }
  }
  if (!check.ok() && a.strict) {
    std::cerr << "rejected: " << frames.string() << '\n';
    return 1;
  }
  if (!a.listing.empty()) {
    append_corpus_listing(a.listing, fs::absolute(frames), fps);
  }
  return 0;
}

// pipelines ------------------------------------------------------------------

struct BuildArgs {
  std::string corpus;
  std::string out;
  std::string backends;
  std::string vocab;
  std::string donors;
  std::vector<std::string> kinds;
  bool no_masked = false;
  bool augment = false;
  bool builtin_flow = false;
};

void report(const char* what, const CorpusRunSummary& s, const fs::path& out) {
  std::cout << what << ": " << s.records << " records from " << s.sources - s.failed_sources
            << "/" << s.sources << " sources -> " << (out / "manifest.jsonl").string() << '\n';
}

int run_build_addmod(const Globals& g, const BuildArgs& a) {
  Gateway gateway(load_backends(a.backends));
  AddmodOptions options;
  options.kinds = parse_kinds(a.kinds);
  CorpusRunOptions run{g.workers, g.seed, !a.no_masked};
  const auto summary = run_addmod_corpus(read_corpus_listing(a.corpus), gateway,
                                         load_vocab(a.vocab), options, run, a.out);
  report("build-addmod", summary, a.out);
  return 0;
}

int run_build_del(const Globals& g, const BuildArgs& a) {
  Gateway gateway(load_backends(a.backends));
  DeletionRunConfig cfg;
  cfg.deletion.augment = a.augment;
  cfg.deletion.flow_workers = 1;
  cfg.builtin_flow = a.builtin_flow;
  CorpusRunOptions run{g.workers, g.seed, !a.no_masked};
  const DonorPool donors = DonorPool::from_manifest(a.donors);
  const auto summary = run_deletion_corpus(read_corpus_listing(a.corpus), gateway,
                                           load_vocab(a.vocab), donors, cfg, run, a.out);
  report("build-del", summary, a.out);
  return 0;
}

// augment --------------------------------------------------------------------

struct AugmentArgs {
  std::string manifest;
  std::string out;
  std::vector<std::string> kinds;
  bool no_masked = false;
};

std::string retag_id(const std::string& id, AugmentationKind kind) {
  const std::string none = ".none";
  const auto pos = id.rfind(none + ".");
  if (pos != std::string::npos) {
    return id.substr(0, pos) + "." + std::string(to_string(kind)) + id.substr(pos + none.size());
  }
  if (id.size() >= none.size() && id.compare(id.size() - none.size(), none.size(), none) == 0) {
    return id.substr(0, id.size() - none.size()) + "." + std::string(to_string(kind));
  }
  return id + "." + std::string(to_string(kind));
}

int run_augment(const Globals& g, const AugmentArgs& a) {
  const fs::path in_path = a.manifest;
  const Manifest in = read_manifest(in_path);
  const fs::path out_dir = a.out;
  const SampleStore store(out_dir, !a.no_masked);
  auto rebase = [&](const std::string& ref) { return store.ref(resolve_ref(in_path, ref)); };

  std::vector<SampleRecord> out;
  std::map<std::string, std::vector<std::pair<AugmentationKind, std::pair<std::string, std::optional<std::string>>>>> done;
  AreaFilterConfig area;
  for (const auto& r : in.records) {
    if (r.augmentation != AugmentationKind::kNone) {
      continue;
    }
    auto it = done.find(r.masks_ref);
    if (it == done.end()) {
      const MaskSequence masks = load_masks(resolve_ref(in_path, r.masks_ref));
      const FrameSequence frames =
          load_frames(resolve_ref(in_path, r.frames_ref), r.fps, r.id);
      const std::uint64_t base = mix_seed(g.seed, hash_string(r.masks_ref));
      std::vector<std::pair<AugmentationKind, std::pair<std::string, std::optional<std::string>>>> made;
      const std::string group_root = sanitize_id(r.masks_ref);
      for (AugmentationKind kind : parse_kinds(a.kinds)) {
        if (kind == AugmentationKind::kNone) {
          made.push_back({kind, {rebase(r.masks_ref), r.masked_ref ? std::optional(rebase(*r.masked_ref)) : std::nullopt}});
          continue;
        }
        MaskSequence aug = augment(masks, kind, mix_seed(base, static_cast<std::uint64_t>(kind)));
        if (!area_filter(aug, area)) {
          continue;
        }
        const std::string kind_name(to_string(kind));
        made.push_back({kind,
                        {store.put_masks("augment", group_root + "/" + kind_name, aug),
                         store.put_masked("augment", group_root + "/" + kind_name, frames, aug)}});
      }
      it = done.emplace(r.masks_ref, std::move(made)).first;
    }
    for (const auto& [kind, refs] : it->second) {
      SampleRecord c = r;
      c.id = kind == AugmentationKind::kNone ? r.id : retag_id(r.id, kind);
      c.frames_ref = rebase(r.frames_ref);
      c.masks_ref = refs.first;
      c.masked_ref = refs.second;
      c.augmentation = kind;
      out.push_back(std::move(c));
    }
  }
  write_manifest(out_dir / "manifest.jsonl", out);
  std::cout << "augment: " << out.size() << " records -> " << (out_dir / "manifest.jsonl").string()
            << '\n';
  return 0;
}

// plan-batches ---------------------------------------------------------------

struct PlanArgs {
  std::string images;
  std::string videos;
  std::string out;
  PlanConfig config;
};

int run_plan(const Globals& g, PlanArgs a) {
  const Manifest images = a.images.empty() ? Manifest{} : read_manifest(a.images);
  const Manifest videos = a.videos.empty() ? Manifest{} : read_manifest(a.videos);
  a.config.seed = g.seed;
  const BatchPlan plan = plan_batches(SamplePools::from_manifests(images, videos), a.config);
  write_batch_plan(a.out, plan);
  const PlanSummary s = summarize(plan);
  std::cout << "plan-batches: " << plan.batches.size() << " batches (" << s.image_batches
            << " image, " << s.video_batches << " video, " << s.kive_batches << " kive), "
            << s.addmod_samples << "/" << s.samples << " addition_modification samples -> "
            << a.out << '\n';
  return 0;
}

// kive -----------------------------------------------------------------------

struct KiveArgs {
  std::string manifest;
  std::string id;
  std::string keyframe;
  std::string out;
  std::size_t frames = 0;
  std::size_t clip_length = kDefaultClipLength;
  long long attempts = 1;
  CostModel cost;
};

int run_kive_assemble(const KiveArgs& a) {
  const fs::path in_path = a.manifest;
  const Manifest m = read_manifest(in_path);
  const SampleRecord* rec = nullptr;
  for (const auto& r : m.records) {
    if (r.id == a.id) {
      rec = &r;
    }
  }
  if (rec == nullptr) {
    throw Error(ErrorCode::kUnknownSample, "no record '" + a.id + "' in " + a.manifest);
  }
  const FrameSequence source = load_frames(resolve_ref(in_path, rec->frames_ref), rec->fps, rec->id);
  const MaskSequence masks = load_masks(resolve_ref(in_path, rec->masks_ref));
  const Image keyframe = a.keyframe.empty() ? source[0] : read_png(a.keyframe);
  const KiveConditional cond = assemble_kive_conditional(source, masks, keyframe, rec->caption);

  const fs::path out_dir = a.out;
  const std::string key = sanitize_id(rec->id);
  save_frames(out_dir / "kive" / key / "frames", cond.frames);
  save_masks(out_dir / "kive" / key / "masks", cond.masks);
  SampleRecord k = *rec;
  k.id = rec->id + ".kive";
  k.frames_ref = make_ref(out_dir, out_dir / "kive" / key / "frames");
  k.masks_ref = make_ref(out_dir, out_dir / "kive" / key / "masks");
  k.masked_ref.reset();
  k.kive = true;
  k.provenance["kive_source"] = rec->id;
  k.provenance["keyframe"] = a.keyframe.empty() ? "source" : "edited";

  const fs::path manifest = out_dir / "manifest.jsonl";
  std::vector<SampleRecord> records;
  if (fs::exists(manifest)) {
    for (auto& r : read_manifest(manifest).records) {
      if (r.id != k.id) {
        records.push_back(std::move(r));
      }
    }
  }
  records.push_back(k);
  write_manifest(manifest, records);
  std::cout << "kive assemble: " << k.id << " -> " << manifest.string() << '\n';
  return 0;
}

int run_kive_chain(const KiveArgs& a) {
  for (const ClipSpan& c : chain_long_video(a.frames, a.clip_length)) {
    std::cout << c.start << ' ' << c.end << '\n';
  }
  return 0;
}

int run_kive_cost(const KiveArgs& a) {
  const double direct = editing_cost(a.attempts, EditMode::kDirect, a.cost);
  const double kive = editing_cost(a.attempts, EditMode::kKive, a.cost);
  std::cout << "attempts    " << a.attempts << '\n'
            << "direct      " << direct << " PFLOPs\n"
            << "kive        " << kive << " PFLOPs\n"
            << "break-even  N >= " << kive_break_even(a.cost) << '\n';
  return 0;
}

// eval -----------------------------------------------------------------------

struct EvalArgs {
  std::string manifest;
  std::string out;
  std::string backends;
  int fps_factor = kDefaultFpsFactor;
  bool builtin_embedder = false;
};

int run_eval(const Globals& g, const EvalArgs& a) {
  const auto records = read_eval_manifest(a.manifest);
  Gateway gateway(load_backends(a.backends));
  const Embedder embedder = a.builtin_embedder ? builtin_embedder() : gateway.embedder();
  const EvalReport report =
      eval_report(records, a.manifest, embedder, gateway.scorer(), a.fps_factor, g.workers);
  std::cout << format_report_table(report);
  if (!a.out.empty()) {
    write_eval_report(report, a.out);
  }
  return 0;
}

// stats ----------------------------------------------------------------------

int run_stats(const std::vector<std::string>& manifests, bool as_json) {
  std::size_t addmod = 0;
  std::size_t deletion = 0;
  std::size_t image_records = 0;
  std::size_t video_records = 0;
  std::set<std::string> sources;
  std::set<std::string> image_sources;
  std::set<std::string> labels;
  for (const auto& path : manifests) {
    const Manifest m = read_manifest(path);
    addmod += m.count(Task::kAdditionModification);
    deletion += m.count(Task::kDeletion);
    for (const auto& r : m.records) {
      const auto src = r.provenance.count("source") ? r.provenance.at("source")
                                                    : resolve_ref(path, r.frames_ref).string();
      sources.insert(src);
      if (r.num_frames == 1) {
        ++image_records;
        image_sources.insert(src);
      } else {
        ++video_records;
      }
      if (r.entity_label) {
        labels.insert(*r.entity_label);
      }
    }
  }
  if (as_json) {
    std::cout << "{\"addition_modification\":" << addmod << ",\"deletion\":" << deletion
              << ",\"sources\":" << sources.size() << ",\"image_sources\":" << image_sources.size()
              << ",\"video_sources\":" << sources.size() - image_sources.size()
              << ",\"image_records\":" << image_records << ",\"video_records\":" << video_records
              << ",\"labels\":" << labels.size() << "}\n";
    return 0;
  }
  std::cout << "addition_modification  " << addmod << '\n'
            << "deletion               " << deletion << '\n'
            << "sources                " << sources.size() << " (" << image_sources.size()
            << " images, " << sources.size() - image_sources.size() << " videos)\n"
            << "records                " << image_records << " image, " << video_records
            << " video\n"
            << "labels                 " << labels.size() << '\n';
  return 0;
}

// serve-qc -------------------------------------------------------------------

struct ServeArgs {
  std::string manifest;
  std::string verdicts;
  std::string static_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
};

fs::path default_static_dir() {
  if (const char* env = std::getenv("VFORGE_QC_UI_DIR")) {
    return env;
  }
  std::error_code ec;
  const fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    for (const fs::path& candidate :
         {exe.parent_path() / ".." / "share" / "vivid_forge" / "qc-ui",
          exe.parent_path() / "qc-ui"}) {
      if (fs::is_directory(candidate)) {
        return candidate;
      }
    }
  }
  return {};
}

int run_serve(const ServeArgs& a) {
  QcStore store(a.manifest, a.verdicts);
  QcServer server(store, a.static_dir.empty() ? default_static_dir() : fs::path(a.static_dir));
  spdlog::info("serving {} samples on http://{}:{}/", store.samples().size(), a.host, a.port);
  if (!server.listen(a.host, a.port)) {
    throw Error(ErrorCode::kIo, "cannot listen on " + a.host + ":" + std::to_string(a.port));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vivid-forge: mask-guided video editing dataset engine"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random draw")->capture_default_str();
  app.add_option("--workers", g.workers, "Parallel workers (default: logical CPUs)")
      ->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", g.quiet, "Only log warnings and errors");
  app.add_flag("-v,--verbose", g.verbose, "Debug logging");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Extract frames and check resolution/duration");
  c_ingest->add_option("input", ingest.input, "Media file, frame directory or PNG")->required();
  c_ingest->add_option("--fps", ingest.fps, "Frame rate, e.g. 30 or 30000/1001")->required();
  c_ingest->add_option("--out", ingest.out, "Directory for extracted frames");
  c_ingest->add_option("--extract-cmd", ingest.extract_cmd,
                       "Extraction command template with {input} and {output}");
  c_ingest->add_option("--listing", ingest.listing, "Corpus listing to append accepted sources to");
  c_ingest->add_flag("--strict", ingest.strict, "Reject sources under 720p or 5 s");

  BuildArgs addmod;
  auto* c_addmod = app.add_subcommand("build-addmod", "Addition/modification pipeline");
  c_addmod->add_option("--corpus", addmod.corpus, "Corpus listing")->required();
  c_addmod->add_option("--out", addmod.out, "Output directory")->required();
  c_addmod->add_option("--backends", addmod.backends, "Backend config (JSON)");
  c_addmod->add_option("--vocab", addmod.vocab, "Vocabulary override (JSON)");
  c_addmod->add_option("--kinds", addmod.kinds, "Augmentation kinds (default: all six)");
  c_addmod->add_flag("--no-masked", addmod.no_masked, "Skip writing masked frames");

  BuildArgs del;
  auto* c_del = app.add_subcommand("build-del", "Deletion pipeline");
  c_del->add_option("--corpus", del.corpus, "Corpus listing")->required();
  c_del->add_option("--donors", del.donors, "Addition/modification manifest supplying donor masks")
      ->required();
  c_del->add_option("--out", del.out, "Output directory")->required();
  c_del->add_option("--backends", del.backends, "Backend config (JSON)");
  c_del->add_option("--vocab", del.vocab, "Vocabulary override (JSON)");
  c_del->add_flag("--augment", del.augment, "Also emit augmented deletion masks");
  c_del->add_flag("--builtin-flow", del.builtin_flow, "Use the built-in flow estimator");
  c_del->add_flag("--no-masked", del.no_masked, "Skip writing masked frames");

  AugmentArgs aug;
  auto* c_aug = app.add_subcommand("augment", "Re-run mask augmentation over a manifest");
  c_aug->add_option("--manifest", aug.manifest, "Input manifest")->required();
  c_aug->add_option("--out", aug.out, "Output directory")->required();
  c_aug->add_option("--kinds", aug.kinds, "Augmentation kinds (default: all six)");
  c_aug->add_flag("--no-masked", aug.no_masked, "Skip writing masked frames");

  PlanArgs plan;
  auto* c_plan = app.add_subcommand("plan-batches", "Mixed image/video batch plan");
  c_plan->add_option("--images", plan.images, "Image manifest");
  c_plan->add_option("--videos", plan.videos, "Video manifest");
  c_plan->add_option("--out", plan.out, "Plan output (JSON lines)")->required();
  c_plan->add_option("--batches", plan.config.n_batches, "Number of batches")->required();
  c_plan->add_option("--batch-size", plan.config.batch_size)->capture_default_str();
  c_plan->add_option("--image-ratio", plan.config.image_ratio)->capture_default_str();
  c_plan->add_option("--video-ratio", plan.config.video_ratio)->capture_default_str();
  c_plan->add_option("--addmod-weight", plan.config.addmod_weight)->capture_default_str();
  c_plan->add_option("--del-weight", plan.config.deletion_weight)->capture_default_str();
  c_plan->add_option("--kive-prob", plan.config.kive_prob)->capture_default_str();
  c_plan->add_flag("--strict-cycle", plan.config.strict_cycle,
                   "Fixed image-then-video cycle instead of random draws");

  KiveArgs kive;
  auto* c_kive = app.add_subcommand("kive", "Keyframe-guided editing helpers");
  c_kive->require_subcommand(1);
  auto* c_assemble = c_kive->add_subcommand("assemble", "Build a conditional input from a record");
  c_assemble->add_option("--manifest", kive.manifest)->required();
  c_assemble->add_option("--id", kive.id, "Record id")->required();
  c_assemble->add_option("--keyframe", kive.keyframe, "Edited keyframe PNG (default: source frame 0)");
  c_assemble->add_option("--out", kive.out, "Output directory")->required();
  auto* c_chain = c_kive->add_subcommand("chain", "Clip boundaries for a long video");
  c_chain->add_option("--frames", kive.frames, "Total frames")->required()->check(CLI::PositiveNumber);
  c_chain->add_option("--clip-length", kive.clip_length)->capture_default_str();
  auto* c_cost = c_kive->add_subcommand("cost", "Iterative editing cost");
  c_cost->add_option("--attempts", kive.attempts, "Edit attempts N")->required();
  c_cost->add_option("--c-im", kive.cost.c_im, "PFLOPs per keyframe edit")->capture_default_str();
  c_cost->add_option("--c-vid", kive.cost.c_vid, "PFLOPs per clip edit")->capture_default_str();

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "BP/TA/TC report over an evaluation manifest");
  c_eval->add_option("--manifest", ev.manifest, "Evaluation manifest")->required();
  c_eval->add_option("--out", ev.out, "Report path (JSON sidecar at <out>.json)");
  c_eval->add_option("--backends", ev.backends, "Backend config (JSON)");
  c_eval->add_option("--fps-factor", ev.fps_factor, "Frame stride for the downsampled columns")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_eval->add_flag("--builtin-embedder", ev.builtin_embedder, "Use the built-in frame embedder");

  std::vector<std::string> stats_manifests;
  bool stats_json = false;
  auto* c_stats = app.add_subcommand("stats", "Dataset statistics");
  c_stats->add_option("manifests", stats_manifests, "Manifests")->required();
  c_stats->add_flag("--json", stats_json, "Machine-readable output");

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve-qc", "Quality-control review service");
  c_serve->add_option("--manifest", serve.manifest)->required();
  c_serve->add_option("--verdicts", serve.verdicts, "Append-only verdict log")->required();
  c_serve->add_option("--port", serve.port)->capture_default_str();
  c_serve->add_option("--host", serve.host)->capture_default_str();
  c_serve->add_option("--static", serve.static_dir, "Review UI bundle directory");

  std::string mock_config;
  auto* c_mock = app.add_subcommand("mock-backend", "Serve the mock perception backend on stdio");
  c_mock->add_option("--config", mock_config, "Palette config (JSON)");

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("vforge");
  spdlog::set_default_logger(logger);
  spdlog::set_level(g.verbose ? spdlog::level::debug
                              : g.quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    if (*c_ingest) return run_ingest(ingest);
    if (*c_addmod) return run_build_addmod(g, addmod);
    if (*c_del) return run_build_del(g, del);
    if (*c_aug) return run_augment(g, aug);
    if (*c_plan) return run_plan(g, plan);
    if (*c_assemble) return run_kive_assemble(kive);
    if (*c_chain) return run_kive_chain(kive);
    if (*c_cost) return run_kive_cost(kive);
    if (*c_eval) return run_eval(g, ev);
    if (*c_stats) return run_stats(stats_manifests, stats_json);
    if (*c_serve) return run_serve(serve);
    if (*c_mock) {
      const MockBackend backend(mock_config.empty() ? MockBackendOptions{}
                                                    : MockBackendOptions::from_json_file(mock_config));
      std::ios::sync_with_stdio(false);
      backend.serve(std::cin, std::cout);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
