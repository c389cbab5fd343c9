#pragma once

#include <filesystem>
#include <map>

#include "gw/captions.hpp"
#include "gw/evaluator.hpp"
#include "gw/geometry.hpp"
#include "gw/raster.hpp"

namespace gw {

struct DatasetConfig {
  int count = 100;
  int image_size = 64;
  int n_min = 3;
  int n_max = 9;
  Palette palette = default_palette();
  std::map<FigureClass, double> class_mix = {{FigureClass::ParallelLines, 1.0},
                                             {FigureClass::RegularPolygon, 1.0},
                                             {FigureClass::IrregularPolygon, 1.0}};
  std::vector<std::pair<FigureClass, int>> holdout;
  int captions_per_image = 7;
  std::uint64_t master_seed = 0;
  EvalParams eval;
  GeometryParams geom;
  RasterParams raster;
  std::vector<CaptionTemplate> templates = default_template_pool();
  int max_attempts_per_record = 200;
};

/// 3-9 world: n in [3,9] at 64x64, 41,000 images, 7 captions each, with the
/// nine-sided variant of every class held out for zero-shot text.
DatasetConfig preset_3_9_world(std::uint64_t master_seed = 42);

struct DatasetRecord {
  std::string id;
  std::string image_path;  // relative to the dataset root
  FigureSpec spec;
  Rgb rgb;
  std::vector<std::string> captions;
  std::string split;  // "train" | "zeroshot"
  std::uint64_t record_seed = 0;
};

struct GenerationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;    // candidates discarded by the verify loop
  std::size_t exceptions = 0;  // rejected candidates that tripped the exception flag
  std::map<std::string, std::size_t> histogram;  // "class:n:color" -> accepted count
};

// One fully verified record plus the artifacts the caller persists.
struct GeneratedRecord {
  DatasetRecord record;
  RasterImage image;
  EvalReport report;
  int attempts = 0;           // candidates drawn, including the accepted one
  int exception_rejects = 0;  // rejected candidates that tripped the exception flag
};

/// Draws, rasterizes and verifies record `index` of the dataset. Pure in
/// (cfg, index): candidates are rejected and redrawn until the evaluator
/// recovers class, count and color exactly, each retry on a fresh seed
/// derived from (master_seed, index, attempt). Throws
/// RejectionBudgetExceeded when max_attempts_per_record runs out.
GeneratedRecord generate_record(const DatasetConfig& cfg, std::size_t index);

struct GenerateResult {
  std::vector<DatasetRecord> records;
  GenerationStats stats;
};

/// Full run: writes out_dir/images/*.png, out_dir/manifest.jsonl and
/// out_dir/stats.json. Throws InfeasibleConfig up front when some (class, n)
/// in range cannot fit the canvas, and RejectionBudgetExceeded as above.
GenerateResult generate_dataset(const DatasetConfig& cfg,
                                const std::filesystem::path& out_dir);

void write_manifest(const std::filesystem::path& path,
                    const std::vector<DatasetRecord>& records);
std::vector<DatasetRecord> load_manifest(const std::filesystem::path& path);

void write_generation_stats(const std::filesystem::path& path, const GenerationStats& stats);

// Per-image evaluation outcome tied back to a manifest id.
struct ImageReport {
  std::string id;
  EvalReport eval;
  bool color_match = false;  // manifest rgb within tolerance of a dominant cluster
  std::string error;         // empty = evaluated; otherwise e.g. "FileMissing"
};

/// Evaluates every manifest id against the images under images_root. Per-item
/// failures land in ImageReport::error without aborting the run; images whose
/// report trips the exception flag are copied into exceptions_dir for manual
/// review. Writes one report per line to reports_path. Throws EmptyManifest.
std::vector<ImageReport> evaluate_directory(const std::filesystem::path& manifest_path,
                                            const std::filesystem::path& images_root,
                                            const std::filesystem::path& reports_path,
                                            const std::filesystem::path& exceptions_dir,
                                            const EvalParams& params);

std::vector<ImageReport> load_reports(const std::filesystem::path& path);

struct DatasetStats {
  std::size_t records = 0;
  std::map<std::string, std::size_t> cells;  // "class:n:color:split" -> count
  std::map<std::string, std::size_t> per_class;
  std::size_t train_records = 0;
  std::size_t zeroshot_records = 0;
  std::size_t distinct_train_texts = 0;
  std::size_t distinct_zeroshot_texts = 0;
};

DatasetStats dataset_stats(const std::vector<DatasetRecord>& records);
void write_dataset_stats(const std::filesystem::path& path, const DatasetStats& stats);

}  // namespace gw
