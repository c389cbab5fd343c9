#include "gw/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gw/rng.hpp"

namespace gw {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::uint64_t kAttemptStream = 0x0A11EA7;   // geometry retries
constexpr std::uint64_t kCaptionStream = 0xCA9710;    // caption sampling

std::string record_id(std::size_t index) {
  std::ostringstream os;
  os.width(6);
  os.fill('0');
  os << index;
  return os.str();
}

double unit_draw(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

int rgb_linf(const Rgb& a, const Rgb& b) {
  return std::max({std::abs(int(a.r) - int(b.r)), std::abs(int(a.g) - int(b.g)),
                   std::abs(int(a.b) - int(b.b))});
}

bool color_matches(const Rgb& want, const EvalReport& rep, int tol) {
  return rgb_linf(want, rep.dominant_rgb) <= tol || rgb_linf(want, rep.second_rgb) <= tol;
}

bool class_matches(FigureClass target, DetectedClass detected) {
  switch (target) {
    case FigureClass::ParallelLines: return detected == DetectedClass::ParallelLines;
    case FigureClass::RegularPolygon: return detected == DetectedClass::RegularPolygon;
    case FigureClass::IrregularPolygon: return detected == DetectedClass::IrregularPolygon;
  }
  return false;
}

std::string cell_key(const DatasetRecord& r) {
  return std::string(to_string(r.spec.cls)) + ":" + std::to_string(r.spec.n) + ":" +
         r.spec.color;
}

ordered_json record_to_json(const DatasetRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["image"] = r.image_path;
  j["class"] = to_string(r.spec.cls);
  j["n"] = r.spec.n;
  j["color"] = r.spec.color;
  j["rgb"] = {r.rgb.r, r.rgb.g, r.rgb.b};
  j["split"] = r.split;
  j["captions"] = r.captions;
  j["seed"] = r.record_seed;
  return j;
}

DatasetRecord record_from_json(const json& j) {
  DatasetRecord r;
  r.id = j.at("id").get<std::string>();
  r.image_path = j.at("image").get<std::string>();
  r.spec.cls = figure_class_from_string(j.at("class").get<std::string>());
  r.spec.n = j.at("n").get<int>();
  r.spec.color = j.at("color").get<std::string>();
  auto rgb = j.at("rgb");
  r.rgb = {rgb.at(0).get<std::uint8_t>(), rgb.at(1).get<std::uint8_t>(),
           rgb.at(2).get<std::uint8_t>()};
  r.split = j.at("split").get<std::string>();
  for (const auto& c : j.at("captions")) r.captions.push_back(c.get<std::string>());
  r.record_seed = j.at("seed").get<std::uint64_t>();
  return r;
}

void check_feasible(const DatasetConfig& cfg) {
  if (cfg.count < 1) throw InfeasibleConfig("count must be >= 1");
  if (cfg.n_min < 3 || cfg.n_min > cfg.n_max)
    throw InfeasibleConfig("need 3 <= n_min <= n_max");
  if (cfg.image_size < 16) throw InfeasibleConfig("image_size below the evaluator floor of 16");
  if (cfg.palette.empty()) throw InfeasibleConfig("empty palette");
  if (cfg.captions_per_image < 1) throw InfeasibleConfig("captions_per_image must be >= 1");

  double total = 0;
  for (const auto& [cls, w] : cfg.class_mix) {
    if (w < 0) throw InfeasibleConfig("negative class weight");
    total += w;
  }
  if (total <= 0) throw InfeasibleConfig("all class weights zero");

  for (const auto& [cls, w] : cfg.class_mix) {
    if (w <= 0) continue;
    int applicable = 0;
    for (const auto& t : cfg.templates) applicable += t.applicable_to(cls);
    if (applicable < cfg.captions_per_image)
      throw InfeasibleConfig(std::string("template pool has ") + std::to_string(applicable) +
                             " patterns for " + to_string(cls) + ", need " +
                             std::to_string(cfg.captions_per_image));
    try {
      if (cls == FigureClass::ParallelLines)
        synth_parallel_lines(cfg.n_max, cfg.image_size, 1, cfg.geom.lines);
      else if (cls == FigureClass::RegularPolygon)
        synth_regular_polygon(cfg.n_min, cfg.image_size, 1, cfg.geom.regular);
    } catch (const InfeasibleCanvas& e) {
      throw InfeasibleConfig(std::string("canvas too small: ") + e.what());
    } catch (const RejectionBudgetExceeded&) {
      // Unlucky probe seed, not a structural problem.
    }
  }
  for (const auto& [cls, n] : cfg.holdout)
    if (n < cfg.n_min || n > cfg.n_max)
      throw InfeasibleConfig("holdout combination outside the configured n range");
}

}  // namespace

DatasetConfig preset_3_9_world(std::uint64_t master_seed) {
  DatasetConfig cfg;
  cfg.count = 41000;
  cfg.image_size = 64;
  cfg.n_min = 3;
  cfg.n_max = 9;
  cfg.captions_per_image = 7;
  cfg.master_seed = master_seed;
  cfg.holdout = {{FigureClass::ParallelLines, 9},
                 {FigureClass::RegularPolygon, 9},
                 {FigureClass::IrregularPolygon, 9}};
  return cfg;
}

GeneratedRecord generate_record(const DatasetConfig& cfg, std::size_t index) {
  const std::uint64_t record_seed = mix_seed(cfg.master_seed, index);
  auto rng = make_rng(record_seed);

  double total = 0;
  for (const auto& [cls, w] : cfg.class_mix) total += w;
  double pick = unit_draw(rng) * total;
  FigureClass cls = cfg.class_mix.rbegin()->first;
  for (const auto& [c, w] : cfg.class_mix) {
    if (pick < w) {
      cls = c;
      break;
    }
    pick -= w;
  }
  int n = cfg.n_min + int(rng() % std::uint64_t(cfg.n_max - cfg.n_min + 1));
  const PaletteColor& color = cfg.palette[std::size_t(rng() % cfg.palette.size())];
  FigureSpec spec{cls, n, color.name, cfg.image_size};

  GeneratedRecord out;
  bool accepted = false;
  for (int attempt = 0; attempt < cfg.max_attempts_per_record; ++attempt) {
    ++out.attempts;
    const std::uint64_t attempt_seed =
        mix_seed(record_seed, kAttemptStream + std::uint64_t(attempt));
    FigureGeometry geom;
    try {
      geom = synth_figure(spec, attempt_seed, cfg.geom);
    } catch (const RejectionBudgetExceeded&) {
      continue;  // redraw with the next derived seed
    }
    RasterImage img = rasterize_figure(geom, color.rgb, cfg.image_size, cfg.raster);
    EvalReport rep = analyze_image(img, cfg.eval);

    bool ok = !rep.exception && class_matches(cls, rep.detected_class) &&
              rep.detected_n == n && color_matches(color.rgb, rep, cfg.eval.color_linf_tol);
    if (ok) {
      out.image = std::move(img);
      out.report = std::move(rep);
      accepted = true;
      break;
    }
    if (rep.exception) ++out.exception_rejects;
  }
  if (!accepted)
    throw RejectionBudgetExceeded("record " + std::to_string(index) + " (" +
                                  to_string(cls) + " n=" + std::to_string(n) +
                                  "): no candidate passed verification in " +
                                  std::to_string(cfg.max_attempts_per_record) + " attempts");

  DatasetRecord& rec = out.record;
  rec.id = record_id(index);
  rec.image_path = "images/" + rec.id + ".png";
  rec.spec = spec;
  rec.rgb = color.rgb;
  rec.record_seed = record_seed;
  auto captions = sample_captions(spec, cfg.templates, mix_seed(record_seed, kCaptionStream),
                                  cfg.captions_per_image);
  for (auto& c : captions) rec.captions.push_back(std::move(c.text));
  bool held = std::any_of(cfg.holdout.begin(), cfg.holdout.end(), [&](const auto& h) {
    return h.first == cls && h.second == n;
  });
  rec.split = held ? "zeroshot" : "train";
  return out;
}

GenerateResult generate_dataset(const DatasetConfig& cfg, const fs::path& out_dir) {
  check_feasible(cfg);
  fs::create_directories(out_dir / "images");

  GenerateResult result;
  result.records.reserve(std::size_t(cfg.count));
  for (std::size_t i = 0; i < std::size_t(cfg.count); ++i) {
    GeneratedRecord gen = generate_record(cfg, i);
    save_png(out_dir / gen.record.image_path, gen.image);
    result.stats.accepted += 1;
    result.stats.rejected += std::size_t(gen.attempts - 1);
    result.stats.exceptions += std::size_t(gen.exception_rejects);
    result.stats.histogram[cell_key(gen.record)] += 1;
    result.records.push_back(std::move(gen.record));
  }
  write_manifest(out_dir / "manifest.jsonl", result.records);
  write_generation_stats(out_dir / "stats.json", result.stats);
  return result;
}

void write_manifest(const fs::path& path, const std::vector<DatasetRecord>& records) {
  std::ofstream f(path, std::ios::binary);  // binary: byte-identical across reruns
  if (!f) throw Error("cannot open for write: " + path.string());
  for (const auto& r : records) f << record_to_json(r).dump() << '\n';
}

std::vector<DatasetRecord> load_manifest(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open manifest: " + path.string());
  std::vector<DatasetRecord> records;
  std::string line;
  while (std::getline(f, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(record_from_json(json::parse(line)));
  }
  return records;
}

void write_generation_stats(const fs::path& path, const GenerationStats& stats) {
  ordered_json j;
  j["accepted"] = stats.accepted;
  j["rejected"] = stats.rejected;
  j["exceptions"] = stats.exceptions;
  auto& hist = j["histogram"] = ordered_json::object();
  for (const auto& [key, count] : stats.histogram) hist[key] = count;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for write: " + path.string());
  f << j.dump(2) << '\n';
}

std::vector<ImageReport> evaluate_directory(const fs::path& manifest_path,
                                            const fs::path& images_root,
                                            const fs::path& reports_path,
                                            const fs::path& exceptions_dir,
                                            const EvalParams& params) {
  auto records = load_manifest(manifest_path);
  if (records.empty()) throw EmptyManifest("no records in " + manifest_path.string());
  fs::create_directories(exceptions_dir);

  std::vector<ImageReport> reports;
  reports.reserve(records.size());
  for (const auto& rec : records) {
    ImageReport ir;
    ir.id = rec.id;
    // Accept an images root pointing either at the dataset directory (manifest
    // paths are relative to it) or directly at the folder holding the files.
    fs::path img_path = images_root / rec.image_path;
    if (!fs::exists(img_path))
      img_path = images_root / fs::path(rec.image_path).filename();
    if (!fs::exists(img_path)) {
      ir.error = "FileMissing";
      reports.push_back(std::move(ir));
      continue;
    }
    try {
      RasterImage img = load_png(img_path);
      ir.eval = analyze_image(img, params);
      ir.color_match = color_matches(rec.rgb, ir.eval, params.color_linf_tol);
      if (ir.eval.exception)
        fs::copy_file(img_path, exceptions_dir / img_path.filename(),
                      fs::copy_options::overwrite_existing);
    } catch (const DecodeError&) {
      ir.error = "DecodeError";
    } catch (const Error& e) {
      ir.error = e.what();
    }
    reports.push_back(std::move(ir));
  }

  std::ofstream f(reports_path, std::ios::binary);
  if (!f) throw Error("cannot open for write: " + reports_path.string());
  for (const auto& ir : reports) {
    ordered_json j;
    j["id"] = ir.id;
    j["detected_class"] = to_string(ir.eval.detected_class);
    j["detected_n"] = ir.eval.detected_n;
    j["dominant_rgb"] = {ir.eval.dominant_rgb.r, ir.eval.dominant_rgb.g, ir.eval.dominant_rgb.b};
    j["second_rgb"] = {ir.eval.second_rgb.r, ir.eval.second_rgb.g, ir.eval.second_rgb.b};
    j["color_match"] = ir.color_match;
    j["free_edges"] = ir.eval.free_edge_count;
    j["exception"] = ir.eval.exception;
    j["error"] = ir.error;
    j["notes"] = ir.eval.notes;
    f << j.dump() << '\n';
  }
  return reports;
}

std::vector<ImageReport> load_reports(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open reports: " + path.string());
  std::vector<ImageReport> reports;
  std::string line;
  while (std::getline(f, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = json::parse(line);
    ImageReport ir;
    ir.id = j.at("id").get<std::string>();
    std::string cls = j.at("detected_class").get<std::string>();
    ir.eval.detected_class = cls == "unknown" ? DetectedClass::Unknown
                             : cls == "parallel_lines" ? DetectedClass::ParallelLines
                             : cls == "regular_polygon" ? DetectedClass::RegularPolygon
                                                        : DetectedClass::IrregularPolygon;
    ir.eval.detected_n = j.at("detected_n").get<int>();
    auto d = j.at("dominant_rgb");
    ir.eval.dominant_rgb = {d.at(0).get<std::uint8_t>(), d.at(1).get<std::uint8_t>(),
                            d.at(2).get<std::uint8_t>()};
    auto s = j.at("second_rgb");
    ir.eval.second_rgb = {s.at(0).get<std::uint8_t>(), s.at(1).get<std::uint8_t>(),
                          s.at(2).get<std::uint8_t>()};
    ir.color_match = j.at("color_match").get<bool>();
    ir.eval.free_edge_count = j.at("free_edges").get<int>();
    ir.eval.exception = j.at("exception").get<bool>();
    ir.error = j.at("error").get<std::string>();
    if (j.contains("notes"))
      for (const auto& note : j["notes"]) ir.eval.notes.push_back(note.get<std::string>());
    reports.push_back(std::move(ir));
  }
  return reports;
}

DatasetStats dataset_stats(const std::vector<DatasetRecord>& records) {
  DatasetStats st;
  st.records = records.size();
  std::set<std::string> train_texts, zeroshot_texts;
  for (const auto& r : records) {
    st.cells[cell_key(r) + ":" + r.split] += 1;
    st.per_class[to_string(r.spec.cls)] += 1;
    auto& texts = r.split == "zeroshot" ? zeroshot_texts : train_texts;
    (r.split == "zeroshot" ? st.zeroshot_records : st.train_records) += 1;
    for (const auto& c : r.captions) texts.insert(c);
  }
  st.distinct_train_texts = train_texts.size();
  st.distinct_zeroshot_texts = zeroshot_texts.size();
  return st;
}

void write_dataset_stats(const fs::path& path, const DatasetStats& stats) {
  ordered_json j;
  j["records"] = stats.records;
  j["train_records"] = stats.train_records;
  j["zeroshot_records"] = stats.zeroshot_records;
  j["distinct_train_texts"] = stats.distinct_train_texts;
  j["distinct_zeroshot_texts"] = stats.distinct_zeroshot_texts;
  auto& per_class = j["per_class"] = ordered_json::object();
  for (const auto& [key, count] : stats.per_class) per_class[key] = count;
  auto& cells = j["cells"] = ordered_json::object();
  for (const auto& [key, count] : stats.cells) cells[key] = count;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for write: " + path.string());
  f << j.dump(2) << '\n';
}

}  // namespace gw
