#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gw/dataset.hpp"
#include "gw/proactive.hpp"
#include "gw/rng.hpp"
#include "gw/scoring.hpp"

namespace {

using nlohmann::json;

std::vector<std::pair<gw::FigureClass, int>> parse_holdout(
    const std::vector<std::string>& entries) {
  std::vector<std::pair<gw::FigureClass, int>> out;
  for (const auto& entry : entries) {
    auto colon = entry.rfind(':');
    if (colon == std::string::npos)
      throw CLI::ValidationError("--holdout", "expected CLASS:N, got '" + entry + "'");
    std::string cls = entry.substr(0, colon);
    int n = std::stoi(entry.substr(colon + 1));
    if (cls == "*" || cls == "all") {
      out.emplace_back(gw::FigureClass::ParallelLines, n);
      out.emplace_back(gw::FigureClass::RegularPolygon, n);
      out.emplace_back(gw::FigureClass::IrregularPolygon, n);
    } else {
      out.emplace_back(gw::figure_class_from_string(cls), n);
    }
  }
  return out;
}

// Config file keys mirror the flag names; explicit flags win.
void apply_config_file(gw::DatasetConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw gw::Error("cannot open config: " + path);
  json j = json::parse(f);

  if (j.contains("count")) cfg.count = j["count"].get<int>();
  if (j.contains("image_size")) cfg.image_size = j["image_size"].get<int>();
  if (j.contains("n_min")) cfg.n_min = j["n_min"].get<int>();
  if (j.contains("n_max")) cfg.n_max = j["n_max"].get<int>();
  if (j.contains("captions_per_image"))
    cfg.captions_per_image = j["captions_per_image"].get<int>();
  if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
  if (j.contains("max_attempts_per_record"))
    cfg.max_attempts_per_record = j["max_attempts_per_record"].get<int>();
  if (j.contains("holdout")) {
    std::vector<std::string> entries;
    for (const auto& h : j["holdout"]) entries.push_back(h.get<std::string>());
    cfg.holdout = parse_holdout(entries);
  }
  if (j.contains("class_mix")) {
    cfg.class_mix.clear();
    for (const auto& [key, value] : j["class_mix"].items())
      cfg.class_mix[gw::figure_class_from_string(key)] = value.get<double>();
  }
  if (j.contains("palette")) {
    cfg.palette.clear();
    for (const auto& p : j["palette"]) {
      auto rgb = p.at("rgb");
      cfg.palette.push_back({p.at("name").get<std::string>(),
                             {rgb.at(0).get<std::uint8_t>(), rgb.at(1).get<std::uint8_t>(),
                              rgb.at(2).get<std::uint8_t>()}});
    }
  }
  if (j.contains("template_pool")) cfg.templates = gw::load_template_pool(
      j["template_pool"].get<std::string>());

  auto& e = cfg.eval;
  if (j.contains("blur_sigma")) e.blur_sigma = j["blur_sigma"].get<double>();
  if (j.contains("blur_ksize")) e.blur_ksize = j["blur_ksize"].get<int>();
  if (j.contains("canny_low")) e.canny_low = j["canny_low"].get<double>();
  if (j.contains("canny_high")) e.canny_high = j["canny_high"].get<double>();
  if (j.contains("dp_epsilon")) e.dp_epsilon = j["dp_epsilon"].get<double>();
  if (j.contains("kmeans_k")) e.kmeans_k = j["kmeans_k"].get<int>();
  if (j.contains("reg_side_cv")) e.reg_side_cv = j["reg_side_cv"].get<double>();
  if (j.contains("reg_angle_tol_deg")) e.reg_angle_tol_deg = j["reg_angle_tol_deg"].get<double>();
  if (j.contains("color_linf_tol")) e.color_linf_tol = j["color_linf_tol"].get<int>();
  if (j.contains("min_component_px")) e.min_component_px = j["min_component_px"].get<int>();
  if (j.contains("parallel_tol_deg")) e.parallel_tol_deg = j["parallel_tol_deg"].get<double>();
  if (j.contains("fg_dist_tol")) e.fg_dist_tol = j["fg_dist_tol"].get<int>();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"3-9 world toolkit: procedural figure dataset generator, "
               "rule-based image evaluator and zero-shot scorer"};
  app.require_subcommand(1);

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "Generate a verified image + caption dataset");
  std::string gen_out, gen_config, gen_preset;
  std::vector<std::string> gen_holdout;
  int gen_count = -1, gen_size = -1, gen_nmin = -1, gen_nmax = -1;
  std::int64_t gen_seed = -1;
  gen->add_option("--out", gen_out, "Output dataset directory")->required();
  gen->add_option("--config", gen_config, "JSON config file (flags override it)");
  gen->add_option("--preset", gen_preset, "Named preset")->check(CLI::IsMember({"3-9-world"}));
  gen->add_option("--count", gen_count, "Number of records");
  gen->add_option("--seed", gen_seed, "Master seed");
  gen->add_option("--size", gen_size, "Canvas edge in pixels");
  gen->add_option("--n-min", gen_nmin, "Smallest line/side count");
  gen->add_option("--n-max", gen_nmax, "Largest line/side count");
  gen->add_option("--holdout", gen_holdout,
                  "Zero-shot combination CLASS:N (repeatable; CLASS may be *)");

  // ---- evaluate ----
  auto* ev = app.add_subcommand("evaluate", "Run the rule-based evaluator over a manifest");
  std::string ev_images, ev_manifest, ev_reports, ev_config;
  ev->add_option("--images", ev_images, "Dataset root the manifest paths resolve against")
      ->required();
  ev->add_option("--manifest", ev_manifest, "Manifest path (default: <images>/manifest.jsonl)");
  ev->add_option("--reports", ev_reports, "Report output path (default: <images>/reports.jsonl)");
  ev->add_option("--config", ev_config, "JSON config file for evaluator parameters");

  // ---- score ----
  auto* sc = app.add_subcommand("score", "Aggregate psi from a manifest and reports");
  std::string sc_manifest, sc_reports, sc_out, sc_config;
  sc->add_option("--manifest", sc_manifest, "Manifest path")->required();
  sc->add_option("--reports", sc_reports, "Reports path")->required();
  sc->add_option("--out", sc_out, "Score report output path");
  sc->add_option("--config", sc_config, "JSON config file (color_linf_tol)");

  // ---- stats ----
  auto* st = app.add_subcommand("stats", "Dataset composition counts");
  std::string st_manifest, st_out;
  st->add_option("--manifest", st_manifest, "Manifest path")->required();
  st->add_option("--out", st_out, "Stats output path");

  // ---- render ----
  auto* rd = app.add_subcommand("render", "Render a single verified figure");
  std::string rd_class = "regular_polygon", rd_color = "green", rd_out = "figure.png";
  std::string rd_config;
  int rd_n = 6, rd_size = 64;
  std::int64_t rd_seed = 0;
  rd->add_option("--class", rd_class, "parallel_lines | regular_polygon | irregular_polygon");
  rd->add_option("--n", rd_n, "Line/side count");
  rd->add_option("--color", rd_color, "Palette color name");
  rd->add_option("--seed", rd_seed, "Seed");
  rd->add_option("--size", rd_size, "Canvas edge in pixels");
  rd->add_option("--out", rd_out, "Output PNG path");
  rd->add_option("--config", rd_config, "JSON config file");

  // ---- lfzsl (bonus utility for the optimization reference) ----
  auto* lf = app.add_subcommand("lfzsl", "Run the zero-shot proactive-optimization toy");
  std::string lf_log;
  std::int64_t lf_seed = 7;
  int lf_steps = 300;
  bool lf_no_proactive = false, lf_flip = false;
  lf->add_option("--seed", lf_seed, "Task seed");
  lf->add_option("--steps", lf_steps, "Step budget");
  lf->add_option("--log", lf_log, "Trajectory JSONL output path");
  lf->add_flag("--no-proactive", lf_no_proactive, "Disable proactive updates");
  lf->add_flag("--flip-trigger", lf_flip, "Fire on validation loss exceeding train loss");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      gw::DatasetConfig cfg;
      if (gen_preset == "3-9-world") cfg = gw::preset_3_9_world();
      if (!gen_config.empty()) apply_config_file(cfg, gen_config);
      if (gen_count >= 0) cfg.count = gen_count;
      if (gen_seed >= 0) cfg.master_seed = std::uint64_t(gen_seed);
      if (gen_size >= 0) cfg.image_size = gen_size;
      if (gen_nmin >= 0) cfg.n_min = gen_nmin;
      if (gen_nmax >= 0) cfg.n_max = gen_nmax;
      if (!gen_holdout.empty()) cfg.holdout = parse_holdout(gen_holdout);

      auto result = gw::generate_dataset(cfg, gen_out);
      auto stats = gw::dataset_stats(result.records);
      gw::write_dataset_stats(std::filesystem::path(gen_out) / "dataset_stats.json", stats);
      std::cout << "accepted " << result.stats.accepted << " records ("
                << result.stats.rejected << " rejected, " << result.stats.exceptions
                << " exception candidates) -> " << gen_out << "\n"
                << "train records " << stats.train_records << ", zero-shot records "
                << stats.zeroshot_records << "; distinct texts " << stats.distinct_train_texts
                << " train / " << stats.distinct_zeroshot_texts << " zero-shot\n";
    } else if (ev->parsed()) {
      gw::DatasetConfig cfg;
      if (!ev_config.empty()) apply_config_file(cfg, ev_config);
      std::filesystem::path root = ev_images;
      std::filesystem::path manifest = ev_manifest.empty() ? root / "manifest.jsonl"
                                                           : std::filesystem::path(ev_manifest);
      std::filesystem::path reports = ev_reports.empty() ? root / "reports.jsonl"
                                                         : std::filesystem::path(ev_reports);
      auto all = gw::evaluate_directory(manifest, root, reports, root / "exceptions", cfg.eval);
      std::size_t exceptions = 0, errors = 0;
      for (const auto& r : all) {
        exceptions += r.eval.exception;
        errors += !r.error.empty();
      }
      std::cout << "evaluated " << all.size() << " records (" << exceptions << " exceptions, "
                << errors << " errors) -> " << reports.string() << "\n";
    } else if (sc->parsed()) {
      gw::DatasetConfig cfg;
      if (!sc_config.empty()) apply_config_file(cfg, sc_config);
      auto records = gw::load_manifest(sc_manifest);
      auto reports = gw::load_reports(sc_reports);
      auto psi = gw::score_dataset(records, reports, cfg.eval.color_linf_tol);
      if (!sc_out.empty()) gw::write_score_report(sc_out, psi);
      auto show = [&](const char* name, gw::FigureClass cls) {
        auto it = psi.per_class.find(cls);
        std::cout << name << ": ";
        if (it == psi.per_class.end()) std::cout << "n/a";
        else std::cout << it->second;
        std::cout << "\n";
      };
      std::cout.precision(4);
      std::cout << std::fixed;
      show("psi_parallel_lines", gw::FigureClass::ParallelLines);
      show("psi_regular_polygon", gw::FigureClass::RegularPolygon);
      show("psi_irregular_polygon", gw::FigureClass::IrregularPolygon);
      std::cout << "psi_overall: " << psi.overall << "\n"
                << "items_total: " << psi.items_total
                << ", items_excluded: " << psi.items_excluded << "\n";
    } else if (st->parsed()) {
      auto records = gw::load_manifest(st_manifest);
      auto stats = gw::dataset_stats(records);
      if (!st_out.empty()) gw::write_dataset_stats(st_out, stats);
      std::cout << "records: " << stats.records << " (train " << stats.train_records
                << ", zeroshot " << stats.zeroshot_records << ")\n"
                << "distinct_train_texts: " << stats.distinct_train_texts << "\n"
                << "distinct_zeroshot_texts: " << stats.distinct_zeroshot_texts << "\n";
      for (const auto& [cls, n] : stats.per_class) std::cout << cls << ": " << n << "\n";
    } else if (rd->parsed()) {
      gw::DatasetConfig cfg;
      if (!rd_config.empty()) apply_config_file(cfg, rd_config);
      cfg.image_size = rd_size;
      cfg.n_min = std::min(rd_n, cfg.n_min);
      cfg.n_max = std::max(rd_n, cfg.n_max);
      const auto& color = gw::palette_lookup(cfg.palette, rd_color);
      gw::FigureSpec spec{gw::figure_class_from_string(rd_class), rd_n, color.name, rd_size};

      // Same verify loop the dataset uses: redraw until the evaluator agrees.
      gw::RasterImage image;
      bool accepted = false;
      for (int attempt = 0; attempt < cfg.max_attempts_per_record && !accepted; ++attempt) {
        std::uint64_t seed = gw::mix_seed(std::uint64_t(rd_seed), std::uint64_t(attempt));
        gw::FigureGeometry geom;
        try {
          geom = gw::synth_figure(spec, seed, cfg.geom);
        } catch (const gw::RejectionBudgetExceeded&) {
          continue;
        }
        image = gw::rasterize_figure(geom, color.rgb, rd_size, cfg.raster);
        auto rep = gw::analyze_image(image, cfg.eval);
        accepted = !rep.exception && rep.detected_n == rd_n &&
                   std::string(gw::to_string(rep.detected_class)) == gw::to_string(spec.cls);
      }
      if (!accepted) throw gw::RejectionBudgetExceeded("no candidate passed verification");
      gw::save_png(rd_out, image);
      std::cout << "class=" << gw::to_string(spec.cls) << " n=" << spec.n
                << " color=" << spec.color << " size=" << rd_size << " seed=" << rd_seed
                << " -> " << rd_out << "\n";
    } else if (lf->parsed()) {
      auto task = gw::make_toy_task(std::uint64_t(lf_seed));
      gw::LfzslConfig cfg;
      cfg.max_steps = lf_steps;
      cfg.proactive_enabled = !lf_no_proactive;
      cfg.flip_trigger = lf_flip;
      if (!lf_log.empty()) cfg.trajectory_path = lf_log;
      auto res = gw::run_lfzsl(task, cfg);
      std::cout << (res.outcome == gw::LfzslResult::Outcome::ZeroShotSolved
                        ? "zero-shot solved"
                        : "budget exceeded")
                << " after " << res.steps << " steps; zero-shot accuracy "
                << res.zero_shot_accuracy * 100 << "% on class " << task.unseen << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
