#include "gw/scoring.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace gw {

namespace {

bool class_matches(FigureClass target, DetectedClass detected) {
  switch (target) {
    case FigureClass::ParallelLines: return detected == DetectedClass::ParallelLines;
    case FigureClass::RegularPolygon: return detected == DetectedClass::RegularPolygon;
    case FigureClass::IrregularPolygon: return detected == DetectedClass::IrregularPolygon;
  }
  return false;
}

int linf(const Rgb& a, const Rgb& b) {
  return std::max({std::abs(int(a.r) - int(b.r)), std::abs(int(a.g) - int(b.g)),
                   std::abs(int(a.b) - int(b.b))});
}

}  // namespace

double attribute_score(int target_n, int detected_n, bool class_match) {
  if (target_n < 3) throw Error("attribute_score: target count below 3");
  if (detected_n < 0) throw Error("attribute_score: negative detected count");
  if (!class_match) return 0;
  if (detected_n == target_n) return 100;
  double lo = double(std::min(target_n, detected_n));
  double hi = double(std::max(target_n, detected_n));
  return 25.0 + 50.0 * (lo / hi);
}

ItemScore score_item(const DatasetRecord& record, const ImageReport& report,
                     int color_linf_tol) {
  if (record.id != report.id)
    throw IdMismatch("record " + record.id + " scored against report " + report.id);

  ItemScore item;
  if (report.eval.exception) {
    item.excluded = true;
    return item;
  }
  item.color_ok = linf(record.rgb, report.eval.dominant_rgb) <= color_linf_tol ||
                  linf(record.rgb, report.eval.second_rgb) <= color_linf_tol;
  item.shape_component = attribute_score(
      record.spec.n, report.eval.detected_n,
      class_matches(record.spec.cls, report.eval.detected_class));
  item.value = item.color_ok ? item.shape_component : 0;
  return item;
}

PsiScore aggregate_psi(const std::vector<std::pair<FigureClass, ItemScore>>& items) {
  PsiScore psi;
  psi.items_total = items.size();
  std::map<FigureClass, double> sums;
  double total = 0;
  std::size_t scored = 0;
  for (const auto& [cls, item] : items) {
    if (item.excluded) {
      ++psi.items_excluded;
      continue;
    }
    sums[cls] += item.value;
    psi.counts[cls]++;
    total += item.value;
    ++scored;
  }
  if (scored == 0) throw NoScorableItems("no items left after exclusion");
  for (const auto& [cls, sum] : sums) psi.per_class[cls] = sum / double(psi.counts[cls]);
  psi.overall = total / double(scored);
  double class_mean_sum = 0;
  for (const auto& [cls, mean] : psi.per_class) class_mean_sum += mean;
  psi.mean_of_class_means = class_mean_sum / double(psi.per_class.size());
  return psi;
}

PsiScore score_dataset(const std::vector<DatasetRecord>& records,
                       const std::vector<ImageReport>& reports, int color_linf_tol) {
  if (records.size() != reports.size())
    throw IdMismatch("manifest has " + std::to_string(records.size()) + " records, reports " +
                     std::to_string(reports.size()));
  std::vector<std::pair<FigureClass, ItemScore>> items;
  items.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    items.emplace_back(records[i].spec.cls, score_item(records[i], reports[i], color_linf_tol));
  return aggregate_psi(items);
}

void write_score_report(const std::filesystem::path& path, const PsiScore& score) {
  nlohmann::ordered_json j;
  auto put = [&](const char* key, FigureClass cls) {
    auto it = score.per_class.find(cls);
    if (it == score.per_class.end()) j[key] = nullptr;
    else j[key] = it->second;
  };
  put("psi_parallel_lines", FigureClass::ParallelLines);
  put("psi_regular_polygon", FigureClass::RegularPolygon);
  put("psi_irregular_polygon", FigureClass::IrregularPolygon);
  j["psi_overall"] = score.overall;
  j["psi_mean_of_class_means"] = score.mean_of_class_means;
  j["items_total"] = score.items_total;
  j["items_excluded"] = score.items_excluded;
  auto& counts = j["items_per_class"] = nlohmann::ordered_json::object();
  for (const auto& [cls, n] : score.counts) counts[to_string(cls)] = n;

  std::ofstream f(path);
  if (!f) throw Error("cannot open for write: " + path.string());
  f << j.dump(2) << '\n';
}

}  // namespace gw
