#pragma once

#include "gw/dataset.hpp"

namespace gw {

struct ItemScore {
  double value = 0;            // 0, [25,75], or 100
  double shape_component = 0;  // count-closeness score before the color gate
  bool color_ok = false;
  bool excluded = false;  // exception-flagged items stay out of aggregates
};

struct PsiScore {
  std::map<FigureClass, double> per_class;
  std::map<FigureClass, std::size_t> counts;  // scored items per class
  double overall = 0;                         // pooled mean over scored items
  double mean_of_class_means = 0;             // alternative pooling, reported alongside
  std::size_t items_total = 0;
  std::size_t items_excluded = 0;
};

/// 0 on class mismatch; 100 on an exact count; otherwise partial credit
/// 25 + 50 * (min/max), which lands in [25, 75].
double attribute_score(int target_n, int detected_n, bool class_match);

/// Scores one image against its manifest record. Exceptions are excluded
/// rather than scored; a color mismatch gates the value to 0. Throws
/// IdMismatch when record and report ids differ.
ItemScore score_item(const DatasetRecord& record, const ImageReport& report,
                     int color_linf_tol = 20);

/// Per-class and overall arithmetic means over the non-excluded items.
/// Throws NoScorableItems when nothing survives exclusion.
PsiScore aggregate_psi(const std::vector<std::pair<FigureClass, ItemScore>>& items);

/// Convenience: joins records and reports by position (ids must line up),
/// scores, and aggregates.
PsiScore score_dataset(const std::vector<DatasetRecord>& records,
                       const std::vector<ImageReport>& reports, int color_linf_tol = 20);

void write_score_report(const std::filesystem::path& path, const PsiScore& score);

}  // namespace gw
