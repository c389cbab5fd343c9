#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <utility>

#include "gw/types.hpp"

namespace gw {

// A text pattern with {count}, {color} and {noun} slots, usable for any of
// the classes it is tagged with.
struct CaptionTemplate {
  std::string id;
  std::string pattern;
  std::set<FigureClass> applicable_classes;

  bool applicable_to(FigureClass cls) const { return applicable_classes.count(cls) > 0; }
};

struct Caption {
  std::string text;
  std::string template_id;
  FigureSpec spec_ref;
};

// Partition of all enumerable caption strings into training text and
// held-out zero-shot text.
struct TextSplit {
  std::set<std::string> train_texts;
  std::set<std::string> zeroshot_texts;
  std::vector<std::pair<FigureClass, int>> holdout;
};

/// English number word ("zero".."ninety-nine"); digits beyond 99.
std::string number_word(long long n);

/// Inverse of number_word for 0..99; nullopt for anything else.
std::optional<int> number_from_word(const std::string& word);

/// Class-appropriate noun: "lines", or a shape name ("triangle", "square",
/// "pentagon", ...) where standard English has one, otherwise "polygon".
/// "square" is reserved for the regular class.
std::string class_noun(FigureClass cls, int n);

Caption render_caption(const CaptionTemplate& tmpl, const FigureSpec& spec);

/// k captions from k distinct applicable templates, deterministic per seed.
std::vector<Caption> sample_captions(const FigureSpec& spec,
                                     const std::vector<CaptionTemplate>& pool,
                                     std::uint64_t seed, int k = 7);

/// Enumerates every template x class x n x color caption string over
/// [n_min, n_max] and splits by the held-out (class, n) combinations.
TextSplit build_text_splits(const std::vector<CaptionTemplate>& pool, int n_min, int n_max,
                            const Palette& palette,
                            const std::vector<std::pair<FigureClass, int>>& holdout);

/// Built-in pool: seven templates per class.
std::vector<CaptionTemplate> default_template_pool();

/// Recovers (class, n, color) from a rendered caption; nullopt when any of
/// the three cannot be identified.
std::optional<FigureSpec> parse_caption(const std::string& text, const Palette& palette);

/// Template pool persistence: one JSON object per line with keys
/// "id", "pattern", "classes".
std::vector<CaptionTemplate> load_template_pool(const std::filesystem::path& path);
void save_template_pool(const std::filesystem::path& path,
                        const std::vector<CaptionTemplate>& pool);

}  // namespace gw
