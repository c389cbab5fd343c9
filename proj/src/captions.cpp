#include "gw/captions.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "gw/rng.hpp"

namespace gw {

namespace {

const char* kUnits[] = {"zero", "one", "two",   "three", "four",
                        "five", "six", "seven", "eight", "nine"};
const char* kTeens[] = {"ten",     "eleven",  "twelve",    "thirteen", "fourteen",
                        "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};
const char* kTens[] = {"", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy",
                       "eighty", "ninety"};

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::vector<std::string> words_of(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      cur.push_back(char(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

std::string number_word(long long n) {
  if (n < 0 || n > 99) return std::to_string(n);
  if (n < 10) return kUnits[n];
  if (n < 20) return kTeens[n - 10];
  std::string s = kTens[n / 10];
  if (n % 10) s += std::string("-") + kUnits[n % 10];
  return s;
}

std::optional<int> number_from_word(const std::string& word) {
  for (int n = 0; n <= 99; ++n)
    if (number_word(n) == word) return n;
  return std::nullopt;
}

std::string class_noun(FigureClass cls, int n) {
  if (cls == FigureClass::ParallelLines) return "lines";
  switch (n) {
    case 3: return "triangle";
    case 4: return cls == FigureClass::RegularPolygon ? "square" : "quadrilateral";
    case 5: return "pentagon";
    case 6: return "hexagon";
    case 7: return "heptagon";
    case 8: return "octagon";
    case 9: return "nonagon";
    case 10: return "decagon";
    case 11: return "hendecagon";
    case 12: return "dodecagon";
    default: return "polygon";
  }
}

Caption render_caption(const CaptionTemplate& tmpl, const FigureSpec& spec) {
  if (!tmpl.applicable_to(spec.cls))
    throw InapplicableTemplate("template " + tmpl.id + " does not apply to " +
                               to_string(spec.cls));
  std::string text = tmpl.pattern;
  text = replace_all(text, "{count}", number_word(spec.n));
  text = replace_all(text, "{color}", spec.color);
  text = replace_all(text, "{noun}", class_noun(spec.cls, spec.n));
  return Caption{text, tmpl.id, spec};
}

std::vector<Caption> sample_captions(const FigureSpec& spec,
                                     const std::vector<CaptionTemplate>& pool,
                                     std::uint64_t seed, int k) {
  std::vector<std::size_t> applicable;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (pool[i].applicable_to(spec.cls)) applicable.push_back(i);
  if (int(applicable.size()) < k)
    throw PoolTooSmall("need " + std::to_string(k) + " templates for " +
                       to_string(spec.cls) + ", pool has " +
                       std::to_string(applicable.size()));

  // Partial Fisher-Yates with a plain modulo draw: fully specified, so the
  // selection is reproducible across standard libraries.
  auto rng = make_rng(seed);
  std::vector<Caption> out;
  out.reserve(std::size_t(k));
  for (int i = 0; i < k; ++i) {
    std::size_t j = i + std::size_t(rng() % (applicable.size() - std::size_t(i)));
    std::swap(applicable[std::size_t(i)], applicable[j]);
    out.push_back(render_caption(pool[applicable[std::size_t(i)]], spec));
  }
  return out;
}

TextSplit build_text_splits(const std::vector<CaptionTemplate>& pool, int n_min, int n_max,
                            const Palette& palette,
                            const std::vector<std::pair<FigureClass, int>>& holdout) {
  if (n_min > n_max || n_min < 1) throw Error("build_text_splits: bad n range");
  for (const auto& [cls, n] : holdout)
    if (n < n_min || n > n_max)
      throw InvalidHoldout(std::string(to_string(cls)) + ":" + std::to_string(n) +
                           " outside n range [" + std::to_string(n_min) + ", " +
                           std::to_string(n_max) + "]");

  auto held = [&](FigureClass cls, int n) {
    return std::any_of(holdout.begin(), holdout.end(),
                       [&](const auto& h) { return h.first == cls && h.second == n; });
  };

  TextSplit split;
  split.holdout = holdout;
  const FigureClass classes[] = {FigureClass::ParallelLines, FigureClass::RegularPolygon,
                                 FigureClass::IrregularPolygon};
  for (FigureClass cls : classes)
    for (int n = n_min; n <= n_max; ++n)
      for (const auto& color : palette)
        for (const auto& tmpl : pool) {
          if (!tmpl.applicable_to(cls)) continue;
          FigureSpec spec{cls, n, color.name};
          std::string text = render_caption(tmpl, spec).text;
          (held(cls, n) ? split.zeroshot_texts : split.train_texts).insert(std::move(text));
        }
  // A string reachable from a training combination is not zero-shot, even if
  // some held-out combination also renders to it.
  for (const auto& t : split.train_texts) split.zeroshot_texts.erase(t);
  return split;
}

std::vector<CaptionTemplate> default_template_pool() {
  const std::set<FigureClass> lines = {FigureClass::ParallelLines};
  const std::set<FigureClass> regular = {FigureClass::RegularPolygon};
  const std::set<FigureClass> irregular = {FigureClass::IrregularPolygon};
  return {
      {"pl-1", "{count} {color} colored lines", lines},
      {"pl-2", "the image contains {count} lines that are {color} in color", lines},
      {"pl-3", "a picture of {count} parallel {color} {noun}", lines},
      {"pl-4", "{count} parallel lines colored {color}", lines},
      {"pl-5", "an image showing {count} {color} parallel lines", lines},
      {"pl-6", "there are {count} straight {color} lines", lines},
      {"pl-7", "{count} evenly spaced {color} lines", lines},
      {"rp-1", "a regular {noun} with {count} sides that is {color} in color", regular},
      {"rp-2", "a {color} regular polygon with {count} sides", regular},
      {"rp-3", "the image contains a regular {count} sided polygon that is {color}", regular},
      {"rp-4", "a picture of a {color} regular {noun} having {count} sides", regular},
      {"rp-5", "a single regular polygon with {count} equal sides, colored {color}", regular},
      {"rp-6", "an image showing a {color} regular polygon of {count} sides", regular},
      {"rp-7", "a regular {count} sided {color} polygon", regular},
      {"ip-1", "an irregular {noun} with {count} sides that is {color} in color", irregular},
      {"ip-2", "a {color} irregular polygon with {count} sides", irregular},
      {"ip-3", "the image contains an irregular {count} sided polygon that is {color}",
       irregular},
      {"ip-4", "a picture of a {color} irregular {noun} having {count} sides", irregular},
      {"ip-5", "a single irregular polygon with {count} unequal sides, colored {color}",
       irregular},
      {"ip-6", "an image showing a {color} irregular polygon of {count} sides", irregular},
      {"ip-7", "an irregular {count} sided {color} polygon", irregular},
  };
}

std::optional<FigureSpec> parse_caption(const std::string& text, const Palette& palette) {
  const auto words = words_of(text);
  auto has = [&](const char* w) {
    return std::find(words.begin(), words.end(), w) != words.end();
  };

  FigureSpec spec;
  if (has("irregular")) spec.cls = FigureClass::IrregularPolygon;
  else if (has("regular")) spec.cls = FigureClass::RegularPolygon;
  else if (has("lines") || has("line")) spec.cls = FigureClass::ParallelLines;
  else return std::nullopt;

  int n = -1;
  for (std::size_t i = 0; i < words.size() && n < 0; ++i) {
    // Compound tens ("twenty" "one" after hyphen splitting) before plain words.
    if (i + 1 < words.size()) {
      auto tens = number_from_word(words[i]);
      auto unit = number_from_word(words[i + 1]);
      if (tens && *tens >= 20 && *tens % 10 == 0 && unit && *unit >= 1 && *unit <= 9) {
        n = *tens + *unit;
        break;
      }
    }
    if (auto v = number_from_word(words[i])) n = *v;
  }
  if (n < 0) {
    // No explicit count; a shape noun can still pin it down.
    for (int cand = 3; cand <= 12 && n < 0; ++cand)
      if (has(class_noun(spec.cls, cand).c_str()) && class_noun(spec.cls, cand) != "polygon")
        n = cand;
  }
  if (n < 0) return std::nullopt;
  spec.n = n;

  for (const auto& color : palette)
    if (has(color.name.c_str())) {
      spec.color = color.name;
      return spec;
    }
  return std::nullopt;
}

std::vector<CaptionTemplate> load_template_pool(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open template pool: " + path.string());
  std::vector<CaptionTemplate> pool;
  std::string line;
  while (std::getline(f, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line);
    CaptionTemplate t;
    t.id = j.at("id").get<std::string>();
    t.pattern = j.at("pattern").get<std::string>();
    for (const auto& c : j.at("classes"))
      t.applicable_classes.insert(figure_class_from_string(c.get<std::string>()));
    if (t.pattern.empty()) throw Error("empty pattern in template " + t.id);
    pool.push_back(std::move(t));
  }
  return pool;
}

void save_template_pool(const std::filesystem::path& path,
                        const std::vector<CaptionTemplate>& pool) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open for write: " + path.string());
  for (const auto& t : pool) {
    nlohmann::ordered_json j;
    j["id"] = t.id;
    j["pattern"] = t.pattern;
    auto& classes = j["classes"] = nlohmann::ordered_json::array();
    for (FigureClass c : t.applicable_classes) classes.push_back(to_string(c));
    f << j.dump() << '\n';
  }
}

}  // namespace gw
