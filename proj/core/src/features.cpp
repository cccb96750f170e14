#include "wordrep/features.hpp"

#include <cctype>

#include "wordrep/io_util.hpp"

namespace wordrep {

FeatureTemplateSet FeatureTemplateSet::none() {
  FeatureTemplateSet t;
  t.word = t.lower = t.prefixes = t.suffixes = false;
  t.shape = t.has_digit = t.has_hyphen = false;
  return t;
}

FeatureTemplateSet FeatureTemplateSet::parse(const std::string& spec) {
  if (spec.empty() || spec == "all") return all();
  if (spec == "none") return none();
  FeatureTemplateSet t = none();
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t comma = spec.find(',', start);
    std::string item = spec.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (item == "word") t.word = true;
    else if (item == "lower") t.lower = true;
    else if (item == "prefix") t.prefixes = true;
    else if (item == "suffix") t.suffixes = true;
    else if (item == "shape") t.shape = true;
    else if (item == "digit") t.has_digit = true;
    else if (item == "hyphen") t.has_hyphen = true;
    else if (!item.empty())
      throw UsageError("unknown feature template: " + item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return t;
}

std::string FeatureTemplateSet::to_string() const {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(word, "word");
  add(lower, "lower");
  add(prefixes, "prefix");
  add(suffixes, "suffix");
  add(shape, "shape");
  add(has_digit, "digit");
  add(has_hyphen, "hyphen");
  return out.empty() ? "none" : out;
}

std::string word_shape(const std::string& token) {
  std::string shape;
  shape.reserve(token.size());
  for (char c : token) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isupper(u)) shape += 'X';
    else if (std::islower(u)) shape += 'x';
    else if (std::isdigit(u)) shape += 'd';
    else shape += c;
  }
  return shape;
}

namespace {

std::string ascii_lower(const std::string& token) {
  std::string out = token;
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

PositionFeatures assemble_features(const std::vector<std::string>& sentence,
                                   std::size_t position,
                                   const FeatureTemplateSet& templates,
                                   const WordRepresentation& representation) {
  if (position >= sentence.size())
    throw std::out_of_range("assemble_features: bad position");

  PositionFeatures out;
  const std::size_t d = representation.dense_dim();
  if (d > 0) out.dense.assign(templates.offset_count() * d, 0.0);

  std::size_t slot = 0;
  for (int off = templates.min_offset; off <= templates.max_offset; ++off, ++slot) {
    const long long pos = static_cast<long long>(position) + off;
    const std::string at = "[" + std::to_string(off) + "]";
    if (pos < 0) {
      out.indicators.push_back("w" + at + "=<s>");
      continue;
    }
    if (pos >= static_cast<long long>(sentence.size())) {
      out.indicators.push_back("w" + at + "=</s>");
      continue;
    }
    const std::string& token = sentence[static_cast<std::size_t>(pos)];

    if (templates.word) out.indicators.push_back("w" + at + "=" + token);
    if (templates.lower)
      out.indicators.push_back("low" + at + "=" + ascii_lower(token));
    if (templates.prefixes)
      for (std::size_t k = 1; k <= 3 && k <= token.size(); ++k)
        out.indicators.push_back("p" + std::to_string(k) + at + "=" +
                                 token.substr(0, k));
    if (templates.suffixes)
      for (std::size_t k = 1; k <= 3 && k <= token.size(); ++k)
        out.indicators.push_back("s" + std::to_string(k) + at + "=" +
                                 token.substr(token.size() - k));
    if (templates.shape)
      out.indicators.push_back("sh" + at + "=" + word_shape(token));
    if (templates.has_digit &&
        token.find_first_of("0123456789") != std::string::npos)
      out.indicators.push_back("dig" + at);
    if (templates.has_hyphen && token.find('-') != std::string::npos)
      out.indicators.push_back("hyp" + at);

    representation.append_indicators(token, off, out.indicators);

    if (d > 0) {
      WordId row = representation.dense_row_id(token);
      if (row != kNoWord) {
        auto vec = representation.matrix.row(row);
        std::copy(vec.begin(), vec.end(), out.dense.begin() + slot * d);
      }
    }
  }
  return out;
}

std::vector<WordId> dense_slot_ids(const std::vector<std::string>& sentence,
                                   std::size_t position,
                                   const FeatureTemplateSet& templates,
                                   const WordRepresentation& representation) {
  if (representation.dense_dim() == 0) return {};
  std::vector<WordId> slots(templates.offset_count(), kNoWord);
  std::size_t slot = 0;
  for (int off = templates.min_offset; off <= templates.max_offset; ++off, ++slot) {
    const long long pos = static_cast<long long>(position) + off;
    if (pos < 0 || pos >= static_cast<long long>(sentence.size())) continue;
    slots[slot] = representation.dense_row_id(
        sentence[static_cast<std::size_t>(pos)]);
  }
  return slots;
}

}  // namespace wordrep
