#include "scripttax/converter.hpp"

#include <algorithm>
#include <fstream>

#include "scripttax/errors.hpp"
#include "scripttax/unicode.hpp"

namespace scripttax {

MappingTable::MappingTable(std::string direction_label,
                           std::vector<MappingRule> rules,
                           DefaultPolicy default_policy)
    : label_(std::move(direction_label)),
      rules_(std::move(rules)),
      policy_(default_policy) {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const auto& r = rules_[i];
    if (r.source.empty()) {
      throw ValidationError("rule " + std::to_string(i + 1) + " has an empty source");
    }
    auto source = unicode::decode(r.source);
    unicode::decode(r.target);
    if (std::any_of(source.begin(), source.end(), unicode::is_whitespace)) {
      throw ValidationError("rule source \"" + r.source + "\" contains whitespace");
    }
    max_source_len_ = std::max(max_source_len_, source.size());
    auto [it, inserted] = index_.emplace(std::move(source), i);
    if (!inserted) {
      throw ValidationError("duplicate rule source \"" + r.source + "\" (rules " +
                            std::to_string(it->second + 1) + " and " +
                            std::to_string(i + 1) + ")");
    }
  }
}

std::size_t MappingTable::match(std::u32string_view text, std::size_t pos,
                                const std::string** target) const {
  const std::size_t longest = std::min(max_source_len_, text.size() - pos);
  for (std::size_t len = longest; len > 0; --len) {
    auto it = index_.find(std::u32string(text.substr(pos, len)));
    if (it != index_.end()) {
      *target = &rules_[it->second].target;
      return len;
    }
  }
  return 0;
}

MappingTable load_mapping(const std::filesystem::path& path,
                          DefaultPolicy default_policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mapping file " + path.string());
  std::vector<MappingRule> rules;
  std::vector<std::size_t> lines;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError("expected source<TAB>target in " + path.string(), lineno);
    }
    if (tab == 0) {
      throw ValidationError("empty source field in " + path.string() + " line " +
                            std::to_string(lineno));
    }
    rules.push_back({line.substr(0, tab), line.substr(tab + 1)});
    lines.push_back(lineno);
  }
  // Checked here as well so the message cites file lines.
  std::unordered_map<std::string, std::size_t> first_line;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    auto [it, inserted] = first_line.emplace(rules[i].source, lines[i]);
    if (!inserted) {
      throw ValidationError("duplicate rule source \"" + rules[i].source + "\" in " +
                            path.string() + " on lines " + std::to_string(it->second) +
                            " and " + std::to_string(lines[i]));
    }
  }
  return MappingTable(path.stem().string(), std::move(rules), default_policy);
}

std::string apply_mapping(const MappingTable& table, std::string_view text) {
  const std::u32string cps = unicode::decode(text);
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < cps.size()) {
    if (unicode::is_whitespace(cps[pos])) {
      out += unicode::encode(cps[pos]);
      ++pos;
      continue;
    }
    const std::string* target = nullptr;
    if (std::size_t len = table.match(cps, pos, &target); len > 0) {
      out += *target;
      pos += len;
      continue;
    }
    if (table.default_policy() == DefaultPolicy::kCopy) out += unicode::encode(cps[pos]);
    ++pos;
  }
  return out;
}

std::string round_trip(const MappingTable& fwd, const MappingTable& bwd,
                       std::string_view text) {
  return apply_mapping(bwd, apply_mapping(fwd, text));
}

}  // namespace scripttax
