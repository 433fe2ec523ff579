#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace scripttax {

enum class DefaultPolicy { kCopy, kDrop };

struct MappingRule {
  std::string source;
  std::string target;
};

/// Ordered rewrite rules applied by a longest-match-first transducer.
/// Sources are unique, non-empty and whitespace-free.
class MappingTable {
 public:
  MappingTable(std::string direction_label, std::vector<MappingRule> rules,
               DefaultPolicy default_policy = DefaultPolicy::kCopy);

  const std::string& direction_label() const { return label_; }
  const std::vector<MappingRule>& rules() const { return rules_; }
  DefaultPolicy default_policy() const { return policy_; }

  /// Longest source matching `text` at `pos`; returns the matched length in
  /// code points (0 if none) and stores the target in `*target`.
  std::size_t match(std::u32string_view text, std::size_t pos,
                    const std::string** target) const;

 private:
  std::string label_;
  std::vector<MappingRule> rules_;
  DefaultPolicy policy_;
  std::unordered_map<std::u32string, std::size_t> index_;
  std::size_t max_source_len_ = 0;
};

/// Rule file: `source<TAB>target` per line, `#` comments, blank lines ignored.
MappingTable load_mapping(const std::filesystem::path& path,
                          DefaultPolicy default_policy = DefaultPolicy::kCopy);

std::string apply_mapping(const MappingTable& table, std::string_view text);

/// bwd(fwd(text)).
std::string round_trip(const MappingTable& fwd, const MappingTable& bwd,
                       std::string_view text);

}  // namespace scripttax
