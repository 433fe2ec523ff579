#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace scripttax {

enum class Orthography { A, B };

std::string_view to_string(Orthography o);
/// Accepts "A" or "B"; throws ValidationError otherwise.
Orthography parse_orthography(std::string_view s);

struct SentencePair {
  std::string id;
  std::string text_a;
  std::string text_b;

  const std::string& text(Orthography o) const {
    return o == Orthography::A ? text_a : text_b;
  }
  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

enum class CorpusFormat { kTsv, kRecords };

CorpusFormat parse_corpus_format(std::string_view s);

struct CorpusOptions {
  /// Apply canonical composition to both sides before anything counts them.
  bool normalize_nfc = false;
  std::string label_a = "A";
  std::string label_b = "B";
};

/// Content-matched sentence pairs in two orthographies. Immutable once
/// constructed; the constructor enforces n >= 1, unique ids and non-empty
/// sides.
class PairedCorpus {
 public:
  explicit PairedCorpus(std::vector<SentencePair> pairs, std::string label_a = "A",
                        std::string label_b = "B", bool nfc_applied = false);

  const std::vector<SentencePair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  const SentencePair& operator[](std::size_t i) const { return pairs_[i]; }
  const std::string& label_a() const { return label_a_; }
  const std::string& label_b() const { return label_b_; }
  bool nfc_applied() const { return nfc_applied_; }

  /// Index of `id`, or size() if absent.
  std::size_t find(std::string_view id) const;

  /// SHA-256 over ids and texts; independent of the on-disk format.
  std::string content_hash() const;

  friend bool operator==(const PairedCorpus& a, const PairedCorpus& b) {
    return a.pairs_ == b.pairs_ && a.label_a_ == b.label_a_ &&
           a.label_b_ == b.label_b_;
  }

 private:
  std::vector<SentencePair> pairs_;
  std::string label_a_;
  std::string label_b_;
  bool nfc_applied_;
};

PairedCorpus load_paired_corpus(const std::filesystem::path& path,
                                CorpusFormat format,
                                const CorpusOptions& options = {});
PairedCorpus parse_paired_corpus(std::istream& in, CorpusFormat format,
                                 const CorpusOptions& options = {});
void write_paired_corpus(const PairedCorpus& corpus, std::ostream& out,
                         CorpusFormat format);

/// W(x): number of maximal runs of non-whitespace code points.
std::size_t count_words(std::string_view text);

/// C(x): number of Unicode scalar values without the White_Space property.
std::size_t count_chars(std::string_view text);

/// Recorded in report provenance so counts are comparable across runs.
inline constexpr std::string_view kCharCountingUnit = "unicode-scalar-values";
inline constexpr std::string_view kExcludedFromCharCount = "unicode-white-space";
inline constexpr std::string_view kWordBoundary = "maximal-non-whitespace-runs";

}  // namespace scripttax
