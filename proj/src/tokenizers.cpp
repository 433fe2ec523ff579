#include "scripttax/tokenizers.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>

#include "scripttax/digest.hpp"
#include "scripttax/errors.hpp"
#include "scripttax/unicode.hpp"

namespace scripttax {

namespace {

std::string merge_key(std::string_view left, std::string_view right) {
  std::string key = std::to_string(left.size());
  key += ':';
  key += left;
  key += right;
  return key;
}

bool is_single_code_point(std::string_view s) {
  return unicode::code_point_offsets(s).size() == 2;
}

std::string trim_ascii(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::ifstream open_or_throw(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string("cannot open ") + what + " " + path.string());
  return in;
}

void check_vocab_line(const std::string& line, std::size_t lineno) {
  if (line.empty()) throw ParseError("empty vocabulary entry", lineno);
  for (char32_t cp : unicode::decode(line)) {
    if (unicode::is_whitespace(cp)) {
      throw ParseError("vocabulary entry \"" + line + "\" contains whitespace",
                       lineno);
    }
  }
}

}  // namespace

std::string_view to_string(TokenizerKind kind) {
  return kind == TokenizerKind::kWordPiece ? "wordpiece" : "bpe";
}

TokenizerSpec TokenizerSpec::wordpiece(std::string name,
                                       std::vector<std::string> vocab,
                                       TokenizerOptions options) {
  TokenizerSpec spec;
  spec.name_ = std::move(name);
  spec.kind_ = TokenizerKind::kWordPiece;
  spec.vocab_ = std::move(vocab);
  spec.options_ = std::move(options);
  spec.build_and_validate();
  return spec;
}

TokenizerSpec TokenizerSpec::bpe(std::string name, std::vector<std::string> vocab,
                                 std::vector<MergeRule> merges,
                                 TokenizerOptions options) {
  TokenizerSpec spec;
  spec.name_ = std::move(name);
  spec.kind_ = TokenizerKind::kBpe;
  spec.vocab_ = std::move(vocab);
  spec.merges_ = std::move(merges);
  spec.options_ = std::move(options);
  spec.build_and_validate();
  return spec;
}

void TokenizerSpec::build_and_validate() {
  if (name_.empty()) throw ValidationError("tokenizer name is empty");
  if (options_.max_word_chars == 0) {
    throw ValidationError("max_word_chars must be positive");
  }
  if (vocab_.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("vocabulary too large");
  }
  for (std::uint32_t i = 0; i < vocab_.size(); ++i) {
    if (vocab_[i].empty()) {
      throw ValidationError("empty vocabulary entry at id " + std::to_string(i));
    }
    auto [it, inserted] = ids_.emplace(vocab_[i], i);
    if (!inserted) {
      throw ValidationError("duplicate vocabulary entry \"" + vocab_[i] +
                            "\" at ids " + std::to_string(it->second) + " and " +
                            std::to_string(i));
    }
  }
  auto unk = ids_.find(options_.unk_token);
  if (unk == ids_.end()) {
    throw ValidationError("unk_token \"" + options_.unk_token +
                          "\" is not in the vocabulary of " + name_);
  }
  unk_id_ = unk->second;

  if (kind_ != TokenizerKind::kBpe) return;
  std::unordered_map<std::string, std::size_t> produced;
  for (std::size_t rank = 0; rank < merges_.size(); ++rank) {
    const auto& m = merges_[rank];
    const std::string label = "merge " + std::to_string(rank + 1) + " (\"" +
                              m.left + " " + m.right + "\")";
    if (m.left.empty() || m.right.empty()) {
      throw ValidationError(label + " has an empty side");
    }
    for (const std::string* part : {&m.left, &m.right}) {
      if (!is_single_code_point(*part) && !produced.contains(*part)) {
        throw ValidationError(label + ": symbol \"" + *part +
                              "\" is not reachable (not a single character and "
                              "not produced by an earlier merge)");
      }
    }
    std::string merged = m.left + m.right;
    if (!ids_.contains(merged)) {
      throw ValidationError(label + ": merged symbol \"" + merged +
                            "\" is not in the vocabulary");
    }
    produced.emplace(std::move(merged), rank);
    // Duplicate rules keep the first (lowest) rank.
    ranks_.emplace(merge_key(m.left, m.right), rank);
  }
}

bool TokenizerSpec::contains(std::string_view token) const {
  return ids_.find(std::string(token)) != ids_.end();
}

std::optional<std::uint32_t> TokenizerSpec::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TokenizerSpec::merge_rank(std::string_view left,
                                                     std::string_view right) const {
  auto it = ranks_.find(merge_key(left, right));
  if (it == ranks_.end()) return std::nullopt;
  return it->second;
}

std::string TokenizerSpec::content_hash() const {
  std::string buf;
  auto field = [&buf](std::string_view s) {
    buf += std::to_string(s.size());
    buf += ':';
    buf += s;
  };
  field(to_string(kind_));
  field(options_.unk_token);
  field(options_.continuation_prefix);
  field(std::to_string(options_.max_word_chars));
  field(std::to_string(vocab_.size()));
  for (const auto& t : vocab_) field(t);
  field(std::to_string(merges_.size()));
  for (const auto& m : merges_) {
    field(m.left);
    field(m.right);
  }
  return sha256_hex(buf);
}

std::vector<std::string> load_vocab_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path, "vocabulary file");
  std::vector<std::string> vocab;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    check_vocab_line(line, lineno);
    vocab.push_back(line);
  }
  return vocab;
}

BpeModel load_bpe_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path, "BPE file");
  enum class Section { kNone, kVocab, kMerges } section = Section::kNone;
  BpeModel model;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "#vocab") {
      section = Section::kVocab;
      continue;
    }
    if (line == "#merges") {
      section = Section::kMerges;
      continue;
    }
    switch (section) {
      case Section::kNone:
        if (line.empty()) continue;
        throw ParseError("content before #vocab section", lineno);
      case Section::kVocab:
        check_vocab_line(line, lineno);
        model.vocab.push_back(line);
        break;
      case Section::kMerges: {
        const auto sp = line.find(' ');
        if (sp == std::string::npos || sp == 0 || sp + 1 == line.size() ||
            line.find(' ', sp + 1) != std::string::npos ||
            line.find('\t') != std::string::npos) {
          throw ParseError("malformed merge rule \"" + line +
                               "\" (expected \"left right\")",
                           lineno);
        }
        model.merges.push_back({line.substr(0, sp), line.substr(sp + 1)});
        break;
      }
    }
  }
  if (section != Section::kMerges) {
    throw ParseError("BPE file " + path.string() + " lacks a #merges section");
  }
  return model;
}

TokenizerSpec load_tokenizer_spec(const std::filesystem::path& manifest) {
  auto in = open_or_throw(manifest, "tokenizer manifest");
  std::unordered_map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string trimmed = trim_ascii(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected key=value in " + manifest.string(), lineno);
    }
    std::string key = trim_ascii(std::string_view(trimmed).substr(0, eq));
    std::string value = trim_ascii(std::string_view(trimmed).substr(eq + 1));
    static const char* kKnown[] = {"name",           "kind",         "unk_token",
                                   "continuation_prefix", "max_word_chars",
                                   "vocab_file",     "bpe_file"};
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      throw ParseError("unknown manifest key \"" + key + "\"", lineno);
    }
    if (!kv.emplace(key, value).second) {
      throw ParseError("manifest key \"" + key + "\" repeated", lineno);
    }
  }

  auto require = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end() || it->second.empty()) {
      throw ValidationError(std::string("manifest ") + manifest.string() +
                            " lacks required key \"" + key + "\"");
    }
    return it->second;
  };

  TokenizerOptions options;
  if (auto it = kv.find("unk_token"); it != kv.end()) options.unk_token = it->second;
  if (auto it = kv.find("continuation_prefix"); it != kv.end()) {
    options.continuation_prefix = it->second;
  }
  if (auto it = kv.find("max_word_chars"); it != kv.end()) {
    const auto& v = it->second;
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc() || ptr != v.data() + v.size() || n == 0) {
      throw ValidationError("max_word_chars must be a positive integer, got \"" +
                            v + "\"");
    }
    options.max_word_chars = n;
  }

  const std::string& name = require("name");
  const std::string& kind = require("kind");
  const auto dir = manifest.parent_path();
  if (kind == "wordpiece") {
    return TokenizerSpec::wordpiece(name, load_vocab_file(dir / require("vocab_file")),
                                    std::move(options));
  }
  if (kind == "bpe") {
    auto model = load_bpe_file(dir / require("bpe_file"));
    return TokenizerSpec::bpe(name, std::move(model.vocab), std::move(model.merges),
                              std::move(options));
  }
  throw ValidationError("unknown tokenizer kind \"" + kind +
                        "\" (expected wordpiece or bpe)");
}

std::vector<std::string> segment_wordpiece(const TokenizerSpec& spec,
                                           std::string_view word) {
  const auto offsets = unicode::code_point_offsets(word);
  const std::size_t n = offsets.size() - 1;
  if (n == 0) return {};
  if (n > spec.max_word_chars()) return {spec.unk_token()};

  std::vector<std::string> pieces;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = n;
    std::string match;
    for (; end > start; --end) {
      std::string candidate =
          start > 0 ? spec.continuation_prefix() : std::string();
      candidate += word.substr(offsets[start], offsets[end] - offsets[start]);
      if (spec.contains(candidate)) {
        match = std::move(candidate);
        break;
      }
    }
    if (end == start) return {spec.unk_token()};
    pieces.push_back(std::move(match));
    start = end;
  }
  return pieces;
}

std::vector<std::string> segment_bpe(const TokenizerSpec& spec,
                                     std::string_view word) {
  const auto offsets = unicode::code_point_offsets(word);
  std::vector<std::string> symbols;
  symbols.reserve(offsets.size());
  for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
    symbols.emplace_back(word.substr(offsets[i], offsets[i + 1] - offsets[i]));
  }

  while (symbols.size() > 1) {
    std::size_t best_rank = std::numeric_limits<std::size_t>::max();
    std::size_t best_at = 0;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto rank = spec.merge_rank(symbols[i], symbols[i + 1]);
      if (rank && *rank < best_rank) {
        best_rank = *rank;
        best_at = i;
      }
    }
    if (best_rank == std::numeric_limits<std::size_t>::max()) break;
    symbols[best_at] += symbols[best_at + 1];
    symbols.erase(symbols.begin() + static_cast<std::ptrdiff_t>(best_at) + 1);
  }

  for (auto& s : symbols) {
    if (!spec.contains(s)) s = spec.unk_token();
  }
  return symbols;
}

std::vector<std::string> segment_word(const TokenizerSpec& spec,
                                      std::string_view word) {
  return spec.kind() == TokenizerKind::kWordPiece ? segment_wordpiece(spec, word)
                                                  : segment_bpe(spec, word);
}

TokenizationResult tokenize_sentence(const TokenizerSpec& spec,
                                     std::string_view text,
                                     std::string sentence_id,
                                     Orthography orthography) {
  const auto words = unicode::split_whitespace(text);
  if (words.empty()) {
    throw ValidationError("sentence \"" + sentence_id + "\" (" +
                          std::string(to_string(orthography)) + ") is empty");
  }
  TokenizationResult r;
  r.sentence_id = std::move(sentence_id);
  r.orthography = orthography;
  for (const auto& w : words) {
    auto pieces = segment_word(spec, w);
    r.tokens.insert(r.tokens.end(), std::make_move_iterator(pieces.begin()),
                    std::make_move_iterator(pieces.end()));
  }
  r.token_count = r.tokens.size();
  r.word_count = words.size();
  r.char_count = count_chars(text);
  r.fertility = static_cast<double>(r.token_count) / static_cast<double>(r.word_count);
  return r;
}

std::vector<TokenizationResult> tokenize_side(const TokenizerSpec& spec,
                                              const PairedCorpus& corpus,
                                              Orthography orthography) {
  std::vector<TokenizationResult> out;
  out.reserve(corpus.size());
  for (const auto& p : corpus.pairs()) {
    out.push_back(tokenize_sentence(spec, p.text(orthography), p.id, orthography));
  }
  return out;
}

}  // namespace scripttax
