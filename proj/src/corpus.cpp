#include "scripttax/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "scripttax/digest.hpp"
#include "scripttax/errors.hpp"
#include "scripttax/unicode.hpp"

namespace scripttax {

std::string_view to_string(Orthography o) {
  return o == Orthography::A ? "A" : "B";
}

Orthography parse_orthography(std::string_view s) {
  if (s == "A") return Orthography::A;
  if (s == "B") return Orthography::B;
  throw ValidationError("orthography must be \"A\" or \"B\", got \"" +
                        std::string(s) + "\"");
}

CorpusFormat parse_corpus_format(std::string_view s) {
  if (s == "tsv") return CorpusFormat::kTsv;
  if (s == "records" || s == "jsonl") return CorpusFormat::kRecords;
  throw ValidationError("unknown corpus format \"" + std::string(s) +
                        "\" (expected tsv or records)");
}

std::size_t count_words(std::string_view text) {
  std::size_t words = 0;
  bool in_run = false;
  for (char32_t cp : unicode::decode(text)) {
    const bool ws = unicode::is_whitespace(cp);
    if (!ws && !in_run) ++words;
    in_run = !ws;
  }
  return words;
}

std::size_t count_chars(std::string_view text) {
  std::size_t chars = 0;
  for (char32_t cp : unicode::decode(text)) {
    if (!unicode::is_whitespace(cp)) ++chars;
  }
  return chars;
}

namespace {

// Returns an empty string when the pair is acceptable, otherwise the reason.
std::string pair_problem(const SentencePair& p) {
  if (p.id.empty()) return "empty id";
  try {
    if (count_words(p.text_a) == 0) return "empty text_a for id \"" + p.id + "\"";
    if (count_words(p.text_b) == 0) return "empty text_b for id \"" + p.id + "\"";
  } catch (const ParseError& e) {
    return std::string(e.what()) + " in id \"" + p.id + "\"";
  }
  return {};
}

}  // namespace

PairedCorpus::PairedCorpus(std::vector<SentencePair> pairs, std::string label_a,
                           std::string label_b, bool nfc_applied)
    : pairs_(std::move(pairs)),
      label_a_(std::move(label_a)),
      label_b_(std::move(label_b)),
      nfc_applied_(nfc_applied) {
  if (pairs_.empty()) throw ValidationError("corpus has no sentence pairs");
  std::unordered_map<std::string_view, std::size_t> seen;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (auto problem = pair_problem(pairs_[i]); !problem.empty()) {
      throw ValidationError("pair " + std::to_string(i + 1) + ": " + problem);
    }
    auto [it, inserted] = seen.emplace(pairs_[i].id, i);
    if (!inserted) {
      throw ValidationError("duplicate id \"" + pairs_[i].id + "\" at pairs " +
                            std::to_string(it->second + 1) + " and " +
                            std::to_string(i + 1));
    }
  }
}

std::size_t PairedCorpus::find(std::string_view id) const {
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (pairs_[i].id == id) return i;
  }
  return pairs_.size();
}

std::string PairedCorpus::content_hash() const {
  std::string buf;
  for (const auto& p : pairs_) {
    // Length-prefixed fields so no separator choice can collide.
    for (const std::string* f : {&p.id, &p.text_a, &p.text_b}) {
      buf += std::to_string(f->size());
      buf += ':';
      buf += *f;
    }
  }
  return sha256_hex(buf);
}

PairedCorpus parse_paired_corpus(std::istream& in, CorpusFormat format,
                                 const CorpusOptions& options) {
  std::vector<SentencePair> pairs;
  std::vector<std::size_t> line_of;
  std::vector<std::string> parse_issues;
  std::vector<std::string> validation_issues;
  std::size_t first_parse_line = 0;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fail_parse = [&](const std::string& why) {
      if (!first_parse_line) first_parse_line = lineno;
      parse_issues.push_back("line " + std::to_string(lineno) + ": " + why);
    };

    SentencePair pair;
    if (format == CorpusFormat::kTsv) {
      std::vector<std::string> cols;
      std::size_t start = 0;
      for (;;) {
        auto tab = line.find('\t', start);
        cols.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (cols.size() != 3) {
        fail_parse("expected 3 tab-separated columns (id, text_a, text_b), got " +
                   std::to_string(cols.size()));
        continue;
      }
      pair = {std::move(cols[0]), std::move(cols[1]), std::move(cols[2])};
    } else {
      try {
        auto j = nlohmann::json::parse(line);
        if (!j.is_object()) throw std::runtime_error("record is not an object");
        for (const char* key : {"id", "text_a", "text_b"}) {
          if (!j.contains(key) || !j[key].is_string()) {
            throw std::runtime_error(std::string("missing string field \"") +
                                     key + "\"");
          }
        }
        pair = {j["id"].get<std::string>(), j["text_a"].get<std::string>(),
                j["text_b"].get<std::string>()};
      } catch (const std::exception& e) {
        fail_parse(e.what());
        continue;
      }
    }

    try {
      unicode::decode(pair.id);
      if (options.normalize_nfc) {
        pair.text_a = unicode::normalize_nfc(pair.text_a);
        pair.text_b = unicode::normalize_nfc(pair.text_b);
      }
    } catch (const ParseError& e) {
      fail_parse(e.what());
      continue;
    }
    if (auto problem = pair_problem(pair); !problem.empty()) {
      validation_issues.push_back("line " + std::to_string(lineno) + ": " + problem);
      continue;
    }
    pairs.push_back(std::move(pair));
    line_of.push_back(lineno);
  }

  auto join = [](const std::vector<std::string>& issues) {
    std::string msg;
    for (const auto& s : issues) msg += (msg.empty() ? "" : "; ") + s;
    return msg;
  };
  if (!parse_issues.empty()) {
    throw ParseError("malformed corpus: " + join(parse_issues), first_parse_line);
  }

  std::unordered_map<std::string, std::size_t> first_line;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [it, inserted] = first_line.emplace(pairs[i].id, line_of[i]);
    if (!inserted) {
      validation_issues.push_back("duplicate id \"" + pairs[i].id + "\" on lines " +
                                  std::to_string(it->second) + " and " +
                                  std::to_string(line_of[i]));
    }
  }
  if (!validation_issues.empty()) {
    throw ValidationError("invalid corpus: " + join(validation_issues));
  }
  if (pairs.empty()) throw ValidationError("corpus has no sentence pairs");
  return PairedCorpus(std::move(pairs), options.label_a, options.label_b,
                      options.normalize_nfc);
}

PairedCorpus load_paired_corpus(const std::filesystem::path& path,
                                CorpusFormat format, const CorpusOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  return parse_paired_corpus(in, format, options);
}

void write_paired_corpus(const PairedCorpus& corpus, std::ostream& out,
                         CorpusFormat format) {
  for (const auto& p : corpus.pairs()) {
    if (format == CorpusFormat::kTsv) {
      for (const std::string* f : {&p.id, &p.text_a, &p.text_b}) {
        if (f->find_first_of("\t\n") != std::string::npos) {
          throw ValidationError("id \"" + p.id +
                                "\" contains a tab or newline; not representable "
                                "as TSV");
        }
      }
      out << p.id << '\t' << p.text_a << '\t' << p.text_b << '\n';
    } else {
      nlohmann::ordered_json j;
      j["id"] = p.id;
      j["text_a"] = p.text_a;
      j["text_b"] = p.text_b;
      out << j.dump() << '\n';
    }
  }
  if (!out) throw IoError("failed writing corpus");
}

}  // namespace scripttax
