#include "vsp/corpus.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "vsp/error.hpp"
#include "vsp/matrix_io.hpp"

namespace vsp {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    const bool word = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
    if (word) {
      cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

DocumentTermMatrix build_document_term_matrix(const std::vector<std::string>& names,
                                              const std::vector<std::string>& texts, int min_count, bool binary) {
  if (names.size() != texts.size()) throw std::invalid_argument("names and texts differ in length");
  if (texts.empty()) throw DataError("empty corpus");
  std::vector<std::map<std::string, int>> per_doc(texts.size());
  std::map<std::string, int> doc_freq;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    for (auto& tok : tokenize(texts[i])) ++per_doc[i][tok];
    for (const auto& [tok, count] : per_doc[i]) ++doc_freq[tok];
  }
  DocumentTermMatrix out;
  std::map<std::string, std::int64_t> column;
  for (const auto& [tok, df] : doc_freq) {
    if (df >= min_count) {
      column[tok] = static_cast<std::int64_t>(out.vocab.size());
      out.vocab.push_back(tok);
    }
  }
  if (out.vocab.empty()) throw DataError("empty vocabulary (min-count " + std::to_string(min_count) + ")");
  std::vector<Triplet> entries;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    for (const auto& [tok, count] : per_doc[i]) {
      const auto it = column.find(tok);
      if (it != column.end()) {
        entries.push_back({static_cast<std::int64_t>(i), it->second, binary ? 1.0 : static_cast<double>(count)});
      }
    }
  }
  out.counts = SparseMatrix::from_triplets(static_cast<std::int64_t>(texts.size()),
                                           static_cast<std::int64_t>(out.vocab.size()), std::move(entries));
  out.docs = names;
  return out;
}

DocumentTermMatrix ingest_corpus(const std::filesystem::path& dir, int min_count, bool binary) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw DataError("corpus directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  if (ec) throw DataError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("empty corpus: no files in " + dir.string());
  std::vector<std::string> names, texts;
  for (const auto& f : files) {
    names.push_back(f.filename().string());
    texts.push_back(read_text_file(f));
  }
  return build_document_term_matrix(names, texts, min_count, binary);
}

}  // namespace vsp
