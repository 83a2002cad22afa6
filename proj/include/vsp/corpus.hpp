#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vsp/sparse_matrix.hpp"

namespace vsp {

// Lowercased maximal runs of ASCII letters and digits; bytes >= 0x80 are kept
// inside tokens so UTF-8 words stay whole.
std::vector<std::string> tokenize(const std::string& text);

struct DocumentTermMatrix {
  SparseMatrix counts;             // documents x vocabulary
  std::vector<std::string> vocab;  // column order (sorted)
  std::vector<std::string> docs;   // row order (sorted file names)
};

// Vocabulary keeps tokens that appear in at least `min_count` documents.
// `binary` records presence instead of counts.
DocumentTermMatrix build_document_term_matrix(const std::vector<std::string>& names,
                                              const std::vector<std::string>& texts, int min_count, bool binary);

// Every regular file in `dir` is one document. Throws DataError on an empty
// corpus, an unreadable file, or an empty vocabulary.
DocumentTermMatrix ingest_corpus(const std::filesystem::path& dir, int min_count, bool binary);

}  // namespace vsp
