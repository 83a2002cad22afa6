#pragma once

#include <filesystem>
#include <string>

#include "vsp/sparse_matrix.hpp"
#include "vsp/types.hpp"

namespace vsp {

// MatrixMarket coordinate files (real or integer field; general or
// symmetric). Indices are 1-based; duplicates are summed and symmetric
// files are expanded to full storage.
SparseMatrix load_matrix_market(const std::filesystem::path& path);
SparseMatrix parse_matrix_market(const std::string& text, const std::string& source = "<string>");

// Plain triplets: a "#rows cols" header line, then row<TAB>col<TAB>value,
// 0-indexed.
SparseMatrix load_tsv_triplets(const std::filesystem::path& path);
SparseMatrix parse_tsv_triplets(const std::string& text, const std::string& source = "<string>");

// Dispatches on content: "%%MatrixMarket" banner or "#" triplet header.
SparseMatrix load_sparse_matrix(const std::filesystem::path& path);

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a);

// Headerless CSV with 17 significant digits.
void write_csv(const std::filesystem::path& path, const Matrix& m);
// One value per line.
void write_csv_column(const std::filesystem::path& path, const Vector& v);
// Rejects ragged rows and non-numeric cells with a ParseError.
Matrix read_csv(const std::filesystem::path& path);

std::string format_double(double x);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace vsp
