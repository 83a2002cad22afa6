#include "vsp/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "vsp/error.hpp"

namespace vsp {

namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

template <typename T>
T parse_number(const std::string& tok, const std::string& source, long line, const char* what) {
  T value{};
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(source, line, std::string("invalid ") + what + " '" + tok + "'");
  }
  return value;
}

double parse_real(const std::string& tok, const std::string& source, long line) {
  const double v = parse_number<double>(tok, source, line, "value");
  if (!std::isfinite(v)) throw ParseError(source, line, "non-finite value '" + tok + "'");
  return v;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw DataError("error reading " + path.string());
  return buf.str();
}

SparseMatrix parse_matrix_market(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError(source, 1, "empty file");
  ++line_no;
  const auto banner = split_ws(to_lower(line));
  if (banner.size() != 5 || banner[0] != "%%matrixmarket" || banner[1] != "matrix") {
    throw ParseError(source, line_no, "missing %%MatrixMarket matrix banner");
  }
  if (banner[2] != "coordinate") throw ParseError(source, line_no, "only coordinate format is supported");
  if (banner[3] != "real" && banner[3] != "integer") {
    throw ParseError(source, line_no, "field must be real or integer, got '" + banner[3] + "'");
  }
  bool symmetric = false;
  if (banner[4] == "symmetric") {
    symmetric = true;
  } else if (banner[4] != "general") {
    throw ParseError(source, line_no, "symmetry must be general or symmetric, got '" + banner[4] + "'");
  }

  std::int64_t rows = -1, cols = -1, declared = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%' || is_blank(line)) continue;
    const auto tok = split_ws(line);
    if (tok.size() != 3) throw ParseError(source, line_no, "size line must have 3 fields");
    rows = parse_number<std::int64_t>(tok[0], source, line_no, "row count");
    cols = parse_number<std::int64_t>(tok[1], source, line_no, "column count");
    declared = parse_number<std::int64_t>(tok[2], source, line_no, "entry count");
    break;
  }
  if (rows < 0 || cols < 0 || declared < 0) throw ParseError(source, line_no, "missing size line");
  if (symmetric && rows != cols) throw ParseError(source, line_no, "symmetric matrix must be square");

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(symmetric ? 2 * declared : declared));
  std::int64_t seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%' || is_blank(line)) continue;
    const auto tok = split_ws(line);
    if (tok.size() != 3) throw ParseError(source, line_no, "entry line must have 3 fields");
    const auto r = parse_number<std::int64_t>(tok[0], source, line_no, "row index");
    const auto c = parse_number<std::int64_t>(tok[1], source, line_no, "column index");
    const double v = parse_real(tok[2], source, line_no);
    if (r < 1 || r > rows || c < 1 || c > cols) {
      throw ParseError(source, line_no,
                       "index (" + tok[0] + ", " + tok[1] + ") out of range for " +
                           std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
    }
    ++seen;
    if (seen > declared) throw ParseError(source, line_no, "more entries than declared");
    entries.push_back({r - 1, c - 1, v});
    if (symmetric && r != c) entries.push_back({c - 1, r - 1, v});
  }
  if (seen != declared) {
    throw ParseError(source, line_no,
                     "declared " + std::to_string(declared) + " entries, found " + std::to_string(seen));
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(entries));
}

SparseMatrix load_matrix_market(const std::filesystem::path& path) {
  return parse_matrix_market(read_text_file(path), path.string());
}

SparseMatrix parse_tsv_triplets(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  std::int64_t rows = -1, cols = -1;
  std::vector<Triplet> entries;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    if (rows < 0) {
      if (line[0] != '#') throw ParseError(source, line_no, "expected '#rows cols' header");
      const auto tok = split_ws(line.substr(1));
      if (tok.size() != 2) throw ParseError(source, line_no, "header must be '#rows cols'");
      rows = parse_number<std::int64_t>(tok[0], source, line_no, "row count");
      cols = parse_number<std::int64_t>(tok[1], source, line_no, "column count");
      if (rows < 0 || cols < 0) throw ParseError(source, line_no, "negative dimensions");
      continue;
    }
    if (line[0] == '#') continue;
    const auto tok = split_ws(line);
    if (tok.size() != 3) throw ParseError(source, line_no, "entry line must have 3 fields");
    const auto r = parse_number<std::int64_t>(tok[0], source, line_no, "row index");
    const auto c = parse_number<std::int64_t>(tok[1], source, line_no, "column index");
    const double v = parse_real(tok[2], source, line_no);
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw ParseError(source, line_no,
                       "index (" + tok[0] + ", " + tok[1] + ") out of range for " +
                           std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
    }
    entries.push_back({r, c, v});
  }
  if (rows < 0) throw ParseError(source, line_no, "missing '#rows cols' header");
  return SparseMatrix::from_triplets(rows, cols, std::move(entries));
}

SparseMatrix load_tsv_triplets(const std::filesystem::path& path) {
  return parse_tsv_triplets(read_text_file(path), path.string());
}

SparseMatrix load_sparse_matrix(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text.compare(first, 2, "%%") == 0) {
    return parse_matrix_market(text, path.string());
  }
  if (first != std::string::npos && text[first] == '#') return parse_tsv_triplets(text, path.string());
  throw DataError(path.string() + ": unrecognized matrix format");
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (std::int64_t i = 0; i < a.rows(); ++i) {
    for (auto p = offsets[i]; p < offsets[i + 1]; ++p) {
      out << (i + 1) << ' ' << (cols[p] + 1) << ' ' << format_double(vals[p]) << '\n';
    }
  }
  if (!out) throw DataError("error writing " + path.string());
}

void write_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw DataError("error writing " + path.string());
}

void write_csv_column(const std::filesystem::path& path, const Vector& v) {
  write_csv(path, Matrix(v));
}

Matrix read_csv(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const std::string source = path.string();
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    std::vector<double> row;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      std::string cell = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      cell = b == std::string::npos ? std::string() : cell.substr(b, e - b + 1);
      row.push_back(parse_real(cell, source, line_no));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(source, line_no,
                       "ragged row: expected " + std::to_string(rows.front().size()) + " fields, found " +
                           std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace vsp
