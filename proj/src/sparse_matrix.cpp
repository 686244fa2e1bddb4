#include "topicpref/sparse_matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "topicpref/errors.hpp"
#include "topicpref/text.hpp"

namespace topicpref {

Index::Index(std::vector<std::string> ids) : ids_(std::move(ids)) {
  lookup_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!lookup_.emplace(ids_[i], i).second) throw std::invalid_argument("duplicate id in index: " + ids_[i]);
  }
}

std::optional<std::size_t> Index::find(std::string_view id) const {
  auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

SparseMatrix::SparseMatrix(Index users, Index topics, std::vector<Cell> cells)
    : users_(std::move(users)), topics_(std::move(topics)), cells_(std::move(cells)) {
  for (const auto& c : cells_) {
    if (c.row >= users_.size() || c.col >= topics_.size()) {
      throw std::invalid_argument("cell (" + std::to_string(c.row) + ", " + std::to_string(c.col) +
                                  ") outside matrix bounds");
    }
    if (!(c.value >= -1.0 && c.value <= 1.0)) {
      throw std::invalid_argument("cell value outside [-1, 1] at (" + std::to_string(c.row) + ", " +
                                  std::to_string(c.col) + ")");
    }
  }
  std::sort(cells_.begin(), cells_.end(),
            [](const Cell& a, const Cell& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  auto dup = std::adjacent_find(cells_.begin(), cells_.end(),
                                [](const Cell& a, const Cell& b) { return a.row == b.row && a.col == b.col; });
  if (dup != cells_.end()) {
    throw std::invalid_argument("duplicate cell (" + std::to_string(dup->row) + ", " + std::to_string(dup->col) + ")");
  }
}

std::optional<double> SparseMatrix::at(std::size_t row, std::size_t col) const {
  auto it = std::lower_bound(cells_.begin(), cells_.end(), Cell{row, col, 0.0}, [](const Cell& a, const Cell& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  if (it == cells_.end() || it->row != row || it->col != col) return std::nullopt;
  return it->value;
}

std::vector<Cell> SparseMatrix::row_cells(std::size_t row) const {
  auto lo = std::lower_bound(cells_.begin(), cells_.end(), row, [](const Cell& c, std::size_t r) { return c.row < r; });
  auto hi = std::upper_bound(lo, cells_.end(), row, [](std::size_t r, const Cell& c) { return r < c.row; });
  return {lo, hi};
}

std::vector<std::size_t> SparseMatrix::row_counts() const {
  std::vector<std::size_t> counts(rows(), 0);
  for (const auto& c : cells_) ++counts[c.row];
  return counts;
}

namespace {

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_index(const std::filesystem::path& path, const Index& index) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write index file: " + path.string());
  for (std::size_t i = 0; i < index.size(); ++i) out << i << '\t' << index.id(i) << '\n';
  if (!out) throw IoError("write failure: " + path.string());
}

Index read_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open index file: " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError(path.string() + ": line " + std::to_string(ids.size() + 1) + " has no tab");
    if (line.substr(0, tab) != std::to_string(ids.size())) {
      throw FormatError(path.string() + ": ordinals must be consecutive from 0, got '" + line.substr(0, tab) + "'");
    }
    ids.push_back(line.substr(tab + 1));
  }
  try {
    return Index(std::move(ids));
  } catch (const std::invalid_argument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace

void write_matrix_dir(const std::filesystem::path& dir, const SparseMatrix& m) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "matrix.tsv", std::ios::binary);
  if (!out) throw IoError("cannot write " + (dir / "matrix.tsv").string());
  out << "users " << m.rows() << " topics " << m.cols() << " nnz " << m.nnz() << '\n';
  for (const auto& c : m.cells()) out << c.row << '\t' << c.col << '\t' << format_value(c.value) << '\n';
  if (!out) throw IoError("write failure: " + (dir / "matrix.tsv").string());
  write_index(dir / "users.tsv", m.users());
  write_index(dir / "topics.tsv", m.topics());
}

SparseMatrix read_matrix_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("matrix directory not found: " + dir.string());
  auto path = dir / "matrix.tsv";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string w1, w2, w3;
  std::size_t n_users = 0, n_topics = 0, nnz = 0;
  if (!(hs >> w1 >> n_users >> w2 >> n_topics >> w3 >> nnz) || w1 != "users" || w2 != "topics" || w3 != "nnz") {
    throw FormatError(path.string() + ": bad header '" + header + "'");
  }
  auto users = read_index(dir / "users.tsv");
  auto topics = read_index(dir / "topics.tsv");
  if (users.size() != n_users || topics.size() != n_topics) {
    throw FormatError(path.string() + ": header declares " + std::to_string(n_users) + " users / " +
                      std::to_string(n_topics) + " topics, index files hold " + std::to_string(users.size()) + " / " +
                      std::to_string(topics.size()));
  }
  std::vector<Cell> cells;
  cells.reserve(nnz);
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    std::istringstream ls(line);
    Cell c;
    std::string value;
    if (!(ls >> c.row >> c.col >> value)) throw FormatError(path.string() + ": malformed line " + std::to_string(lineno));
    c.value = std::strtod(value.c_str(), nullptr);
    cells.push_back(c);
  }
  if (cells.size() != nnz) {
    throw FormatError(path.string() + ": header declares nnz " + std::to_string(nnz) + " but file holds " +
                      std::to_string(cells.size()) + " cells");
  }
  try {
    return SparseMatrix(std::move(users), std::move(topics), std::move(cells));
  } catch (const std::invalid_argument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace topicpref
