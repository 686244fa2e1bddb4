#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace topicpref {

// Bijection between string ids and ordinals 0..size()-1.
class Index {
 public:
  Index() = default;
  // Ids must be unique; throws std::invalid_argument otherwise.
  explicit Index(std::vector<std::string> ids);

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  const std::string& id(std::size_t ordinal) const { return ids_.at(ordinal); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::optional<std::size_t> find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id).has_value(); }

  bool operator==(const Index& o) const { return ids_ == o.ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;

  bool operator==(const Cell&) const = default;
};

// User-by-topic matrix with an explicit set of known cells. Cells are kept
// sorted by (row, col) with no duplicates; every value lies in [-1, +1].
class SparseMatrix {
 public:
  SparseMatrix() = default;
  // Validates ranges, sorts, and rejects duplicate coordinates.
  SparseMatrix(Index users, Index topics, std::vector<Cell> cells);

  const Index& users() const noexcept { return users_; }
  const Index& topics() const noexcept { return topics_; }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  std::size_t nnz() const noexcept { return cells_.size(); }
  std::size_t rows() const noexcept { return users_.size(); }
  std::size_t cols() const noexcept { return topics_.size(); }

  std::optional<double> at(std::size_t row, std::size_t col) const;
  // Cells of one row, in column order.
  std::vector<Cell> row_cells(std::size_t row) const;
  // Number of known cells per row.
  std::vector<std::size_t> row_counts() const;

  bool operator==(const SparseMatrix& o) const {
    return users_ == o.users_ && topics_ == o.topics_ && cells_ == o.cells_;
  }

 private:
  Index users_;
  Index topics_;
  std::vector<Cell> cells_;
};

// Directory layout: matrix.tsv (header `users <n> topics <m> nnz <k>` then
// `row<TAB>col<TAB>value`), users.tsv and topics.tsv (`ordinal<TAB>id`).
// Values are written with 17 significant digits so they reload exactly.
void write_matrix_dir(const std::filesystem::path& dir, const SparseMatrix& m);
SparseMatrix read_matrix_dir(const std::filesystem::path& dir);

}  // namespace topicpref
