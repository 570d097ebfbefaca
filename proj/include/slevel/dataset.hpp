#pragma once

// Sparse row-major datasets in LIBSVM text format.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace slevel {

// CSR matrix with 1-based column indices kept as in the file. Labels are
// relabeled to 0..K-1 in first-seen order; original_labels maps back.
class DatasetMatrix {
 public:
  std::size_t rows() const { return row_ptr_.size() - 1; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t nonzeros() const { return indices_.size(); }
  std::size_t num_classes() const { return original_labels_.size(); }

  std::span<const std::int32_t> row_indices(std::size_t r) const {
    return {indices_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  int label(std::size_t r) const { return labels_[r]; }
  const std::vector<int>& labels() const { return labels_; }
  double original_label(int cls) const { return original_labels_.at(static_cast<std::size_t>(cls)); }
  const std::vector<double>& original_labels() const { return original_labels_; }

  // Row ids of each class, in row order.
  std::vector<std::vector<std::size_t>> class_partition() const;

  // Appends a row. Indices must be 1-based and strictly increasing.
  void add_row(double original_label, std::span<const std::int32_t> idx,
               std::span<const double> val);
  // Raises the declared feature dimension (never lowers it below the data).
  void set_feature_dim(std::size_t d);

  // Dense copy of one row (feature j at position j - 1).
  std::vector<double> dense_row(std::size_t r) const;

  // Rows [ids] as a new matrix with labels re-derived in first-seen order.
  DatasetMatrix subset(std::span<const std::size_t> ids) const;

 private:
  std::size_t feature_dim_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::int32_t> indices_;
  std::vector<double> values_;
  std::vector<int> labels_;
  std::vector<double> original_labels_;
};

// Parses "label idx:val idx:val ..." lines; '#' starts a comment. Blank
// lines are skipped. Errors are ParseError with the 1-based line number.
DatasetMatrix parse_libsvm(std::istream& in,
                           std::optional<std::size_t> feature_dim = std::nullopt);
DatasetMatrix load_libsvm(const std::string& path,
                          std::optional<std::size_t> feature_dim = std::nullopt);

// Shortest round-trip decimal for every number.
void serialize_libsvm(const DatasetMatrix& data, std::ostream& out);

std::string format_double(double v);

}  // namespace slevel
