#include "slevel/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "slevel/errors.hpp"

namespace slevel {

std::vector<std::vector<std::size_t>> DatasetMatrix::class_partition() const {
  std::vector<std::vector<std::size_t>> parts(num_classes());
  for (std::size_t r = 0; r < rows(); ++r) parts[static_cast<std::size_t>(labels_[r])].push_back(r);
  return parts;
}

void DatasetMatrix::add_row(double original_label, std::span<const std::int32_t> idx,
                            std::span<const double> val) {
  if (idx.size() != val.size()) throw InvalidArgument("row index/value length mismatch");
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 1) throw InvalidArgument("feature indices are 1-based");
    if (k > 0 && idx[k] <= idx[k - 1]) throw InvalidArgument("feature indices must increase");
  }
  auto it = std::find(original_labels_.begin(), original_labels_.end(), original_label);
  int cls;
  if (it == original_labels_.end()) {
    cls = static_cast<int>(original_labels_.size());
    original_labels_.push_back(original_label);
  } else {
    cls = static_cast<int>(it - original_labels_.begin());
  }
  labels_.push_back(cls);
  indices_.insert(indices_.end(), idx.begin(), idx.end());
  values_.insert(values_.end(), val.begin(), val.end());
  row_ptr_.push_back(indices_.size());
  if (!idx.empty()) feature_dim_ = std::max(feature_dim_, static_cast<std::size_t>(idx.back()));
}

void DatasetMatrix::set_feature_dim(std::size_t d) { feature_dim_ = std::max(feature_dim_, d); }

std::vector<double> DatasetMatrix::dense_row(std::size_t r) const {
  std::vector<double> out(feature_dim_, 0.0);
  const auto idx = row_indices(r);
  const auto val = row_values(r);
  for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<std::size_t>(idx[k] - 1)] = val[k];
  return out;
}

DatasetMatrix DatasetMatrix::subset(std::span<const std::size_t> ids) const {
  DatasetMatrix out;
  for (std::size_t r : ids) {
    out.add_row(original_label(labels_.at(r)), row_indices(r), row_values(r));
  }
  out.set_feature_dim(feature_dim_);
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view tok, std::size_t line, const char* what) {
  // from_chars rejects a leading '+', which LIBSVM labels often carry.
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || tok.empty()) {
    throw ParseError(std::string("invalid ") + what + " '" + std::string(tok) + "'", line);
  }
  return v;
}

}  // namespace

DatasetMatrix parse_libsvm(std::istream& in, std::optional<std::size_t> feature_dim) {
  DatasetMatrix out;
  std::string raw;
  std::size_t line = 0;
  std::vector<std::int32_t> idx;
  std::vector<double> val;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s(raw);
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;

    idx.clear();
    val.clear();
    std::size_t pos = 0;
    auto next_token = [&]() -> std::string_view {
      while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
      const std::size_t start = pos;
      while (pos < s.size() && s[pos] != ' ' && s[pos] != '\t') ++pos;
      return s.substr(start, pos - start);
    };
    const double label = parse_number(next_token(), line, "label");
    if (!std::isfinite(label)) throw ParseError("label must be finite", line);
    for (std::string_view tok = next_token(); !tok.empty(); tok = next_token()) {
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("expected index:value, got '" + std::string(tok) + "'", line);
      }
      const std::string_view itok = tok.substr(0, colon);
      std::int32_t index = 0;
      const auto r = std::from_chars(itok.data(), itok.data() + itok.size(), index);
      if (r.ec != std::errc() || r.ptr != itok.data() + itok.size() || itok.empty()) {
        throw ParseError("invalid feature index '" + std::string(itok) + "'", line);
      }
      if (index < 1) throw ParseError("feature index must be at least 1", line);
      if (feature_dim && static_cast<std::size_t>(index) > *feature_dim) {
        throw ParseError("feature index " + std::to_string(index) +
                             " exceeds the declared dimension", line);
      }
      if (!idx.empty() && index <= idx.back()) {
        throw ParseError("feature indices must be strictly increasing", line);
      }
      idx.push_back(index);
      val.push_back(parse_number(tok.substr(colon + 1), line, "feature value"));
    }
    out.add_row(label, idx, val);
  }
  if (out.rows() == 0) throw ParseError("no data rows", line == 0 ? 1 : line);
  if (feature_dim) out.set_feature_dim(*feature_dim);
  return out;
}

DatasetMatrix load_libsvm(const std::string& path, std::optional<std::size_t> feature_dim) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file " + path);
  return parse_libsvm(in, feature_dim);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void serialize_libsvm(const DatasetMatrix& data, std::ostream& out) {
  for (std::size_t r = 0; r < data.rows(); ++r) {
    out << format_double(data.original_label(data.label(r)));
    const auto idx = data.row_indices(r);
    const auto val = data.row_values(r);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      out << ' ' << idx[k] << ':' << format_double(val[k]);
    }
    out << '\n';
  }
}

}  // namespace slevel
