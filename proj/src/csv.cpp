// Copyright 2026 The sfs Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "sfs/experiment.hpp"
#include "sfs/rng.hpp"

namespace sfs {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_cell(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

// Numeric rows of a CSV with a header line. Blank lines are skipped; row
// numbers in errors count data rows from 1.
std::vector<std::vector<double>> parse_rows(std::string_view text, std::size_t& columns,
                                            std::vector<std::string>& header) {
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  bool have_header = false;
  std::size_t row = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto cells = split_cells(line);
    if (!have_header) {
      for (auto c : cells) header.emplace_back(c);
      columns = cells.size();
      have_header = true;
      continue;
    }
    ++row;
    if (cells.size() != columns)
      throw InvalidArgument("row " + std::to_string(row) + ": expected " +
                            std::to_string(columns) + " columns, found " +
                            std::to_string(cells.size()));
    std::vector<double> values(columns);
    for (std::size_t j = 0; j < columns; ++j) {
      const auto v = parse_cell(cells[j]);
      if (!v)
        throw InvalidArgument("row " + std::to_string(row) + ", column '" + header[j] +
                              "': not a finite number: '" + std::string(cells[j]) + "'");
      values[j] = *v;
    }
    rows.push_back(std::move(values));
    if (end == text.size()) break;
  }
  if (!have_header) throw InvalidArgument("empty CSV: missing header");
  return rows;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

std::string samples_csv(const Matrix& points) {
  std::string out;
  out.reserve(static_cast<std::size_t>(points.size()) * 20 + 16);
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    if (j) out += ',';
    out += 'x' + std::to_string(j + 1);
  }
  out += '\n';
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      if (j) out += ',';
      out += format_double(points(i, j));
    }
    out += '\n';
  }
  return out;
}

Matrix read_samples_csv(const std::filesystem::path& path) {
  const auto text = read_file(path);
  std::size_t columns = 0;
  std::vector<std::string> header;
  const auto rows = parse_rows(text, columns, header);
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < columns; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

LogisticData parse_logistic_csv(std::string_view text) {
  std::size_t columns = 0;
  std::vector<std::string> header;
  const auto rows = parse_rows(text, columns, header);
  if (columns < 2) throw InvalidArgument("logistic data needs columns x1..xp,y");
  if (header.back() != "y")
    throw InvalidArgument("logistic data: last column must be named 'y'");
  if (rows.empty()) throw InvalidArgument("logistic data has no rows");
  const auto p = static_cast<Eigen::Index>(columns - 1);
  LogisticData data{Matrix(static_cast<Eigen::Index>(rows.size()), p),
                    Vector(static_cast<Eigen::Index>(rows.size()))};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < p; ++j) data.design(r, j) = rows[i][static_cast<std::size_t>(j)];
    const double y = rows[i].back();
    if (y != 0.0 && y != 1.0)
      throw InvalidArgument("row " + std::to_string(i + 1) + ": label must be 0 or 1, got " +
                            format_double(y));
    data.labels[r] = y;
  }
  return data;
}

LogisticData read_logistic_csv(const std::filesystem::path& path) {
  try {
    return parse_logistic_csv(read_file(path));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

std::string logistic_csv(const LogisticData& data) {
  std::string out;
  for (Eigen::Index j = 0; j < data.design.cols(); ++j) out += 'x' + std::to_string(j + 1) + ',';
  out += "y\n";
  for (Eigen::Index i = 0; i < data.design.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.design.cols(); ++j) out += format_double(data.design(i, j)) + ',';
    out += data.labels[i] != 0.0 ? "1\n" : "0\n";
  }
  return out;
}

Matrix empirical_prior_precision(const Matrix& design) {
  if (design.rows() == 0) throw InvalidArgument("empty design matrix");
  return (design.transpose() * design) / static_cast<double>(design.rows());
}

std::shared_ptr<const LogisticPosterior> load_logistic_posterior(
    const std::filesystem::path& path, PriorMode prior, const Matrix& prior_precision) {
  auto data = read_logistic_csv(path);
  Matrix precision;
  if (prior == PriorMode::kEmpirical) {
    precision = empirical_prior_precision(data.design);
    // Collinear columns can leave a tiny positive pivot, so test conditioning too.
    const Eigen::LLT<Matrix> llt(precision);
    if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-12))
      throw InvalidArgument("empirical prior precision is singular; use prior: matrix");
  } else {
    precision = prior_precision;
  }
  return make_logistic_posterior(std::move(data.design), std::move(data.labels),
                                 std::move(precision));
}

Matrix ar1_covariance(std::size_t p, double rho) {
  const auto n = static_cast<Eigen::Index>(p);
  Matrix s(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) s(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
  return s;
}

GeneratedLogistic generate_logistic(std::size_t n, std::size_t p, std::uint64_t seed) {
  if (n == 0 || p == 0) throw InvalidArgument("generate_logistic needs n >= 1 and p >= 1");
  const auto ni = static_cast<Eigen::Index>(n);
  const auto pi = static_cast<Eigen::Index>(p);
  Rng beta_rng = Rng::stream(seed, StreamTag::kData, 0);
  Rng row_rng = Rng::stream(seed, StreamTag::kData, 1);
  GeneratedLogistic out{{Matrix(ni, pi), Vector(ni)}, Vector(pi)};
  beta_rng.fill_normal(out.beta);
  const Matrix chol = Eigen::LLT<Matrix>(ar1_covariance(p, 0.5)).matrixL();
  Vector z(pi);
  for (Eigen::Index i = 0; i < ni; ++i) {
    row_rng.fill_normal(z);
    out.data.design.row(i) = (chol * z).transpose();
    const double prob = sigmoid(out.data.design.row(i).dot(out.beta));
    out.data.labels[i] = row_rng.uniform() < prob ? 1.0 : 0.0;
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move into place: " + path.string());
  }
}

}  // namespace sfs
