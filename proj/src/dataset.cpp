#include "causalbounds/dataset.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "causalbounds/error.hpp"

namespace cbounds {

std::string_view to_string(Arm arm) { return arm == Arm::Treated ? "treated" : "control"; }

Dataset::Dataset(Eigen::VectorXd y, Eigen::VectorXd z, Eigen::MatrixXd x,
                 std::vector<std::string> names)
    : y_(std::move(y)), z_(std::move(z)), x_(std::move(x)), names_(std::move(names)) {
  if (z_.size() != y_.size() || x_.rows() != y_.size()) {
    throw Error(ErrorCode::InvalidArgument, "y, z and x must have the same number of rows");
  }
  if (y_.size() < 2) throw Error(ErrorCode::InvalidArgument, "a dataset needs at least 2 units");
  if (x_.cols() < 1) throw Error(ErrorCode::MissingColumn, "at least one covariate is required");
  if (names_.empty()) {
    for (Eigen::Index j = 0; j < x_.cols(); ++j) names_.push_back("x" + std::to_string(j + 1));
  }
  if (names_.size() != static_cast<std::size_t>(x_.cols())) {
    throw Error(ErrorCode::InvalidArgument, "one covariate name per column expected");
  }
  if (!y_.allFinite() || !x_.allFinite()) {
    throw Error(ErrorCode::NonFiniteValue, "outcome and covariates must be finite");
  }
  std::size_t treated = 0;
  for (Eigen::Index i = 0; i < z_.size(); ++i) {
    if (z_[i] == 1.0) {
      ++treated;
    } else if (z_[i] != 0.0) {
      throw Error(ErrorCode::NonBinaryTreatment,
                  "treatment must be 0 or 1 (row " + std::to_string(i + 1) + ")");
    }
  }
  if (treated == 0 || treated == n()) {
    throw Error(ErrorCode::EmptyArm, "both treated and control units are required");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::VectorXd y(m), z(m);
  Eigen::MatrixXd x(m, x_.cols());
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto i = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)]);
    if (i >= y_.size()) throw Error(ErrorCode::InvalidArgument, "row index out of range");
    y[r] = y_[i];
    z[r] = z_[i];
    x.row(r) = x_.row(i);
  }
  return Dataset(std::move(y), std::move(z), std::move(x), names_);
}

Dataset Dataset::standardized() const {
  Eigen::MatrixXd x = x_;
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    x.col(j).array() -= mean;
    const double sd = std::sqrt(x.col(j).squaredNorm() / (n - 1.0));
    if (sd > 0.0) x.col(j) /= sd;
  }
  return Dataset(y_, z_, std::move(x), names_);
}

ArmIndices split_arms(const Dataset& d) {
  ArmIndices arms;
  for (std::size_t i = 0; i < d.n(); ++i) {
    (d.treated(i) ? arms.treated : arms.control).push_back(i);
  }
  return arms;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_real(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::NonFiniteValue,
                "line " + std::to_string(line_no) + ": '" + std::string(field) + "' is not a finite number");
  }
  return value;
}

}  // namespace

Dataset read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw Error(ErrorCode::MissingColumn, "empty CSV input");

  const auto header = split_fields(line);
  std::optional<std::size_t> y_col, z_col;
  std::vector<std::size_t> cov_cols;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "y") {
      y_col = c;
    } else if (header[c] == "z") {
      z_col = c;
    } else {
      cov_cols.push_back(c);
      names.emplace_back(header[c]);
    }
  }
  if (!y_col) throw Error(ErrorCode::MissingColumn, "no column named 'y'");
  if (!z_col) throw Error(ErrorCode::MissingColumn, "no column named 'z'");
  if (cov_cols.empty()) throw Error(ErrorCode::MissingColumn, "no covariate columns");

  std::vector<double> ys, zs, xs;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::MissingColumn, "line " + std::to_string(line_no) + ": expected " +
                                                std::to_string(header.size()) + " fields");
    }
    ys.push_back(parse_real(fields[*y_col], line_no));
    const double z = parse_real(fields[*z_col], line_no);
    if (z != 0.0 && z != 1.0) {
      throw Error(ErrorCode::NonBinaryTreatment, "line " + std::to_string(line_no) + ": z must be 0 or 1");
    }
    zs.push_back(z);
    for (const auto c : cov_cols) xs.push_back(parse_real(fields[c], line_no));
  }

  const auto n = static_cast<Eigen::Index>(ys.size());
  const auto k = static_cast<Eigen::Index>(cov_cols.size());
  Eigen::MatrixXd x = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      xs.data(), n, k);
  return Dataset(Eigen::Map<Eigen::VectorXd>(ys.data(), n), Eigen::Map<Eigen::VectorXd>(zs.data(), n),
                 std::move(x), std::move(names));
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_csv(in);
}

namespace {

void put_real(std::ostream& out, double v) {
  std::array<char, 40> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  out.write(buf.data(), ptr - buf.data());
}

}  // namespace

void write_csv(const Dataset& d, std::ostream& out) {
  out << "y,z";
  for (const auto& name : d.names()) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < d.n(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    put_real(out, d.y()[r]);
    out << ',' << (d.treated(i) ? '1' : '0');
    for (Eigen::Index j = 0; j < d.x().cols(); ++j) {
      out << ',';
      put_real(out, d.x()(r, j));
    }
    out << '\n';
  }
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_csv(d, out);
}

void SensitivityConfig::validate() const {
  if (!(delta > 0.0 && delta < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 0.5)");
  }
  if (lambda && !(*lambda >= 1.0 && std::isfinite(*lambda))) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be a finite value >= 1");
  }
}

}  // namespace cbounds
