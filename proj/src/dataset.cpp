#include "semibvm/dataset.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "semibvm/error.hpp"

namespace semibvm {

void Dataset::validate() const {
  const Eigen::Index rows = y.size();
  if (rows < 1) {
    fail(ErrorKind::InvalidInput, "dataset has no rows");
  }
  if (u.rows() != rows || v.rows() != rows) {
    fail(ErrorKind::InvalidInput, "U, V and Y disagree in row count");
  }
  if (u.cols() < 1 || v.cols() < 1) {
    fail(ErrorKind::InvalidInput, "dataset needs p >= 1 and d >= 1");
  }
  if (!u.allFinite() || !v.allFinite() || !y.allFinite()) {
    fail(ErrorKind::InvalidInput, "dataset contains non-finite values");
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return fields;
}

} // namespace

Dataset read_dataset_csv(std::istream &in) {
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorKind::InvalidInput, "data CSV is empty");
  }
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "y") {
    fail(ErrorKind::InvalidInput, "data CSV header must start with 'y'");
  }
  std::size_t p = 0;
  std::size_t d = 0;
  for (std::size_t k = 1; k < header.size(); ++k) {
    const std::string &name = header[k];
    const std::string expected_u = "u" + std::to_string(p + 1);
    const std::string expected_v = "v" + std::to_string(d + 1);
    if (d == 0 && name == expected_u) {
      ++p;
    } else if (name == expected_v) {
      ++d;
    } else {
      fail(ErrorKind::InvalidInput, "unexpected data CSV column '" + name + "'");
    }
  }
  if (p == 0 || d == 0) {
    fail(ErrorKind::InvalidInput, "data CSV needs at least one u and one v column");
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      fail(ErrorKind::InvalidInput,
           "data CSV line " + std::to_string(line_no) + " has wrong field count");
    }
    std::vector<double> row;
    for (const auto &f : fields) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(f, &used));
        if (used != f.size()) {
          throw std::invalid_argument(f);
        }
      } catch (const std::exception &) {
        fail(ErrorKind::InvalidInput,
             "data CSV line " + std::to_string(line_no) + ": bad number '" + f + "'");
      }
    }
    rows.push_back(std::move(row));
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  Dataset data;
  data.y.resize(n);
  data.u.resize(n, static_cast<Eigen::Index>(p));
  data.v.resize(n, static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &row = rows[static_cast<std::size_t>(i)];
    data.y[i] = row[0];
    for (std::size_t s = 0; s < p; ++s) {
      data.u(i, static_cast<Eigen::Index>(s)) = row[1 + s];
    }
    for (std::size_t k = 0; k < d; ++k) {
      data.v(i, static_cast<Eigen::Index>(k)) = row[1 + p + k];
    }
  }
  data.validate();
  return data;
}

Dataset read_dataset_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorKind::Io, "cannot open data file " + path);
  }
  return read_dataset_csv(in);
}

void write_dataset_csv(const Dataset &data, std::ostream &out) {
  out << "y";
  for (Eigen::Index s = 0; s < data.p(); ++s) {
    out << ",u" << s + 1;
  }
  for (Eigen::Index k = 0; k < data.d(); ++k) {
    out << ",v" << k + 1;
  }
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << data.y[i];
    for (Eigen::Index s = 0; s < data.p(); ++s) {
      out << ',' << data.u(i, s);
    }
    for (Eigen::Index k = 0; k < data.d(); ++k) {
      out << ',' << data.v(i, k);
    }
    out << '\n';
  }
}

} // namespace semibvm
