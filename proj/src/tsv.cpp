#include "smssvd/tsv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace smssvd {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end || text.empty()) {
    throw InputError("not a number: '" + text + "'");
  }
  return value;
}

DataMatrix read_tsv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());

  std::string line;
  int line_no = 0;
  std::vector<std::string> sample_ids;
  std::vector<std::string> variable_ids;
  std::vector<std::vector<double>> rows;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (line_no == 1) {
      if (fields.size() < 2) throw ParseError(1, 1, "header must list at least one sample id");
      sample_ids.assign(fields.begin() + 1, fields.end());
      continue;
    }
    if (fields.size() != sample_ids.size() + 1) {
      throw ParseError(line_no, static_cast<int>(fields.size()),
                       "expected " + std::to_string(sample_ids.size() + 1) + " fields, got " +
                           std::to_string(fields.size()));
    }
    variable_ids.push_back(fields[0]);
    std::vector<double> row(sample_ids.size());
    for (size_t j = 1; j < fields.size(); ++j) {
      try {
        row[j - 1] = parse_double(fields[j]);
      } catch (const InputError& e) {
        throw ParseError(line_no, static_cast<int>(j + 1), e.what());
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(std::max(line_no, 1), 1, "no data rows");

  DataMatrix m;
  m.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(sample_ids.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < sample_ids.size(); ++j) {
      m.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  m.variable_ids = std::move(variable_ids);
  m.sample_ids = std::move(sample_ids);
  try {
    validate(m);
  } catch (const std::invalid_argument& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return m;
}

void write_tsv_matrix(const std::filesystem::path& path, const DataMatrix& matrix) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "id";
  for (const auto& id : matrix.sample_ids) out << '\t' << id;
  out << '\n';
  for (Index i = 0; i < matrix.values.rows(); ++i) {
    out << matrix.variable_ids[static_cast<size_t>(i)];
    for (Index j = 0; j < matrix.values.cols(); ++j) {
      out << '\t' << format_double(matrix.values(i, j));
    }
    out << '\n';
  }
}

}  // namespace smssvd
