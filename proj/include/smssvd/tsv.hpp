#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "smssvd/types.hpp"

namespace smssvd {

// Input-contract violations the CLI maps to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed cell or structure in a TSV file. row/column are 1-based:
// the file line and the tab-separated field within it.
struct ParseError : InputError {
  ParseError(int row_, int column_, const std::string& message)
      : InputError("row " + std::to_string(row_) + ", column " + std::to_string(column_) + ": " +
                   message),
        row(row_),
        column(column_) {}
  int row;
  int column;
};

// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);  // throws InputError

// Matrix format: UTF-8 TSV, header row = sample ids (corner cell "id"),
// first column = variable ids, locale-independent decimal point.
DataMatrix read_tsv_matrix(const std::filesystem::path& path);
void write_tsv_matrix(const std::filesystem::path& path, const DataMatrix& matrix);

}  // namespace smssvd
