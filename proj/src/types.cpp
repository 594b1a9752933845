#include "smssvd/types.hpp"

#include <stdexcept>
#include <unordered_set>

#include "smssvd/linalg.hpp"

namespace smssvd {

namespace {

void check_distinct(const std::vector<std::string>& ids, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw std::invalid_argument(std::string("duplicate ") + what + " id: " + id);
    }
  }
}

}  // namespace

void validate(const DataMatrix& m) {
  if (m.values.rows() < 1 || m.values.cols() < 1) {
    throw std::invalid_argument("matrix must have at least one row and one column");
  }
  if (!all_finite(m.values)) {
    throw std::invalid_argument("matrix contains non-finite entries");
  }
  if (static_cast<Index>(m.variable_ids.size()) != m.values.rows()) {
    throw std::invalid_argument("variable id count does not match row count");
  }
  if (static_cast<Index>(m.sample_ids.size()) != m.values.cols()) {
    throw std::invalid_argument("sample id count does not match column count");
  }
  check_distinct(m.variable_ids, "variable");
  check_distinct(m.sample_ids, "sample");
}

DataMatrix make_data_matrix(Matrix values) {
  DataMatrix m;
  m.values = std::move(values);
  m.variable_ids.reserve(m.values.rows());
  m.sample_ids.reserve(m.values.cols());
  for (Index i = 0; i < m.values.rows(); ++i) m.variable_ids.push_back("v" + std::to_string(i));
  for (Index j = 0; j < m.values.cols(); ++j) m.sample_ids.push_back("s" + std::to_string(j));
  validate(m);
  return m;
}

}  // namespace smssvd
