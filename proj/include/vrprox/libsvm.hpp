#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vrprox/core_math.hpp"

namespace vrprox {

/// Malformed LIBSVM input. line() is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dataset {
  std::vector<SparseVector> rows;
  std::vector<double> labels;
  std::size_t dim = 0;

  std::size_t size() const { return rows.size(); }
  bool operator==(const Dataset&) const = default;
};

/// Parses "label idx:val idx:val ..." lines with 1-based strictly increasing
/// indices. Blank lines and '#' comments are skipped. dim is the largest
/// index seen unless dim_override is given (which must cover every index).
Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> dim_override = std::nullopt);
Dataset load_libsvm(const std::filesystem::path& path,
                    std::optional<std::size_t> dim_override = std::nullopt);

/// Writes rows with 17 significant digits so parse_libsvm reproduces them.
void write_libsvm(std::ostream& out, const Dataset& ds);

/// Scales every row to unit Euclidean norm. Throws std::invalid_argument
/// naming the first all-zero row.
Dataset normalize_rows(const Dataset& ds);

}  // namespace vrprox
