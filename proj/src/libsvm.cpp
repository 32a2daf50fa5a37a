#include "vrprox/libsvm.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace vrprox {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
      line_(line) {}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

double parse_real(std::string_view tok, std::size_t line, const char* what) {
  // from_chars rejects a leading '+', which LIBSVM labels commonly carry.
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty() || !std::isfinite(v)) {
    throw ParseError(line, std::string("malformed ") + what + " '" + std::string(tok) + "'");
  }
  return v;
}

std::size_t parse_index(std::string_view tok, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    throw ParseError(line, "malformed feature index '" + std::string(tok) + "'");
  }
  if (v == 0) throw ParseError(line, "feature indices are 1-based; got 0");
  return v;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> dim_override) {
  struct RawRow {
    std::vector<SparseVector::Entry> entries;
    std::size_t line;
  };
  std::vector<RawRow> raw;
  Dataset ds;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto tokens = split_tokens(view);
    if (tokens.empty()) continue;

    RawRow row{{}, line_no};
    const double label = parse_real(tokens.front(), line_no, "label");
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      const std::string_view tok = tokens[k];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_no, "expected idx:val, got '" + std::string(tok) + "'");
      }
      const std::size_t index = parse_index(tok.substr(0, colon), line_no);
      const double value = parse_real(tok.substr(colon + 1), line_no, "feature value");
      if (!row.entries.empty() && index - 1 <= row.entries.back().index) {
        throw ParseError(line_no, "feature indices must be strictly increasing (index " +
                                      std::to_string(index) + ")");
      }
      max_index = std::max(max_index, index);
      row.entries.push_back({index - 1, value});
    }
    ds.labels.push_back(label);
    raw.push_back(std::move(row));
  }
  if (raw.empty()) throw ParseError(0, "empty dataset");

  ds.dim = max_index;
  if (dim_override) {
    if (*dim_override < max_index) {
      throw ParseError(0, "dimension override " + std::to_string(*dim_override) +
                              " smaller than largest index " + std::to_string(max_index));
    }
    ds.dim = *dim_override;
  }
  ds.rows.reserve(raw.size());
  for (auto& r : raw) ds.rows.emplace_back(ds.dim, std::move(r.entries));
  return ds;
}

Dataset load_libsvm(const std::filesystem::path& path, std::optional<std::size_t> dim_override) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file " + path.string());
  return parse_libsvm(in, dim_override);
}

void write_libsvm(std::ostream& out, const Dataset& ds) {
  char buf[64];
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", ds.labels[i]);
    out << buf;
    for (const auto& e : ds.rows[i].entries()) {
      std::snprintf(buf, sizeof buf, " %zu:%.17g", e.index + 1, e.value);
      out << buf;
    }
    out << '\n';
  }
}

Dataset normalize_rows(const Dataset& ds) {
  Dataset out;
  out.labels = ds.labels;
  out.dim = ds.dim;
  out.rows.reserve(ds.rows.size());
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    double sq = 0.0;
    for (const auto& e : ds.rows[i].entries()) sq += e.value * e.value;
    if (sq == 0.0) throw std::invalid_argument("row " + std::to_string(i) + " is all zeros");
    out.rows.push_back(ds.rows[i].scaled(1.0 / std::sqrt(sq)));
  }
  return out;
}

}  // namespace vrprox
