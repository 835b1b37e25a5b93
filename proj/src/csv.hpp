#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace popstat::csv {

/// Splits one RFC 4180 record. Quoted fields may contain commas and doubled
/// quotes; embedded newlines are not supported.
std::vector<std::string> split_record(std::string_view line);

/// Quotes a field when it contains a comma, quote or leading/trailing space.
std::string escape(std::string_view field);

class Reader {
 public:
  /// Reads the header line; an empty stream yields an empty header.
  explicit Reader(std::istream& in);

  /// Column index by name, or nullopt.
  [[nodiscard]] std::optional<std::size_t> column(std::string_view name) const;
  /// Throws Error(MissingColumn) naming `name` and `what`.
  [[nodiscard]] std::size_t require(std::string_view name, std::string_view what) const;

  /// Next non-blank record. `line_number()` then refers to it.
  bool next(std::vector<std::string>& fields);
  [[nodiscard]] std::size_t line_number() const noexcept { return line_; }

 private:
  std::istream& in_;
  std::map<std::string, std::size_t, std::less<>> columns_;
  std::size_t line_ = 0;
};

std::optional<double> parse_double(std::string_view text);
std::optional<int> parse_int(std::string_view text);

}  // namespace popstat::csv
