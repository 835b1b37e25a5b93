#include "popstat/country.hpp"

#include <algorithm>

#include "popstat/error.hpp"

namespace popstat {

bool is_valid_iso3(std::string_view code) noexcept {
  return code.size() == 3 &&
         std::all_of(code.begin(), code.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

CountryId::CountryId(std::string iso3, std::string canonical_name)
    : iso3_(std::move(iso3)), name_(std::move(canonical_name)) {
  if (!is_valid_iso3(iso3_)) {
    throw Error(ErrorKind::BadCountryCode, "invalid iso3 code '" + iso3_ + "'");
  }
}

}  // namespace popstat
