#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace popstat {

[[nodiscard]] bool is_valid_iso3(std::string_view code) noexcept;

/// Country identity. Ordering and equality use the ISO3 code only; the
/// canonical name is descriptive.
class CountryId {
 public:
  CountryId() = default;
  /// Throws Error(BadCountryCode) unless `iso3` matches [A-Z]{3}.
  explicit CountryId(std::string iso3, std::string canonical_name = {});

  [[nodiscard]] const std::string& iso3() const noexcept { return iso3_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }

  friend bool operator==(const CountryId& a, const CountryId& b) noexcept {
    return a.iso3_ == b.iso3_;
  }
  friend std::strong_ordering operator<=>(const CountryId& a,
                                          const CountryId& b) noexcept {
    return a.iso3_ <=> b.iso3_;
  }

 private:
  std::string iso3_;
  std::string name_;
};

}  // namespace popstat
