#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace popstat {

/// A node of the cause-of-death hierarchy (levels 1..3).
struct CauseId {
  std::string id;
  std::string name;
  int level = 1;
  std::optional<std::string> parent;

  friend bool operator==(const CauseId&, const CauseId&) = default;
};

/// Cause hierarchy keyed by cause id.
class CauseHierarchy {
 public:
  /// Throws Error(UnknownLevel) for levels outside 1..3 and
  /// Error(DuplicateEntry) when an id is re-added with different metadata.
  void add(const CauseId& cause);

  /// Checks parent links: level 1 has no parent, levels 2-3 point to an
  /// existing cause exactly one level up. Returns one message per violation.
  [[nodiscard]] std::vector<std::string> validate() const;

  [[nodiscard]] const CauseId* find(const std::string& id) const;
  [[nodiscard]] std::vector<CauseId> children(const std::string& id) const;
  [[nodiscard]] const std::map<std::string, CauseId>& causes() const noexcept {
    return causes_;
  }

 private:
  std::map<std::string, CauseId> causes_;
};

}  // namespace popstat
