#include "popstat/cause.hpp"

#include "popstat/error.hpp"

namespace popstat {

void CauseHierarchy::add(const CauseId& cause) {
  if (cause.level < 1 || cause.level > 3) {
    throw Error(ErrorKind::UnknownLevel, "cause '" + cause.id + "' has level " +
                                             std::to_string(cause.level) + ", expected 1-3");
  }
  auto [it, inserted] = causes_.emplace(cause.id, cause);
  if (!inserted && !(it->second == cause)) {
    throw Error(ErrorKind::DuplicateEntry,
                "cause '" + cause.id + "' redefined with different name, level or parent");
  }
}

std::vector<std::string> CauseHierarchy::validate() const {
  std::vector<std::string> problems;
  for (const auto& [id, cause] : causes_) {
    if (cause.level == 1) {
      if (cause.parent) problems.push_back("level-1 cause '" + id + "' has a parent");
      continue;
    }
    if (!cause.parent) {
      problems.push_back("level-" + std::to_string(cause.level) + " cause '" + id +
                         "' has no parent");
      continue;
    }
    const CauseId* parent = find(*cause.parent);
    if (parent == nullptr) {
      problems.push_back("cause '" + id + "' references unknown parent '" + *cause.parent + "'");
    } else if (parent->level != cause.level - 1) {
      problems.push_back("cause '" + id + "' (level " + std::to_string(cause.level) +
                         ") has parent '" + parent->id + "' at level " +
                         std::to_string(parent->level));
    }
  }
  return problems;
}

const CauseId* CauseHierarchy::find(const std::string& id) const {
  auto it = causes_.find(id);
  return it == causes_.end() ? nullptr : &it->second;
}

std::vector<CauseId> CauseHierarchy::children(const std::string& id) const {
  std::vector<CauseId> out;
  for (const auto& [_, cause] : causes_) {
    if (cause.parent && *cause.parent == id) out.push_back(cause);
  }
  return out;
}

}  // namespace popstat
