#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pedrisk {

enum class Sex { Female = 0, Male = 1, Unknown };
enum class SexRestriction { Any, FemaleOnly, MaleOnly };
enum class PenetKind { Net = 0, Crude = 1 };

inline bool sex_allows(SexRestriction r, Sex s) {
  switch (r) {
    case SexRestriction::Any: return true;
    case SexRestriction::FemaleOnly: return s == Sex::Female;
    case SexRestriction::MaleOnly: return s == Sex::Male;
  }
  return false;
}

// Runtime error carrying a stable machine-readable code
// (e.g. "InvalidParing", "LoopDetected", "MissingColumn").
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace pedrisk
