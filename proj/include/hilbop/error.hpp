#pragma once

#include <stdexcept>
#include <string>

namespace hilbop {

/// Base class for every error raised by the library. The tag names the
/// module and the failure kind, e.g. "measure_core/divergence".
class error : public std::runtime_error {
 public:
  error(std::string tag, const std::string& what)
      : std::runtime_error(what), tag_(std::move(tag)) {}
  const std::string& tag() const noexcept { return tag_; }

 private:
  std::string tag_;
};

struct divergence_error : error {
  divergence_error(const std::string& module, const std::string& what)
      : error(module + "/divergence", what) {}
};

struct convergence_error : error {
  convergence_error(const std::string& module, const std::string& what)
      : error(module + "/non_convergence", what) {}
};

struct precision_error : error {
  precision_error(const std::string& module, const std::string& what)
      : error(module + "/precision", what) {}
};

struct parameter_error : error {
  parameter_error(const std::string& module, const std::string& what)
      : error(module + "/parameter", what) {}
};

struct truncation_error : error {
  truncation_error(const std::string& module, const std::string& what)
      : error(module + "/truncation", what) {}
};

struct gate_error : error {
  gate_error(const std::string& module, const std::string& what)
      : error(module + "/gate", what) {}
};

enum class Verdict { holds, fails, inconclusive };
enum class Finiteness { finite, infinite, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    default: return "inconclusive";
  }
}

inline const char* to_string(Finiteness f) {
  switch (f) {
    case Finiteness::finite: return "finite";
    case Finiteness::infinite: return "infinite";
    default: return "inconclusive";
  }
}

}  // namespace hilbop
