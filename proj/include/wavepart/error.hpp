#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace wp {

enum class ErrorKind {
  Argument,
  Domain,
  Resolution,
  Singularity,
  Degeneracy,
  Basin,
  Accuracy,
  Pole,
  BlowUp,
  Integrator,
  Wrap,
  Io,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `module` names the component that
/// raised it so the CLI can report "module: message".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

/// Non-fatal conditions (wrap-around risk, refused shortcuts). Default sink
/// writes "warning: module: message" to stderr; tests may redirect it.
void log_warning(const std::string& module, const std::string& message);
void set_warning_sink(std::function<void(const std::string&)> sink);

}  // namespace wp
