#include "wavepart/grid.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include "wavepart/error.hpp"

namespace wp {

namespace {
bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument: return "argument";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Degeneracy: return "degeneracy";
    case ErrorKind::Basin: return "basin";
    case ErrorKind::Accuracy: return "accuracy";
    case ErrorKind::Pole: return "pole";
    case ErrorKind::BlowUp: return "blow-up";
    case ErrorKind::Integrator: return "integrator";
    case ErrorKind::Wrap: return "wrap";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, std::string module, const std::string& message)
    : std::runtime_error(module + ": " + to_string(kind) + " error: " + message),
      kind_(kind),
      module_(std::move(module)) {}

Grid3::Grid3(int n, double box_length) : n_(n), length_(box_length) {
  // Powers of two plus multiples of 16 (n = 96 and friends are fast in FFTW).
  if (n < 16 || !(is_power_of_two(n) || n % 16 == 0)) {
    std::ostringstream os;
    os << "grid size n=" << n << " must be >= 16 and a power of two or a multiple of 16";
    throw Error(ErrorKind::Argument, "grid", os.str());
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw Error(ErrorKind::Argument, "grid", "box length must be positive");
  }
  const double two_pi_over_l = 2.0 * std::numbers::pi / length_;
  const double h = length_ / n_;
  k_.resize(n_);
  kd_.resize(n_);
  x_.resize(n_);
  for (int i = 0; i < n_; ++i) {
    k_[i] = two_pi_over_l * mode(i);
    kd_[i] = is_nyquist(i) ? 0.0 : k_[i];
    x_[i] = -0.5 * length_ + i * h;
  }
}

double Grid3::dk() const { return 2.0 * std::numbers::pi / length_; }
double Grid3::cell_volume() const { return std::pow(spacing(), 3); }
double Grid3::mode_volume() const { return std::pow(dk(), 3); }
double Grid3::k_max() const { return std::numbers::pi / spacing(); }

namespace {
std::function<void(const std::string&)>& warning_sink() {
  static std::function<void(const std::string&)> sink = [](const std::string& m) {
    std::cerr << "warning: " << m << '\n';
  };
  return sink;
}
}  // namespace

void log_warning(const std::string& module, const std::string& message) {
  if (warning_sink()) warning_sink()(module + ": " + message);
}

void set_warning_sink(std::function<void(const std::string&)> sink) {
  warning_sink() = std::move(sink);
}

void require_same_grid(const Grid3& a, const Grid3& b, const char* where) {
  if (!(a == b)) throw Error(ErrorKind::Argument, where, "operands live on different grids");
}

}  // namespace wp
