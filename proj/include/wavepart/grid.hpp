#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace wp {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using SpectralData = std::vector<cplx>;
using RealData = std::vector<double>;

/// Uniform periodic discretization of the cube [-L/2, L/2)^3.
///
/// Axis index i maps to the coordinate x_i = -L/2 + i h and to the FFT mode
/// m(i) = i for i < n/2, i - n otherwise, with wavenumber k = 2 pi m / L.
/// The Nyquist mode m = -n/2 keeps its wavenumber in even symbols (k^2) but
/// is zeroed in odd symbols (derivatives, shifts) so real fields stay real.
class Grid3 {
 public:
  /// Empty placeholder grid (n = 0); only valid as an assignment target.
  Grid3() = default;
  Grid3(int n, double box_length);

  int n() const { return n_; }
  double box_length() const { return length_; }
  double spacing() const { return length_ / n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }
  double dk() const;
  double cell_volume() const;
  double mode_volume() const;
  double k_max() const;

  int mode(int i) const { return i < n_ / 2 ? i : i - n_; }
  bool is_nyquist(int i) const { return i == n_ / 2; }

  std::span<const double> k_axis() const { return k_; }
  std::span<const double> kd_axis() const { return kd_; }
  std::span<const double> x_axis() const { return x_; }

  std::size_t index(int i, int j, int l) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + l;
  }

  /// Wavevector with Nyquist components zeroed (odd-symbol convention).
  Vec3 kd(int i, int j, int l) const { return {kd_[i], kd_[j], kd_[l]}; }
  Vec3 k(int i, int j, int l) const { return {k_[i], k_[j], k_[l]}; }
  double k2(int i, int j, int l) const { return k_[i] * k_[i] + k_[j] * k_[j] + k_[l] * k_[l]; }
  Vec3 x(int i, int j, int l) const { return {x_[i], x_[j], x_[l]}; }

  bool operator==(const Grid3& other) const {
    return n_ == other.n_ && length_ == other.length_;
  }

 private:
  int n_ = 0;
  double length_ = 0.0;
  std::vector<double> k_;
  std::vector<double> kd_;
  std::vector<double> x_;
};

/// Throws wp::Error{Argument} when the grids differ.
void require_same_grid(const Grid3& a, const Grid3& b, const char* where);

}  // namespace wp
