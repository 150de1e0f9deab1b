#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace plgame {

/// Dense real vector used for both players' iterates.
///
/// Public constructors reject empty input and non-finite entries. Arithmetic
/// results are not re-validated so that iteration code can detect divergence
/// with is_finite() instead of unwinding through an exception.
class Vector {
 public:
  explicit Vector(std::size_t dim, double fill = 0.0);
  Vector(std::initializer_list<double> values);
  explicit Vector(std::vector<double> values);

  /// Builds a vector without the finiteness check.
  static Vector unchecked(std::vector<double> values);

  std::size_t size() const noexcept { return data_.size(); }
  double operator[](std::size_t i) const noexcept { return data_[i]; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }

  std::span<const double> values() const noexcept { return data_; }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  bool is_finite() const noexcept;
  double norm() const noexcept;
  double squared_norm() const noexcept;
  double dot(const Vector& other) const;

  /// this += scale * other
  Vector& axpy(double scale, const Vector& other);

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double scale) noexcept;

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  struct Unchecked {};
  Vector(Unchecked, std::vector<double> values) : data_(std::move(values)) {}

  std::vector<double> data_;
};

Vector operator+(Vector lhs, const Vector& rhs);
Vector operator-(Vector lhs, const Vector& rhs);
Vector operator*(double scale, Vector v);
Vector operator*(Vector v, double scale);

/// Euclidean distance.
double distance(const Vector& a, const Vector& b);

std::string to_string(const Vector& v);

}  // namespace plgame
