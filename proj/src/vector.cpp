#include "plgame/vector.hpp"

#include <algorithm>
#include <sstream>

#include "plgame/errors.hpp"

namespace plgame {

namespace {

void require_valid(const std::vector<double>& values) {
  if (values.empty()) throw ValidationError("Vector: dimension must be at least 1");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ValidationError("Vector: entry " + std::to_string(i) + " is not finite");
    }
  }
}

void require_same_size(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw ValidationError("Vector: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
}

}  // namespace

Vector::Vector(std::size_t dim, double fill) : data_(dim, fill) { require_valid(data_); }

Vector::Vector(std::initializer_list<double> values) : data_(values) { require_valid(data_); }

Vector::Vector(std::vector<double> values) : data_(std::move(values)) { require_valid(data_); }

Vector Vector::unchecked(std::vector<double> values) { return Vector(Unchecked{}, std::move(values)); }

bool Vector::is_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

double Vector::squared_norm() const noexcept {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return s;
}

double Vector::norm() const noexcept {
  if (data_.size() == 1) return std::abs(data_[0]);
  return std::sqrt(squared_norm());
}

double Vector::dot(const Vector& other) const {
  require_same_size(*this, other);
  double s = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) s += data_[i] * other.data_[i];
  return s;
}

Vector& Vector::axpy(double scale, const Vector& other) {
  require_same_size(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
  return *this;
}

Vector& Vector::operator+=(const Vector& other) {
  require_same_size(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  require_same_size(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Vector& Vector::operator*=(double scale) noexcept {
  for (double& x : data_) x *= scale;
  return *this;
}

Vector operator+(Vector lhs, const Vector& rhs) { return lhs += rhs; }
Vector operator-(Vector lhs, const Vector& rhs) { return lhs -= rhs; }
Vector operator*(double scale, Vector v) { return v *= scale; }
Vector operator*(Vector v, double scale) { return v *= scale; }

double distance(const Vector& a, const Vector& b) { return (a - b).norm(); }

std::string to_string(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  os << ')';
  return os.str();
}

}  // namespace plgame
