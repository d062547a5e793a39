#pragma once
#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <span>

#include "bubblelab/discretization.hpp"

namespace bl {

// Values on interior nodes; zero Dirichlet data is implicit.
class Field {
 public:
  Field() = default;
  explicit Field(DiscPtr d);
  Field(DiscPtr d, Eigen::VectorXd values);

  static Field sample(DiscPtr d, const std::function<double(std::span<const double>)>& f);

  const Discretization& disc() const { return *disc_; }
  const DiscPtr& disc_ptr() const { return disc_; }
  const Eigen::VectorXd& values() const { return v_; }
  Eigen::VectorXd& values() { return v_; }
  size_t size() const { return static_cast<size_t>(v_.size()); }
  double operator[](size_t i) const { return v_[static_cast<long>(i)]; }

  void check_finite() const;
  void check_compatible(const Field& o) const;

  void write_csv(std::ostream& os) const;
  // Reads a field written by write_csv; the header determines the discretization.
  static Field read_csv(std::istream& is);

 private:
  DiscPtr disc_;
  Eigen::VectorXd v_;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field scale(const Field& a, double s);
// sign-preserving power |v|^{p-1} v
Field pointwise_power(const Field& a, double p);
Field positive_part(const Field& a);
Field negative_part(const Field& a);  // max(-v, 0)

}  // namespace bl
