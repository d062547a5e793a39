#pragma once
#include <Eigen/Sparse>
#include <memory>
#include <span>
#include <vector>

#include "bubblelab/domain.hpp"

namespace bl {

// Discrete Dirichlet problem data shared by the radial P1 elements and the
// Cartesian finite-difference grids:
//   stiffness K  (interior x interior, symmetric, approximates int grad u . grad v)
//   lumped mass W (approximates int u v)
//   boundary coupling B (interior x boundary points): the discrete problem with
//   Dirichlet data g reads (K - lambda W) u = load + B g.
class Discretization {
 public:
  using Sparse = Eigen::SparseMatrix<double>;

  static std::shared_ptr<const Discretization> make(const DomainModel& d, const GridSpec& g);

  int n() const { return domain_.n; }
  size_t size() const { return static_cast<size_t>(W_.size()); }
  const DomainModel& domain() const { return domain_; }
  const GridSpec& grid() const { return grid_; }
  bool radial() const { return grid_.mode == GridMode::Radial1D; }

  std::span<const double> node(size_t i) const {
    return {coords_.data() + i * static_cast<size_t>(n()), static_cast<size_t>(n())};
  }
  size_t boundary_size() const { return static_cast<size_t>(B_.cols()); }
  std::span<const double> boundary_point(size_t j) const {
    return {bcoords_.data() + j * static_cast<size_t>(n()), static_cast<size_t>(n())};
  }

  const Sparse& stiffness() const { return K_; }
  const Eigen::VectorXd& lumped_mass() const { return W_; }
  const Sparse& boundary_coupling() const { return B_; }
  double spacing() const { return h_; }

  // Radial meshes only: all node radii including the boundary node, and the
  // consistent P1 mass matrix on interior nodes.
  const std::vector<double>& radii() const { return radii_; }
  const Sparse& consistent_mass() const { return M_; }

  // Cartesian grids only: interior node index of a lattice point, or -1.
  long lattice_index(const std::vector<int>& ijk) const;
  int points_per_axis() const { return grid_.points_per_axis; }
  double axis_origin(int k) const { return origin_[k]; }
  double axis_spacing(int k) const { return hk_[k]; }

 private:
  Discretization() = default;
  void build_radial();
  void build_cartesian();

  DomainModel domain_;
  GridSpec grid_;
  std::vector<double> coords_, bcoords_;
  Sparse K_, B_, M_;
  Eigen::VectorXd W_;
  double h_ = 0;
  std::vector<double> radii_;
  std::vector<double> origin_, hk_;
  std::vector<long> lattice_;  // flat lattice -> interior index
};

using DiscPtr = std::shared_ptr<const Discretization>;

}  // namespace bl
