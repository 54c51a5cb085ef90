#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace nehari {

enum class DomainKind { interval, rectangle, truncated_cylinder };

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& name);

/// Structured grid with homogeneous Dirichlet boundary.
///
/// Only interior lattice points carry unknowns; boundary values are zero and
/// never stored. Rectangles may carry an activity mask, in which case masked
/// lattice points are treated as boundary too (used for dumbbell-shaped
/// domains). Points are numbered with axis 0 varying fastest.
class DiscreteDomain {
public:
    DiscreteDomain(DomainKind kind, std::vector<double> extents, std::vector<std::size_t> resolution,
                   std::vector<double> origin = {}, std::vector<bool> mask = {});

    /// Interval [origin, origin + length]; origin defaults to -length/2.
    static DiscreteDomain interval(double length, std::size_t n);
    static DiscreteDomain interval(double lower, double upper, std::size_t n);
    static DiscreteDomain rectangle(double a, double b, std::size_t nx, std::size_t ny);
    static DiscreteDomain rectangle(std::array<double, 2> lower, std::array<double, 2> upper,
                                    std::size_t nx, std::size_t ny);
    /// [0, length] x [0, width]: a finite-length stand-in for the infinite
    /// cylinder (cross-section) x R.
    static DiscreteDomain truncated_cylinder(double length, double width, std::size_t nx,
                                             std::size_t ny);
    /// Two squares of side `side` joined by a channel of length `channel_length`
    /// and width `channel_width`, all sharing the mesh width `h`.
    static DiscreteDomain dumbbell(double side, double channel_length, double channel_width,
                                   double h);

    DomainKind kind() const { return kind_; }
    std::size_t dim() const { return extents_.size(); }
    std::size_t size() const { return lattice_of_.size(); }
    const std::vector<double>& extents() const { return extents_; }
    const std::vector<std::size_t>& resolution() const { return resolution_; }
    const std::vector<double>& spacing() const { return spacing_; }
    const std::vector<double>& origin() const { return origin_; }
    bool masked() const { return !mask_.empty(); }
    /// Activity flags over the full interior lattice (empty when unmasked).
    const std::vector<bool>& mask() const { return mask_; }

    /// Quadrature weight of every interior point (product of spacings).
    double weight() const { return weight_; }

    /// Physical coordinate of interior point k along `axis`.
    double coordinate(std::size_t k, std::size_t axis) const;
    /// Lattice multi-index (per axis, 0-based among interior lattice lines).
    std::size_t lattice_index(std::size_t k, std::size_t axis) const;

    /// Neighbor of point k in direction (axis, +1/-1); -1 when it is boundary.
    std::int64_t neighbor(std::size_t k, std::size_t axis, bool forward) const {
        return neighbors_[k * 2 * dim() + 2 * axis + (forward ? 1 : 0)];
    }

    /// Largest eigenvalue bound of -Delta_h: sum over axes of 4/h^2.
    double max_eigenvalue_bound() const;

    std::vector<double> barycenter() const;
    double min_extent() const;

    bool operator==(const DiscreteDomain& other) const;
    bool operator!=(const DiscreteDomain& other) const { return !(*this == other); }

    std::string describe() const;

private:
    DomainKind kind_;
    std::vector<double> extents_;
    std::vector<std::size_t> resolution_;
    std::vector<double> origin_;
    std::vector<double> spacing_;
    std::vector<bool> mask_;
    double weight_ = 0.0;
    std::vector<std::size_t> lattice_of_;  // flat index -> lattice position
    std::vector<std::int64_t> neighbors_;
};

using DomainPtr = std::shared_ptr<const DiscreteDomain>;

template <typename... Args>
DomainPtr make_domain(Args&&... args) {
    return std::make_shared<const DiscreteDomain>(std::forward<Args>(args)...);
}

inline DomainPtr share(DiscreteDomain domain) {
    return std::make_shared<const DiscreteDomain>(std::move(domain));
}

/// Real-valued grid function on the interior points of a domain.
class Field {
public:
    Field(DomainPtr domain, Eigen::VectorXd values);

    static Field zeros(DomainPtr domain);
    static Field constant(DomainPtr domain, double value);
    /// Samples f at every interior point; f receives the coordinates.
    static Field sample(DomainPtr domain, const std::function<double(std::span<const double>)>& f);

    const DiscreteDomain& domain() const { return *domain_; }
    const DomainPtr& domain_ptr() const { return domain_; }
    const Eigen::VectorXd& values() const { return values_; }
    std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
    double operator[](std::size_t k) const { return values_[static_cast<Eigen::Index>(k)]; }

    bool same_domain(const Field& other) const;

    Field operator+(const Field& other) const;
    Field operator-(const Field& other) const;
    Field operator*(double c) const;
    Field operator-() const { return *this * -1.0; }
    friend Field operator*(double c, const Field& f) { return f * c; }

private:
    DomainPtr domain_;
    Eigen::VectorXd values_;
};

/// Throws DomainMismatchError unless both fields share a grid.
void require_same_domain(const Field& a, const Field& b);

/// Centered second-order Laplacian with zero ghost values (negative semidefinite).
Field laplacian_apply(const DiscreteDomain& domain, const Field& u);
Eigen::VectorXd laplacian_apply(const DiscreteDomain& domain, const Eigen::VectorXd& u);

/// Sparse matrix of -Delta_h (symmetric positive definite).
Eigen::SparseMatrix<double> negative_laplacian_matrix(const DiscreteDomain& domain);

double inner_l2(const Field& u, const Field& v);
/// p-th power of the discrete L^p norm.
double norm_lp_pow(const Field& u, double p);
double norm_lp(const Field& u, double p);
/// -<Delta_h u, u>, the discrete Dirichlet energy ||grad u||_2^2.
double grad_sq(const Field& u);

/// Bottom of the spectrum of -Delta_h by shifted inverse power iteration.
/// `tol` bounds the relative eigen-residual ||-Delta x - theta x|| / (theta ||x||).
double lambda_omega(const DiscreteDomain& domain, double tol = 1e-10);

/// Closed-form smallest eigenvalue of -Delta_h on an unmasked box.
double lambda_omega_exact(const DiscreteDomain& domain);

}  // namespace nehari
