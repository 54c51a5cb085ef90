#include "nehari/grid.hpp"

#include "nehari/errors.hpp"
#include "nehari/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace nehari {

std::string to_string(DomainKind kind) {
    switch (kind) {
        case DomainKind::interval: return "interval";
        case DomainKind::rectangle: return "rectangle";
        case DomainKind::truncated_cylinder: return "truncated_cylinder";
    }
    return "unknown";
}

DomainKind domain_kind_from_string(const std::string& name) {
    if (name == "interval") return DomainKind::interval;
    if (name == "rectangle") return DomainKind::rectangle;
    if (name == "truncated_cylinder" || name == "cylinder") return DomainKind::truncated_cylinder;
    throw InvalidArgumentError("unknown domain kind '" + name + "'");
}

DiscreteDomain::DiscreteDomain(DomainKind kind, std::vector<double> extents,
                               std::vector<std::size_t> resolution, std::vector<double> origin,
                               std::vector<bool> mask)
    : kind_(kind),
      extents_(std::move(extents)),
      resolution_(std::move(resolution)),
      origin_(std::move(origin)),
      mask_(std::move(mask)) {
    const std::size_t expected_dim = kind_ == DomainKind::interval ? 1 : 2;
    if (extents_.size() != expected_dim || resolution_.size() != expected_dim) {
        throw InvalidArgumentError(to_string(kind_) + " domain needs " +
                                   std::to_string(expected_dim) + " extents and resolutions");
    }
    for (std::size_t a = 0; a < expected_dim; ++a) {
        if (!(extents_[a] > 0.0) || !std::isfinite(extents_[a])) {
            throw InvalidArgumentError("domain extents must be positive");
        }
        if (resolution_[a] < 3) {
            throw InvalidArgumentError("domain resolution must be at least 3 per axis");
        }
    }
    if (origin_.empty()) {
        origin_.resize(expected_dim);
        for (std::size_t a = 0; a < expected_dim; ++a) {
            origin_[a] = kind_ == DomainKind::truncated_cylinder ? 0.0 : -0.5 * extents_[a];
        }
    } else if (origin_.size() != expected_dim) {
        throw InvalidArgumentError("domain origin has the wrong dimension");
    }

    spacing_.resize(expected_dim);
    weight_ = 1.0;
    std::size_t lattice_points = 1;
    for (std::size_t a = 0; a < expected_dim; ++a) {
        spacing_[a] = extents_[a] / static_cast<double>(resolution_[a] + 1);
        weight_ *= spacing_[a];
        lattice_points *= resolution_[a];
    }
    if (!mask_.empty() && mask_.size() != lattice_points) {
        throw InvalidArgumentError("domain mask size does not match the lattice");
    }
    if (!mask_.empty() && kind_ != DomainKind::rectangle) {
        throw InvalidArgumentError("only rectangles may carry a mask");
    }

    std::vector<std::int64_t> flat_of(lattice_points, -1);
    for (std::size_t l = 0; l < lattice_points; ++l) {
        if (mask_.empty() || mask_[l]) {
            flat_of[l] = static_cast<std::int64_t>(lattice_of_.size());
            lattice_of_.push_back(l);
        }
    }
    if (lattice_of_.size() < 3) {
        throw InvalidArgumentError("domain has fewer than three active points");
    }

    neighbors_.assign(lattice_of_.size() * 2 * expected_dim, -1);
    for (std::size_t k = 0; k < lattice_of_.size(); ++k) {
        const std::size_t l = lattice_of_[k];
        std::size_t stride = 1;
        for (std::size_t a = 0; a < expected_dim; ++a) {
            const std::size_t pos = (l / stride) % resolution_[a];
            if (pos > 0) neighbors_[k * 2 * expected_dim + 2 * a] = flat_of[l - stride];
            if (pos + 1 < resolution_[a]) neighbors_[k * 2 * expected_dim + 2 * a + 1] = flat_of[l + stride];
            stride *= resolution_[a];
        }
    }
}

DiscreteDomain DiscreteDomain::interval(double length, std::size_t n) {
    return DiscreteDomain(DomainKind::interval, {length}, {n});
}

DiscreteDomain DiscreteDomain::interval(double lower, double upper, std::size_t n) {
    return DiscreteDomain(DomainKind::interval, {upper - lower}, {n}, {lower});
}

DiscreteDomain DiscreteDomain::rectangle(double a, double b, std::size_t nx, std::size_t ny) {
    return DiscreteDomain(DomainKind::rectangle, {a, b}, {nx, ny});
}

DiscreteDomain DiscreteDomain::rectangle(std::array<double, 2> lower, std::array<double, 2> upper,
                                         std::size_t nx, std::size_t ny) {
    return DiscreteDomain(DomainKind::rectangle, {upper[0] - lower[0], upper[1] - lower[1]}, {nx, ny},
                          {lower[0], lower[1]});
}

DiscreteDomain DiscreteDomain::truncated_cylinder(double length, double width, std::size_t nx,
                                                  std::size_t ny) {
    return DiscreteDomain(DomainKind::truncated_cylinder, {length, width}, {nx, ny});
}

DiscreteDomain DiscreteDomain::dumbbell(double side, double channel_length, double channel_width,
                                        double h) {
    if (!(side > 0 && channel_length > 0 && channel_width > 0 && h > 0) || channel_width > side) {
        throw InvalidArgumentError("invalid dumbbell geometry");
    }
    const double lx = 2.0 * side + channel_length;
    const double ly = side;
    const auto nx = static_cast<std::size_t>(std::lround(lx / h)) - 1;
    const auto ny = static_cast<std::size_t>(std::lround(ly / h)) - 1;
    const double hx = lx / static_cast<double>(nx + 1);
    const double hy = ly / static_cast<double>(ny + 1);
    std::vector<bool> mask(nx * ny, false);
    const double eps = 1e-9 * h;
    for (std::size_t j = 0; j < ny; ++j) {
        const double y = hy * static_cast<double>(j + 1);
        for (std::size_t i = 0; i < nx; ++i) {
            const double x = hx * static_cast<double>(i + 1);
            const bool in_left = x < side - eps;
            const bool in_right = x > side + channel_length + eps;
            const bool in_channel = std::abs(y - 0.5 * ly) < 0.5 * channel_width - eps;
            mask[j * nx + i] = in_left || in_right || in_channel;
        }
    }
    return DiscreteDomain(DomainKind::rectangle, {lx, ly}, {nx, ny}, {0.0, 0.0}, std::move(mask));
}

double DiscreteDomain::coordinate(std::size_t k, std::size_t axis) const {
    return origin_[axis] + spacing_[axis] * static_cast<double>(lattice_index(k, axis) + 1);
}

std::size_t DiscreteDomain::lattice_index(std::size_t k, std::size_t axis) const {
    std::size_t l = lattice_of_[k];
    for (std::size_t a = 0; a < axis; ++a) l /= resolution_[a];
    return l % resolution_[axis];
}

double DiscreteDomain::max_eigenvalue_bound() const {
    double bound = 0.0;
    for (double h : spacing_) bound += 4.0 / (h * h);
    return bound;
}

std::vector<double> DiscreteDomain::barycenter() const {
    std::vector<double> c(dim());
    for (std::size_t a = 0; a < dim(); ++a) c[a] = origin_[a] + 0.5 * extents_[a];
    return c;
}

double DiscreteDomain::min_extent() const {
    return *std::min_element(extents_.begin(), extents_.end());
}

bool DiscreteDomain::operator==(const DiscreteDomain& other) const {
    return kind_ == other.kind_ && extents_ == other.extents_ && resolution_ == other.resolution_ &&
           origin_ == other.origin_ && mask_ == other.mask_;
}

std::string DiscreteDomain::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(kind_) << " extents=[";
    for (std::size_t a = 0; a < dim(); ++a) os << (a ? "," : "") << extents_[a];
    os << "] resolution=[";
    for (std::size_t a = 0; a < dim(); ++a) os << (a ? "," : "") << resolution_[a];
    os << "]";
    if (masked()) os << " masked(" << size() << " active points)";
    if (kind_ == DomainKind::truncated_cylinder) {
        os << " (truncation of cross-section x R at length " << extents_[0] << ")";
    }
    return os.str();
}

Field::Field(DomainPtr domain, Eigen::VectorXd values) : domain_(std::move(domain)), values_(std::move(values)) {
    if (!domain_) throw InvalidArgumentError("field without a domain");
    if (static_cast<std::size_t>(values_.size()) != domain_->size()) {
        throw DomainMismatchError("field has " + std::to_string(values_.size()) +
                                  " values but the domain has " + std::to_string(domain_->size()) +
                                  " interior points");
    }
    if (!values_.allFinite()) throw InvalidArgumentError("field contains non-finite values");
}

Field Field::zeros(DomainPtr domain) {
    const auto n = static_cast<Eigen::Index>(domain->size());
    return Field(std::move(domain), Eigen::VectorXd::Zero(n));
}

Field Field::constant(DomainPtr domain, double value) {
    const auto n = static_cast<Eigen::Index>(domain->size());
    return Field(std::move(domain), Eigen::VectorXd::Constant(n, value));
}

Field Field::sample(DomainPtr domain, const std::function<double(std::span<const double>)>& f) {
    const std::size_t n = domain->size();
    const std::size_t dim = domain->dim();
    Eigen::VectorXd values(static_cast<Eigen::Index>(n));
    std::vector<double> x(dim);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t a = 0; a < dim; ++a) x[a] = domain->coordinate(k, a);
        values[static_cast<Eigen::Index>(k)] = f(x);
    }
    return Field(std::move(domain), std::move(values));
}

bool Field::same_domain(const Field& other) const {
    return domain_ == other.domain_ || *domain_ == *other.domain_;
}

void require_same_domain(const Field& a, const Field& b) {
    if (!a.same_domain(b)) throw DomainMismatchError("fields live on different domains");
}

Field Field::operator+(const Field& other) const {
    require_same_domain(*this, other);
    return Field(domain_, values_ + other.values_);
}

Field Field::operator-(const Field& other) const {
    require_same_domain(*this, other);
    return Field(domain_, values_ - other.values_);
}

Field Field::operator*(double c) const { return Field(domain_, values_ * c); }

Eigen::VectorXd laplacian_apply(const DiscreteDomain& domain, const Eigen::VectorXd& u) {
    if (static_cast<std::size_t>(u.size()) != domain.size()) {
        throw DomainMismatchError("vector size does not match the domain");
    }
    const std::size_t n = domain.size();
    const std::size_t dim = domain.dim();
    Eigen::VectorXd out(u.size());
    std::array<double, 2> inv_h2{};
    for (std::size_t a = 0; a < dim; ++a) inv_h2[a] = 1.0 / (domain.spacing()[a] * domain.spacing()[a]);
    for (std::size_t k = 0; k < n; ++k) {
        const double uk = u[static_cast<Eigen::Index>(k)];
        double acc = 0.0;
        for (std::size_t a = 0; a < dim; ++a) {
            const std::int64_t lo = domain.neighbor(k, a, false);
            const std::int64_t hi = domain.neighbor(k, a, true);
            const double ulo = lo >= 0 ? u[lo] : 0.0;
            const double uhi = hi >= 0 ? u[hi] : 0.0;
            acc += (ulo - 2.0 * uk + uhi) * inv_h2[a];
        }
        out[static_cast<Eigen::Index>(k)] = acc;
    }
    return out;
}

Field laplacian_apply(const DiscreteDomain& domain, const Field& u) {
    if (u.domain() != domain) throw DomainMismatchError("field does not live on the given domain");
    return Field(u.domain_ptr(), laplacian_apply(domain, u.values()));
}

Eigen::SparseMatrix<double> negative_laplacian_matrix(const DiscreteDomain& domain) {
    const std::size_t n = domain.size();
    const std::size_t dim = domain.dim();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(n * (2 * dim + 1));
    for (std::size_t k = 0; k < n; ++k) {
        const auto row = static_cast<int>(k);
        double diag = 0.0;
        for (std::size_t a = 0; a < dim; ++a) {
            const double inv_h2 = 1.0 / (domain.spacing()[a] * domain.spacing()[a]);
            diag += 2.0 * inv_h2;
            for (bool forward : {false, true}) {
                const std::int64_t nb = domain.neighbor(k, a, forward);
                if (nb >= 0) triplets.emplace_back(row, static_cast<int>(nb), -inv_h2);
            }
        }
        triplets.emplace_back(row, row, diag);
    }
    Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

double inner_l2(const Field& u, const Field& v) {
    require_same_domain(u, v);
    return u.domain().weight() * u.values().dot(v.values());
}

double norm_lp_pow(const Field& u, double p) {
    if (!(p >= 1.0)) throw InvalidArgumentError("L^p norm requires p >= 1");
    double acc = 0.0;
    for (double x : u.values()) acc += std::pow(std::abs(x), p);
    return u.domain().weight() * acc;
}

double norm_lp(const Field& u, double p) { return std::pow(norm_lp_pow(u, p), 1.0 / p); }

double grad_sq(const Field& u) {
    return -u.domain().weight() * laplacian_apply(u.domain(), u.values()).dot(u.values());
}

double lambda_omega(const DiscreteDomain& domain, double tol) {
    if (!(tol > 0.0)) throw InvalidArgumentError("lambda_omega tolerance must be positive");
    const auto n = static_cast<Eigen::Index>(domain.size());
    const auto neg_lap = [&domain](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return -laplacian_apply(domain, v);
    };

    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
    x.normalize();
    double theta = x.dot(neg_lap(x));
    double shift = 0.0;
    double previous_theta = theta;
    const std::size_t max_outer = 5000;
    const std::size_t max_inner = 20 * static_cast<std::size_t>(n) + 100;

    for (std::size_t it = 0; it < max_outer; ++it) {
        Eigen::VectorXd y = x / (theta - shift);
        const LinearOperator shifted = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
            return neg_lap(v) - shift * v;
        };
        const CgResult cg = conjugate_gradient(shifted, x, y, 1e-13, max_inner);
        if (cg.indefinite) {
            // Shift overshot the bottom eigenvalue; restart this step unshifted.
            shift = 0.0;
            continue;
        }
        x = y.normalized();
        previous_theta = theta;
        const Eigen::VectorXd ax = neg_lap(x);
        theta = x.dot(ax);
        const double residual = (ax - theta * x).norm() / theta;
        if (residual <= tol) return theta;
        if (shift == 0.0 && std::abs(theta - previous_theta) < 1e-3 * theta) shift = 0.9 * theta;
    }
    throw NonConvergenceError("inverse power iteration for lambda_Omega did not converge");
}

double lambda_omega_exact(const DiscreteDomain& domain) {
    if (domain.masked()) throw InvalidArgumentError("closed-form eigenvalue needs an unmasked box");
    double value = 0.0;
    for (std::size_t a = 0; a < domain.dim(); ++a) {
        const double h = domain.spacing()[a];
        const double s = std::sin(std::numbers::pi / (2.0 * static_cast<double>(domain.resolution()[a] + 1)));
        value += 4.0 / (h * h) * s * s;
    }
    return value;
}

}  // namespace nehari
