#pragma once

#include <memory>
#include <span>
#include <vector>

#include "caos/grid.hpp"

namespace caos {

// Centred second-order differences on every node; boundary nodes read ghosts.
// Outputs carry the input's tag with stale ghosts.
OceanField ddy(const OceanField& field);
OceanField ddz(const OceanField& field);

/// 5-point Laplacian on every node (boundary nodes use the ghost layer).
OceanField laplacian(const OceanField& field);

/// 3-point second derivative of a surface field.
SurfaceField second_derivative(const SurfaceField& s);

/// Arakawa's energy- and enstrophy-conserving Jacobian
/// J(A, B) = A_y B_z - A_z B_y, the mean of the ++, +x and x+ forms.
///
/// The x-forms are evaluated as eight antisymmetric pair products around the
/// ring of neighbours, so J(A, A) vanishes and J(A, B) = -J(B, A) holds
/// bit-for-bit in floating point. Conservation of sum(w J) and sum(w A J)
/// needs B = 0 on the boundary with odd ghosts and A with even ghosts.
OceanField arakawa_jacobian(const OceanField& a, const OceanField& b);

enum class PoissonMethod { transform, conjugate_gradient };

struct PoissonOptions {
    PoissonMethod method = PoissonMethod::transform;
    double tolerance = 1e-10;  // relative discrete residual
    int max_iterations = 0;    // CG only; 0 picks a grid-dependent default
};

/// Solves -Lap(psi) = q with psi = 0 on the boundary.
///
/// The transform method diagonalises the 5-point operator with a type-I
/// sine transform (FFTW RODFT00) and is exact up to rounding. The conjugate
/// gradient method iterates on the same operator until the relative residual
/// drops below the tolerance. A solver owns its scratch buffers and plans: one
/// instance per thread.
class PoissonSolver {
public:
    explicit PoissonSolver(const Grid& grid, PoissonOptions options = {});
    ~PoissonSolver();
    PoissonSolver(PoissonSolver&&) noexcept;
    PoissonSolver& operator=(PoissonSolver&&) noexcept;
    PoissonSolver(const PoissonSolver&) = delete;
    PoissonSolver& operator=(const PoissonSolver&) = delete;

    /// Writes psi (nodes and odd ghosts, boundary zero) for the interior of q.
    void solve(const OceanField& q, OceanField& psi);
    OceanField solve(const OceanField& q);

    const Grid& grid() const;
    const PoissonOptions& options() const;
    int last_iterations() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

OceanField solve_poisson(const OceanField& q, PoissonSolver& solver);

/// ||Lap(psi) + q|| / ||q|| over interior nodes (absolute when q = 0).
double poisson_residual(const OceanField& psi, const OceanField& q);

/// Thomas algorithm. lower[0] and upper[n-1] are ignored.
/// Throws SingularSystemError on a zero pivot.
std::vector<double> tridiagonal_solve(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

/// Pre-factorised constant tridiagonal system, reused across many
/// right-hand sides (the implicit diffusion sweeps).
class TridiagonalFactor {
public:
    TridiagonalFactor() = default;
    TridiagonalFactor(std::span<const double> lower, std::span<const double> diag,
                      std::span<const double> upper);

    std::size_t size() const { return inv_pivot_.size(); }
    /// In-place solve; x.size() must equal size().
    void solve(std::span<double> x) const;

private:
    std::vector<double> lower_;
    std::vector<double> c_prime_;
    std::vector<double> inv_pivot_;
};

}  // namespace caos
