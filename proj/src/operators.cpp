#include "caos/operators.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "caos/errors.hpp"

namespace caos {

OceanField ddy(const OceanField& field) {
    field.require_fresh("ddy");
    const Grid& g = field.grid();
    OceanField out(g, field.tag());
    const double r = 0.5 / g.dy;
    for (int i = 0; i <= g.ny; ++i)
        for (int j = 0; j <= g.nz; ++j) out.ghost_ref(i, j) = (field(i + 1, j) - field(i - 1, j)) * r;
    return out;
}

OceanField ddz(const OceanField& field) {
    field.require_fresh("ddz");
    const Grid& g = field.grid();
    OceanField out(g, field.tag());
    const double r = 0.5 / g.dz;
    for (int i = 0; i <= g.ny; ++i)
        for (int j = 0; j <= g.nz; ++j) out.ghost_ref(i, j) = (field(i, j + 1) - field(i, j - 1)) * r;
    return out;
}

OceanField laplacian(const OceanField& field) {
    field.require_fresh("laplacian");
    const Grid& g = field.grid();
    OceanField out(g, field.tag());
    const double ry = 1.0 / (g.dy * g.dy);
    const double rz = 1.0 / (g.dz * g.dz);
    for (int i = 0; i <= g.ny; ++i) {
        for (int j = 0; j <= g.nz; ++j) {
            const double c = field(i, j);
            out.ghost_ref(i, j) = (field(i + 1, j) - 2.0 * c + field(i - 1, j)) * ry +
                                  (field(i, j + 1) - 2.0 * c + field(i, j - 1)) * rz;
        }
    }
    return out;
}

SurfaceField second_derivative(const SurfaceField& s) {
    s.require_fresh("second_derivative");
    const Grid& g = s.grid();
    SurfaceField out(g);
    const double r = 1.0 / (g.dy * g.dy);
    for (int i = 0; i <= g.ny; ++i) out.ghost_ref(i) = (s(i + 1) - 2.0 * s(i) + s(i - 1)) * r;
    return out;
}

namespace {

// a_p b_q - a_q b_p written so that a == b gives exactly zero and swapping
// (a, b) flips the sign exactly.
inline double pair_term(double ap, double aq, double bp, double bq) {
    return 0.5 * ((ap + aq) * (bq - bp) - (bp + bq) * (aq - ap));
}

}  // namespace

OceanField arakawa_jacobian(const OceanField& a, const OceanField& b) {
    a.require_fresh("arakawa_jacobian");
    b.require_fresh("arakawa_jacobian");
    const Grid& g = a.grid();
    if (!(b.grid() == g)) throw ContractViolation("arakawa_jacobian: grid mismatch");
    OceanField out(g, a.tag());
    const double scale = 1.0 / (12.0 * g.dy * g.dz);

    for (int i = 0; i <= g.ny; ++i) {
        for (int j = 0; j <= g.nz; ++j) {
            // Centre values are subtracted first. The stencil is blind to
            // constant shifts, and this way a constant argument gives
            // exactly zero rather than a rounding residue.
            const double a0 = a(i, j), b0 = b(i, j);
            const double aE = a(i + 1, j) - a0, aNE = a(i + 1, j + 1) - a0, aN = a(i, j + 1) - a0,
                         aNW = a(i - 1, j + 1) - a0, aW = a(i - 1, j) - a0, aSW = a(i - 1, j - 1) - a0,
                         aS = a(i, j - 1) - a0, aSE = a(i + 1, j - 1) - a0;
            const double bE = b(i + 1, j) - b0, bNE = b(i + 1, j + 1) - b0, bN = b(i, j + 1) - b0,
                         bNW = b(i - 1, j + 1) - b0, bW = b(i - 1, j) - b0, bSW = b(i - 1, j - 1) - b0,
                         bS = b(i, j - 1) - b0, bSE = b(i + 1, j - 1) - b0;

            const double jpp = (aE - aW) * (bN - bS) - (aN - aS) * (bE - bW);
            const double ring = pair_term(aE, aNE, bE, bNE) + pair_term(aNE, aN, bNE, bN) +
                                pair_term(aN, aNW, bN, bNW) + pair_term(aNW, aW, bNW, bW) +
                                pair_term(aW, aSW, bW, bSW) + pair_term(aSW, aS, bSW, bS) +
                                pair_term(aS, aSE, bS, bSE) + pair_term(aSE, aE, bSE, bE);
            out.ghost_ref(i, j) = (jpp + ring) * scale;
        }
    }
    return out;
}

// ------------------------------------------------------------------- Poisson

namespace {

// The FFTW planner is not re-entrant.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// y = -Lap(x) on interior nodes, zero boundary.
void apply_neg_laplacian(const Grid& g, const std::vector<double>& x, std::vector<double>& y) {
    const int my = g.ny - 1;
    const int mz = g.nz - 1;
    const double ry = 1.0 / (g.dy * g.dy);
    const double rz = 1.0 / (g.dz * g.dz);
    auto at = [&](int i, int j) -> double {
        if (i < 0 || i >= my || j < 0 || j >= mz) return 0.0;
        return x[static_cast<std::size_t>(i) * mz + j];
    };
    for (int i = 0; i < my; ++i) {
        for (int j = 0; j < mz; ++j) {
            const double c = at(i, j);
            y[static_cast<std::size_t>(i) * mz + j] =
                -((at(i + 1, j) - 2.0 * c + at(i - 1, j)) * ry + (at(i, j + 1) - 2.0 * c + at(i, j - 1)) * rz);
        }
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

}  // namespace

struct PoissonSolver::Impl {
    Grid grid;
    PoissonOptions options;
    int my = 0;
    int mz = 0;
    double* buffer = nullptr;
    fftw_plan plan = nullptr;
    std::vector<double> inv_eigen;
    int iterations = 0;

    Impl(const Grid& g, PoissonOptions opt) : grid(g), options(opt), my(g.ny - 1), mz(g.nz - 1) {
        if (options.tolerance <= 0.0) throw ConfigError("poisson tolerance must be positive");
        if (options.method == PoissonMethod::transform) {
            const std::size_t n = static_cast<std::size_t>(my) * mz;
            buffer = static_cast<double*>(fftw_malloc(sizeof(double) * n));
            {
                std::lock_guard lock(fftw_planner_mutex());
                plan = fftw_plan_r2r_2d(my, mz, buffer, buffer, FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
            }
            // Eigenvalues of -Lap_h for sin(k pi y) sin(l pi z), folded with the
            // 1 / (2 ny * 2 nz) normalisation of the unnormalised DST-I pair.
            inv_eigen.resize(n);
            const double norm = 1.0 / (4.0 * g.ny * g.nz);
            for (int k = 0; k < my; ++k) {
                const double sy = std::sin(0.5 * std::numbers::pi * (k + 1) / g.ny);
                const double ly = 4.0 * sy * sy / (g.dy * g.dy);
                for (int l = 0; l < mz; ++l) {
                    const double sz = std::sin(0.5 * std::numbers::pi * (l + 1) / g.nz);
                    const double lz = 4.0 * sz * sz / (g.dz * g.dz);
                    inv_eigen[static_cast<std::size_t>(k) * mz + l] = norm / (ly + lz);
                }
            }
        }
    }

    ~Impl() {
        if (plan) {
            std::lock_guard lock(fftw_planner_mutex());
            fftw_destroy_plan(plan);
        }
        if (buffer) fftw_free(buffer);
    }

    void solve_transform(const OceanField& q, OceanField& psi) {
        for (int i = 0; i < my; ++i)
            for (int j = 0; j < mz; ++j) buffer[static_cast<std::size_t>(i) * mz + j] = q(i + 1, j + 1);
        fftw_execute(plan);
        const std::size_t n = inv_eigen.size();
        for (std::size_t k = 0; k < n; ++k) buffer[k] *= inv_eigen[k];
        fftw_execute(plan);
        for (int i = 0; i < my; ++i)
            for (int j = 0; j < mz; ++j) psi.ghost_ref(i + 1, j + 1) = buffer[static_cast<std::size_t>(i) * mz + j];
        iterations = 1;
    }

    void solve_cg(const OceanField& q, OceanField& psi) {
        const std::size_t n = static_cast<std::size_t>(my) * mz;
        std::vector<double> x(n, 0.0), r(n), p(n), ap(n);
        for (int i = 0; i < my; ++i)
            for (int j = 0; j < mz; ++j) r[static_cast<std::size_t>(i) * mz + j] = q(i + 1, j + 1);
        const double bnorm = std::sqrt(dot(r, r));
        const int max_it = options.max_iterations > 0 ? options.max_iterations
                                                      : 20 * std::max(grid.ny, grid.nz) + 100;
        iterations = 0;
        if (bnorm > 0.0) {
            // Stop a little below the contract so the reported residual honours it.
            const double target = 0.5 * options.tolerance * bnorm;
            p = r;
            double rr = dot(r, r);
            while (std::sqrt(rr) > target) {
                if (iterations >= max_it) {
                    throw ConvergenceError("conjugate gradient did not converge in " +
                                               std::to_string(max_it) + " iterations",
                                           std::sqrt(rr) / bnorm);
                }
                apply_neg_laplacian(grid, p, ap);
                const double alpha = rr / dot(p, ap);
                for (std::size_t k = 0; k < n; ++k) {
                    x[k] += alpha * p[k];
                    r[k] -= alpha * ap[k];
                }
                const double rr_new = dot(r, r);
                const double beta = rr_new / rr;
                for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
                rr = rr_new;
                ++iterations;
            }
        }
        for (int i = 0; i < my; ++i)
            for (int j = 0; j < mz; ++j) psi.ghost_ref(i + 1, j + 1) = x[static_cast<std::size_t>(i) * mz + j];
    }
};

PoissonSolver::PoissonSolver(const Grid& grid, PoissonOptions options)
    : impl_(std::make_unique<Impl>(grid, options)) {}
PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

const Grid& PoissonSolver::grid() const { return impl_->grid; }
const PoissonOptions& PoissonSolver::options() const { return impl_->options; }
int PoissonSolver::last_iterations() const { return impl_->iterations; }

void PoissonSolver::solve(const OceanField& q, OceanField& psi) {
    const Grid& g = impl_->grid;
    if (!(q.grid() == g)) throw ContractViolation("solve_poisson: grid mismatch");
    if (!(psi.grid() == g)) psi = OceanField(g, BcTag::streamfunction);
    psi.set_tag(BcTag::streamfunction);
    for (int i = 0; i <= g.ny; ++i) {
        psi.ghost_ref(i, 0) = 0.0;
        psi.ghost_ref(i, g.nz) = 0.0;
    }
    for (int j = 0; j <= g.nz; ++j) {
        psi.ghost_ref(0, j) = 0.0;
        psi.ghost_ref(g.ny, j) = 0.0;
    }
    if (impl_->options.method == PoissonMethod::transform)
        impl_->solve_transform(q, psi);
    else
        impl_->solve_cg(q, psi);
    fill_dirichlet_ghosts(psi);
}

OceanField PoissonSolver::solve(const OceanField& q) {
    OceanField psi(impl_->grid, BcTag::streamfunction);
    solve(q, psi);
    return psi;
}

OceanField solve_poisson(const OceanField& q, PoissonSolver& solver) { return solver.solve(q); }

double poisson_residual(const OceanField& psi, const OceanField& q) {
    const Grid& g = psi.grid();
    const double ry = 1.0 / (g.dy * g.dy);
    const double rz = 1.0 / (g.dz * g.dz);
    double res = 0.0;
    double ref = 0.0;
    for (int i = 1; i < g.ny; ++i) {
        for (int j = 1; j < g.nz; ++j) {
            const double c = psi(i, j);
            const double lap = (psi(i + 1, j) - 2.0 * c + psi(i - 1, j)) * ry +
                               (psi(i, j + 1) - 2.0 * c + psi(i, j - 1)) * rz;
            const double r = lap + q(i, j);
            res += r * r;
            ref += q(i, j) * q(i, j);
        }
    }
    return ref > 0.0 ? std::sqrt(res / ref) : std::sqrt(res * g.dy * g.dz);
}

// --------------------------------------------------------------- tridiagonal

std::vector<double> tridiagonal_solve(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n)
        throw ContractViolation("tridiagonal_solve: band and rhs sizes differ");
    std::vector<double> x(rhs.begin(), rhs.end());
    if (n == 0) return x;
    TridiagonalFactor(lower, diag, upper).solve(x);
    return x;
}

TridiagonalFactor::TridiagonalFactor(std::span<const double> lower, std::span<const double> diag,
                                     std::span<const double> upper)
    : lower_(lower.begin(), lower.end()), c_prime_(diag.size()), inv_pivot_(diag.size()) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n)
        throw ContractViolation("TridiagonalFactor: band sizes differ");
    double prev_c = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double l = k > 0 ? lower[k] : 0.0;
        const double pivot = diag[k] - l * prev_c;
        if (pivot == 0.0)
            throw SingularSystemError("tridiagonal system has a zero pivot at row " + std::to_string(k));
        inv_pivot_[k] = 1.0 / pivot;
        prev_c = k + 1 < n ? upper[k] * inv_pivot_[k] : 0.0;
        c_prime_[k] = prev_c;
    }
}

void TridiagonalFactor::solve(std::span<double> x) const {
    const std::size_t n = inv_pivot_.size();
    if (x.size() != n) throw ContractViolation("TridiagonalFactor::solve: size mismatch");
    if (n == 0) return;
    x[0] *= inv_pivot_[0];
    for (std::size_t k = 1; k < n; ++k) x[k] = (x[k] - lower_[k] * x[k - 1]) * inv_pivot_[k];
    for (std::size_t k = n - 1; k-- > 0;) x[k] -= c_prime_[k] * x[k + 1];
}

}  // namespace caos
