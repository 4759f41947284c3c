#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace caos {

/// Uniform node-centred discretisation of the unit square [0,1]^2 in the
/// meridional (y) and depth (z) directions. Node (i, j) sits at (i*dy, j*dz)
/// for i in [0, ny], j in [0, nz].
struct Grid {
    int ny = 0;
    int nz = 0;
    double dy = 0.0;
    double dz = 0.0;

    double y(int i) const { return i * dy; }
    double z(int j) const { return j * dz; }
    int nodes_y() const { return ny + 1; }
    int nodes_z() const { return nz + 1; }

    /// Trapezoidal quadrature weights along each axis.
    double wy(int i) const { return (i == 0 || i == ny) ? 0.5 * dy : dy; }
    double wz(int j) const { return (j == 0 || j == nz) ? 0.5 * dz : dz; }

    friend bool operator==(const Grid&, const Grid&) = default;
};

inline constexpr int kMinCells = 8;

/// Throws ConfigError when ny or nz is below kMinCells.
Grid make_grid(int ny, int nz);

/// Which boundary rule a field's ghost layer follows.
enum class BcTag { vorticity, streamfunction, temperature, salinity };

const char* to_string(BcTag tag);

/// True for fields pinned to zero on the boundary (q and psi).
constexpr bool is_dirichlet(BcTag tag) {
    return tag == BcTag::vorticity || tag == BcTag::streamfunction;
}

/// Nodal 2-D field with one ghost layer on every side (corners included).
///
/// Ghost values are meaningful only after a boundary-fill pass; mutable
/// access through at() or data() marks them stale and every stencil operator
/// checks freshness before reading them.
class OceanField {
public:
    OceanField() = default;
    OceanField(const Grid& grid, BcTag tag);

    static OceanField from_function(const Grid& grid, BcTag tag,
                                    const std::function<double(double, double)>& f);

    const Grid& grid() const { return grid_; }
    BcTag tag() const { return tag_; }

    // i in [-1, ny+1], j in [-1, nz+1]
    double operator()(int i, int j) const { return values_[index(i, j)]; }
    double& at(int i, int j) {
        fresh_ = false;
        return values_[index(i, j)];
    }
    // Ghost writes used by boundary-fill passes; does not touch the flag.
    double& ghost_ref(int i, int j) { return values_[index(i, j)]; }

    std::span<const double> data() const { return values_; }
    std::span<double> data() {
        fresh_ = false;
        return values_;
    }

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i + 1) * stride_ + static_cast<std::size_t>(j + 1);
    }
    std::size_t stride() const { return stride_; }

    bool ghosts_fresh() const { return fresh_; }
    void mark_ghosts_fresh() { fresh_ = true; }
    void mark_ghosts_stale() { fresh_ = false; }
    /// Throws ContractViolation naming `op` when ghosts are stale.
    void require_fresh(const char* op) const;

    void fill(double v);
    void set_tag(BcTag tag) { tag_ = tag; }

    OceanField& operator+=(const OceanField& o);
    OceanField& operator-=(const OceanField& o);
    OceanField& operator*=(double c);

private:
    Grid grid_{};
    BcTag tag_ = BcTag::temperature;
    std::size_t stride_ = 0;
    std::vector<double> values_;
    bool fresh_ = false;
};

OceanField operator+(OceanField a, const OceanField& b);
OceanField operator-(OceanField a, const OceanField& b);
OceanField operator*(double c, OceanField a);

/// Nodal 1-D field on the surface line z = 1 with one ghost node per side.
class SurfaceField {
public:
    SurfaceField() = default;
    explicit SurfaceField(const Grid& grid);

    static SurfaceField from_function(const Grid& grid, const std::function<double(double)>& f);

    const Grid& grid() const { return grid_; }
    int size() const { return grid_.ny + 1; }

    // i in [-1, ny+1]
    double operator()(int i) const { return values_[static_cast<std::size_t>(i + 1)]; }
    double& at(int i) {
        fresh_ = false;
        return values_[static_cast<std::size_t>(i + 1)];
    }
    double& ghost_ref(int i) { return values_[static_cast<std::size_t>(i + 1)]; }

    std::span<const double> data() const { return values_; }
    std::span<double> data() {
        fresh_ = false;
        return values_;
    }

    bool ghosts_fresh() const { return fresh_; }
    void mark_ghosts_fresh() { fresh_ = true; }
    void require_fresh(const char* op) const;

    void fill(double v);

    SurfaceField& operator+=(const SurfaceField& o);
    SurfaceField& operator-=(const SurfaceField& o);
    SurfaceField& operator*=(double c);

private:
    Grid grid_{};
    std::vector<double> values_;
    bool fresh_ = false;
};

SurfaceField operator+(SurfaceField a, const SurfaceField& b);
SurfaceField operator-(SurfaceField a, const SurfaceField& b);
SurfaceField operator*(double c, SurfaceField a);

// Homogeneous ghost fills: even reflection (zero normal derivative) or odd
// reflection about a zero boundary value. Corners are filled consistently.
void fill_neumann_ghosts(OceanField& f);
void fill_dirichlet_ghosts(OceanField& f);
void fill_neumann_ghosts(SurfaceField& s);

// Quadrature and norms (trapezoidal rule on nodes).
double integrate(const OceanField& field);
double integrate(const SurfaceField& s);
double l2_norm(const OceanField& field);
double l2_norm(const SurfaceField& s);
double surface_l2_norm(const SurfaceField& s);
double sup_norm(const SurfaceField& s);

/// Centred-difference H1 seminorm; needs fresh ghosts.
double h1_seminorm(const OceanField& field);
double h1_seminorm(const SurfaceField& s);

/// Row z = 1 of T, copied verbatim; ghost nodes of the trace are filled by
/// even reflection.
SurfaceField surface_trace(const OceanField& T);

}  // namespace caos
