#include "caos/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "caos/errors.hpp"

namespace caos {

Grid make_grid(int ny, int nz) {
    if (ny < kMinCells || nz < kMinCells) {
        throw ConfigError("grid needs at least " + std::to_string(kMinCells) +
                          " cells per direction, got ny=" + std::to_string(ny) +
                          ", nz=" + std::to_string(nz));
    }
    return Grid{ny, nz, 1.0 / ny, 1.0 / nz};
}

const char* to_string(BcTag tag) {
    switch (tag) {
        case BcTag::vorticity: return "q";
        case BcTag::streamfunction: return "psi";
        case BcTag::temperature: return "T";
        case BcTag::salinity: return "S";
    }
    return "?";
}

// ---------------------------------------------------------------- OceanField

OceanField::OceanField(const Grid& grid, BcTag tag)
    : grid_(grid),
      tag_(tag),
      stride_(static_cast<std::size_t>(grid.nz + 3)),
      values_(static_cast<std::size_t>(grid.ny + 3) * static_cast<std::size_t>(grid.nz + 3), 0.0) {}

OceanField OceanField::from_function(const Grid& grid, BcTag tag,
                                     const std::function<double(double, double)>& f) {
    OceanField out(grid, tag);
    for (int i = 0; i <= grid.ny; ++i)
        for (int j = 0; j <= grid.nz; ++j) out.values_[out.index(i, j)] = f(grid.y(i), grid.z(j));
    return out;
}

void OceanField::require_fresh(const char* op) const {
    if (!fresh_) {
        throw ContractViolation(std::string(op) + ": ghost layer of field '" + to_string(tag_) +
                                "' is stale; apply a boundary fill first");
    }
}

void OceanField::fill(double v) {
    std::fill(values_.begin(), values_.end(), v);
    fresh_ = false;
}

OceanField& OceanField::operator+=(const OceanField& o) {
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    fresh_ = fresh_ && o.fresh_;
    return *this;
}

OceanField& OceanField::operator-=(const OceanField& o) {
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    fresh_ = fresh_ && o.fresh_;
    return *this;
}

OceanField& OceanField::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

OceanField operator+(OceanField a, const OceanField& b) { return a += b; }
OceanField operator-(OceanField a, const OceanField& b) { return a -= b; }
OceanField operator*(double c, OceanField a) { return a *= c; }

// -------------------------------------------------------------- SurfaceField

SurfaceField::SurfaceField(const Grid& grid)
    : grid_(grid), values_(static_cast<std::size_t>(grid.ny + 3), 0.0) {}

SurfaceField SurfaceField::from_function(const Grid& grid, const std::function<double(double)>& f) {
    SurfaceField out(grid);
    for (int i = 0; i <= grid.ny; ++i) out.values_[static_cast<std::size_t>(i + 1)] = f(grid.y(i));
    return out;
}

void SurfaceField::require_fresh(const char* op) const {
    if (!fresh_)
        throw ContractViolation(std::string(op) + ": ghost nodes of surface field are stale");
}

void SurfaceField::fill(double v) {
    std::fill(values_.begin(), values_.end(), v);
    fresh_ = false;
}

SurfaceField& SurfaceField::operator+=(const SurfaceField& o) {
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    fresh_ = fresh_ && o.fresh_;
    return *this;
}

SurfaceField& SurfaceField::operator-=(const SurfaceField& o) {
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    fresh_ = fresh_ && o.fresh_;
    return *this;
}

SurfaceField& SurfaceField::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

SurfaceField operator+(SurfaceField a, const SurfaceField& b) { return a += b; }
SurfaceField operator-(SurfaceField a, const SurfaceField& b) { return a -= b; }
SurfaceField operator*(double c, SurfaceField a) { return a *= c; }

// ------------------------------------------------------------- ghost fills

namespace {

// sign = +1 reflects evenly, -1 oddly.
void reflect_ghosts(OceanField& f, double sign) {
    const int ny = f.grid().ny;
    const int nz = f.grid().nz;
    for (int i = 0; i <= ny; ++i) {
        f.ghost_ref(i, -1) = sign * f(i, 1);
        f.ghost_ref(i, nz + 1) = sign * f(i, nz - 1);
    }
    // Lateral pass covers the corners using the freshly written z-ghosts.
    for (int j = -1; j <= nz + 1; ++j) {
        f.ghost_ref(-1, j) = sign * f(1, j);
        f.ghost_ref(ny + 1, j) = sign * f(ny - 1, j);
    }
    f.mark_ghosts_fresh();
}

}  // namespace

void fill_neumann_ghosts(OceanField& f) { reflect_ghosts(f, 1.0); }
void fill_dirichlet_ghosts(OceanField& f) { reflect_ghosts(f, -1.0); }

void fill_neumann_ghosts(SurfaceField& s) {
    const int ny = s.grid().ny;
    s.ghost_ref(-1) = s(1);
    s.ghost_ref(ny + 1) = s(ny - 1);
    s.mark_ghosts_fresh();
}

// ---------------------------------------------------------------- quadrature

double integrate(const OceanField& field) {
    const Grid& g = field.grid();
    double sum = 0.0;
    for (int i = 0; i <= g.ny; ++i) {
        double row = 0.0;
        for (int j = 0; j <= g.nz; ++j) row += g.wz(j) * field(i, j);
        sum += g.wy(i) * row;
    }
    return sum;
}

double integrate(const SurfaceField& s) {
    const Grid& g = s.grid();
    double sum = 0.0;
    for (int i = 0; i <= g.ny; ++i) sum += g.wy(i) * s(i);
    return sum;
}

double l2_norm(const OceanField& field) {
    const Grid& g = field.grid();
    double sum = 0.0;
    for (int i = 0; i <= g.ny; ++i) {
        double row = 0.0;
        for (int j = 0; j <= g.nz; ++j) {
            const double v = field(i, j);
            row += g.wz(j) * v * v;
        }
        sum += g.wy(i) * row;
    }
    return std::sqrt(sum);
}

double l2_norm(const SurfaceField& s) {
    const Grid& g = s.grid();
    double sum = 0.0;
    for (int i = 0; i <= g.ny; ++i) sum += g.wy(i) * s(i) * s(i);
    return std::sqrt(sum);
}

double surface_l2_norm(const SurfaceField& s) { return l2_norm(s); }

double sup_norm(const SurfaceField& s) {
    double m = 0.0;
    for (int i = 0; i < s.size(); ++i) m = std::max(m, std::abs(s(i)));
    return m;
}

double h1_seminorm(const OceanField& field) {
    field.require_fresh("h1_seminorm");
    const Grid& g = field.grid();
    const double ry = 0.5 / g.dy;
    const double rz = 0.5 / g.dz;
    double sum = 0.0;
    for (int i = 0; i <= g.ny; ++i) {
        double row = 0.0;
        for (int j = 0; j <= g.nz; ++j) {
            const double fy = (field(i + 1, j) - field(i - 1, j)) * ry;
            const double fz = (field(i, j + 1) - field(i, j - 1)) * rz;
            row += g.wz(j) * (fy * fy + fz * fz);
        }
        sum += g.wy(i) * row;
    }
    return std::sqrt(sum);
}

double h1_seminorm(const SurfaceField& s) {
    s.require_fresh("h1_seminorm");
    const Grid& g = s.grid();
    const double ry = 0.5 / g.dy;
    double sum = 0.0;
    for (int i = 0; i <= g.ny; ++i) {
        const double d = (s(i + 1) - s(i - 1)) * ry;
        sum += g.wy(i) * d * d;
    }
    return std::sqrt(sum);
}

SurfaceField surface_trace(const OceanField& T) {
    const Grid& g = T.grid();
    SurfaceField out(g);
    for (int i = 0; i <= g.ny; ++i) out.ghost_ref(i) = T(i, g.nz);
    fill_neumann_ghosts(out);
    return out;
}

}  // namespace caos
