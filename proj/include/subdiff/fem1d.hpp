#pragma once

#include <functional>
#include <span>
#include <vector>

#include "subdiff/mesh.hpp"

namespace subdiff {

using NodalVector = std::vector<double>;

// Symmetric tridiagonal matrix over the interior nodes.
// off[i] couples nodes i and i+1, size m - 1.
struct TriDiag {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const { return diag.size(); }
    void apply(std::span<const double> x, std::span<double> y) const;
    NodalVector apply(std::span<const double> x) const;
};

TriDiag assemble_mass(const SpatialMesh& m);
TriDiag assemble_stiffness(const SpatialMesh& m);
TriDiag assemble_B(double p, double a, const TriDiag& mass, const TriDiag& stiff);
// c1 * A + c2 * B
TriDiag combine(double c1, const TriDiag& A, double c2, const TriDiag& B);

NodalVector load_vector(const std::function<double(double)>& profile, const SpatialMesh& m);
NodalVector interpolate(const std::function<double(double)>& fn, const SpatialMesh& m);

double mass_inner(std::span<const double> u, std::span<const double> v, const TriDiag& mass);
double l2_norm(std::span<const double> v, const TriDiag& mass);

// Thomas algorithm; requires strict diagonal dominance.
NodalVector tridiag_solve(const TriDiag& A, std::span<const double> rhs);
void tridiag_solve(const TriDiag& A, std::span<const double> rhs, std::span<double> x,
                   std::vector<double>& scratch);

} // namespace subdiff
