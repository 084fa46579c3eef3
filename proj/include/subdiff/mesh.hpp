#pragma once

#include <span>
#include <vector>

namespace subdiff {

// Symmetric graded time grid t_{-2N} .. t_{2KN}. Every window [(i-1)tau, i*tau]
// is clustered with exponent r towards both ends; r = 1 is uniform.
class TemporalMesh {
public:
    TemporalMesh() = default;

    double tau() const { return tau_; }
    int K() const { return K_; }
    int N() const { return N_; }
    double r() const { return r_; }
    bool uniform() const { return r_ == 1.0; }

    int first_level() const { return -2 * N_; }
    int last_level() const { return 2 * K_ * N_; }
    int levels_per_window() const { return 2 * N_; }

    double t(int n) const { return points_[static_cast<std::size_t>(n + 2 * N_)]; }
    // rho_n = t_n - t_{n-1}, defined for n > -2N.
    double step(int n) const { return steps_[static_cast<std::size_t>(n + 2 * N_)]; }
    // t_n - t_k for n >= k, from the grading formula rather than by subtracting stored times.
    double gap(int n, int k) const;
    // out[k - k0] = gap(n, k) for k0 <= k < n
    void gaps_to(int n, int k0, double* out) const;

    // all points, index 0 holds t_{-2N}
    std::span<const double> points() const { return points_; }

private:
    friend TemporalMesh build_temporal(double, int, int, double);
    double tau_ = 0.0;
    int K_ = 0;
    int N_ = 0;
    double r_ = 1.0;
    std::vector<double> points_;
    std::vector<double> steps_;
    // per point: window index, position j in the window, offsets from the window ends
    // (each with the rounding error of the double) and distance to the window midpoint
    std::vector<int> win_, pos_;
    std::vector<double> lo_, lo_err_, hi_, hi_err_, mid_;
};

struct SpatialMesh {
    double L = 0.0;
    int M = 0;
    double h = 0.0;
    std::vector<double> nodes; // x_0 .. x_M

    int interior() const { return M - 1; }
};

TemporalMesh build_temporal(double tau, int K, int N, double r);
SpatialMesh build_spatial(double L, int M);

} // namespace subdiff
