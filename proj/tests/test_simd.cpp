#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "subdiff/simd.hpp"

using namespace subdiff::simd;

namespace {

std::vector<Backend> backends()
{
    std::vector<Backend> out{Backend::Scalar};
    if (supported(Backend::Avx2))
        out.push_back(Backend::Avx2);
    return out;
}

} // namespace

TEST_CASE("gemm_acc variants agree with a naive triple loop")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (auto [rows, width, len] : {std::tuple{1, 1, 1}, {3, 5, 7}, {4, 8, 16}, {8, 37, 129}, {5, 1000, 300}, {7, 13, 0}}) {
        const std::size_t ldw = len + 3, ldv = width + 2, ldo = width + 1;
        std::vector<double> w(rows * ldw), v(std::max<std::size_t>(len, 1) * ldv), base(rows * ldo);
        for (auto& x : w) x = U(rng);
        for (auto& x : v) x = U(rng);
        for (auto& x : base) x = U(rng);
        std::vector<double> expect = base;
        for (std::size_t b = 0; b < rows; ++b)
            for (std::size_t i = 0; i < width; ++i) {
                long double s = expect[b * ldo + i];
                for (std::size_t j = 0; j < len; ++j)
                    s += static_cast<long double>(w[b * ldw + j]) * v[j * ldv + i];
                expect[b * ldo + i] = static_cast<double>(s);
            }
        for (Backend be : backends()) {
            std::vector<double> out = base;
            kernels(be).gemm_acc(rows, width, len, w.data(), ldw, v.data(), ldv, out.data(), ldo);
            double worst = 0.0;
            for (std::size_t k = 0; k < out.size(); ++k)
                worst = std::max(worst, std::abs(out[k] - expect[k]));
            INFO("backend " << name(be) << " rows " << rows << " width " << width << " len " << len);
            CHECK(worst <= 1e-13 * std::max<std::size_t>(len, 1));
        }
    }
}

TEST_CASE("pow_pos variants agree with std::pow")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> E(-14.0, 3.0);
    std::vector<double> x(4099);
    for (auto& v : x) v = std::pow(10.0, E(rng));
    x[0] = 0.0;
    x[1] = 1.0;
    x[2] = 2.0;
    x[3] = 1e-300;
    x[4] = 0.7071067811865476;
    x[5] = 1.4142135623730951;
    for (double y : {0.1, 0.3, 0.5, 0.6, 0.7, 0.9, 1.5, 2.5}) {
        for (Backend be : backends()) {
            std::vector<double> out(x.size());
            kernels(be).pow_pos(x.data(), x.size(), y, out.data());
            double worst = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double ref = x[i] == 0.0 ? 0.0 : std::pow(x[i], y);
                worst = std::max(worst, ref == 0.0 ? std::abs(out[i]) : std::abs(out[i] - ref) / ref);
            }
            INFO("backend " << name(be) << " y " << y);
            CHECK(worst <= 1e-15);
        }
    }
}

TEST_CASE("backend selection")
{
    const Backend before = active_backend();
    set_active_backend(Backend::Scalar);
    CHECK(active_backend() == Backend::Scalar);
    CHECK(active().gemm_acc == &scalar::gemm_acc);
    set_active_backend(before);
    CHECK(name(Backend::Scalar) == "scalar");
}
