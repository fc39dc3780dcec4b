#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace ddc {

// Deterministic random source. mt19937_64 has a standard-pinned bit stream,
// and all real-valued mappings below are hand-rolled, so the same seed gives
// the same numbers on every platform and stdlib. Distribution adaptors from
// <random> are deliberately not used (their output is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(splitmix(seed)) {}

    // Derives an independent stream from a master seed and up to three stream
    // labels (trial, node, purpose). Each label is folded in with a splitmix
    // round so nearby labels give unrelated streams.
    static Rng derive(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0) {
        std::uint64_t s = splitmix(master);
        s = splitmix(s ^ (0x9e3779b97f4a7c15ULL + a));
        s = splitmix(s ^ (0xbf58476d1ce4e5b9ULL + b));
        s = splitmix(s ^ (0x94d049bb133111ebULL + c));
        return Rng(s);
    }

    std::uint64_t bits() { return gen_(); }

    // Uniform in [0, 1): top 53 bits of the generator word.
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds, unbiased enough for tests
        return lo + static_cast<int>(static_cast<double>(hi - lo + 1) * unit());
    }

    // Standard normal via Box-Muller; the spare value is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = unit(), u2 = unit();
        while (u1 <= 0.0) u1 = unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Eigen::VectorXd normal_vector(int dim) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = normal();
        return v;
    }

    // Uniform on the closed Euclidean ball of the given radius: gaussian
    // direction, radius scaled by u^(1/dim). radius == 0 gives the zero vector.
    Eigen::VectorXd ball(int dim, double radius) {
        Eigen::VectorXd g = normal_vector(dim);
        const double n = g.norm();
        if (radius == 0.0 || n == 0.0) return Eigen::VectorXd::Zero(dim);
        const double r = radius * std::pow(unit(), 1.0 / static_cast<double>(dim));
        return (r / n) * g;
    }

    Eigen::MatrixXd matrix_uniform(int rows, int cols, double lo, double hi) {
        Eigen::MatrixXd m(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) m(i, j) = uniform(lo, hi);
        return m;
    }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ddc
