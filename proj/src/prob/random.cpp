#include "mfda/prob/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mfda {

int RandomSource::uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    int k = static_cast<int>(uniform01() * n);
    return k < n ? k : n - 1;
}

double Mt19937Source::uniform01() {
    // 53-bit fraction in [0, 1).
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Mt19937Source::normal() {
    // Box-Muller without the cached second value: every call consumes exactly
    // two uniforms, which keeps replay harnesses simple.
    double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Eigen::VectorXd sample_standard_normal_vector(int dim, RandomSource& rng) {
    if (dim <= 0) throw std::invalid_argument("sample_standard_normal_vector: dim must be positive");
    Eigen::VectorXd z(dim);
    for (int i = 0; i < dim; ++i) z[i] = rng.normal();
    return z;
}

}  // namespace mfda
