#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace mfda {

/// Source of scalar randomness. All samplers draw through this interface so a
/// test harness can substitute a scripted stream and replay the exact decision
/// sequence of a run.
class RandomSource {
public:
    virtual ~RandomSource() = default;

    /// Uniform draw on [0, 1).
    virtual double uniform01() = 0;

    /// Standard normal draw.
    virtual double normal() = 0;

    /// Uniform integer in {0, ..., n-1}.
    int uniform_int(int n);
};

/// Mersenne Twister backed source. Two instances constructed with the same
/// seed produce identical streams.
class Mt19937Source final : public RandomSource {
public:
    explicit Mt19937Source(std::uint64_t seed) : engine_(seed) {}

    double uniform01() override;
    double normal() override;

private:
    std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a base seed and a stream index
/// (splitmix64 finalizer). Parallel chains and dataset draws are seeded this
/// way so results do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Vector of dim independent standard normal draws.
Eigen::VectorXd sample_standard_normal_vector(int dim, RandomSource& rng);

}  // namespace mfda
