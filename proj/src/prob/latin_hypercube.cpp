#include "mfda/prob/latin_hypercube.hpp"

#include <numeric>
#include <stdexcept>

namespace mfda {

std::vector<Eigen::VectorXd> latin_hypercube(int n, const Eigen::VectorXd& lower,
                                             const Eigen::VectorXd& upper, RandomSource& rng) {
    if (n <= 0) throw std::invalid_argument("latin_hypercube: n must be positive");
    if (lower.size() == 0 || lower.size() != upper.size())
        throw std::invalid_argument("latin_hypercube: bounds must be nonempty and equal length");
    if (((upper - lower).array() <= 0.0).any())
        throw std::invalid_argument("latin_hypercube: upper must exceed lower on every axis");

    const int dim = static_cast<int>(lower.size());
    std::vector<Eigen::VectorXd> out(n, Eigen::VectorXd(dim));

    std::vector<int> perm(n);
    for (int d = 0; d < dim; ++d) {
        std::iota(perm.begin(), perm.end(), 0);
        // Fisher-Yates
        for (int i = n - 1; i > 0; --i) {
            int j = rng.uniform_int(i + 1);
            std::swap(perm[i], perm[j]);
        }
        double width = (upper[d] - lower[d]) / n;
        for (int i = 0; i < n; ++i)
            out[i][d] = lower[d] + (perm[i] + rng.uniform01()) * width;
    }
    return out;
}

}  // namespace mfda
