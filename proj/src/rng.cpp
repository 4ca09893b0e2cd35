#include "linfb/rng.hpp"

#include <cmath>
#include <numbers>

namespace linfb {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

GaussianSampler::GaussianSampler(const RngSpec& spec) {
    const std::uint64_t h = fnv1a64(spec.stream);
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    eng_.seed(seq);
}

double GaussianSampler::uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double GaussianSampler::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

DenseMatrix GaussianSampler::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    DenseMatrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = normal();
    return M;
}

}  // namespace linfb
