#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "linfb/blockmat.hpp"

namespace linfb {

struct RngSpec {
    std::uint64_t seed = 0;
    std::string stream = "default";
};

std::uint64_t fnv1a64(const std::string& s);

// mt19937_64 seeded through std::seed_seq from (seed, fnv1a64(stream)).
// Uniforms take the top 53 bits; normals use Box-Muller, both outputs consumed.
class GaussianSampler {
public:
    explicit GaussianSampler(const RngSpec& spec);

    double uniform();  // in [0, 1)
    double normal();
    DenseMatrix normal_matrix(Eigen::Index rows, Eigen::Index cols);

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace linfb
