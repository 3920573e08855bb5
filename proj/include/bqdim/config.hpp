#pragma once

#include <cstdint>
#include <stdexcept>

namespace bqdim {

struct RunConfig {
    double q = 0.5;
    int cutoff = 6;
    double tol = 1e-8;
    int r_max = 8;
    int probe_cutoff = 4;
    std::size_t basis_cap = 20000;
    std::uint64_t seed = 20240917;
    unsigned threads = 1;

    void validate() const {
        if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0,1)");
        if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
        if (cutoff < 0 || r_max < 0 || probe_cutoff < 0) throw std::invalid_argument("sizes must be nonnegative");
        if (basis_cap == 0 || threads == 0) throw std::invalid_argument("caps must be positive");
    }
};

} // namespace bqdim
