#pragma once

#include <cstdint>
#include <vector>

#include "naba/rational.hpp"

namespace naba {

// splitmix64 stream. Deterministic across platforms, which the report
// reproduction contract requires; std::uniform_int_distribution is not.
class Prng {
  public:
    explicit Prng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform-ish integer in [lo, hi]; modulo bias is irrelevant here.
    int64_t next_int(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
    }

    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Nonzero rational with small numerator/denominator.
    Rat next_rat(int64_t max_num = 24, int64_t max_den = 8) {
        for (;;) {
            int64_t n = next_int(-max_num, max_num);
            if (n == 0) continue;
            int64_t d = next_int(1, max_den);
            return rat(n, d);
        }
    }

    // Rational avoiding a list of excluded values (e.g. R-matrix poles).
    Rat next_rat_avoiding(const std::vector<Rat>& avoid, int64_t max_num = 24, int64_t max_den = 8) {
        for (int tries = 0; tries < 4096; ++tries) {
            Rat q = next_rat(max_num, max_den);
            bool ok = true;
            for (const Rat& a : avoid)
                if (q == a) { ok = false; break; }
            if (ok) return q;
        }
        throw std::runtime_error("Prng: could not sample away from excluded set");
    }

    Cplx next_complex_in_box(double half_width) {
        return Cplx((2 * next_unit() - 1) * half_width, (2 * next_unit() - 1) * half_width);
    }

  private:
    uint64_t state_;
};

}  // namespace naba
