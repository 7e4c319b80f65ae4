#pragma once

// Small deterministic generator (splitmix64) so that every randomized
// test, corpus and sweep is reproducible from a single seed.

#include "nrat/field.hpp"

#include <cstdint>

namespace nrat {

class Rng {
public:
    explicit Rng(uint64_t seed) : s_(seed) {}

    uint64_t next() {
        s_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = s_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    // derive an independent stream, e.g. one per sweep start
    Rng fork(uint64_t salt) const {
        Rng r(s_ ^ (salt * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull));
        r.next();
        return r;
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    long uniform_int(long a, long b) {  // inclusive bounds
        return a + static_cast<long>(next() % static_cast<uint64_t>(b - a + 1));
    }

    Complex complex_box(double half_side, Prec prec) {
        return Complex(uniform(-half_side, half_side), uniform(-half_side, half_side), prec);
    }

    Rational rational(long max_num, long max_den) {
        long den = uniform_int(1, max_den);
        long num = uniform_int(-max_num, max_num);
        return Rational(num, den);
    }
    QComplex qcomplex(long max_num, long max_den) {
        return QComplex(rational(max_num, max_den), rational(max_num, max_den));
    }

private:
    uint64_t s_;
};

}  // namespace nrat
