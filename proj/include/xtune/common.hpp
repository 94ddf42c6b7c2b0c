#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace xtune {

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double m = std::fmod(a + kPi, 2.0 * kPi);
    if (m <= 0.0) m += 2.0 * kPi;
    return m - kPi;
}

inline double kph_to_mps(double kph) { return kph / 3.6; }

/// Thrown when a pose cannot be projected onto the reference path
/// (outside the corridor, or the projection is ambiguous).
class OutOfCorridorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown on invalid arguments / violated preconditions.
class InvalidInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical routine diverges (non-finite state, singular
/// geometry, unrepairable covariance).
class NumericsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

using Rng = std::mt19937_64;

/// Derives an independent, reproducible rng stream from a master seed and up
/// to three stream indices. Equal arguments always produce the same stream.
inline Rng make_rng(std::uint64_t master, std::uint64_t a = 0, std::uint64_t b = 0,
                    std::uint64_t c = 0) {
    std::uint64_t s = master;
    std::uint64_t mix = detail::splitmix64(s);
    s ^= a * 0x9e3779b97f4a7c15ULL;
    mix ^= detail::splitmix64(s);
    s ^= b * 0xc2b2ae3d27d4eb4fULL;
    mix ^= detail::splitmix64(s);
    s ^= c * 0x165667b19e3779f9ULL;
    mix ^= detail::splitmix64(s);
    return Rng(mix);
}

}  // namespace xtune
