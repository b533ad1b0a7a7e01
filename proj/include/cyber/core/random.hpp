#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cyber {

/// xoshiro256** engine. Satisfies UniformRandomBitGenerator so it can drive
/// the <random> distributions.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t key);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()();

    /// Uniform on the open interval (0, 1).
    double uniform();
    double exponential(double rate);
    double normal();

private:
    std::array<std::uint64_t, 4> s_{};
};

/// Splittable seed: a master seed plus an integer path. The derived key is a
/// pure function of (master_seed, path), so replications that each take
/// their own child stream are reproducible regardless of scheduling.
class SeedStream {
public:
    explicit SeedStream(std::uint64_t master_seed = 0);

    SeedStream child(std::uint64_t id) const;

    std::uint64_t master_seed() const { return master_; }
    std::span<const std::uint64_t> path() const { return path_; }
    std::uint64_t key() const { return key_; }

    Rng rng() const { return Rng(key_); }

    /// "master/p0/p1/..." for run records.
    std::string trace() const;

    friend bool operator==(const SeedStream& a, const SeedStream& b)
    {
        return a.master_ == b.master_ && a.path_ == b.path_;
    }

private:
    std::uint64_t master_;
    std::vector<std::uint64_t> path_;
    std::uint64_t key_;
};

SeedStream derive_stream(const SeedStream& seed, std::uint64_t child);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace cyber
