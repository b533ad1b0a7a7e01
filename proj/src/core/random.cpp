#include "cyber/core/random.hpp"

#include <cmath>
#include <numbers>

namespace cyber {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

namespace {

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t key)
{
    std::uint64_t z = key;
    for (auto& word : s_) {
        z = splitmix64(z);
        word = z;
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

Rng::result_type Rng::operator()()
{
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform()
{
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::exponential(double rate)
{
    return -std::log(uniform()) / rate;
}

double Rng::normal()
{
    // Marsaglia polar method without caching, so every call consumes a
    // deterministic number of draws per accepted pair attempt.
    for (;;) {
        const double u = 2.0 * uniform() - 1.0;
        const double v = 2.0 * uniform() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

SeedStream::SeedStream(std::uint64_t master_seed)
    : master_(master_seed), key_(splitmix64(splitmix64(master_seed) ^ 0x6A09E667F3BCC908ull))
{
}

SeedStream SeedStream::child(std::uint64_t id) const
{
    SeedStream out = *this;
    out.path_.push_back(id);
    out.key_ = splitmix64(key_ ^ splitmix64(id * 0xD1B54A32D192ED03ull + 0x3C6EF372FE94F82Bull));
    return out;
}

std::string SeedStream::trace() const
{
    std::string out = std::to_string(master_);
    for (auto p : path_) out += "/" + std::to_string(p);
    return out;
}

SeedStream derive_stream(const SeedStream& seed, std::uint64_t child)
{
    return seed.child(child);
}

}  // namespace cyber
