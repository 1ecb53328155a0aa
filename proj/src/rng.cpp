#include "ecim/rng.hpp"

#include <cmath>

namespace ecim {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

inline Philox::Block philox_round(const Philox::Block& c, const Philox::Key& k) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

double poly(const double* coeff, int degree, double x) {
    double acc = coeff[degree];
    for (int i = degree - 1; i >= 0; --i) acc = acc * x + coeff[i];
    return acc;
}

}  // namespace

Philox::Philox(std::uint64_t seed) noexcept
    : seed_(seed),
      key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

Philox::Block Philox::generate(Block counter, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        counter = philox_round(counter, key);
    }
    return counter;
}

void Philox::refill() noexcept {
    buffer_ = generate(counter_, key_);
    for (auto& word : counter_) {
        if (++word != 0) break;
    }
    used_ = 0;
}

std::uint64_t Philox::next_u64() noexcept {
    if (used_ >= 4) refill();
    const std::uint64_t lo = buffer_[used_];
    const std::uint64_t hi = buffer_[used_ + 1];
    used_ += 2;
    return (hi << 32) | lo;
}

double Philox::uniform() noexcept {
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    return (static_cast<double>(next_u64() >> 11) + 0.5) * kScale;
}

double Philox::uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
}

double Philox::normal() noexcept {
    return inverse_normal_cdf(uniform());
}

// Wichura, Algorithm AS241 (PPND16), Applied Statistics 37 (1988). Relative
// accuracy about 1e-16.
double inverse_normal_cdf(double p) noexcept {
    static constexpr double a[] = {3.3871328727963666080e0, 1.3314166789178437745e+2,
                                   1.9715909503065514427e+3, 1.3731693765509461125e+4,
                                   4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                   3.3430575583588128105e+4, 2.5090809287301226727e+3};
    static constexpr double b[] = {1.0,
                                   4.2313330701600911252e+1, 6.8718700749205790830e+2,
                                   5.3941960214247511077e+3, 2.1213794301586595867e+4,
                                   3.9307895800092710610e+4, 2.8729085735721942674e+4,
                                   5.2264952788528545610e+3};
    static constexpr double c[] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                                   5.76949722146069140550e0, 3.64784832476320460504e0,
                                   1.27045825245236838258e0, 2.41780725177450611770e-1,
                                   2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static constexpr double d[] = {1.0,
                                   2.05319162663775882187e0, 1.67638483018380384940e0,
                                   6.89767334985100004550e-1, 1.48103976427480074590e-1,
                                   1.51986665636164571966e-2, 5.47593808499534494600e-4,
                                   1.05075007164441684324e-9};
    static constexpr double e[] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                                   1.78482653991729133580e0, 2.96560571828504891230e-1,
                                   2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                   2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static constexpr double f[] = {1.0,
                                   5.99832206555887937690e-1, 1.36929880922735805310e-1,
                                   1.48753612908506148525e-2, 7.86869131145613259100e-4,
                                   1.84631831751005468180e-5, 1.42151175831644588870e-7,
                                   2.04426310338993978564e-15};

    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * poly(a, 7, r) / poly(b, 7, r);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = poly(c, 7, r) / poly(d, 7, r);
    } else {
        r -= 5.0;
        x = poly(e, 7, r) / poly(f, 7, r);
    }
    return q < 0.0 ? -x : x;
}

}  // namespace ecim
