/*
   Copyright 2026 the charp-diffops authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef CHARP_FIELD_HPP
#define CHARP_FIELD_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace charp {

class field_error : public std::runtime_error {
   public:
    explicit field_error(const std::string& what) : std::runtime_error(what) {}
};

/// Residue in [0, p). The modulus lives in the PrimeField that produced it.
struct Fp {
    std::uint32_t v = 0;

    friend bool operator==(Fp a, Fp b) { return a.v == b.v; }
    friend bool operator!=(Fp a, Fp b) { return a.v != b.v; }
};

namespace detail {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t acc = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1) acc = mulmod_u64(acc, base, m);
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    return acc;
}

// Deterministic Miller-Rabin, valid for all n < 3.3e24 with this witness set.
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 0; i < s - 1; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

}  // namespace detail

inline bool is_prime(std::uint64_t n) { return detail::is_prime_u64(n); }

/// Arithmetic in F_p for a prime 2 <= p < 2^31. Values are plain residues;
/// all operations are pure and fully reduced.
class PrimeField {
   public:
    explicit PrimeField(std::uint32_t p) : p_(p) {
        if (p < 2 || p >= (1u << 31) || !is_prime(p))
            throw field_error("p must be a prime in [2, 2^31): got " + std::to_string(p));
    }

    std::uint32_t p() const { return p_; }

    Fp zero() const { return Fp{0}; }
    Fp one() const { return Fp{p_ == 1 ? 0u : 1u}; }

    Fp from_int(std::int64_t n) const {
        std::int64_t r = n % static_cast<std::int64_t>(p_);
        if (r < 0) r += p_;
        return Fp{static_cast<std::uint32_t>(r)};
    }

    Fp add(Fp a, Fp b) const {
        std::uint64_t s = std::uint64_t(a.v) + b.v;
        if (s >= p_) s -= p_;
        return Fp{static_cast<std::uint32_t>(s)};
    }

    Fp sub(Fp a, Fp b) const {
        return Fp{a.v >= b.v ? a.v - b.v : a.v + p_ - b.v};
    }

    Fp neg(Fp a) const { return Fp{a.v == 0 ? 0 : p_ - a.v}; }

    Fp mul(Fp a, Fp b) const {
        return Fp{static_cast<std::uint32_t>((std::uint64_t(a.v) * b.v) % p_)};
    }

    Fp pow(Fp a, std::uint64_t e) const {
        return Fp{static_cast<std::uint32_t>(detail::powmod_u64(a.v, e, p_))};
    }

    Fp inv(Fp a) const {
        if (a.v == 0) throw field_error("division by zero in F_" + std::to_string(p_));
        return pow(a, p_ - 2);
    }

    Fp div(Fp a, Fp b) const { return mul(a, inv(b)); }

    /// C(l, k) mod p by Lucas' decomposition: exact for arbitrarily large l, k.
    Fp binomial(std::uint64_t l, std::uint64_t k) const {
        if (k > l) return zero();
        Fp acc = one();
        while (k > 0 || l > 0) {
            std::uint64_t ld = l % p_, kd = k % p_;
            if (kd > ld) return zero();
            acc = mul(acc, binom_small(ld, kd));
            l /= p_;
            k /= p_;
        }
        return acc;
    }

    friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.p_ == b.p_; }

   private:
    // C(a, b) mod p for 0 <= b <= a < p.
    Fp binom_small(std::uint64_t a, std::uint64_t b) const {
        if (b > a - b) b = a - b;
        Fp num = one(), den = one();
        for (std::uint64_t t = 0; t < b; ++t) {
            num = mul(num, from_int(static_cast<std::int64_t>(a - t)));
            den = mul(den, from_int(static_cast<std::int64_t>(t + 1)));
        }
        return div(num, den);
    }

    std::uint32_t p_;
};

inline Fp binomial_mod_p(const PrimeField& F, std::uint64_t l, std::uint64_t k) {
    return F.binomial(l, k);
}

}  // namespace charp

#endif  // CHARP_FIELD_HPP
