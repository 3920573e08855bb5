#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qoperators.hpp"
#include "weyl.hpp"

// Exact span dimensions over GF(2^61 - 1) for rational q.
namespace bqdim::exact {

inline constexpr std::uint64_t P = (std::uint64_t(1) << 61) - 1;

inline std::uint64_t reduce128(__uint128_t z) {
    std::uint64_t lo = static_cast<std::uint64_t>(z & P) + static_cast<std::uint64_t>(z >> 61);
    lo = (lo & P) + (lo >> 61);
    return lo == P ? 0 : lo;
}
inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) { return reduce128(static_cast<__uint128_t>(a) * b); }
inline std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a + b;
    return s >= P ? s - P : s;
}
inline std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + P - b; }
inline std::uint64_t pow(std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}
inline std::uint64_t inv(std::uint64_t a) {
    if (a == 0) throw std::domain_error("division by zero in GF(p)");
    return pow(a, P - 2);
}
inline std::uint64_t from_int(long long x) {
    long long m = x % static_cast<long long>(P);
    return static_cast<std::uint64_t>(m < 0 ? m + static_cast<long long>(P) : m);
}

struct Rational {
    long long num = 0;
    long long den = 1;
};

// Continued-fraction recovery of a small-denominator rational.
inline std::optional<Rational> rational_approx(double x, long long max_den = 1000000, double tol = 1e-13) {
    long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double y = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(y);
        long long ai = static_cast<long long>(a);
        long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) < tol * std::max(1.0, std::abs(x)))
            return Rational{h1, k1};
        double frac = y - a;
        if (frac < 1e-15) break;
        y = 1.0 / frac;
    }
    return std::nullopt;
}

inline std::optional<std::uint64_t> to_field(double x) {
    auto r = rational_approx(x);
    if (!r) return std::nullopt;
    return mul(from_int(r->num), inv(from_int(r->den)));
}

// Diagonal similarity e_k -> c_k e_k per slot that makes all coefficients rational.
enum class Gauge { none, quarter, half };

inline std::vector<Gauge> word_gauges(const Word& w, int n) {
    std::vector<Gauge> g;
    for (int i : w) g.push_back(i < n ? Gauge::quarter : Gauge::half);
    return g;
}

// g(k - s)
inline Coeff gauge_step(Gauge g, int s, int half) {
    Coeff f;
    if (g == Gauge::quarter) f.rad.push_back({-1, 4, -4 * s, half});
    if (g == Gauge::half) {
        f.rad.push_back({-1, 2, -2 * s, half});
        f.rad.push_back({+1, 0, 2, half});
    }
    return f;
}

// c_{k-d} / c_k with c_k = g(1) ... g(k)
inline Coeff gauge_ratio(Gauge g, int d) {
    Coeff f;
    if (g == Gauge::none) return f;
    if (d > 0)
        for (int s = 0; s < d; ++s) f = f * gauge_step(g, s, -1);
    else
        for (int s = -1; s >= d; --s) f = f * gauge_step(g, s, +1);
    return f;
}

struct ModTerm {
    int d = 0;
    long kmin = 0;
    int a = 0, b = 0;
    std::vector<Radical> rad; // integer powers: exponent half/2
};

struct ModSummand {
    std::uint64_t scalar = 1;
    std::vector<ModTerm> factors;
};

struct ModOperator {
    Signature signature;
    std::vector<ModSummand> summands;
};

// Returns nullopt when some coefficient stays irrational after the gauge.
inline std::optional<ModOperator> to_mod(const TensorOperator& T, const std::vector<Gauge>& gauges) {
    if (gauges.size() != T.signature.size()) throw std::invalid_argument("gauge list does not match signature");
    ModOperator M{T.signature, {}};
    for (const Summand& s : T.summands) {
        ModSummand ms;
        if (std::abs(s.scalar.imag()) > 1e-12) return std::nullopt;
        auto sc = to_field(s.scalar.real());
        if (!sc) return std::nullopt;
        ms.scalar = *sc;
        for (std::size_t j = 0; j < s.factors.size(); ++j) {
            const Term& t = s.factors[j].terms.at(0);
            Coeff f = t.f * gauge_ratio(gauges[j], t.d);
            if (f.c != cplx(1.0, 0.0)) {
                if (std::abs(f.c.imag()) > 1e-12) return std::nullopt;
                auto c = to_field(f.c.real());
                if (!c) return std::nullopt;
                ms.scalar = mul(ms.scalar, *c);
            }
            ModTerm mt{t.d, t.kmin, f.a, f.b, {}};
            for (const Radical& r : f.rad) {
                if (r.half % 2 != 0) return std::nullopt;
                mt.rad.push_back(r);
            }
            ms.factors.push_back(std::move(mt));
        }
        M.summands.push_back(std::move(ms));
    }
    return M;
}

struct Field {
    std::uint64_t q = 0;
    std::uint64_t qinv = 0;

    explicit Field(std::uint64_t qm) : q(qm), qinv(inv(qm)) {}

    std::uint64_t qpow(long e) const { return e >= 0 ? pow(q, static_cast<std::uint64_t>(e)) : pow(qinv, static_cast<std::uint64_t>(-e)); }

    std::uint64_t eval(const ModTerm& t, long k) const {
        std::uint64_t v = (t.a == 0 && t.b == 0) ? 1 : qpow(t.a * k + t.b);
        for (const Radical& r : t.rad) {
            std::uint64_t base = r.sign > 0 ? add(1, qpow(r.a * k + r.b)) : sub(1, qpow(r.a * k + r.b));
            int e = r.half / 2;
            std::uint64_t p = pow(base, static_cast<std::uint64_t>(std::abs(e)));
            v = mul(v, e >= 0 ? p : inv(p));
        }
        return v;
    }
};

struct ModVector {
    std::vector<std::pair<MultiIndex, std::uint64_t>> entries; // sorted, nonzero
    bool empty() const { return entries.empty(); }
};

inline ModVector normalize(std::vector<std::pair<MultiIndex, std::uint64_t>> c) {
    std::sort(c.begin(), c.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    ModVector out;
    for (std::size_t i = 0; i < c.size();) {
        std::size_t j = i;
        std::uint64_t v = 0;
        while (j < c.size() && c[j].first == c[i].first) v = add(v, c[j++].second);
        if (v) out.entries.emplace_back(c[i].first, v);
        i = j;
    }
    return out;
}

inline ModVector apply(const ModOperator& T, const ModVector& v, const Field& F) {
    std::vector<std::pair<MultiIndex, std::uint64_t>> c;
    const std::size_t L = T.signature.size();
    for (const auto& [idx, val] : v.entries)
        for (const ModSummand& s : T.summands) {
            std::uint64_t coef = mul(s.scalar, val);
            MultiIndex out = idx;
            bool alive = true;
            for (std::size_t j = 0; j < L; ++j) {
                const ModTerm& t = s.factors[j];
                long k = idx[j];
                if (k < t.kmin) {
                    alive = false;
                    break;
                }
                out[j] = static_cast<std::int16_t>(k - t.d);
                if (t.a != 0 || t.b != 0 || !t.rad.empty()) coef = mul(coef, F.eval(t, k));
            }
            if (alive && coef) c.emplace_back(out, coef);
        }
    return normalize(std::move(c));
}

// Echelon basis with the smallest index as pivot, scaled to 1.
class ModBasis {
public:
    std::size_t size() const { return vecs_.size(); }
    const std::vector<ModVector>& vectors() const { return vecs_; }

    bool insert(ModVector v) {
        while (!v.empty()) {
            auto it = pivots_.find(v.entries.front().first);
            if (it == pivots_.end()) break;
            std::uint64_t c = v.entries.front().second;
            const ModVector& b = vecs_[it->second];
            std::vector<std::pair<MultiIndex, std::uint64_t>> acc = v.entries;
            for (const auto& [i, x] : b.entries) acc.emplace_back(i, sub(0, mul(c, x)));
            v = normalize(std::move(acc));
        }
        if (v.empty()) return false;
        std::uint64_t s = inv(v.entries.front().second);
        for (auto& e : v.entries) e.second = mul(e.second, s);
        pivots_.emplace(v.entries.front().first, vecs_.size());
        vecs_.push_back(std::move(v));
        return true;
    }

private:
    std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> pivots_;
    std::vector<ModVector> vecs_;
};

struct SpanResult {
    std::vector<std::size_t> d; // d[r]
    bool truncated = false;
};

inline SpanResult span_growth(const ModVector& start, const std::vector<ModOperator>& gens, const Field& F,
                              int r_max, std::size_t cap, unsigned threads) {
    SpanResult res;
    ModBasis basis;
    basis.insert(start);
    res.d.push_back(basis.size());
    std::vector<std::size_t> frontier{0};
    threads = std::max(1u, threads);
    for (int r = 1; r <= r_max; ++r) {
        std::vector<ModVector> cand(frontier.size() * gens.size());
        auto work = [&](std::size_t lo, std::size_t hi) {
            for (std::size_t a = lo; a < hi; ++a)
                for (std::size_t g = 0; g < gens.size(); ++g)
                    cand[a * gens.size() + g] = apply(gens[g], basis.vectors()[frontier[a]], F);
        };
        if (threads == 1 || frontier.size() < 2) {
            work(0, frontier.size());
        } else {
            std::vector<std::thread> pool;
            std::size_t chunk = (frontier.size() + threads - 1) / threads;
            for (std::size_t lo = 0; lo < frontier.size(); lo += chunk)
                pool.emplace_back(work, lo, std::min(frontier.size(), lo + chunk));
            for (auto& t : pool) t.join();
        }
        std::vector<std::size_t> next;
        for (ModVector& v : cand) {
            if (v.empty()) continue;
            if (basis.size() >= cap) {
                res.truncated = true;
                break;
            }
            if (basis.insert(std::move(v))) next.push_back(basis.size() - 1);
        }
        res.d.push_back(basis.size());
        if (res.truncated) break;
        frontier = std::move(next);
    }
    return res;
}

} // namespace bqdim::exact
