#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bqdim {

using cplx = std::complex<double>;

enum class SpaceKind : std::uint8_t { unilateral, bilateral };

inline const char* to_string(SpaceKind k) { return k == SpaceKind::unilateral ? "N" : "Z"; }

namespace detail {

// q^e with a per-thread table for the exponents that occur in practice.
inline double qpow(double q, long e) {
    constexpr long off = 1024;
    thread_local double cached_q = -1.0;
    thread_local std::vector<double> table;
    if (e < -off || e >= off) return std::pow(q, static_cast<double>(e));
    if (q != cached_q) {
        table.resize(2 * off);
        for (long j = 0; j < 2 * off; ++j) table[j] = std::pow(q, static_cast<double>(j - off));
        cached_q = q;
    }
    return table[e + off];
}

} // namespace detail

// (1 + sign q^{aN+b})^{half/2}
struct Radical {
    int sign = -1;
    int a = 0;
    int b = 0;
    int half = 1;
    auto operator<=>(const Radical&) const = default;
};

// c q^{aN+b} prod (1 +- q^{a_i N + b_i})^{h_i/2}, evaluated at an input index N = k.
struct Coeff {
    cplx c{1.0, 0.0};
    int a = 0;
    int b = 0;
    std::vector<Radical> rad;

    static Coeff constant(cplx v) {
        Coeff f;
        f.c = v;
        return f;
    }
    static Coeff qpow(int a, int b) {
        Coeff f;
        f.a = a;
        f.b = b;
        return f;
    }
    // sqrt(1 - q^{aN+b})^{half}
    static Coeff one_minus(int a, int b, int half = 1) {
        Coeff f;
        f.rad.push_back({-1, a, b, half});
        return f;
    }
    // sqrt(1 + q^{aN+b})^{half}
    static Coeff one_plus(int a, int b, int half = 1) {
        Coeff f;
        f.rad.push_back({+1, a, b, half});
        return f;
    }

    void normalize() {
        std::sort(rad.begin(), rad.end(), [](const Radical& x, const Radical& y) {
            return std::tie(x.sign, x.a, x.b) < std::tie(y.sign, y.a, y.b);
        });
        std::vector<Radical> merged;
        for (const Radical& r : rad) {
            if (!merged.empty() && merged.back().sign == r.sign && merged.back().a == r.a && merged.back().b == r.b)
                merged.back().half += r.half;
            else
                merged.push_back(r);
        }
        merged.erase(std::remove_if(merged.begin(), merged.end(), [](const Radical& r) { return r.half == 0; }),
                     merged.end());
        rad = std::move(merged);
    }

    Coeff operator*(const Coeff& o) const {
        Coeff f;
        f.c = c * o.c;
        f.a = a + o.a;
        f.b = b + o.b;
        f.rad = rad;
        f.rad.insert(f.rad.end(), o.rad.begin(), o.rad.end());
        f.normalize();
        return f;
    }

    // N -> N + s
    Coeff shifted(int s) const {
        Coeff f = *this;
        f.b += a * s;
        for (Radical& r : f.rad) r.b += r.a * s;
        return f;
    }

    Coeff conj() const {
        Coeff f = *this;
        f.c = std::conj(c);
        return f;
    }

    bool vanishes_at(long k) const {
        for (const Radical& r : rad)
            if (r.sign < 0 && r.half > 0 && r.a * k + r.b == 0) return true;
        return false;
    }

    cplx evaluate(long k, double q) const {
        if (!(q > 0.0 && q < 1.0)) throw std::domain_error("q must lie in (0,1)");
        double mag = detail::qpow(q, a * k + b);
        for (const Radical& r : rad) {
            double base = 1.0 + r.sign * detail::qpow(q, r.a * k + r.b);
            if (base < 0.0) {
                if (base > -1e-14)
                    base = 0.0;
                else
                    throw std::domain_error("negative radicand at index " + std::to_string(k));
            }
            if (base == 0.0 && r.half < 0) throw std::domain_error("pole at index " + std::to_string(k));
            int h = r.half;
            double p = 1.0;
            int whole = h / 2;
            if (whole > 0)
                for (int j = 0; j < whole; ++j) p *= base;
            else
                for (int j = 0; j < -whole; ++j) p /= base;
            if (h % 2 != 0) p = h > 0 ? p * std::sqrt(base) : p / std::sqrt(base);
            mag *= p;
        }
        return c * mag;
    }

    // Shape ignores the constant.
    auto shape() const { return std::tie(a, b, rad); }
    bool same_shape(const Coeff& o) const { return shape() == o.shape(); }

    std::string to_string() const {
        std::ostringstream os;
        bool first = true;
        auto sep = [&] {
            if (!first) os << '*';
            first = false;
        };
        if (c != cplx(1.0, 0.0)) {
            sep();
            if (c.imag() == 0.0)
                os << c.real();
            else
                os << '(' << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
        }
        auto affine = [](int aa, int bb) {
            std::ostringstream s;
            if (aa != 0) {
                if (aa == -1)
                    s << '-';
                else if (aa != 1)
                    s << aa;
                s << 'N';
                if (bb > 0) s << '+' << bb;
                if (bb < 0) s << bb;
            } else {
                s << bb;
            }
            return s.str();
        };
        if (a != 0 || b != 0) {
            sep();
            os << "q^{" << affine(a, b) << '}';
        }
        for (const Radical& r : rad) {
            sep();
            std::string base = std::string("1") + (r.sign < 0 ? "-" : "+") + "q^{" + affine(r.a, r.b) + "}";
            if (r.half == 1)
                os << "sqrt(" << base << ')';
            else if (r.half % 2 == 0)
                os << '(' << base << ')' << (r.half == 2 ? "" : "^" + std::to_string(r.half / 2));
            else
                os << "sqrt(" << base << ")^" << r.half;
        }
        if (first) os << '1';
        return os.str();
    }
};

inline constexpr long kNoFloor = std::numeric_limits<long>::min() / 4;

// e_k -> f(k) e_{k-d} for k >= kmin; S has d = +1.
struct Term {
    int d = 0;
    Coeff f;
    long kmin = 0;

    auto key() const { return std::tie(d, kmin, f.a, f.b, f.rad); }
};

inline void normalize_term(Term& t, SpaceKind kind) {
    t.f.normalize();
    if (kind == SpaceKind::unilateral) {
        t.kmin = std::max<long>({t.kmin, 0L, static_cast<long>(t.d)});
        for (int guard = 0; guard < 256 && t.f.vanishes_at(t.kmin); ++guard) ++t.kmin;
    } else {
        t.kmin = kNoFloor;
    }
}

inline std::string term_to_string(const Term& t) {
    std::ostringstream os;
    std::string coeff = t.f.to_string();
    if (t.d > 0) os << "S" << (t.d > 1 ? "^" + std::to_string(t.d) : "");
    if (t.d < 0) os << "S*" << (t.d < -1 ? "^" + std::to_string(-t.d) : "");
    if (t.d == 0 || coeff != "1") os << (t.d != 0 ? " " : "") << coeff;
    return os.str();
}

struct WeightedShiftSum {
    SpaceKind kind = SpaceKind::unilateral;
    std::vector<Term> terms;

    static WeightedShiftSum zero(SpaceKind k) { return {k, {}}; }
    static WeightedShiftSum identity(SpaceKind k) { return shift(k, 0, Coeff{}); }

    // e_k -> f(k) e_{k-d}
    static WeightedShiftSum shift(SpaceKind k, int d, Coeff f) {
        Term t{d, std::move(f), 0};
        normalize_term(t, k);
        return {k, {t}};
    }
    static WeightedShiftSum S(SpaceKind k, int power = 1) { return shift(k, power, Coeff{}); }
    static WeightedShiftSum Sstar(SpaceKind k, int power = 1) { return shift(k, -power, Coeff{}); }
    static WeightedShiftSum diag(SpaceKind k, Coeff f) { return shift(k, 0, std::move(f)); }

    std::vector<std::pair<long, cplx>> apply_basis(long k, double q) const {
        std::vector<std::pair<long, cplx>> out;
        for (const Term& t : terms)
            if (k >= t.kmin) out.emplace_back(k - t.d, t.f.evaluate(k, q));
        return out;
    }
};

// A then B (B applied first).
inline Term compose_terms(const Term& A, const Term& B, SpaceKind kind) {
    Term t;
    t.d = A.d + B.d;
    t.f = A.f.shifted(-B.d) * B.f;
    t.kmin = (kind == SpaceKind::bilateral) ? kNoFloor : std::max(B.kmin, A.kmin + B.d);
    normalize_term(t, kind);
    return t;
}

inline Term adjoint_term(const Term& A, SpaceKind kind) {
    Term t;
    t.d = -A.d;
    t.f = A.f.shifted(A.d).conj();
    t.kmin = (kind == SpaceKind::bilateral) ? kNoFloor : A.kmin - A.d;
    normalize_term(t, kind);
    return t;
}

inline WeightedShiftSum compose(const WeightedShiftSum& A, const WeightedShiftSum& B) {
    if (A.kind != B.kind) throw std::invalid_argument("space kind mismatch");
    WeightedShiftSum out{A.kind, {}};
    for (const Term& a : A.terms)
        for (const Term& b : B.terms) out.terms.push_back(compose_terms(a, b, A.kind));
    return out;
}

inline WeightedShiftSum adjoint(const WeightedShiftSum& A) {
    WeightedShiftSum out{A.kind, {}};
    for (const Term& a : A.terms) out.terms.push_back(adjoint_term(a, A.kind));
    return out;
}

using Signature = std::vector<SpaceKind>;

struct Summand {
    cplx scalar{1.0, 0.0};
    std::vector<WeightedShiftSum> factors;
};

class TensorOperator {
public:
    Signature signature;
    std::vector<Summand> summands;

    TensorOperator() = default;
    TensorOperator(Signature sig, std::vector<Summand> s) : signature(std::move(sig)), summands(std::move(s)) {
        for (const Summand& x : summands)
            if (x.factors.size() != signature.size()) throw std::invalid_argument("summand does not match signature");
        canonicalize();
    }

    static TensorOperator zero(Signature sig) { return TensorOperator(std::move(sig), {}); }
    static TensorOperator scalar(cplx c, Signature sig = {}) {
        Summand s{c, {}};
        for (SpaceKind k : sig) s.factors.push_back(WeightedShiftSum::identity(k));
        return TensorOperator(std::move(sig), {s});
    }
    static TensorOperator identity(Signature sig) { return scalar(1.0, std::move(sig)); }
    static TensorOperator single(WeightedShiftSum f) {
        Signature sig{f.kind};
        return TensorOperator(sig, {Summand{1.0, {std::move(f)}}});
    }

    bool is_zero() const { return summands.empty(); }
    std::size_t arity() const { return signature.size(); }

    // Distributes multi-term factors, pulls constants into the scalar, merges equal shapes.
    void canonicalize() {
        struct Flat {
            cplx scalar;
            std::vector<Term> terms;
        };
        std::vector<Flat> flat;
        for (const Summand& s : summands) {
            std::vector<Flat> partial{{s.scalar, {}}};
            for (std::size_t j = 0; j < s.factors.size(); ++j) {
                std::vector<Flat> next;
                for (const Flat& p : partial)
                    for (Term t : s.factors[j].terms) {
                        normalize_term(t, signature[j]);
                        Flat q = p;
                        q.scalar *= t.f.c;
                        t.f.c = 1.0;
                        q.terms.push_back(std::move(t));
                        next.push_back(std::move(q));
                    }
                partial = std::move(next);
            }
            flat.insert(flat.end(), partial.begin(), partial.end());
        }
        auto less = [](const Flat& x, const Flat& y) {
            for (std::size_t j = 0; j < x.terms.size(); ++j) {
                auto c = x.terms[j].key() <=> y.terms[j].key();
                if (c != 0) return c < 0;
            }
            return false;
        };
        std::stable_sort(flat.begin(), flat.end(), less);
        std::vector<Summand> out;
        std::vector<Term> last;
        bool have = false;
        for (Flat& f : flat) {
            bool same = have && !less(Flat{0.0, last}, f) && !less(f, Flat{0.0, last});
            if (same) {
                out.back().scalar += f.scalar;
                continue;
            }
            Summand s;
            s.scalar = f.scalar;
            for (std::size_t j = 0; j < f.terms.size(); ++j) s.factors.push_back({signature[j], {f.terms[j]}});
            last = f.terms;
            have = true;
            out.push_back(std::move(s));
        }
        out.erase(std::remove_if(out.begin(), out.end(), [](const Summand& s) { return std::abs(s.scalar) < 1e-14; }),
                  out.end());
        summands = std::move(out);
    }

    std::string to_string() const {
        if (summands.empty()) return "0";
        std::ostringstream os;
        for (std::size_t i = 0; i < summands.size(); ++i) {
            const Summand& s = summands[i];
            cplx c = s.scalar;
            if (i) os << (c.real() < 0 && c.imag() == 0.0 ? " - " : " + ");
            else if (c.real() < 0 && c.imag() == 0.0)
                os << "-";
            if (c.imag() == 0.0) {
                if (std::abs(c.real()) != 1.0) os << std::abs(c.real()) << " ";
            } else {
                os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i) ";
            }
            if (s.factors.empty()) {
                os << "1";
                continue;
            }
            for (std::size_t j = 0; j < s.factors.size(); ++j) {
                if (j) os << " (x) ";
                os << term_to_string(s.factors[j].terms.at(0));
            }
        }
        return os.str();
    }
};

inline void require_same_signature(const TensorOperator& A, const TensorOperator& B) {
    if (A.signature != B.signature) throw std::invalid_argument("signature mismatch");
}

inline TensorOperator add(const TensorOperator& A, const TensorOperator& B) {
    require_same_signature(A, B);
    std::vector<Summand> s = A.summands;
    s.insert(s.end(), B.summands.begin(), B.summands.end());
    return TensorOperator(A.signature, std::move(s));
}

inline TensorOperator scale(cplx c, const TensorOperator& A) {
    std::vector<Summand> s = A.summands;
    for (Summand& x : s) x.scalar *= c;
    return TensorOperator(A.signature, std::move(s));
}

inline TensorOperator subtract(const TensorOperator& A, const TensorOperator& B) { return add(A, scale(-1.0, B)); }

// A o B
inline TensorOperator compose(const TensorOperator& A, const TensorOperator& B) {
    require_same_signature(A, B);
    std::vector<Summand> out;
    for (const Summand& x : A.summands)
        for (const Summand& y : B.summands) {
            Summand s{x.scalar * y.scalar, {}};
            for (std::size_t j = 0; j < A.signature.size(); ++j) s.factors.push_back(compose(x.factors[j], y.factors[j]));
            out.push_back(std::move(s));
        }
    return TensorOperator(A.signature, std::move(out));
}

inline TensorOperator adjoint(const TensorOperator& A) {
    std::vector<Summand> out;
    for (const Summand& x : A.summands) {
        Summand s{std::conj(x.scalar), {}};
        for (const WeightedShiftSum& f : x.factors) s.factors.push_back(adjoint(f));
        out.push_back(std::move(s));
    }
    return TensorOperator(A.signature, std::move(out));
}

inline TensorOperator tensor(const TensorOperator& A, const TensorOperator& B) {
    Signature sig = A.signature;
    sig.insert(sig.end(), B.signature.begin(), B.signature.end());
    std::vector<Summand> out;
    for (const Summand& x : A.summands)
        for (const Summand& y : B.summands) {
            Summand s{x.scalar * y.scalar, x.factors};
            s.factors.insert(s.factors.end(), y.factors.begin(), y.factors.end());
            out.push_back(std::move(s));
        }
    return TensorOperator(std::move(sig), std::move(out));
}

inline TensorOperator tensor_all(const std::vector<TensorOperator>& ops) {
    TensorOperator acc = TensorOperator::identity({});
    for (const TensorOperator& o : ops) acc = tensor(acc, o);
    return acc;
}

inline bool structurally_equal(const TensorOperator& A, const TensorOperator& B, double tol = 1e-12) {
    if (A.signature != B.signature || A.summands.size() != B.summands.size()) return false;
    for (std::size_t i = 0; i < A.summands.size(); ++i) {
        const Summand& x = A.summands[i];
        const Summand& y = B.summands[i];
        if (std::abs(x.scalar - y.scalar) > tol) return false;
        for (std::size_t j = 0; j < x.factors.size(); ++j)
            if (x.factors[j].terms.at(0).key() != y.factors[j].terms.at(0).key()) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Sparse vectors

inline constexpr int kMaxSlots = 20;

struct MultiIndex {
    std::array<std::int16_t, kMaxSlots> v{};
    std::uint8_t size = 0;

    MultiIndex() = default;
    explicit MultiIndex(std::size_t n) : size(static_cast<std::uint8_t>(n)) {
        if (n > kMaxSlots) throw std::length_error("too many tensor slots");
    }
    MultiIndex(std::initializer_list<int> xs) : MultiIndex(xs.size()) {
        std::size_t j = 0;
        for (int x : xs) v[j++] = static_cast<std::int16_t>(x);
    }
    static MultiIndex from(const std::vector<int>& xs) {
        MultiIndex m(xs.size());
        for (std::size_t j = 0; j < xs.size(); ++j) m.v[j] = static_cast<std::int16_t>(xs[j]);
        return m;
    }

    int operator[](std::size_t j) const { return v[j]; }
    std::int16_t& operator[](std::size_t j) { return v[j]; }

    auto operator<=>(const MultiIndex& o) const {
        for (std::size_t j = 0; j < std::min(size, o.size); ++j)
            if (v[j] != o.v[j]) return v[j] <=> o.v[j];
        return size <=> o.size;
    }
    bool operator==(const MultiIndex& o) const { return (*this <=> o) == 0; }

    std::vector<int> to_vector() const { return std::vector<int>(v.begin(), v.begin() + size); }

    std::string to_string() const {
        std::string s = "(";
        for (std::size_t j = 0; j < size; ++j) s += (j ? "," : "") + std::to_string(v[j]);
        return s + ")";
    }
};

struct MultiIndexHash {
    std::size_t operator()(const MultiIndex& m) const noexcept {
        std::uint64_t h = 1469598103934665603ull;
        for (std::size_t j = 0; j < m.size; ++j) {
            h ^= static_cast<std::uint16_t>(m.v[j]);
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

struct SparseVector {
    Signature signature;
    std::vector<std::pair<MultiIndex, cplx>> entries; // sorted by index, unique

    static SparseVector zero(Signature sig) { return {std::move(sig), {}}; }
    static SparseVector basis(Signature sig, const MultiIndex& idx) {
        if (idx.size != sig.size()) throw std::invalid_argument("index arity mismatch");
        return {std::move(sig), {{idx, cplx(1.0, 0.0)}}};
    }
    static SparseVector vacuum(Signature sig) {
        MultiIndex idx(sig.size());
        return basis(std::move(sig), idx);
    }

    bool empty() const { return entries.empty(); }

    cplx at(const MultiIndex& idx) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), idx,
                                   [](const auto& e, const MultiIndex& k) { return e.first < k; });
        return (it != entries.end() && it->first == idx) ? it->second : cplx(0.0, 0.0);
    }

    double norm2() const {
        double s = 0.0;
        for (const auto& e : entries) s += std::norm(e.second);
        return s;
    }
    double norm() const { return std::sqrt(norm2()); }
    double max_abs() const {
        double m = 0.0;
        for (const auto& e : entries) m = std::max(m, std::abs(e.second));
        return m;
    }
};

namespace detail {

struct Contribution {
    MultiIndex idx;
    cplx value;
    double scale;
};

// Sort, merge, and drop entries whose magnitude is at the rounding level of their contributions.
inline std::vector<std::pair<MultiIndex, cplx>> merge_contributions(std::vector<Contribution>& c, double drop_tol) {
    std::sort(c.begin(), c.end(), [](const Contribution& x, const Contribution& y) { return x.idx < y.idx; });
    std::vector<std::pair<MultiIndex, cplx>> out;
    for (std::size_t i = 0; i < c.size();) {
        std::size_t j = i;
        cplx v = 0.0;
        double sc = 0.0;
        while (j < c.size() && c[j].idx == c[i].idx) {
            v += c[j].value;
            sc += c[j].scale;
            ++j;
        }
        if (v != cplx(0.0, 0.0) && std::abs(v) > drop_tol * sc) out.emplace_back(c[i].idx, v);
        i = j;
    }
    return out;
}

} // namespace detail

inline SparseVector linear_combination(const std::vector<std::pair<cplx, const SparseVector*>>& parts,
                                       double drop_tol = 1e-12) {
    if (parts.empty()) throw std::invalid_argument("empty combination");
    std::vector<detail::Contribution> c;
    for (const auto& [a, v] : parts) {
        if (v->signature != parts.front().second->signature) throw std::invalid_argument("signature mismatch");
        for (const auto& e : v->entries) c.push_back({e.first, a * e.second, std::abs(a * e.second)});
    }
    return {parts.front().second->signature, detail::merge_contributions(c, drop_tol)};
}

inline cplx inner(const SparseVector& u, const SparseVector& v) {
    cplx s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < u.entries.size() && j < v.entries.size()) {
        if (u.entries[i].first < v.entries[j].first)
            ++i;
        else if (v.entries[j].first < u.entries[i].first)
            ++j;
        else {
            s += std::conj(u.entries[i].second) * v.entries[j].second;
            ++i;
            ++j;
        }
    }
    return s;
}

inline SparseVector apply(const TensorOperator& T, const SparseVector& v, double q, double drop_tol = 1e-12) {
    if (T.signature != v.signature) throw std::invalid_argument("signature mismatch in apply");
    const std::size_t L = T.signature.size();
    std::vector<detail::Contribution> c;
    c.reserve(v.entries.size() * T.summands.size());
    for (const auto& [idx, val] : v.entries) {
        for (const Summand& s : T.summands) {
            cplx coef = s.scalar * val;
            MultiIndex out = idx;
            bool alive = true;
            for (std::size_t j = 0; j < L && alive; ++j) {
                const Term& t = s.factors[j].terms.front();
                long k = idx[j];
                if (k < t.kmin) {
                    alive = false;
                    break;
                }
                if (t.d != 0) out[j] = static_cast<std::int16_t>(k - t.d);
                if (t.f.a != 0 || t.f.b != 0 || !t.f.rad.empty()) coef *= t.f.evaluate(k, q);
            }
            if (alive && coef != cplx(0.0, 0.0)) c.push_back({out, coef, std::abs(coef)});
        }
    }
    return {v.signature, detail::merge_contributions(c, drop_tol)};
}

// Enumerates basis indices with unilateral slots in [0, cutoff] and bilateral slots in [-cutoff, cutoff].
inline void for_each_window_index(const Signature& sig, int cutoff, const std::function<void(const MultiIndex&)>& fn) {
    MultiIndex idx(sig.size());
    for (std::size_t j = 0; j < sig.size(); ++j)
        idx[j] = static_cast<std::int16_t>(sig[j] == SpaceKind::unilateral ? 0 : -cutoff);
    while (true) {
        fn(idx);
        std::size_t j = sig.size();
        while (j > 0) {
            --j;
            if (idx[j] < cutoff) {
                ++idx[j];
                for (std::size_t t = j + 1; t < sig.size(); ++t)
                    idx[t] = static_cast<std::int16_t>(sig[t] == SpaceKind::unilateral ? 0 : -cutoff);
                goto next;
            }
        }
        return;
    next:;
    }
}

struct WindowDeviation {
    double max_diff = 0.0;
    double max_magnitude = 0.0;
    bool within(double tol) const { return max_diff < tol * (1.0 + max_magnitude); }
};

inline WindowDeviation window_deviation(const TensorOperator& A, const TensorOperator& B, int cutoff, double q) {
    require_same_signature(A, B);
    WindowDeviation dev;
    for_each_window_index(A.signature, cutoff, [&](const MultiIndex& idx) {
        SparseVector e = SparseVector::basis(A.signature, idx);
        SparseVector a = apply(A, e, q, 0.0);
        SparseVector b = apply(B, e, q, 0.0);
        SparseVector d = linear_combination({{1.0, &a}, {-1.0, &b}}, 0.0);
        dev.max_diff = std::max(dev.max_diff, d.max_abs());
        dev.max_magnitude = std::max({dev.max_magnitude, a.max_abs(), b.max_abs()});
    });
    return dev;
}

inline bool equal_on_window(const TensorOperator& A, const TensorOperator& B, int cutoff, double q, double tol) {
    return window_deviation(A, B, cutoff, q).within(tol);
}

// ---------------------------------------------------------------------------
// q-arithmetic

inline double q_number(int n, double q) { return (std::pow(q, n) - std::pow(q, -n)) / (q - 1.0 / q); }

inline double q_factorial(int n, double q) {
    double f = 1.0;
    for (int j = 1; j <= n; ++j) f *= q_number(j, q);
    return f;
}

inline double q_binomial(int n, int m, double q) {
    if (m < 0 || n < 0 || m > n) throw std::out_of_range("q_binomial requires 0 <= m <= n");
    return q_factorial(n, q) / (q_factorial(m, q) * q_factorial(n - m, q));
}

} // namespace bqdim
