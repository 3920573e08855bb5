#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "qoperators.hpp"
#include "weyl.hpp"

namespace bqdim {

// Image of v_l^k for k, l in 1..2n+1 (k is the row index).
struct GeneratorImageTable {
    int n = 0;
    Signature signature;
    std::vector<TensorOperator> images;

    GeneratorImageTable() = default;
    GeneratorImageTable(int rank, Signature sig) : n(rank), signature(std::move(sig)) {
        images.assign(static_cast<std::size_t>(dim() * dim()), TensorOperator::zero(signature));
    }

    int dim() const { return 2 * n + 1; }

    const TensorOperator& operator()(int k, int l) const { return images.at(index(k, l)); }
    TensorOperator& at(int k, int l) { return images.at(index(k, l)); }

private:
    std::size_t index(int k, int l) const {
        if (k < 1 || l < 1 || k > dim() || l > dim()) throw std::out_of_range("generator index out of range");
        return static_cast<std::size_t>((k - 1) * dim() + (l - 1));
    }
};

enum class SignConvention {
    corrected, // -q^{N+1} sqrt((1+q^2)(1-q^{2N+2})) S at (n, n+1)
    literal    // the same entry with a plus sign
};

namespace detail {

inline TensorOperator op1(int d, Coeff f) {
    return TensorOperator::single(WeightedShiftSum::shift(SpaceKind::unilateral, d, std::move(f)));
}

inline Coeff signed_coeff(double s, Coeff f) {
    f.c *= s;
    return f;
}

} // namespace detail

// Elementary representation for s_i on c_00(N). Coefficients are written in the input index N.
inline GeneratorImageTable elementary_table(int i, int n, SignConvention sc = SignConvention::corrected) {
    if (n < 1 || i < 1 || i > n) throw std::out_of_range("elementary index out of range");
    using detail::op1;
    using detail::signed_coeff;
    GeneratorImageTable T(n, {SpaceKind::unilateral});
    const int N = 2 * n + 1;
    for (int k = 1; k <= N; ++k) T.at(k, k) = TensorOperator::identity(T.signature);
    if (i < n) {
        TensorOperator down = op1(1, Coeff::one_minus(4, 0));  // sqrt(1-q^{4N+4}) S
        TensorOperator up = op1(-1, Coeff::one_minus(4, 4));   // S* sqrt(1-q^{4N+4})
        T.at(i, i) = down;
        T.at(2 * n - i + 1, 2 * n - i + 1) = down;
        T.at(i + 1, i + 1) = up;
        T.at(2 * n - i + 2, 2 * n - i + 2) = up;
        T.at(i, i + 1) = op1(0, signed_coeff(-1.0, Coeff::qpow(2, 2)));
        T.at(i + 1, i) = op1(0, Coeff::qpow(2, 0));
        T.at(2 * n - i + 2, 2 * n - i + 1) = op1(0, signed_coeff(-1.0, Coeff::qpow(2, 0)));
        T.at(2 * n - i + 1, 2 * n - i + 2) = op1(0, Coeff::qpow(2, 2));
        return T;
    }
    const Coeff c1q2 = Coeff::one_plus(0, 2); // sqrt(1+q^2)
    T.at(n, n) = op1(2, Coeff::one_minus(2, -2) * Coeff::one_minus(2, 0));
    T.at(n + 1, n + 1) = add(TensorOperator::identity(T.signature),
                             op1(0, signed_coeff(-1.0, Coeff::one_plus(0, 2, 2) * Coeff::qpow(2, 0))));
    T.at(n + 2, n + 2) = op1(-2, Coeff::one_minus(2, 4) * Coeff::one_minus(2, 2));
    T.at(n + 1, n) = op1(1, Coeff::qpow(1, -1) * c1q2 * Coeff::one_minus(2, 0));
    const double s = (sc == SignConvention::corrected) ? -1.0 : 1.0;
    T.at(n, n + 1) = op1(1, signed_coeff(s, Coeff::qpow(1, 0) * c1q2 * Coeff::one_minus(2, 0)));
    T.at(n + 2, n + 1) = op1(-1, Coeff::qpow(1, 0) * c1q2 * Coeff::one_minus(2, 2));
    T.at(n + 1, n + 2) = op1(-1, signed_coeff(-1.0, Coeff::qpow(1, 1) * c1q2 * Coeff::one_minus(2, 2)));
    T.at(n, n + 2) = op1(0, Coeff::qpow(2, 2));
    T.at(n + 2, n) = op1(0, Coeff::qpow(2, 0));
    return T;
}

inline void require_torus_point(const std::vector<cplx>& t, int n) {
    if (static_cast<int>(t.size()) != n) throw std::invalid_argument("torus point has wrong length");
    for (cplx z : t)
        if (std::abs(std::abs(z) - 1.0) > 1e-12) throw std::invalid_argument("torus entries must have modulus 1");
}

// One-dimensional module: conj(t_k) for k < n+1, 1 at n+1, t_{2n+2-k} for k > n+1.
inline GeneratorImageTable torus_table(const std::vector<cplx>& t, int n) {
    require_torus_point(t, n);
    GeneratorImageTable T(n, {});
    for (int k = 1; k <= 2 * n + 1; ++k) {
        cplx c = k < n + 1 ? std::conj(t[k - 1]) : (k == n + 1 ? cplx(1.0) : t[2 * n + 2 - k - 1]);
        T.at(k, k) = TensorOperator::scalar(c);
    }
    return T;
}

inline GeneratorImageTable torus_table(int n) { return torus_table(std::vector<cplx>(n, 1.0), n); }

// (A * B)(v_l^k) = sum_j A(v_j^k) (x) B(v_l^j)
inline GeneratorImageTable convolve(const GeneratorImageTable& A, const GeneratorImageTable& B) {
    if (A.n != B.n) throw std::invalid_argument("rank mismatch");
    Signature sig = A.signature;
    sig.insert(sig.end(), B.signature.begin(), B.signature.end());
    GeneratorImageTable C(A.n, sig);
    const int N = A.dim();
    for (int k = 1; k <= N; ++k)
        for (int l = 1; l <= N; ++l) {
            std::vector<Summand> acc;
            for (int j = 1; j <= N; ++j) {
                const TensorOperator& a = A(k, j);
                const TensorOperator& b = B(j, l);
                if (a.is_zero() || b.is_zero()) continue;
                TensorOperator p = tensor(a, b);
                acc.insert(acc.end(), p.summands.begin(), p.summands.end());
            }
            C.at(k, l) = TensorOperator(sig, std::move(acc));
        }
    return C;
}

struct RepSpec {
    int n = 0;
    std::vector<cplx> t; // empty means all ones
    Word word;
};

inline GeneratorImageTable rep_table(const RepSpec& spec, SignConvention sc = SignConvention::corrected) {
    GeneratorImageTable T = spec.t.empty() ? torus_table(spec.n) : torus_table(spec.t, spec.n);
    for (int i : spec.word) T = convolve(T, elementary_table(i, spec.n, sc));
    return T;
}

inline GeneratorImageTable rep_table(int n, const Word& w) { return rep_table(RepSpec{n, {}, w}); }

inline TensorOperator star_image(const GeneratorImageTable& T, int k, int l) { return adjoint(T(k, l)); }

// ---------------------------------------------------------------------------
// Relation checks

inline double rho(int i, int n) {
    const int ip = 2 * n + 2 - i;
    if (i < ip) return (2.0 * n + 1.0) / 2.0 - i;
    if (i == ip) return 0.0;
    return -((2.0 * n + 1.0) / 2.0 - ip);
}

// Sparse matrix entries (row, col, value).
using ScalarMatrix = std::vector<std::tuple<int, int, double>>;

enum class DConvention {
    literal,  // D_j^i = delta_ij q^{-rho_i}
    corrected // D_{i,i'} = q^{-2 rho_i}, with -1 at (n+1, n+1)
};

inline ScalarMatrix d_matrix(int n, double q, DConvention c) {
    ScalarMatrix D;
    for (int i = 1; i <= 2 * n + 1; ++i) {
        if (c == DConvention::literal)
            D.emplace_back(i, i, std::pow(q, -rho(i, n)));
        else
            D.emplace_back(i, 2 * n + 2 - i, (i == n + 1 ? -1.0 : 1.0) * std::pow(q, -2.0 * rho(i, n)));
    }
    return D;
}

inline ScalarMatrix inverse_monomial(const ScalarMatrix& D) {
    ScalarMatrix out;
    for (const auto& [i, j, v] : D) out.emplace_back(j, i, 1.0 / v);
    return out;
}

// max over window basis vectors of the largest entry of T e_beta
inline double window_max(const TensorOperator& T, int cutoff, double q) {
    if (T.is_zero()) return 0.0;
    double m = 0.0;
    for_each_window_index(T.signature, cutoff, [&](const MultiIndex& idx) {
        m = std::max(m, apply(T, SparseVector::basis(T.signature, idx), q, 0.0).max_abs());
    });
    return m;
}

struct RelationReport {
    double max_deviation = 0.0;
    std::string worst; // description of the worst relation
    bool pass(double tol) const { return max_deviation < tol; }
};

// Entries of V D V^t D^{-1} - I and D V^t D^{-1} V - I on the window.
inline RelationReport verify_orthogonality(const GeneratorImageTable& T, int cutoff, double q,
                                           DConvention dc = DConvention::corrected) {
    const int N = T.dim();
    ScalarMatrix D = d_matrix(T.n, q, dc);
    ScalarMatrix Di = inverse_monomial(D);
    RelationReport rep;
    auto consider = [&](const TensorOperator& X, const std::string& what) {
        double d = window_max(X, cutoff, q);
        if (d > rep.max_deviation || rep.worst.empty()) {
            if (d >= rep.max_deviation) {
                rep.max_deviation = d;
                rep.worst = what;
            }
        }
    };
    for (int a = 1; a <= N; ++a)
        for (int b = 1; b <= N; ++b) {
            std::vector<Summand> s1, s2;
            // (V D V^t D^{-1})_{ab} = sum V_{ac} D_{cd} V_{ed} Di_{eb}
            for (const auto& [c, d, dv] : D)
                for (const auto& [e, f, iv] : Di) {
                    if (f != b) continue;
                    TensorOperator p = compose(T(a, c), T(e, d));
                    for (Summand& s : p.summands) s.scalar *= dv * iv;
                    s1.insert(s1.end(), p.summands.begin(), p.summands.end());
                }
            // (D V^t D^{-1} V)_{ab} = sum D_{ad} V_{ed} Di_{ef} V_{fb}
            for (const auto& [c, d, dv] : D) {
                if (c != a) continue;
                for (const auto& [e, f, iv] : Di) {
                    TensorOperator p = compose(T(e, d), T(f, b));
                    for (Summand& s : p.summands) s.scalar *= dv * iv;
                    s2.insert(s2.end(), p.summands.begin(), p.summands.end());
                }
            }
            TensorOperator X1(T.signature, s1), X2(T.signature, s2);
            if (a == b) {
                X1 = subtract(X1, TensorOperator::identity(T.signature));
                X2 = subtract(X2, TensorOperator::identity(T.signature));
            }
            std::ostringstream w1, w2;
            w1 << "VDV^tD^-1 (" << a << "," << b << ")";
            w2 << "DV^tD^-1V (" << a << "," << b << ")";
            consider(X1, w1.str());
            consider(X2, w2.str());
        }
    return rep;
}

// R^{ij}_{mn} with the two-case formula and the diagonal D.
inline double r_entry(int i, int j, int m, int nn, int n, double q) {
    auto delta = [](int x, int y) { return x == y ? 1.0 : 0.0; };
    const int jp = 2 * n + 2 - j;
    double base = std::pow(q, delta(i, j) - delta(i, jp)) * delta(i, m) * delta(j, nn);
    if (i > m) {
        auto Dd = [&](int x, int y) { return x == y ? std::pow(q, -rho(x, n)) : 0.0; };
        base += (q - 1.0 / q) * (delta(j, m) * delta(i, nn) - Dd(j, i) * Dd(nn, m));
    }
    return base;
}

struct FrtReport {
    double max_deviation = 0.0;
    int i = 0, j = 0, s = 0, t = 0;
    std::size_t nonzero_quadruples = 0;
};

// sum_{k,l} R^{ji}_{kl} v^k_s v^l_t - R^{lk}_{st} v^i_k v^j_l over all quadruples.
inline FrtReport verify_frt(const GeneratorImageTable& T, int cutoff, double q, double tol = 1e-8) {
    const int N = T.dim();
    FrtReport rep;
    for (int i = 1; i <= N; ++i)
        for (int j = 1; j <= N; ++j)
            for (int s = 1; s <= N; ++s)
                for (int t = 1; t <= N; ++t) {
                    std::vector<Summand> acc;
                    for (int k = 1; k <= N; ++k)
                        for (int l = 1; l <= N; ++l) {
                            double r1 = r_entry(j, i, k, l, T.n, q);
                            if (r1 != 0.0) {
                                TensorOperator p = compose(T(k, s), T(l, t));
                                for (Summand& x : p.summands) x.scalar *= r1;
                                acc.insert(acc.end(), p.summands.begin(), p.summands.end());
                            }
                            double r2 = r_entry(l, k, s, t, T.n, q);
                            if (r2 != 0.0) {
                                TensorOperator p = compose(T(i, k), T(j, l));
                                for (Summand& x : p.summands) x.scalar *= -r2;
                                acc.insert(acc.end(), p.summands.begin(), p.summands.end());
                            }
                        }
                    TensorOperator X(T.signature, std::move(acc));
                    double d = window_max(X, cutoff, q);
                    if (d > tol) ++rep.nonzero_quadruples;
                    if (d > rep.max_deviation) {
                        rep.max_deviation = d;
                        rep.i = i;
                        rep.j = j;
                        rep.s = s;
                        rep.t = t;
                    }
                }
    return rep;
}

struct BraidReport {
    double max_deviation = 0.0;
    int k = 0, l = 0;
    bool equal = false;
};

inline void require_same_element(const Word& w1, const Word& w2, int n) {
    if (element(w1, n) != element(w2, n)) throw std::invalid_argument("words represent different elements");
}

// Entrywise comparison of the two tables on the window.
inline BraidReport verify_braid_independence(const Word& w1, const Word& w2, int n, const std::vector<cplx>& t,
                                             int cutoff, double q, double tol) {
    require_same_element(w1, w2, n);
    BraidReport rep;
    if (w1.size() != w2.size()) return rep;
    GeneratorImageTable A = rep_table(RepSpec{n, t, w1});
    GeneratorImageTable B = rep_table(RepSpec{n, t, w2});
    bool ok = true;
    for (int k = 1; k <= A.dim(); ++k)
        for (int l = 1; l <= A.dim(); ++l) {
            WindowDeviation d = window_deviation(A(k, l), B(k, l), cutoff, q);
            ok = ok && d.within(tol);
            if (d.max_diff > rep.max_deviation) {
                rep.max_deviation = d.max_diff;
                rep.k = k;
                rep.l = l;
            }
        }
    rep.equal = ok;
    return rep;
}

// Vacuum expectation <e_0, pi(x) e_0> for x = g_1 g_2 ... g_m, each g a generator or its adjoint.
struct GeneratorLetter {
    int k = 1, l = 1;
    bool star = false;
};

inline cplx vacuum_expectation(const GeneratorImageTable& T, const std::vector<GeneratorLetter>& x, double q) {
    SparseVector v = SparseVector::vacuum(T.signature);
    for (auto it = x.rbegin(); it != x.rend(); ++it) {
        const TensorOperator& g = T(it->k, it->l);
        v = apply(it->star ? adjoint(g) : g, v, q);
        if (v.empty()) return 0.0;
    }
    return v.at(MultiIndex(T.signature.size()));
}

struct StateReport {
    double max_deviation = 0.0;
    std::size_t words_checked = 0;
};

// Compares the vacuum states of two modules on all words of length <= 2 plus a seeded sample of longer words.
inline StateReport vacuum_state_distance(const GeneratorImageTable& A, const GeneratorImageTable& B, double q,
                                         std::uint64_t seed, std::size_t samples = 1500, int max_len = 4) {
    if (A.n != B.n) throw std::invalid_argument("rank mismatch");
    const int N = A.dim();
    std::vector<GeneratorLetter> letters;
    for (int k = 1; k <= N; ++k)
        for (int l = 1; l <= N; ++l)
            for (bool s : {false, true}) letters.push_back({k, l, s});
    StateReport rep;
    auto check = [&](const std::vector<GeneratorLetter>& x) {
        cplx a = vacuum_expectation(A, x, q);
        cplx b = vacuum_expectation(B, x, q);
        rep.max_deviation = std::max(rep.max_deviation, std::abs(a - b));
        ++rep.words_checked;
    };
    for (const auto& g : letters) check({g});
    for (const auto& g : letters)
        for (const auto& h : letters) check({g, h});
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
    std::uniform_int_distribution<int> len(3, std::max(3, max_len));
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<GeneratorLetter> x(static_cast<std::size_t>(len(rng)));
        for (auto& g : x) g = letters[pick(rng)];
        check(x);
    }
    return rep;
}

} // namespace bqdim
