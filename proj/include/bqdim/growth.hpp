#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "diagrams.hpp"
#include "exact.hpp"
#include "qoperators.hpp"
#include "repsoq.hpp"
#include "weyl.hpp"

namespace bqdim {

inline double binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return std::round(r);
}

// ---------------------------------------------------------------------------
// Rank maintenance

// Echelon basis with partial pivoting: each stored vector is scaled so its pivot (largest entry,
// lexicographically first among ties) is 1, and is zero at the pivots of all earlier vectors.
class SpanBasis {
public:
    explicit SpanBasis(double tol = 1e-8) : tol_(tol) {}

    std::size_t size() const { return vecs_.size(); }
    const std::vector<SparseVector>& vectors() const { return vecs_; }

    // Residual after eliminating all pivots in insertion order; empty when dependent.
    SparseVector reduce(SparseVector v) const {
        const double scale = v.max_abs();
        std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> todo;
        std::vector<char> queued(vecs_.size(), 0);
        auto enqueue = [&](const SparseVector& x, std::size_t after) {
            for (const auto& e : x.entries) {
                auto it = pivots_.find(e.first);
                if (it != pivots_.end() && (after == npos || it->second > after) && !queued[it->second]) {
                    queued[it->second] = 1;
                    todo.push(it->second);
                }
            }
        };
        enqueue(v, npos);
        while (!todo.empty()) {
            std::size_t i = todo.top();
            todo.pop();
            cplx c = v.at(pivot_of_[i]);
            if (c == cplx(0.0, 0.0)) continue;
            v = linear_combination({{1.0, &v}, {-c, &vecs_[i]}}, tol_);
            enqueue(vecs_[i], i);
        }
        if (!v.empty() && v.max_abs() < tol_ * scale) v.entries.clear();
        return v;
    }

    // Returns true when v was independent of the current span.
    bool insert(const SparseVector& v) {
        SparseVector r = reduce(v);
        if (r.empty()) return false;
        std::size_t p = 0;
        for (std::size_t j = 1; j < r.entries.size(); ++j)
            if (std::abs(r.entries[j].second) > std::abs(r.entries[p].second)) p = j;
        cplx lead = r.entries[p].second;
        for (auto& e : r.entries) e.second /= lead;
        r.entries[p].second = 1.0;
        pivots_.emplace(r.entries[p].first, vecs_.size());
        pivot_of_.push_back(r.entries[p].first);
        vecs_.push_back(std::move(r));
        return true;
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    double tol_;
    std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> pivots_;
    std::vector<MultiIndex> pivot_of_;
    std::vector<SparseVector> vecs_;
};

// ---------------------------------------------------------------------------
// Growth series

struct GrowthPoint {
    int r = 0;
    std::size_t d = 0;
};

struct GrowthSeries {
    std::vector<GrowthPoint> values;
    bool truncated = false; // basis cap reached
    bool exact = false;     // ranks computed over GF(p)
    std::size_t at(int r) const { return values.at(static_cast<std::size_t>(r)).d; }
};

struct GrowthOptions {
    int r_max = 8;
    double q = 0.5;
    std::size_t basis_cap = 20000;
    unsigned threads = 1;
    double tol = 1e-8;
    bool exact = true; // exact ranks when q is a small-denominator rational
};

// d(r) = dim span of products of at most r generators applied to start.
inline GrowthSeries span_growth(const SparseVector& start, const std::vector<TensorOperator>& gens,
                                const GrowthOptions& opt) {
    GrowthSeries s;
    SpanBasis basis(opt.tol);
    basis.insert(start);
    s.values.push_back({0, basis.size()});
    std::vector<std::size_t> frontier{0};
    const unsigned threads = std::max(1u, opt.threads);
    for (int r = 1; r <= opt.r_max; ++r) {
        // candidates ordered by (frontier vector, generator)
        std::vector<SparseVector> cand(frontier.size() * gens.size());
        auto work = [&](std::size_t lo, std::size_t hi) {
            for (std::size_t a = lo; a < hi; ++a)
                for (std::size_t g = 0; g < gens.size(); ++g)
                    cand[a * gens.size() + g] = apply(gens[g], basis.vectors()[frontier[a]], opt.q);
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
        for (SparseVector& v : cand) {
            if (v.empty()) continue;
            if (basis.size() >= opt.basis_cap) {
                s.truncated = true;
                break;
            }
            if (basis.insert(v)) next.push_back(basis.size() - 1);
        }
        s.values.push_back({r, basis.size()});
        if (s.truncated) break;
        frontier = std::move(next);
    }
    return s;
}

inline std::optional<std::vector<exact::ModOperator>> to_mod_all(const std::vector<TensorOperator>& ops,
                                                                 const std::vector<exact::Gauge>& gauges) {
    std::vector<exact::ModOperator> out;
    for (const TensorOperator& T : ops) {
        auto m = exact::to_mod(T, gauges);
        if (!m) return std::nullopt;
        out.push_back(std::move(*m));
    }
    return out;
}

// Exact growth of the span of words applied to start when everything is rational; nullopt otherwise.
inline std::optional<GrowthSeries> exact_span_growth(const std::vector<std::pair<MultiIndex, cplx>>& start,
                                                     const std::vector<TensorOperator>& gens,
                                                     const std::vector<exact::Gauge>& gauges, const GrowthOptions& opt) {
    if (!opt.exact) return std::nullopt;
    auto qm = exact::to_field(opt.q);
    if (!qm) return std::nullopt;
    auto mods = to_mod_all(gens, gauges);
    if (!mods) return std::nullopt;
    exact::ModVector v;
    for (const auto& [idx, c] : start) {
        if (c != cplx(1.0, 0.0)) return std::nullopt;
        v.entries.emplace_back(idx, 1);
    }
    exact::Field F(*qm);
    exact::SpanResult r = exact::span_growth(v, *mods, F, opt.r_max, opt.basis_cap, opt.threads);
    GrowthSeries s;
    s.exact = true;
    s.truncated = r.truncated;
    for (std::size_t j = 0; j < r.d.size(); ++j) s.values.push_back({static_cast<int>(j), r.d[j]});
    return s;
}

struct ExponentEstimate {
    double log_ratio = 0.0;
    double slope = 0.0;
};

inline ExponentEstimate exponent_estimate(const GrowthSeries& s) {
    if (s.values.size() < 4) throw std::invalid_argument("exponent estimate needs at least 4 samples");
    const int rmax = s.values.back().r;
    const int rhalf = (rmax + 1) / 2;
    ExponentEstimate e;
    double dmax = static_cast<double>(s.values.back().d);
    double dhalf = static_cast<double>(s.at(rhalf));
    if (rhalf > 0 && rmax > rhalf) e.log_ratio = std::log(dmax / dhalf) / std::log(static_cast<double>(rmax) / rhalf);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const GrowthPoint& p : s.values) {
        if (p.r < std::max(1, rhalf)) continue;
        double x = std::log(static_cast<double>(p.r)), y = std::log(static_cast<double>(p.d));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    double den = cnt * sxx - sx * sx;
    if (cnt >= 2 && den > 0) e.slope = (cnt * sxy - sx * sy) / den;
    return e;
}

// ---------------------------------------------------------------------------
// Modules

// Nonzero generator images, ordered by (k, l).
inline std::vector<TensorOperator> module_generators(const GeneratorImageTable& T) {
    std::vector<TensorOperator> out;
    for (int k = 1; k <= T.dim(); ++k)
        for (int l = 1; l <= T.dim(); ++l)
            if (!T(k, l).is_zero()) out.push_back(T(k, l));
    return out;
}

// The torus point only rescales generators, so exact ranks are taken at t = 1.
inline GrowthSeries module_growth(const RepSpec& spec, const GrowthOptions& opt) {
    if (opt.exact) {
        GeneratorImageTable T1 = rep_table(RepSpec{spec.n, {}, spec.word});
        SparseVector vac = SparseVector::vacuum(T1.signature);
        if (auto s = exact_span_growth(vac.entries, module_generators(T1), exact::word_gauges(spec.word, spec.n), opt))
            return *s;
    }
    GeneratorImageTable T = rep_table(spec);
    return span_growth(SparseVector::vacuum(T.signature), module_generators(T), opt);
}

inline constexpr int kShiftExponent = 2;

inline double module_upper_bound(int r, int len) { return std::pow(kShiftExponent * r + 1.0, len); }

struct UpperBoundReport {
    bool holds = true;
    int first_violation = -1;
};

inline UpperBoundReport upper_bound_check(const RepSpec& spec, const GrowthSeries& s) {
    const int len = static_cast<int>(spec.word.size());
    UpperBoundReport rep;
    for (const GrowthPoint& p : s.values)
        if (static_cast<double>(p.d) > module_upper_bound(p.r, len)) {
            rep.holds = false;
            if (rep.first_violation < 0) rep.first_violation = p.r;
        }
    return rep;
}

struct WitnessFamily {
    int part = 0;     // part index i
    int offset = 0;   // first tensor slot of the part
    int bilateral_slot = -1;
    std::vector<TensorOperator> ops;  // P_1 .. P_r (module) or F_1 .. F_r (homogeneous)
    std::vector<int> columns;         // generator column index used for each op, in the rank-i labelling
    std::vector<int> sigma;           // sigma[j-1]
    std::optional<TensorOperator> h0; // homogeneous kind only
    int degree = 1;

    int size() const { return static_cast<int>(ops.size()); }
};

// Column indices c_j and the permutation sigma for a part of length r at rank i.
inline void rank_family(int r, int i, std::vector<int>& cs, std::vector<int>& sigma) {
    cs.clear();
    sigma.clear();
    for (int j = 1; j <= r; ++j) {
        if (r < i) {
            cs.push_back(2 * i - j + 2);
            sigma.push_back(j);
        } else {
            cs.push_back(j <= 2 * i - r - 1 ? 2 * i - j + 2 : j + 1);
            sigma.push_back(2 * i - r <= j && j <= r ? 2 * i - j : j);
        }
    }
}

// T_c^i = pi_w(v^{n+i+1}_{lambda_i^n(c+n-i)}), c = 1..2i+1.
inline std::vector<TensorOperator> embedded_operators(const GeneratorImageTable& T, const std::vector<Word>& parts,
                                                      int i) {
    const int n = T.n;
    if (i < 1 || i > n) throw std::out_of_range("part index out of range");
    EmbeddingMap lam = chain_embedding(parts, i, n, n);
    std::vector<TensorOperator> out;
    for (int c = 1; c <= 2 * i + 1; ++c) out.push_back(T(n + i + 1, lam(c + n - i)));
    return out;
}

struct WitnessChain {
    int n = 0;
    Word word; // normal-form word whose module carries the witnesses
    GeneratorImageTable table;
    std::vector<WitnessFamily> families;
    int A = 1;
    int length() const { return static_cast<int>(word.size()); }
};

inline WitnessChain witness_chain(const SignedPermutation& w) {
    const int n = w.rank();
    std::vector<Word> ps = parts(w);
    WitnessChain ch;
    ch.n = n;
    ch.word = concat(ps);
    ch.table = rep_table(n, ch.word);
    int off = 0;
    for (int i = 1; i <= n; ++i) {
        const int r = static_cast<int>(ps[i - 1].size());
        if (r > 0) {
            std::vector<TensorOperator> Ts = embedded_operators(ch.table, ps, i);
            WitnessFamily f;
            f.part = i;
            f.offset = off;
            rank_family(r, i, f.columns, f.sigma);
            for (int c : f.columns) f.ops.push_back(Ts[c - 1]);
            ch.families.push_back(std::move(f));
        }
        off += r;
    }
    ch.A = 1;
    for (const WitnessFamily& f : ch.families) ch.A = std::max(ch.A, f.degree);
    return ch;
}

inline WitnessFamily witness_last_part(const SignedPermutation& w) {
    std::vector<Word> ps = parts(w);
    if (ps.back().empty()) throw std::invalid_argument("last part is empty");
    WitnessChain ch = witness_chain(w);
    return ch.families.back();
}

inline SparseVector apply_witness_chain(const WitnessChain& ch, const std::vector<int>& z, double q) {
    if (static_cast<int>(z.size()) != ch.length()) throw std::invalid_argument("exponent pattern has wrong length");
    SparseVector v = SparseVector::vacuum(ch.table.signature);
    for (const WitnessFamily& f : ch.families)
        for (int j = f.size(); j >= 1; --j) {
            int e = z[static_cast<std::size_t>(f.offset + f.sigma[j - 1] - 1)];
            for (int t = 0; t < e; ++t) v = apply(f.ops[j - 1], v, q);
        }
    return v;
}

// Enumerates integer tuples of the given length with entries summing to at most budget, lexicographically.
inline void for_each_pattern(int len, int budget, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> z(static_cast<std::size_t>(len), 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == len) {
            fn(z);
            return;
        }
        for (int x = 0; x <= left; ++x) {
            z[pos] = x;
            rec(pos + 1, left - x);
        }
        z[pos] = 0;
    };
    rec(0, budget);
}

// Enumerates tuples with entries summing to exactly total.
inline void for_each_composition(int len, int total, const std::function<void(const std::vector<int>&)>& fn) {
    if (len == 0) {
        if (total == 0) fn({});
        return;
    }
    std::vector<int> z(static_cast<std::size_t>(len), 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == len - 1) {
            z[pos] = left;
            fn(z);
            return;
        }
        for (int x = 0; x <= left; ++x) {
            z[pos] = x;
            rec(pos + 1, left - x);
        }
    };
    rec(0, total);
}

inline double mass_deficit(const SparseVector& v, const MultiIndex& target) {
    double nn = v.norm2();
    if (nn <= 0.0) return 1.0;
    return 1.0 - std::norm(v.at(target)) / nn;
}

struct WitnessReport {
    double worst_deficit = 0.0;
    std::size_t patterns = 0;
    std::vector<int> worst_pattern;
    bool pass(double tol) const { return worst_deficit < tol; }
};

inline WitnessReport verify_witness_chain(const WitnessChain& ch, int budget, double q) {
    WitnessReport rep;
    for_each_pattern(ch.length(), budget, [&](const std::vector<int>& z) {
        double d = mass_deficit(apply_witness_chain(ch, z, q), MultiIndex::from(z));
        ++rep.patterns;
        if (d > rep.worst_deficit || rep.worst_pattern.empty()) {
            if (d >= rep.worst_deficit) {
                rep.worst_deficit = d;
                rep.worst_pattern = z;
            }
        }
    });
    return rep;
}

struct LowerBoundRecord {
    int r = 0;
    int word_length = 0; // A r
    std::size_t required = 0; // C(r+l-1, r)
    std::size_t verified = 0;
};

// Counts basis vectors e_beta, |beta| = r, reached by the witness chain within A r applications.
inline LowerBoundRecord lower_bound_certificate(const WitnessChain& ch, int r, double q, double tol) {
    LowerBoundRecord rec;
    rec.r = r;
    rec.word_length = ch.A * r;
    const int len = ch.length();
    rec.required = len == 0 ? 1 : static_cast<std::size_t>(binomial(r + len - 1, r));
    if (len == 0) {
        rec.verified = 1;
        return rec;
    }
    for_each_composition(len, r, [&](const std::vector<int>& z) {
        if (mass_deficit(apply_witness_chain(ch, z, q), MultiIndex::from(z)) < tol) ++rec.verified;
    });
    return rec;
}

struct ModuleCertificate {
    int target = 0;
    GrowthSeries series;
    std::vector<LowerBoundRecord> lower;
    std::vector<double> upper;
    WitnessReport witness;
    ExponentEstimate estimate;
    bool witness_ok = false;
    bool sandwich_ok = false;
    bool pass() const { return witness_ok && sandwich_ok && !series.truncated; }
};

inline ModuleCertificate module_certificate(const RepSpec& spec, const GrowthOptions& opt, int witness_budget = 4) {
    ModuleCertificate c;
    SignedPermutation w = element(spec.word, spec.n);
    c.target = length(w);
    if (c.target != static_cast<int>(spec.word.size())) throw std::invalid_argument("word is not reduced");
    c.series = module_growth(spec, opt);
    WitnessChain ch = witness_chain(w);
    c.witness = verify_witness_chain(ch, witness_budget, opt.q);
    c.witness_ok = c.witness.pass(opt.tol);
    c.sandwich_ok = true;
    for (const GrowthPoint& p : c.series.values) {
        double ub = module_upper_bound(p.r, c.target);
        c.upper.push_back(ub);
        if (static_cast<double>(p.d) > ub) c.sandwich_ok = false;
        LowerBoundRecord lb = lower_bound_certificate(ch, p.r / ch.A, opt.q, opt.tol);
        if (lb.verified != lb.required || lb.verified > p.d) c.sandwich_ok = false;
        c.lower.push_back(lb);
    }
    if (c.series.values.size() >= 4) c.estimate = exponent_estimate(c.series);
    return c;
}

// ---------------------------------------------------------------------------
// Homogeneous spaces

inline bool in_zeta(int k, int n, int m) { return (k >= 1 && k <= n - m + 1) || (k >= n + m && k <= 2 * n + 1); }

// eta_e(v_k^k) on n-m+1 bilateral slots.
inline TensorOperator eta_e(int k, int n, int m) {
    const int nb = n - m + 1;
    std::vector<TensorOperator> facs;
    for (int s = 0; s < nb; ++s) {
        WeightedShiftSum f = WeightedShiftSum::identity(SpaceKind::bilateral);
        if (k > n + 1 && 2 * n + 1 - k == s) f = WeightedShiftSum::Sstar(SpaceKind::bilateral);
        if (k < n + 1 && k - 1 == s) f = WeightedShiftSum::S(SpaceKind::bilateral);
        facs.push_back(TensorOperator::single(f));
    }
    return tensor_all(facs);
}

inline void require_quotient(const SignedPermutation& w, int n, int m) {
    if (m < 1 || m > n) throw std::out_of_range("m out of range");
    if (!in_quotient(w, ParabolicSubset::homogeneous_family(n, m)))
        throw std::invalid_argument("element is not a minimal coset representative");
}

// Rows outside zeta_m are left zero.
inline GeneratorImageTable homogeneous_rep(int n, int m, const Word& word) {
    require_quotient(element(word, n), n, m);
    GeneratorImageTable P = rep_table(n, word);
    Signature sig(static_cast<std::size_t>(n - m + 1), SpaceKind::bilateral);
    sig.insert(sig.end(), P.signature.begin(), P.signature.end());
    GeneratorImageTable H(n, sig);
    for (int k = 1; k <= 2 * n + 1; ++k) {
        if (!in_zeta(k, n, m)) continue;
        TensorOperator e = eta_e(k, n, m);
        for (int l = 1; l <= 2 * n + 1; ++l) H.at(k, l) = tensor(e, P(k, l));
    }
    return H;
}

inline std::vector<TensorOperator> homogeneous_generators(const GeneratorImageTable& H, int m) {
    std::vector<TensorOperator> out;
    for (int k = 1; k <= H.dim(); ++k) {
        if (!in_zeta(k, H.n, m)) continue;
        for (int l = 1; l <= H.dim(); ++l)
            if (!H(k, l).is_zero()) {
                out.push_back(H(k, l));
                out.push_back(adjoint(H(k, l)));
            }
    }
    return out;
}

struct HomogeneousWitnesses {
    int n = 0, m = 0;
    Word word;
    GeneratorImageTable table;
    std::vector<WitnessFamily> families; // parts m..n
    int A = 2;
    int bilateral() const { return n - m + 1; }
    int unilateral() const { return static_cast<int>(word.size()); }
    // r_0 per family, then r_s and p_s per unilateral slot
    int pattern_length() const { return static_cast<int>(families.size()) + 2 * unilateral(); }
};

inline HomogeneousWitnesses homogeneous_witnesses(int n, int m, const SignedPermutation& w) {
    require_quotient(w, n, m);
    std::vector<Word> ps = parts(w);
    HomogeneousWitnesses hw;
    hw.n = n;
    hw.m = m;
    hw.word = concat(ps);
    hw.table = homogeneous_rep(n, m, hw.word);
    int off = 0;
    for (int i = 1; i < m; ++i) off += static_cast<int>(ps[i - 1].size());
    for (int i = m; i <= n; ++i) {
        const int r = static_cast<int>(ps[i - 1].size());
        std::vector<TensorOperator> Ts = embedded_operators(hw.table, ps, i);
        WitnessFamily f;
        f.part = i;
        f.offset = off;
        f.bilateral_slot = n - i;
        f.degree = 2;
        const int c0 = r < i ? 2 * i + 1 - r : 2 * i - r;
        f.h0 = Ts[static_cast<std::size_t>(c0 - 1)];
        rank_family(r, i, f.columns, f.sigma);
        for (int c : f.columns) f.ops.push_back(Ts[c - 1]);
        hw.families.push_back(std::move(f));
        off += r;
    }
    return hw;
}

struct HomogeneousPattern {
    std::vector<int> r0; // per family
    std::vector<int> rs; // per unilateral slot
    std::vector<int> ps;
    int total() const {
        int t = 0;
        for (int x : r0) t += x;
        for (int x : rs) t += x;
        for (int x : ps) t += x;
        return t;
    }
};

inline HomogeneousPattern split_pattern(const HomogeneousWitnesses& hw, const std::vector<int>& z) {
    const std::size_t F = hw.families.size(), L = static_cast<std::size_t>(hw.unilateral());
    HomogeneousPattern p;
    p.r0.assign(z.begin(), z.begin() + F);
    p.rs.assign(z.begin() + F, z.begin() + F + L);
    p.ps.assign(z.begin() + F + L, z.end());
    return p;
}

inline bool admissible(const HomogeneousPattern& p) {
    for (std::size_t s = 0; s < p.rs.size(); ++s)
        if (p.ps[s] > p.rs[s]) return false;
    return true;
}

// Operator word of a pattern as a sequence of (operator, adjoint?) applied left to right.
inline std::vector<std::pair<const TensorOperator*, bool>> pattern_word(const HomogeneousWitnesses& hw,
                                                                        const HomogeneousPattern& p) {
    std::vector<std::pair<const TensorOperator*, bool>> seq;
    for (std::size_t a = 0; a < hw.families.size(); ++a)
        for (int t = 0; t < p.r0[a]; ++t) seq.emplace_back(&*hw.families[a].h0, false);
    for (const WitnessFamily& f : hw.families)
        for (int j = f.size(); j >= 1; --j) {
            const std::size_t s = static_cast<std::size_t>(f.offset - 0 + f.sigma[j - 1] - 1);
            for (int t = 0; t < p.rs[s]; ++t) {
                seq.emplace_back(&f.ops[j - 1], false);
                seq.emplace_back(&*f.h0, true);
            }
            for (int t = 0; t < p.ps[s]; ++t) {
                seq.emplace_back(&*f.h0, false);
                seq.emplace_back(&f.ops[j - 1], true);
            }
        }
    return seq;
}

inline SparseVector apply_sequence(const std::vector<std::pair<const TensorOperator*, bool>>& seq, SparseVector v,
                                   double q, const std::function<TensorOperator(const TensorOperator&)>& lift = {}) {
    for (const auto& [op, star] : seq) {
        TensorOperator g = star ? adjoint(*op) : *op;
        if (lift) g = lift(g);
        v = apply(g, v, q);
        if (v.empty()) break;
    }
    return v;
}

inline MultiIndex pattern_target(const HomogeneousWitnesses& hw, const HomogeneousPattern& p) {
    MultiIndex t(static_cast<std::size_t>(hw.bilateral() + hw.unilateral()));
    for (std::size_t a = 0; a < hw.families.size(); ++a)
        t[static_cast<std::size_t>(hw.families[a].bilateral_slot)] = static_cast<std::int16_t>(p.r0[a]);
    for (std::size_t s = 0; s < p.rs.size(); ++s)
        t[static_cast<std::size_t>(hw.bilateral()) + s] = static_cast<std::int16_t>(p.rs[s] - p.ps[s]);
    return t;
}

inline WitnessReport verify_homogeneous_witnesses(const HomogeneousWitnesses& hw, int budget, double q) {
    WitnessReport rep;
    for_each_pattern(hw.pattern_length(), budget, [&](const std::vector<int>& z) {
        HomogeneousPattern p = split_pattern(hw, z);
        if (!admissible(p)) return;
        SparseVector v = apply_sequence(pattern_word(hw, p), SparseVector::vacuum(hw.table.signature), q);
        double d = mass_deficit(v, pattern_target(hw, p));
        ++rep.patterns;
        if (d > rep.worst_deficit || rep.worst_pattern.empty()) {
            if (d >= rep.worst_deficit) {
                rep.worst_deficit = d;
                rep.worst_pattern = z;
            }
        }
    });
    return rep;
}

// Probe fingerprints: leading bilateral slots carry the probe label, so an operator word X is
// represented by sum_beta e_{id(beta)} (x) X e_beta.
struct ProbeSpace {
    Signature signature; // with the label slots
    SparseVector start;
    std::size_t probes = 0;
    std::size_t label_slots = 1;
};

inline ProbeSpace probe_space(const Signature& sig, int cutoff) {
    constexpr long base = std::numeric_limits<std::int16_t>::max();
    std::size_t count = 0;
    for_each_window_index(sig, cutoff, [&](const MultiIndex&) { ++count; });
    ProbeSpace P;
    P.probes = count;
    while (static_cast<double>(count) > std::pow(static_cast<double>(base), static_cast<double>(P.label_slots)))
        ++P.label_slots;
    P.signature.assign(P.label_slots, SpaceKind::bilateral);
    P.signature.insert(P.signature.end(), sig.begin(), sig.end());
    std::vector<std::pair<MultiIndex, cplx>> entries;
    long id = 0;
    for_each_window_index(sig, cutoff, [&](const MultiIndex& idx) {
        MultiIndex full(sig.size() + P.label_slots);
        long x = id++;
        for (std::size_t j = P.label_slots; j-- > 0;) {
            full[j] = static_cast<std::int16_t>(x % base);
            x /= base;
        }
        for (std::size_t j = 0; j < sig.size(); ++j) full[j + P.label_slots] = static_cast<std::int16_t>(idx[j]);
        entries.emplace_back(full, 1.0);
    });
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    P.start = SparseVector{P.signature, std::move(entries)};
    return P;
}

inline TensorOperator lift_to_probe(const TensorOperator& T, std::size_t label_slots) {
    return tensor(TensorOperator::identity(Signature(label_slots, SpaceKind::bilateral)), T);
}

struct AlgebraGrowth {
    GrowthSeries series;
    int probe_cutoff = 0;
    bool stabilized = false;
};

inline std::vector<exact::Gauge> homogeneous_gauges(std::size_t label_slots, int n, int m, const Word& word) {
    std::vector<exact::Gauge> g(label_slots + static_cast<std::size_t>(n - m + 1), exact::Gauge::none);
    std::vector<exact::Gauge> w = exact::word_gauges(word, n);
    g.insert(g.end(), w.begin(), w.end());
    return g;
}

inline GrowthSeries algebra_growth_at(const GeneratorImageTable& H, int m, const Word& word, int probe_cutoff,
                                      const GrowthOptions& opt) {
    ProbeSpace P = probe_space(H.signature, probe_cutoff);
    std::vector<TensorOperator> gens;
    for (const TensorOperator& g : homogeneous_generators(H, m)) gens.push_back(lift_to_probe(g, P.label_slots));
    if (auto s = exact_span_growth(P.start.entries, gens, homogeneous_gauges(P.label_slots, H.n, m, word), opt))
        return *s;
    return span_growth(P.start, gens, opt);
}

// Raises the probe cutoff until two consecutive windows give the same series.
inline AlgebraGrowth algebra_growth(int n, int m, const Word& word, int probe_cutoff, const GrowthOptions& opt,
                                    int max_probe_cutoff = -1) {
    GeneratorImageTable H = homogeneous_rep(n, m, word);
    if (max_probe_cutoff < 0) max_probe_cutoff = std::max(probe_cutoff + 2, 2 * opt.r_max + 2);
    AlgebraGrowth out;
    out.probe_cutoff = probe_cutoff;
    out.series = algebra_growth_at(H, m, word, probe_cutoff, opt);
    for (int c = probe_cutoff + 1; c <= max_probe_cutoff; ++c) {
        GrowthSeries next = algebra_growth_at(H, m, word, c, opt);
        bool same = next.values.size() == out.series.values.size() && !next.truncated && !out.series.truncated;
        for (std::size_t j = 0; same && j < next.values.size(); ++j) same = next.values[j].d == out.series.values[j].d;
        out.series = next;
        out.probe_cutoff = c;
        if (same) {
            out.stabilized = true;
            break;
        }
    }
    return out;
}

struct HomogeneousRecord {
    int r = 0;
    int word_length = 0;           // A r
    double required = 0.0;         // C(r+2l+n-m, r)/2
    std::optional<std::size_t> independent; // fingerprint rank of the witness words, when r <= r_lower
    double container = 0.0;        // (2r+1)^{2l+n-m+1}
    std::optional<std::size_t> d;  // algebra growth, when sampled
};

struct HomogeneousCertificate {
    int n = 0, m = 0;
    int target = 0;
    int quotient_dim = 0;
    Word word;
    WitnessReport witness;
    AlgebraGrowth growth;
    std::vector<HomogeneousRecord> records;
    bool witness_ok = false;
    bool lower_ok = false;
    bool upper_ok = false;
    bool pass() const { return witness_ok && lower_ok && upper_ok && target == quotient_dim; }
};

// Rank of the fingerprints of all admissible patterns with total at most r.
inline std::size_t independent_pattern_words(const HomogeneousWitnesses& hw, int r, int probe_cutoff,
                                             const GrowthOptions& opt) {
    ProbeSpace P = probe_space(hw.table.signature, probe_cutoff);
    auto lift = [&](const TensorOperator& g) { return lift_to_probe(g, P.label_slots); };
    std::vector<exact::Gauge> gauges = homogeneous_gauges(P.label_slots, hw.n, hw.m, hw.word);
    auto qm = opt.exact ? exact::to_field(opt.q) : std::nullopt;
    if (qm) {
        exact::Field F(*qm);
        std::map<std::pair<const TensorOperator*, bool>, exact::ModOperator> cache;
        bool ok = true;
        exact::ModBasis basis;
        exact::ModVector start;
        for (const auto& e : P.start.entries) start.entries.emplace_back(e.first, 1);
        for_each_pattern(hw.pattern_length(), r, [&](const std::vector<int>& z) {
            if (!ok) return;
            HomogeneousPattern p = split_pattern(hw, z);
            if (!admissible(p)) return;
            exact::ModVector v = start;
            for (const auto& key : pattern_word(hw, p)) {
                auto it = cache.find(key);
                if (it == cache.end()) {
                    auto m = exact::to_mod(lift(key.second ? adjoint(*key.first) : *key.first), gauges);
                    if (!m) {
                        ok = false;
                        return;
                    }
                    it = cache.emplace(key, std::move(*m)).first;
                }
                v = exact::apply(it->second, v, F);
                if (v.empty()) break;
            }
            if (!v.empty()) basis.insert(std::move(v));
        });
        if (ok) return basis.size();
    }
    SpanBasis basis(opt.tol);
    for_each_pattern(hw.pattern_length(), r, [&](const std::vector<int>& z) {
        HomogeneousPattern p = split_pattern(hw, z);
        if (!admissible(p)) return;
        SparseVector v = apply_sequence(pattern_word(hw, p), P.start, opt.q, lift);
        if (!v.empty()) basis.insert(v);
    });
    return basis.size();
}

// Witness words are counted for r <= r_lower; algebra growth is sampled up to opt.r_max.
inline HomogeneousCertificate homogeneous_certificate(int n, int m, int r_lower, int probe_cutoff,
                                                      const GrowthOptions& opt, int witness_budget = 3) {
    HomogeneousCertificate c;
    c.n = n;
    c.m = m;
    SignedPermutation w = longest_quotient_element(n, ParabolicSubset::homogeneous_family(n, m));
    const int len = length(w);
    c.target = 2 * len + n - m + 1;
    c.quotient_dim = classical_dimensions(n, m).quotient_dim;
    HomogeneousWitnesses hw = homogeneous_witnesses(n, m, w);
    c.word = hw.word;
    c.witness = verify_homogeneous_witnesses(hw, witness_budget, opt.q);
    c.witness_ok = c.witness.pass(opt.tol);
    c.growth = algebra_growth(n, m, hw.word, probe_cutoff, opt);
    c.lower_ok = true;
    c.upper_ok = !c.growth.series.truncated;
    const int r_top = std::max(r_lower, static_cast<int>(c.growth.series.values.size()) - 1);
    for (int r = 0; r <= r_top; ++r) {
        HomogeneousRecord rec;
        rec.r = r;
        rec.word_length = hw.A * r;
        rec.required = binomial(r + 2 * len + n - m, r) / 2.0;
        rec.container = std::pow(2.0 * r + 1.0, c.target);
        if (r < static_cast<int>(c.growth.series.values.size())) {
            rec.d = c.growth.series.at(r);
            if (static_cast<double>(*rec.d) > rec.container) c.upper_ok = false;
        }
        if (r <= r_lower) {
            rec.independent = independent_pattern_words(hw, r, c.growth.probe_cutoff, opt);
            if (static_cast<double>(*rec.independent) < rec.required) c.lower_ok = false;
        }
        c.records.push_back(rec);
    }
    return c;
}

} // namespace bqdim
