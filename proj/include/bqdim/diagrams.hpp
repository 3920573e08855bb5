#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qoperators.hpp"
#include "repsoq.hpp"
#include "weyl.hpp"

namespace bqdim {

enum class EdgeTag {
    identity,
    alpha,          // sqrt(1-q^{4N+4}) S
    alpha_star,     // S* sqrt(1-q^{4N+4})
    gamma,          // q^{2N}
    gamma_shift,    // q^{2N+2}
    minus_gamma,    // -q^{2N}
    minus_gamma_shift, // -q^{2N+2}
    center,         // I - (1+q^2) q^{2N}
    block_down2,    // sqrt((1-q^{2N+2})(1-q^{2N+4})) S^2
    block_up2,      // (S*)^2 sqrt((1-q^{2N+2})(1-q^{2N+4}))
    block_mid_down, // (n+1, n)
    block_top_down, // (n, n+1)
    block_bot_up,   // (n+2, n+1)
    block_mid_up,   // (n+1, n+2)
    block_gamma_shift, // q^{2N+2} at (n, n+2)
    block_gamma,       // q^{2N} at (n+2, n)
    torus_label
};

inline const char* to_string(EdgeTag t) {
    switch (t) {
    case EdgeTag::identity: return "identity";
    case EdgeTag::alpha: return "alpha";
    case EdgeTag::alpha_star: return "alpha_star";
    case EdgeTag::gamma: return "gamma";
    case EdgeTag::gamma_shift: return "gamma_shift";
    case EdgeTag::minus_gamma: return "minus_gamma";
    case EdgeTag::minus_gamma_shift: return "minus_gamma_shift";
    case EdgeTag::center: return "center";
    case EdgeTag::block_down2: return "block_down2";
    case EdgeTag::block_up2: return "block_up2";
    case EdgeTag::block_mid_down: return "block_mid_down";
    case EdgeTag::block_top_down: return "block_top_down";
    case EdgeTag::block_bot_up: return "block_bot_up";
    case EdgeTag::block_mid_up: return "block_mid_up";
    case EdgeTag::block_gamma_shift: return "block_gamma_shift";
    case EdgeTag::block_gamma: return "block_gamma";
    case EdgeTag::torus_label: return "torus";
    }
    return "?";
}

struct EdgePrimitive {
    EdgeTag tag = EdgeTag::identity;
    cplx label{1.0, 0.0}; // torus edges only
};

// Single-slot operator for a tag; torus labels become zero-slot scalars.
inline TensorOperator realize(const EdgePrimitive& e) {
    using detail::op1;
    using detail::signed_coeff;
    const Coeff c1q2 = Coeff::one_plus(0, 2);
    switch (e.tag) {
    case EdgeTag::identity: return TensorOperator::identity({SpaceKind::unilateral});
    case EdgeTag::alpha: return op1(1, Coeff::one_minus(4, 0));
    case EdgeTag::alpha_star: return op1(-1, Coeff::one_minus(4, 4));
    case EdgeTag::gamma:
    case EdgeTag::block_gamma: return op1(0, Coeff::qpow(2, 0));
    case EdgeTag::gamma_shift:
    case EdgeTag::block_gamma_shift: return op1(0, Coeff::qpow(2, 2));
    case EdgeTag::minus_gamma: return op1(0, signed_coeff(-1.0, Coeff::qpow(2, 0)));
    case EdgeTag::minus_gamma_shift: return op1(0, signed_coeff(-1.0, Coeff::qpow(2, 2)));
    case EdgeTag::center:
        return add(TensorOperator::identity({SpaceKind::unilateral}),
                   op1(0, signed_coeff(-1.0, Coeff::one_plus(0, 2, 2) * Coeff::qpow(2, 0))));
    case EdgeTag::block_down2: return op1(2, Coeff::one_minus(2, -2) * Coeff::one_minus(2, 0));
    case EdgeTag::block_up2: return op1(-2, Coeff::one_minus(2, 4) * Coeff::one_minus(2, 2));
    case EdgeTag::block_mid_down: return op1(1, Coeff::qpow(1, -1) * c1q2 * Coeff::one_minus(2, 0));
    case EdgeTag::block_top_down: return op1(1, signed_coeff(-1.0, Coeff::qpow(1, 0) * c1q2 * Coeff::one_minus(2, 0)));
    case EdgeTag::block_bot_up: return op1(-1, Coeff::qpow(1, 0) * c1q2 * Coeff::one_minus(2, 2));
    case EdgeTag::block_mid_up: return op1(-1, signed_coeff(-1.0, Coeff::qpow(1, 1) * c1q2 * Coeff::one_minus(2, 2)));
    case EdgeTag::torus_label: return TensorOperator::scalar(e.label);
    }
    throw std::logic_error("unknown edge tag");
}

struct DiagramEdge {
    int left = 0;
    int right = 0;
    EdgePrimitive primitive;
};

enum class LayerKind { elementary, torus };

struct DiagramLayer {
    int n = 0;
    LayerKind kind = LayerKind::elementary;
    int index = 0; // generator index for elementary layers
    std::vector<DiagramEdge> edges;

    Signature signature() const {
        return kind == LayerKind::torus ? Signature{} : Signature{SpaceKind::unilateral};
    }
};

inline DiagramLayer elementary_layer(int i, int n) {
    if (n < 1 || i < 1 || i > n) throw std::out_of_range("elementary index out of range");
    DiagramLayer L{n, LayerKind::elementary, i, {}};
    std::map<std::pair<int, int>, EdgeTag> e;
    if (i < n) {
        e[{i, i}] = EdgeTag::alpha;
        e[{i, i + 1}] = EdgeTag::minus_gamma_shift;
        e[{i + 1, i}] = EdgeTag::gamma;
        e[{i + 1, i + 1}] = EdgeTag::alpha_star;
        e[{2 * n - i + 1, 2 * n - i + 1}] = EdgeTag::alpha;
        e[{2 * n - i + 1, 2 * n - i + 2}] = EdgeTag::gamma_shift;
        e[{2 * n - i + 2, 2 * n - i + 1}] = EdgeTag::minus_gamma;
        e[{2 * n - i + 2, 2 * n - i + 2}] = EdgeTag::alpha_star;
    } else {
        e[{n, n}] = EdgeTag::block_down2;
        e[{n, n + 1}] = EdgeTag::block_top_down;
        e[{n, n + 2}] = EdgeTag::block_gamma_shift;
        e[{n + 1, n}] = EdgeTag::block_mid_down;
        e[{n + 1, n + 1}] = EdgeTag::center;
        e[{n + 1, n + 2}] = EdgeTag::block_mid_up;
        e[{n + 2, n}] = EdgeTag::block_gamma;
        e[{n + 2, n + 1}] = EdgeTag::block_bot_up;
        e[{n + 2, n + 2}] = EdgeTag::block_up2;
    }
    for (int k = 1; k <= 2 * n + 1; ++k)
        if (!e.count({k, k})) e[{k, k}] = EdgeTag::identity;
    for (const auto& [key, tag] : e) L.edges.push_back({key.first, key.second, {tag, 1.0}});
    return L;
}

inline DiagramLayer torus_layer(const std::vector<cplx>& t, int n) {
    GeneratorImageTable T = torus_table(t, n);
    DiagramLayer L{n, LayerKind::torus, 0, {}};
    for (int k = 1; k <= 2 * n + 1; ++k) L.edges.push_back({k, k, {EdgeTag::torus_label, T(k, k).summands[0].scalar}});
    return L;
}

struct Diagram {
    int n = 0;
    std::vector<DiagramLayer> layers;

    Signature signature() const {
        Signature s;
        for (const DiagramLayer& L : layers) {
            Signature x = L.signature();
            s.insert(s.end(), x.begin(), x.end());
        }
        return s;
    }
};

inline Diagram concatenate(const Diagram& A, const Diagram& B) {
    if (A.layers.empty()) return B;
    if (B.layers.empty()) return A;
    if (A.n != B.n) throw std::invalid_argument("rank mismatch");
    Diagram D = A;
    D.layers.insert(D.layers.end(), B.layers.begin(), B.layers.end());
    return D;
}

// Word layers; a torus layer is prepended when t is given.
inline Diagram word_diagram(int n, const Word& w, const std::vector<cplx>& t = {}) {
    Diagram D{n, {}};
    if (!t.empty()) D.layers.push_back(torus_layer(t, n));
    for (int i : w) D.layers.push_back(elementary_layer(i, n));
    return D;
}

using DiagramPath = std::vector<const DiagramEdge*>;

inline void check_node(const Diagram& D, int x) {
    if (x < 1 || x > 2 * D.n + 1) throw std::out_of_range("node out of range");
}

// All left-to-right paths from left node l to right node k.
inline std::vector<DiagramPath> paths(const Diagram& D, int l, int k) {
    check_node(D, l);
    check_node(D, k);
    std::vector<DiagramPath> out;
    if (D.layers.empty()) {
        if (l == k) out.push_back({});
        return out;
    }
    // reachable[j][x]: node x at the right of layer j-1 can still reach k
    const std::size_t m = D.layers.size();
    std::vector<std::vector<bool>> reach(m + 1, std::vector<bool>(2 * D.n + 2, false));
    reach[m][k] = true;
    for (std::size_t j = m; j-- > 0;)
        for (const DiagramEdge& e : D.layers[j].edges)
            if (reach[j + 1][e.right]) reach[j][e.left] = true;
    DiagramPath cur;
    std::function<void(std::size_t, int)> walk = [&](std::size_t j, int node) {
        if (j == m) {
            out.push_back(cur);
            return;
        }
        for (const DiagramEdge& e : D.layers[j].edges) {
            if (e.left != node || !reach[j + 1][e.right]) continue;
            cur.push_back(&e);
            walk(j + 1, e.right);
            cur.pop_back();
        }
    };
    if (reach[0][l]) walk(0, l);
    return out;
}

inline TensorOperator path_sum(const Diagram& D, int l, int k) {
    std::vector<Summand> acc;
    for (const DiagramPath& p : paths(D, l, k)) {
        TensorOperator t = TensorOperator::identity({});
        for (const DiagramEdge* e : p) t = tensor(t, realize(e->primitive));
        acc.insert(acc.end(), t.summands.begin(), t.summands.end());
    }
    return TensorOperator(D.signature(), std::move(acc));
}

inline std::string render_dot(const Diagram& D) {
    std::ostringstream os;
    os << "digraph bqdim {\n  rankdir=LR;\n  node [shape=circle];\n";
    const std::size_t m = D.layers.size();
    auto name = [&](std::size_t col, int i) {
        if (col == 0) return "L" + std::to_string(i);
        if (col == m) return "R" + std::to_string(i);
        return "M" + std::to_string(col) + "_" + std::to_string(i);
    };
    auto style = [](EdgeTag t) -> const char* {
        switch (t) {
        case EdgeTag::identity: return "solid";
        case EdgeTag::alpha:
        case EdgeTag::alpha_star:
        case EdgeTag::block_down2:
        case EdgeTag::block_up2: return "bold";
        case EdgeTag::gamma:
        case EdgeTag::gamma_shift:
        case EdgeTag::minus_gamma:
        case EdgeTag::minus_gamma_shift: return "dashed";
        case EdgeTag::block_gamma:
        case EdgeTag::block_gamma_shift: return "dotted";
        case EdgeTag::center: return "bold";
        case EdgeTag::torus_label: return "solid";
        default: return "tapered";
        }
    };
    if (m > 0) {
        for (std::size_t col = 0; col <= m; ++col) {
            os << "  subgraph col" << col << " { rank=same;";
            for (int i = 1; i <= 2 * D.n + 1; ++i) os << ' ' << name(col, i) << ';';
            os << " }\n";
        }
        for (std::size_t j = 0; j < m; ++j)
            for (const DiagramEdge& e : D.layers[j].edges) {
                os << "  " << name(j, e.left) << " -> " << name(j + 1, e.right) << " [style=" << style(e.primitive.tag)
                   << ", label=\"";
                if (e.primitive.tag == EdgeTag::torus_label)
                    os << e.primitive.label.real() << (e.primitive.label.imag() < 0 ? "-" : "+")
                       << std::abs(e.primitive.label.imag()) << "i";
                else
                    os << to_string(e.primitive.tag);
                os << "\"];\n";
            }
    }
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Embedding maps

struct EmbeddingMap {
    int n = 0;
    int from = 0; // k
    int to = 0;   // k + l
    std::map<int, int> mapping;

    int lower() const { return n - from + 1; }
    int upper() const { return n + from + 1; }
    int operator()(int j) const { return mapping.at(j); }
};

inline EmbeddingMap identity_embedding(int n, int k) {
    EmbeddingMap m{n, k, k, {}};
    for (int j = n - k + 1; j <= n + k + 1; ++j) m.mapping[j] = j;
    return m;
}

// lambda_i^{i+1}, counting letters of the part w_{i+1}.
inline EmbeddingMap embedding_step(const std::vector<Word>& parts, int i, int n) {
    if (i < 1 || i >= n || static_cast<int>(parts.size()) != n) throw std::out_of_range("part index out of range");
    std::map<int, int> count;
    for (int x : parts[i]) ++count[x];
    EmbeddingMap m{n, i, i + 1, {}};
    for (int j = n - i + 1; j <= n + i + 1; ++j) {
        if (j <= n)
            m.mapping[j] = count[j - 1] == 1 ? j - 1 : j;
        else if (j == n + 1)
            m.mapping[j] = j;
        else
            m.mapping[j] = count[2 * n - j + 1] == 1 ? j + 1 : j;
    }
    return m;
}

inline EmbeddingMap compose_embeddings(const std::vector<EmbeddingMap>& maps) {
    if (maps.empty()) throw std::invalid_argument("no maps to compose");
    EmbeddingMap out = identity_embedding(maps.front().n, maps.front().from);
    for (const EmbeddingMap& m : maps) {
        if (m.from != out.to || m.n != out.n) throw std::invalid_argument("non-consecutive embedding maps");
        for (auto& [j, v] : out.mapping) v = m(v);
        out.to = m.to;
    }
    return out;
}

// lambda_k^{target}
inline EmbeddingMap chain_embedding(const std::vector<Word>& parts, int k, int target, int n) {
    if (target == k) return identity_embedding(n, k);
    std::vector<EmbeddingMap> steps;
    for (int a = k; a < target; ++a) steps.push_back(embedding_step(parts, a, n));
    return compose_embeddings(steps);
}

struct EmbeddingReport {
    double max_violation = 0.0;
    std::vector<std::pair<int, cplx>> constants; // (i, C) for the diagonal images
    bool pass(double tol) const { return max_violation < tol; }
};

// Vacuum conditions of a diagram embedding for the tail word w_{k+1} ... w_{k+l}.
inline EmbeddingReport verify_embedding(const std::vector<Word>& parts, int k, int l, const EmbeddingMap& map,
                                        double q) {
    const int n = static_cast<int>(parts.size());
    if (map.from != k) throw std::invalid_argument("map domain does not match k");
    Word tail = concat(parts, static_cast<std::size_t>(k), static_cast<std::size_t>(k + l));
    GeneratorImageTable T = rep_table(n, tail);
    SparseVector vac = SparseVector::vacuum(T.signature);
    MultiIndex zero(T.signature.size());
    EmbeddingReport rep;
    for (int i = map.lower(); i <= map.upper(); ++i)
        for (int j = map.lower(); j <= map.upper(); ++j) {
            const TensorOperator& g = T(j, map(i));
            for (int pass = 0; pass < 2; ++pass) {
                SparseVector out = apply(pass == 0 ? g : adjoint(g), vac, q);
                if (i == j) {
                    cplx c = out.at(zero);
                    double rest = std::sqrt(std::max(0.0, out.norm2() - std::norm(c)));
                    rep.max_violation = std::max(rep.max_violation, rest);
                    if (std::abs(c) < 1e-12) rep.max_violation = std::max(rep.max_violation, 1.0);
                    if (pass == 0) rep.constants.emplace_back(i, c);
                } else {
                    rep.max_violation = std::max(rep.max_violation, out.norm());
                }
            }
        }
    return rep;
}

} // namespace bqdim
