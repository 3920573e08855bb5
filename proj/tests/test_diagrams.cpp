#include <gtest/gtest.h>

#include <set>

#include <bqdim/diagrams.hpp>

using namespace bqdim;

namespace {

constexpr double q = 0.5;

std::set<std::pair<int, int>> edge_set(const DiagramLayer& L) {
    std::set<std::pair<int, int>> s;
    for (const DiagramEdge& e : L.edges) s.insert({e.left, e.right});
    return s;
}

// Path counts by dynamic programming over the layer adjacency, independent of the enumerator.
long count_paths(const Diagram& D, int l, int k) {
    const int N = 2 * D.n + 1;
    std::vector<long> cnt(N + 1, 0);
    cnt[l] = 1;
    for (const DiagramLayer& L : D.layers) {
        std::vector<long> next(N + 1, 0);
        for (const DiagramEdge& e : L.edges) next[e.right] += cnt[e.left];
        cnt = next;
    }
    return cnt[k];
}

std::vector<Word> words_up_to(int n, int len) {
    std::vector<Word> out{{}};
    for (std::size_t start = 0; start < out.size(); ++start) {
        if (static_cast<int>(out[start].size()) == len) continue;
        for (int i = 1; i <= n; ++i) {
            Word w = out[start];
            w.push_back(i);
            out.push_back(w);
        }
    }
    return out;
}

} // namespace

TEST(Layer, ElementaryNonBlock) {
    DiagramLayer L = elementary_layer(1, 2);
    std::set<std::pair<int, int>> want = {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 3}, {4, 4}, {4, 5}, {5, 4}, {5, 5}};
    EXPECT_EQ(edge_set(L), want);
}

TEST(Layer, ElementaryBlock) {
    DiagramLayer L = elementary_layer(2, 2);
    auto s = edge_set(L);
    int block = 0;
    for (auto [a, b] : s)
        if (a >= 2 && a <= 4 && b >= 2 && b <= 4) ++block;
    EXPECT_EQ(block, 9);
    EXPECT_EQ(s.size(), 11u);
    EXPECT_TRUE(s.count({1, 1}));
    EXPECT_TRUE(s.count({5, 5}));
}

TEST(Layer, Torus) {
    DiagramLayer L = torus_layer({1.0, 1.0}, 2);
    EXPECT_EQ(L.edges.size(), 5u);
    for (const DiagramEdge& e : L.edges) {
        EXPECT_EQ(e.left, e.right);
        EXPECT_EQ(e.primitive.tag, EdgeTag::torus_label);
        EXPECT_EQ(e.primitive.label, cplx(1.0));
    }
    EXPECT_TRUE(L.signature().empty());
}

TEST(Layer, EdgesRealizeTableEntries) {
    for (int n = 1; n <= 3; ++n)
        for (int i = 1; i <= n; ++i) {
            DiagramLayer L = elementary_layer(i, n);
            GeneratorImageTable T = elementary_table(i, n);
            auto s = edge_set(L);
            for (int k = 1; k <= T.dim(); ++k)
                for (int l = 1; l <= T.dim(); ++l) EXPECT_EQ(s.count({k, l}) == 1, !T(k, l).is_zero());
            for (const DiagramEdge& e : L.edges)
                EXPECT_TRUE(structurally_equal(realize(e.primitive), T(e.left, e.right)));
        }
}

TEST(Concatenate, LayerCountsAdd) {
    Diagram A = word_diagram(3, {1, 2}), B = word_diagram(3, {3, 2, 1});
    Diagram C = concatenate(A, B);
    EXPECT_EQ(C.layers.size(), 5u);
    EXPECT_EQ(concatenate(A, Diagram{3, {}}).layers.size(), A.layers.size());
    EXPECT_THROW(concatenate(A, word_diagram(2, {1})), std::invalid_argument);
    EXPECT_EQ(word_diagram(3, {1, 2, 3, 2, 1}).layers.size(), 5u);
    EXPECT_EQ(word_diagram(2, {1}, {cplx(1.0), cplx(1.0)}).layers.size(), 2u);
}

TEST(Paths, Examples) {
    Diagram id{2, {elementary_layer(1, 2)}};
    EXPECT_EQ(paths(id, 3, 3).size(), 1u);
    Diagram fig = word_diagram(3, {1, 2, 3, 2, 1});
    EXPECT_EQ(paths(fig, 1, 3).size(), 2u);
    EXPECT_THROW(paths(fig, 0, 3), std::out_of_range);
    EXPECT_THROW(paths(fig, 1, 8), std::out_of_range);
}

TEST(Paths, FirstToLastNode) {
    // the only route is 1 -> 2 -> 3 -> 5 -> 6 -> 7 through diagonal q-power edges
    Diagram fig = word_diagram(3, {1, 2, 3, 2, 1});
    auto ps = paths(fig, 1, 7);
    ASSERT_EQ(ps.size(), 1u);
    std::vector<int> nodes{1};
    for (const DiagramEdge* e : ps[0]) nodes.push_back(e->right);
    EXPECT_EQ(nodes, (std::vector<int>{1, 2, 3, 5, 6, 7}));
    EXPECT_EQ(count_paths(fig, 1, 7), 1);
    EXPECT_FALSE(rep_table(3, {1, 2, 3, 2, 1})(1, 7).is_zero());
}

TEST(Paths, CountsMatchAdjacencyOracle) {
    for (int n = 1; n <= 3; ++n)
        for (const Word& w : words_up_to(n, n == 3 ? 4 : 5)) {
            Diagram D = word_diagram(n, w);
            for (int l = 1; l <= 2 * n + 1; ++l)
                for (int k = 1; k <= 2 * n + 1; ++k)
                    ASSERT_EQ(static_cast<long>(paths(D, l, k).size()), count_paths(D, l, k));
        }
}

TEST(PathSum, Examples) {
    Diagram fig = word_diagram(3, {1, 2, 3, 2, 1});
    TensorOperator I = TensorOperator::identity({SpaceKind::unilateral});
    TensorOperator mid = realize({EdgeTag::center, 1.0});
    EXPECT_TRUE(structurally_equal(path_sum(fig, 4, 4), tensor_all({I, I, mid, I, I})));
    Diagram small = word_diagram(3, {1, 2});
    GeneratorImageTable T = rep_table(3, {1, 2});
    int zeros = 0;
    for (int l = 1; l <= 7; ++l)
        for (int k = 1; k <= 7; ++k)
            if (paths(small, l, k).empty()) {
                ++zeros;
                EXPECT_TRUE(path_sum(small, l, k).is_zero());
                EXPECT_TRUE(T(l, k).is_zero());
            }
    EXPECT_GT(zeros, 0);
    EXPECT_TRUE(structurally_equal(path_sum(Diagram{2, {}}, 2, 2), TensorOperator::identity({})));
}

TEST(PathSum, EqualsConvolution) {
    for (int n = 1; n <= 2; ++n)
        for (const Word& w : words_up_to(n, 3)) {
            GeneratorImageTable T = rep_table(n, w);
            Diagram D = word_diagram(n, w);
            for (int l = 1; l <= 2 * n + 1; ++l)
                for (int k = 1; k <= 2 * n + 1; ++k) {
                    TensorOperator P = path_sum(D, l, k);
                    EXPECT_TRUE(structurally_equal(P, T(l, k)));
                    EXPECT_EQ(paths(D, l, k).empty(), P.is_zero());
                }
        }
}

TEST(PathSum, TorusLayer) {
    std::vector<cplx> t = {std::polar(1.0, 0.5), std::polar(1.0, 1.5)};
    GeneratorImageTable T = rep_table(RepSpec{2, t, {2, 1}});
    Diagram D = word_diagram(2, {2, 1}, t);
    for (int l = 1; l <= 5; ++l)
        for (int k = 1; k <= 5; ++k) EXPECT_TRUE(equal_on_window(path_sum(D, l, k), T(l, k), 3, q, 1e-12));
}

TEST(RenderDot, Structure) {
    std::string empty = render_dot(Diagram{2, {}});
    EXPECT_EQ(empty.find("->"), std::string::npos);
    EXPECT_EQ(empty.rfind("digraph bqdim {", 0), 0u);

    std::string dot = render_dot(Diagram{2, {elementary_layer(2, 2)}});
    std::size_t arrows = 0;
    for (std::size_t p = dot.find("->"); p != std::string::npos; p = dot.find("->", p + 1)) ++arrows;
    EXPECT_EQ(arrows, 11u);
    for (int i = 1; i <= 5; ++i) {
        EXPECT_NE(dot.find("L" + std::to_string(i) + ";"), std::string::npos);
        EXPECT_NE(dot.find("R" + std::to_string(i) + ";"), std::string::npos);
    }

    Diagram fig = word_diagram(3, {1, 2, 3, 2, 1});
    std::string f = render_dot(fig);
    std::size_t edges = 0;
    for (const DiagramLayer& L : fig.layers) edges += L.edges.size();
    arrows = 0;
    for (std::size_t p = f.find("->"); p != std::string::npos; p = f.find("->", p + 1)) ++arrows;
    EXPECT_EQ(arrows, edges);
    EXPECT_NE(f.find("subgraph col5"), std::string::npos);
    EXPECT_EQ(f.find("subgraph col6"), std::string::npos);
}

TEST(Embedding, StepExamples) {
    std::vector<Word> ps = {{2}, {}};
    EmbeddingMap m = embedding_step(ps, 1, 2);
    for (int j = m.lower(); j <= m.upper(); ++j) EXPECT_EQ(m(j), j);

    // w_3 = s1 s2 s3 s2 s1: s1 and s2 occur twice, so every index is fixed
    std::vector<Word> p3 = {{}, {}, {1, 2, 3, 2, 1}};
    EmbeddingMap m3 = embedding_step(p3, 2, 3);
    for (int j = m3.lower(); j <= m3.upper(); ++j) EXPECT_EQ(m3(j), j);

    // w_2 = s1 s2: single occurrences move the outer indices outward
    std::vector<Word> p2 = {{2}, {1, 2}};
    EmbeddingMap s = embedding_step(p2, 1, 2);
    EXPECT_EQ(s(3), 3);
    EXPECT_EQ(s(2), 1);
    EXPECT_EQ(s(4), 5);
}

TEST(Embedding, ComposeAndIdentity) {
    EmbeddingMap a = identity_embedding(3, 1), b = identity_embedding(3, 1);
    b.to = 1;
    EXPECT_EQ(compose_embeddings({a}).mapping, a.mapping);
    EXPECT_EQ(compose_embeddings({a, b}).mapping, a.mapping);
    EXPECT_THROW(compose_embeddings({}), std::invalid_argument);
    std::vector<Word> ps = parts(longest_element(3));
    EmbeddingMap c = compose_embeddings({embedding_step(ps, 1, 3), embedding_step(ps, 2, 3)});
    EXPECT_EQ(c.mapping, chain_embedding(ps, 1, 3, 3).mapping);
    EXPECT_THROW(compose_embeddings({embedding_step(ps, 2, 3), embedding_step(ps, 1, 3)}), std::invalid_argument);
}

TEST(Embedding, VerifiedExample) {
    std::vector<Word> ps = {{2}, {1, 2}};
    EmbeddingReport r = verify_embedding(ps, 1, 1, embedding_step(ps, 1, 2), q);
    EXPECT_LT(r.max_violation, 1e-8);
    EXPECT_EQ(r.constants.size(), 3u);

    EmbeddingReport empty = verify_embedding(ps, 1, 0, identity_embedding(2, 1), q);
    EXPECT_LT(empty.max_violation, 1e-15);
    for (auto [i, c] : empty.constants) EXPECT_NEAR(std::abs(c - 1.0), 0.0, 1e-15);
}

TEST(Embedding, PerturbedMapFails) {
    std::vector<Word> ps = {{2}, {1, 2}};
    EmbeddingMap bad = embedding_step(ps, 1, 2);
    for (auto& [j, v] : bad.mapping) v = v % 5 + 1;
    EXPECT_GT(verify_embedding(ps, 1, 1, bad, q).max_violation, 1e-3);
}

TEST(Embedding, AllOfRankTwo) {
    for (const SignedPermutation& w : all_elements(2)) {
        std::vector<Word> ps = parts(w);
        EXPECT_LT(verify_embedding(ps, 1, 1, embedding_step(ps, 1, 2), q).max_violation, 1e-8);
    }
}
