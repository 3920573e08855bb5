#include <gtest/gtest.h>

#include <map>

#include <bqdim/repsoq.hpp>

using namespace bqdim;

namespace {

constexpr double q = 0.5;
constexpr auto U = SpaceKind::unilateral;

TensorOperator single(int d, Coeff f) { return TensorOperator::single(WeightedShiftSum::shift(U, d, std::move(f))); }

TensorOperator I1() { return TensorOperator::identity({U}); }

// Dense matrix of T on the box [0, M)^s, indexed by flattened multi-indices.
using Dense = std::vector<std::vector<double>>;

Dense dense(const TensorOperator& T, int M) {
    const std::size_t s = T.signature.size();
    std::size_t size = 1;
    for (std::size_t j = 0; j < s; ++j) size *= M;
    auto flat = [&](const MultiIndex& x) -> long {
        long id = 0;
        for (std::size_t j = 0; j < s; ++j) {
            if (x[j] < 0 || x[j] >= M) return -1;
            id = id * M + x[j];
        }
        return id;
    };
    Dense A(size, std::vector<double>(size, 0.0));
    for (std::size_t col = 0; col < size; ++col) {
        MultiIndex idx(s);
        std::size_t c = col;
        for (std::size_t j = s; j-- > 0;) {
            idx[j] = static_cast<std::int16_t>(c % M);
            c /= M;
        }
        for (const auto& [out, v] : apply(T, SparseVector::basis(T.signature, idx), q, 0.0).entries) {
            long row = flat(out);
            if (row >= 0) A[row][col] += v.real();
        }
    }
    return A;
}

Dense matmul(const Dense& A, const Dense& B) {
    const std::size_t n = A.size();
    Dense C(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            if (A[i][k] != 0.0)
                for (std::size_t j = 0; j < n; ++j) C[i][j] += A[i][k] * B[k][j];
    return C;
}

// Largest deviation of V D V^t D^{-1} from the identity, with D the antidiagonal monomial matrix,
// evaluated by dense products on columns whose indices stay below `inner` in every slot.
double dense_orthogonality(const GeneratorImageTable& T, int M, int inner) {
    const int N = T.dim(), n = T.n;
    std::vector<std::vector<Dense>> V(N + 1, std::vector<Dense>(N + 1));
    for (int k = 1; k <= N; ++k)
        for (int l = 1; l <= N; ++l) V[k][l] = dense(T(k, l), M);
    auto partner = [&](int i) { return 2 * n + 2 - i; };
    auto dval = [&](int i) { return (i == n + 1 ? -1.0 : 1.0) * std::pow(q, -2.0 * rho(i, n)); };
    const std::size_t size = V[1][1].size();
    const std::size_t s = T.signature.size();
    auto in_box = [&](std::size_t id) {
        for (std::size_t j = 0; j < s; ++j) {
            if (static_cast<int>(id % M) >= inner) return false;
            id /= M;
        }
        return true;
    };
    double worst = 0.0;
    for (int a = 1; a <= N; ++a)
        for (int b = 1; b <= N; ++b) {
            Dense X(size, std::vector<double>(size, 0.0));
            // sum_c V_{a c} D_{c c'} V_{b' c'} / D_{b b'}
            for (int c = 1; c <= N; ++c) {
                int d = partner(c), e = partner(b);
                double coef = dval(c) / dval(b);
                Dense P = matmul(V[a][c], V[e][d]);
                for (std::size_t i = 0; i < size; ++i)
                    for (std::size_t j = 0; j < size; ++j) X[i][j] += coef * P[i][j];
            }
            for (std::size_t i = 0; i < size; ++i)
                for (std::size_t j = 0; j < size; ++j)
                    if (in_box(i) && in_box(j))
                        worst = std::max(worst, std::abs(X[i][j] - (a == b && i == j ? 1.0 : 0.0)));
        }
    return worst;
}

} // namespace

TEST(ElementaryTable, Examples) {
    GeneratorImageTable T = elementary_table(1, 2);
    EXPECT_TRUE(equal_on_window(T(1, 1), single(1, Coeff::one_minus(4, 0)), 6, q, 1e-14));
    // written in the output index: sqrt(1 - q^{4N+4}) S
    for (int k = 1; k < 6; ++k) {
        SparseVector out = apply(T(1, 1), SparseVector::basis({U}, MultiIndex{k}), q);
        EXPECT_NEAR(out.at(MultiIndex{k - 1}).real(), std::sqrt(1 - std::pow(q, 4 * (k - 1) + 4)), 1e-14);
    }

    GeneratorImageTable Tn = elementary_table(2, 2);
    TensorOperator want = subtract(I1(), single(0, Coeff::one_plus(0, 2, 2) * Coeff::qpow(2, 0)));
    EXPECT_TRUE(structurally_equal(Tn(3, 3), want));
    EXPECT_TRUE(Tn(1, 3).is_zero());
    EXPECT_TRUE(T(1, 5).is_zero());
}

TEST(ElementaryTable, ZeroPattern) {
    for (int n = 1; n <= 4; ++n)
        for (int i = 1; i <= n; ++i) {
            GeneratorImageTable T = elementary_table(i, n);
            int off = 0;
            for (int k = 1; k <= T.dim(); ++k)
                for (int l = 1; l <= T.dim(); ++l) {
                    EXPECT_EQ(T(k, l).signature, T.signature);
                    if (k != l && !T(k, l).is_zero()) ++off;
                    if (k == l) EXPECT_FALSE(T(k, l).is_zero());
                }
            EXPECT_EQ(off, i < n ? 4 : 6);
        }
}

TEST(ElementaryTable, RejectsBadIndex) {
    EXPECT_THROW(elementary_table(3, 2), std::out_of_range);
    EXPECT_THROW(elementary_table(0, 2), std::out_of_range);
}

TEST(TorusTable, Examples) {
    GeneratorImageTable T = torus_table(2);
    for (int k = 1; k <= 5; ++k)
        for (int l = 1; l <= 5; ++l) {
            if (k == l)
                EXPECT_TRUE(structurally_equal(T(k, l), TensorOperator::scalar(1.0)));
            else
                EXPECT_TRUE(T(k, l).is_zero());
        }
    cplx t1 = std::polar(1.0, 0.3), t2 = std::polar(1.0, -1.1);
    GeneratorImageTable Tt = torus_table({t1, t2}, 2);
    EXPECT_NEAR(std::abs(Tt(5, 5).summands[0].scalar - t1), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(Tt(4, 4).summands[0].scalar - t2), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(Tt(1, 1).summands[0].scalar - std::conj(t1)), 0.0, 1e-15);
    GeneratorImageTable Ti = torus_table({cplx(0, 1), cplx(1, 0)}, 2);
    EXPECT_NEAR(std::abs(Ti(1, 1).summands[0].scalar - cplx(0, -1)), 0.0, 1e-15);
}

TEST(TorusTable, RejectsNonUnitEntries) {
    EXPECT_THROW(torus_table({cplx(1.1, 0), cplx(1, 0)}, 2), std::invalid_argument);
    EXPECT_THROW(torus_table({cplx(1, 0)}, 2), std::invalid_argument);
}

TEST(Convolve, TorusIsAUnit) {
    GeneratorImageTable E = elementary_table(1, 2);
    GeneratorImageTable C = convolve(torus_table(2), E);
    for (int k = 1; k <= 5; ++k)
        for (int l = 1; l <= 5; ++l) EXPECT_TRUE(structurally_equal(C(k, l), E(k, l)));
}

TEST(RepTable, FoldDefinition) {
    GeneratorImageTable A = rep_table(2, {1});
    GeneratorImageTable E = elementary_table(1, 2);
    GeneratorImageTable B = rep_table(2, {1, 2});
    GeneratorImageTable C = convolve(A, elementary_table(2, 2));
    GeneratorImageTable empty = rep_table(2, {});
    for (int k = 1; k <= 5; ++k)
        for (int l = 1; l <= 5; ++l) {
            EXPECT_TRUE(structurally_equal(A(k, l), E(k, l)));
            EXPECT_TRUE(structurally_equal(B(k, l), C(k, l)));
            EXPECT_EQ(empty(k, l).is_zero(), k != l);
        }
}

TEST(RepTable, MatrixCoproduct) {
    // pi_{uv}(v_l^k) = sum_j pi_u(v_j^k) (x) pi_v(v_l^j), checked on windows against the split tables.
    GeneratorImageTable A = rep_table(2, {1, 2}), B = rep_table(2, {1}), W = rep_table(2, {1, 2, 1});
    for (int k = 1; k <= 5; ++k)
        for (int l = 1; l <= 5; ++l) {
            TensorOperator acc = TensorOperator::zero(W.signature);
            for (int j = 1; j <= 5; ++j) acc = add(acc, tensor(A(k, j), B(j, l)));
            EXPECT_TRUE(equal_on_window(acc, W(k, l), 3, q, 1e-12));
        }
}

TEST(StarImage, Examples) {
    GeneratorImageTable T = elementary_table(1, 2);
    EXPECT_TRUE(structurally_equal(star_image(T, 3, 3), I1()));
    EXPECT_TRUE(equal_on_window(star_image(T, 1, 1), single(-1, Coeff::one_minus(4, 4)), 6, q, 1e-14));
    for (int k = 1; k <= 5; ++k)
        for (int l = 1; l <= 5; ++l) EXPECT_TRUE(equal_on_window(adjoint(star_image(T, k, l)), T(k, l), 5, q, 1e-14));
}

TEST(Orthogonality, TorusOnlyIsExact) {
    RelationReport r = verify_orthogonality(torus_table({std::polar(1.0, 0.4), std::polar(1.0, 2.0)}, 2), 6, q);
    EXPECT_LT(r.max_deviation, 1e-15);
}

TEST(Orthogonality, ElementaryTables) {
    for (int n = 1; n <= 3; ++n)
        for (int i = 1; i <= n; ++i) {
            RelationReport r = verify_orthogonality(elementary_table(i, n), 6, q);
            EXPECT_LT(r.max_deviation, 1e-8) << "n=" << n << " i=" << i << " worst " << r.worst;
        }
}

TEST(Orthogonality, HoldsForOtherQ) {
    for (double qq : {0.2, 0.9})
        for (int i = 1; i <= 2; ++i) EXPECT_LT(verify_orthogonality(elementary_table(i, 2), 6, qq).max_deviation, 1e-8);
}

TEST(Orthogonality, ComposedWordsWithTorus) {
    std::vector<cplx> t = {std::polar(1.0, 0.7), std::polar(1.0, -0.2)};
    for (const Word& w : {Word{1, 2}, Word{2, 1, 2}, Word{1, 2, 1, 2}})
        EXPECT_LT(verify_orthogonality(rep_table(RepSpec{2, t, w}), 3, q).max_deviation, 1e-8);
}

TEST(Orthogonality, AgreesWithDenseOracle) {
    for (int n = 1; n <= 2; ++n)
        for (int i = 1; i <= n; ++i) {
            GeneratorImageTable T = elementary_table(i, n);
            EXPECT_LT(dense_orthogonality(T, 16, 8), 1e-12);
        }
    EXPECT_LT(dense_orthogonality(rep_table(2, {2, 1}), 9, 4), 1e-12);
    // the uncorrected sign breaks the relation
    EXPECT_GT(dense_orthogonality(elementary_table(2, 2, SignConvention::literal), 16, 8), 0.1);
}

TEST(Orthogonality, DiagonalDConventionIsRejected) {
    RelationReport lit = verify_orthogonality(elementary_table(1, 2), 6, q, DConvention::literal);
    EXPECT_GT(lit.max_deviation, 0.5);
    RelationReport sign = verify_orthogonality(elementary_table(2, 2, SignConvention::literal), 6, q);
    EXPECT_GT(sign.max_deviation, 0.1);
}

TEST(Frt, DiagnosticRuns) {
    FrtReport t = verify_frt(torus_table(1), 4, q);
    EXPECT_GE(t.max_deviation, 0.0);
    FrtReport e = verify_frt(elementary_table(1, 2), 3, q);
    EXPECT_GT(e.nonzero_quadruples, 0u);
}

TEST(Braid, SameWordIsEqual) {
    BraidReport b = verify_braid_independence({1}, {1}, 2, {}, 6, q, 1e-8);
    EXPECT_TRUE(b.equal);
    EXPECT_EQ(b.max_deviation, 0.0);
}

TEST(Braid, RejectsDifferentElements) {
    EXPECT_THROW(verify_braid_independence({1, 2}, {2, 1}, 2, {}, 4, q, 1e-8), std::invalid_argument);
}

TEST(Braid, VacuumStatesAgree) {
    for (auto [n, w1, w2] : {std::tuple{3, Word{1, 2, 1}, Word{2, 1, 2}}, std::tuple{2, Word{1, 2, 1, 2}, Word{2, 1, 2, 1}}}) {
        StateReport s = vacuum_state_distance(rep_table(n, w1), rep_table(n, w2), q, 11, 300, 4);
        EXPECT_LT(s.max_deviation, 1e-12);
        EXPECT_GT(s.words_checked, 300u);
    }
}

TEST(Braid, VacuumStatesSeparateDifferentElements) {
    StateReport s = vacuum_state_distance(rep_table(2, {1, 2}), rep_table(2, {2, 1}), q, 11, 50, 3);
    EXPECT_GT(s.max_deviation, 1e-3);
}

TEST(RankThreeExample, DiagonalEntry) {
    GeneratorImageTable T = rep_table(3, {1, 2, 3, 2, 1});
    TensorOperator mid = subtract(I1(), single(0, Coeff::one_plus(0, 2, 2) * Coeff::qpow(2, 0)));
    TensorOperator want = tensor_all({I1(), I1(), mid, I1(), I1()});
    EXPECT_TRUE(structurally_equal(T(4, 4), want));
    EXPECT_TRUE(equal_on_window(T(4, 4), want, 3, q, 1e-12));
}

TEST(RankThreeExample, OffDiagonalEntry) {
    GeneratorImageTable T = rep_table(3, {1, 2, 3, 2, 1});
    TensorOperator q2 = single(0, Coeff::qpow(2, 2));
    TensorOperator S2 = single(2, Coeff::one_minus(2, -2) * Coeff::one_minus(2, 0)); // sqrt((1-q^{2N+2})(1-q^{2N+4})) S^2
    TensorOperator up = single(-1, Coeff::one_minus(4, 4));                          // S* sqrt(1-q^{4N+4})
    TensorOperator down = single(1, Coeff::one_minus(4, 0));                         // sqrt(1-q^{4N+4}) S
    TensorOperator first = tensor_all({q2, q2, S2, up, I1()});
    TensorOperator computed = add(first, tensor_all({q2, down, I1(), q2, I1()}));
    EXPECT_TRUE(structurally_equal(T(1, 3), computed));
    EXPECT_TRUE(equal_on_window(T(1, 3), computed, 3, q, 1e-12));

    // The printed display has S* sqrt(1-q^{4N+4}) in slot 4 of the second summand and a minus sign;
    // that operator does not satisfy the relations and differs from the convolution.
    TensorOperator display = subtract(first, tensor_all({q2, down, I1(), up, I1()}));
    EXPECT_FALSE(equal_on_window(T(1, 3), display, 3, q, 1e-8));
}
