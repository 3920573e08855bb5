#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bqdim {

// Generator indices, 1-based. s_{i_1}s_{i_2}...s_{i_k} is the composite
// s_{i_1} o s_{i_2} o ... o s_{i_k} acting on signed indices.
using Word = std::vector<int>;

class SignedPermutation {
public:
    SignedPermutation() = default;

    explicit SignedPermutation(std::vector<int> images) : im_(std::move(images)) {
        std::vector<bool> seen(im_.size() + 1, false);
        for (int x : im_) {
            int a = std::abs(x);
            if (a < 1 || a > static_cast<int>(im_.size()) || seen[a])
                throw std::invalid_argument("images do not form a signed permutation");
            seen[a] = true;
        }
    }

    static SignedPermutation identity(int n) {
        std::vector<int> im(n);
        std::iota(im.begin(), im.end(), 1);
        return SignedPermutation(std::move(im));
    }

    int rank() const { return static_cast<int>(im_.size()); }
    const std::vector<int>& images() const { return im_; }

    // Action on a signed index x in {+-1, ..., +-n}.
    int operator()(int x) const {
        int y = im_[std::abs(x) - 1];
        return x > 0 ? y : -y;
    }

    // (u*v)(x) = u(v(x))
    SignedPermutation operator*(const SignedPermutation& v) const {
        if (v.rank() != rank()) throw std::invalid_argument("rank mismatch");
        std::vector<int> out(im_.size());
        for (std::size_t a = 0; a < im_.size(); ++a) out[a] = (*this)(v.im_[a]);
        SignedPermutation r;
        r.im_ = std::move(out);
        return r;
    }

    SignedPermutation inverse() const {
        std::vector<int> out(im_.size());
        for (std::size_t a = 0; a < im_.size(); ++a) {
            int y = im_[a];
            out[std::abs(y) - 1] = y > 0 ? static_cast<int>(a) + 1 : -static_cast<int>(a) - 1;
        }
        SignedPermutation r;
        r.im_ = std::move(out);
        return r;
    }

    bool is_identity() const {
        for (std::size_t a = 0; a < im_.size(); ++a)
            if (im_[a] != static_cast<int>(a) + 1) return false;
        return true;
    }

    auto operator<=>(const SignedPermutation&) const = default;

    std::string to_string() const {
        std::ostringstream os;
        os << '(';
        for (std::size_t a = 0; a < im_.size(); ++a) os << (a ? "," : "") << im_[a];
        os << ')';
        return os.str();
    }

private:
    std::vector<int> im_;
};

inline SignedPermutation simple_reflection(int i, int n) {
    if (n < 1 || i < 1 || i > n) throw std::out_of_range("simple reflection index out of range");
    std::vector<int> im(n);
    std::iota(im.begin(), im.end(), 1);
    if (i < n)
        std::swap(im[i - 1], im[i]);
    else
        im[n - 1] = -im[n - 1];
    return SignedPermutation(std::move(im));
}

inline SignedPermutation element(const Word& w, int n) {
    SignedPermutation x = SignedPermutation::identity(n);
    for (int i : w) x = x * simple_reflection(i, n);
    return x;
}

// Number of positive roots e_a, e_a - e_b, e_a + e_b (a < b) sent to negative roots.
// A root is positive when its first nonzero coordinate is positive.
inline int length(const SignedPermutation& w) {
    const int n = w.rank();
    int len = 0;
    for (int a = 1; a <= n; ++a)
        if (w(a) < 0) ++len;
    auto negative = [](int x, int y) {
        // sign of (sign(x) e_|x| + sign(y) e_|y|)
        return std::abs(x) < std::abs(y) ? x < 0 : y < 0;
    };
    for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b) {
            if (negative(w(a), -w(b))) ++len;
            if (negative(w(a), w(b))) ++len;
        }
    return len;
}

inline bool is_reduced(const Word& w, int n) {
    return length(element(w, n)) == static_cast<int>(w.size());
}

// psi string of part index r. eps = 0: empty; eps = 1: s_r s_{r+1} ... s_{k-1} (r < k <= n);
// eps = 2: s_r ... s_{k-1} s_k ... s_{n-1} s_n s_{n-1} ... s_k (r <= k <= n).
inline Word psi_word(int r, int k, int eps, int n) {
    Word out;
    if (eps == 0) return out;
    if (r < 1 || r > n || k < r || k > n || (eps == 1 && k == r) || eps > 2)
        throw std::out_of_range("invalid psi parameters");
    for (int j = r; j < k; ++j) out.push_back(j);
    if (eps == 2) {
        for (int j = k; j < n; ++j) out.push_back(j);
        out.push_back(n);
        for (int j = n - 1; j >= k; --j) out.push_back(j);
    }
    return out;
}

struct PsiPart {
    int eps = 0;
    int k = 0;
    bool operator==(const PsiPart&) const = default;
};

struct NormalForm {
    int n = 0;
    std::vector<PsiPart> psi; // psi[r-1] holds (eps_r, k_r)

    Word part_word(int r) const { return psi_word(r, psi[r - 1].k, psi[r - 1].eps, n); }

    // psi_n psi_{n-1} ... psi_1
    Word expand() const {
        Word out;
        for (int r = n; r >= 1; --r) {
            Word p = part_word(r);
            out.insert(out.end(), p.begin(), p.end());
        }
        return out;
    }

    bool operator==(const NormalForm&) const = default;
};

// Candidate parts for index r, in a fixed order.
inline std::vector<PsiPart> psi_choices(int r, int n) {
    std::vector<PsiPart> out{{0, r}};
    for (int k = r + 1; k <= n; ++k) out.push_back({1, k});
    for (int k = r; k <= n; ++k) out.push_back({2, k});
    return out;
}

// Peels psi_1, psi_2, ... off the right end; after stripping psi_1..psi_r the
// remainder fixes 1..r.
inline NormalForm normal_form(const SignedPermutation& w) {
    const int n = w.rank();
    NormalForm nf{n, std::vector<PsiPart>(n)};
    SignedPermutation x = w;
    for (int r = 1; r <= n; ++r) {
        bool found = false;
        for (const PsiPart& c : psi_choices(r, n)) {
            SignedPermutation y = x * element(psi_word(r, c.k, c.eps, n), n).inverse();
            if (y(r) == r) {
                nf.psi[r - 1] = c;
                x = y;
                found = true;
                break;
            }
        }
        if (!found) throw std::logic_error("normal form extraction failed");
    }
    return nf;
}

inline SignedPermutation expand(const NormalForm& nf) { return element(nf.expand(), nf.n); }

// w_1, ..., w_n with w_j = psi_{n-j+1}.
inline std::vector<Word> parts(const SignedPermutation& w) {
    NormalForm nf = normal_form(w);
    std::vector<Word> out;
    for (int j = 1; j <= nf.n; ++j) out.push_back(nf.part_word(nf.n - j + 1));
    return out;
}

inline Word concat(const std::vector<Word>& ws, std::size_t from = 0, std::size_t to = std::size_t(-1)) {
    Word out;
    to = std::min(to, ws.size());
    for (std::size_t j = from; j < to; ++j) out.insert(out.end(), ws[j].begin(), ws[j].end());
    return out;
}

struct ParabolicSubset {
    int n = 0;
    std::vector<int> indices; // sorted simple-root indices

    ParabolicSubset() = default;
    ParabolicSubset(int rank, std::vector<int> idx) : n(rank), indices(std::move(idx)) {
        std::sort(indices.begin(), indices.end());
        indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
        for (int i : indices)
            if (i < 1 || i > n) throw std::out_of_range("root index out of range");
    }

    // {alpha_{n-k+1}, ..., alpha_n}
    static ParabolicSubset module_family(int n, int k) {
        if (k < 0 || k > n) throw std::out_of_range("k out of range");
        std::vector<int> idx;
        for (int j = n - k + 1; j <= n; ++j) idx.push_back(j);
        return {n, idx};
    }

    // empty for m = 1, {alpha_{n-m+2}, ..., alpha_n} for 2 <= m <= n
    static ParabolicSubset homogeneous_family(int n, int m) {
        if (m < 1 || m > n) throw std::out_of_range("m out of range");
        return module_family(n, m - 1);
    }

    static ParabolicSubset all(int n) { return module_family(n, n); }

    bool contains(int i) const { return std::binary_search(indices.begin(), indices.end(), i); }
};

inline std::pair<SignedPermutation, SignedPermutation> parabolic_decompose(const SignedPermutation& w,
                                                                           const ParabolicSubset& R);

inline bool in_parabolic_subgroup(const SignedPermutation& w, const ParabolicSubset& R) {
    return parabolic_decompose(w, R).second.is_identity();
}

// Minimal representatives of the cosets W_R w: no reduced word starts with a letter of R.
inline bool in_quotient(const SignedPermutation& w, const ParabolicSubset& R) {
    const int l = length(w);
    for (int i : R.indices)
        if (length(simple_reflection(i, w.rank()) * w) < l) return false;
    return true;
}

// w = w' w'' with w' in W_R and w'' a minimal coset representative.
inline std::pair<SignedPermutation, SignedPermutation> parabolic_decompose(const SignedPermutation& w,
                                                                           const ParabolicSubset& R) {
    if (R.n != w.rank()) throw std::invalid_argument("rank mismatch");
    SignedPermutation left = SignedPermutation::identity(w.rank());
    SignedPermutation right = w;
    int len = length(right);
    bool progress = true;
    while (progress) {
        progress = false;
        for (int i : R.indices) {
            SignedPermutation s = simple_reflection(i, w.rank());
            SignedPermutation y = s * right;
            int ly = length(y);
            if (ly < len) {
                right = y;
                left = left * s;
                len = ly;
                progress = true;
            }
        }
    }
    return {left, right};
}

inline SignedPermutation longest_element(int n) {
    std::vector<int> im(n);
    for (int a = 0; a < n; ++a) im[a] = -(a + 1);
    return SignedPermutation(std::move(im));
}

inline SignedPermutation longest_parabolic_element(int n, const ParabolicSubset& R) {
    return parabolic_decompose(longest_element(n), R).first;
}

inline SignedPermutation longest_quotient_element(int n, const ParabolicSubset& R) {
    return parabolic_decompose(longest_element(n), R).second;
}

struct ClassicalDims {
    int quotient_dim = 0;
    int group_dim = 0;
    int subgroup_dim = 0;
};

inline ClassicalDims classical_dimensions(int n, int m) {
    if (n < 1 || m < 1 || m > n) throw std::out_of_range("m out of range");
    ParabolicSubset R = ParabolicSubset::homogeneous_family(n, m);
    ClassicalDims d;
    d.group_dim = 2 * length(longest_element(n)) + n;
    d.subgroup_dim = 2 * length(longest_parabolic_element(n, R)) + m - 1;
    d.quotient_dim = 2 * length(longest_quotient_element(n, R)) + n - m + 1;
    return d;
}

// All 2^n n! elements, via normal forms.
inline std::vector<SignedPermutation> all_elements(int n) {
    std::vector<NormalForm> forms{NormalForm{n, {}}};
    for (int r = 1; r <= n; ++r) {
        std::vector<NormalForm> next;
        for (const NormalForm& f : forms)
            for (const PsiPart& c : psi_choices(r, n)) {
                NormalForm g = f;
                g.psi.push_back(c);
                next.push_back(g);
            }
        forms = std::move(next);
    }
    std::vector<SignedPermutation> out;
    out.reserve(forms.size());
    for (const NormalForm& f : forms) out.push_back(expand(f));
    std::sort(out.begin(), out.end());
    return out;
}

inline std::string word_to_string(const Word& w) {
    std::string s;
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (j) s += ',';
        s += std::to_string(w[j]);
    }
    return s;
}

} // namespace bqdim
