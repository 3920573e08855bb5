#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <bqdim/bqdim.hpp>

#include "report.hpp"

using nlohmann::json;
using namespace bqdim;

namespace {

enum Exit { kOk = 0, kUsage = 2, kPartial = 3, kCertificate = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Word parse_word(const std::string& s, int n) {
    Word w;
    if (s.empty()) return w;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t pos = 0;
        int x = 0;
        try {
            x = std::stoi(tok, &pos);
        } catch (const std::exception&) {
            throw UsageError("malformed word: " + s);
        }
        if (pos != tok.size()) throw UsageError("malformed word: " + s);
        if (x < 1 || x > n) throw UsageError("generator index out of range: " + tok);
        w.push_back(x);
    }
    return w;
}

std::vector<int> parse_indices(const std::string& s, int n) {
    if (s.empty()) return {};
    return parse_word(s, n);
}

std::vector<cplx> parse_torus(const std::vector<std::string>& items, int n) {
    if (items.empty()) return {};
    std::vector<cplx> t;
    for (const std::string& it : items) {
        double re = 0, im = 0;
        char comma = 0;
        std::istringstream is(it);
        if (!(is >> re >> comma >> im) || comma != ',') throw UsageError("torus entry must be re,im: " + it);
        t.emplace_back(re, im);
    }
    try {
        require_torus_point(t, n);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return t;
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

json header(const std::string& command) { return {{"schema", report::kSchema}, {"command", command}}; }

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UsageError("cannot write " + path);
    os << text;
}

unsigned default_threads() {
    if (const char* env = std::getenv("BQDIM_THREADS")) {
        int t = std::atoi(env);
        if (t > 0) return static_cast<unsigned>(t);
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weyl group, representation, diagram and growth computations for quantum SO(2n+1)"};
    app.require_subcommand(1);

    RunConfig cfg;
    cfg.threads = default_threads();
    app.add_option("--q", cfg.q, "deformation parameter in (0,1)");
    app.add_option("--cutoff", cfg.cutoff, "window size for operator comparisons");
    app.add_option("--tol", cfg.tol, "comparison tolerance");
    app.add_option("--probe-cutoff", cfg.probe_cutoff, "initial probe window for algebra growth");
    app.add_option("--basis-cap", cfg.basis_cap, "maximum basis size");
    app.add_option("--seed", cfg.seed, "seed for sampled checks");
    app.add_option("--threads", cfg.threads, "worker threads (default BQDIM_THREADS or 1)");

    int n = 0, m = 0, k = 0, l = 0, from = 0, to = 0, r_lower = 3, budget = 4;
    int rmax = -1;
    std::string word_s, word2_s, subset_s, csv_path;
    std::vector<std::string> torus_s;
    bool frt = false;

    // weyl
    auto* weyl = app.add_subcommand("weyl", "Weyl group computations");
    weyl->require_subcommand(1);
    auto* w_nf = weyl->add_subcommand("normal-form", "element, length and normal form of a word");
    auto* w_dec = weyl->add_subcommand("decompose", "parabolic decomposition w = w' w''");
    auto* w_long = weyl->add_subcommand("longest", "longest element, or longest quotient element for a subset");
    auto* w_dims = weyl->add_subcommand("dims", "classical dimensions for the R_m family");
    for (auto* c : {w_nf, w_dec, w_long, w_dims}) c->add_option("--n", n, "rank")->required();
    for (auto* c : {w_nf, w_dec}) c->add_option("--word", word_s, "comma-separated generator indices");
    w_dec->add_option("--subset", subset_s, "simple-root indices of R");
    w_long->add_option("--subset", subset_s, "simple-root indices of R");
    w_dims->add_option("--m", m, "family index")->required();

    // rep
    auto* rep = app.add_subcommand("rep", "representation tables");
    rep->require_subcommand(1);
    auto* r_ver = rep->add_subcommand("verify", "relation and braid checks");
    auto* r_ent = rep->add_subcommand("entry", "image of one generator");
    for (auto* c : {r_ver, r_ent}) {
        c->add_option("--n", n, "rank")->required();
        c->add_option("--word", word_s, "comma-separated generator indices");
        c->add_option("--t", torus_s, "torus entry re,im (repeat n times)");
    }
    r_ver->add_option("--word2", word2_s, "second reduced word for the braid check");
    r_ver->add_flag("--frt", frt, "also run the R-matrix diagnostic");
    r_ent->add_option("--k", k, "row index")->required();
    r_ent->add_option("--l", l, "column index")->required();

    // diagram
    auto* dia = app.add_subcommand("diagram", "diagram calculus");
    dia->require_subcommand(1);
    auto* d_dot = dia->add_subcommand("dot", "DOT rendering");
    auto* d_paths = dia->add_subcommand("paths", "path enumeration between two nodes");
    for (auto* c : {d_dot, d_paths}) {
        c->add_option("--n", n, "rank")->required();
        c->add_option("--word", word_s, "comma-separated generator indices");
    }
    d_paths->add_option("--from", from, "left node")->required();
    d_paths->add_option("--to", to, "right node")->required();

    // gkdim
    auto* gk = app.add_subcommand("gkdim", "growth certificates");
    gk->require_subcommand(1);
    auto* g_mod = gk->add_subcommand("module", "module V_{t,w}");
    auto* g_hom = gk->add_subcommand("homogeneous", "quantized homogeneous space for R_m");
    for (auto* c : {g_mod, g_hom}) {
        c->add_option("--n", n, "rank")->required();
        c->add_option("--rmax", rmax, "largest sampled r");
        c->add_option("--csv", csv_path, "write the r,d,lower,upper table here ('-' for stdout)");
    }
    g_mod->add_option("--word", word_s, "comma-separated generator indices")->required();
    g_mod->add_option("--t", torus_s, "torus entry re,im (repeat n times)");
    g_mod->add_option("--budget", budget, "witness exponent budget");
    g_hom->add_option("--m", m, "family index")->required();
    g_hom->add_option("--rlower", r_lower, "largest r for witness word counts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        cfg.r_max = rmax >= 0 ? rmax : cfg.r_max;
        cfg.validate();
        if (n < 1) throw UsageError("--n must be positive");

        if (*w_nf) {
            Word w = parse_word(word_s, n);
            SignedPermutation x = element(w, n);
            NormalForm nf = normal_form(x);
            json j = header("weyl normal-form");
            j["n"] = n;
            j["word"] = w;
            j["element"] = report::element_json(x);
            j["length"] = length(x);
            j["reduced"] = is_reduced(w, n);
            j["normal_form"] = report::normal_form_json(nf);
            j["parts"] = parts(x);
            print(j);
            return kOk;
        }
        if (*w_dec) {
            Word w = parse_word(word_s, n);
            ParabolicSubset R(n, parse_indices(subset_s, n));
            auto [a, b] = parabolic_decompose(element(w, n), R);
            json j = header("weyl decompose");
            j["n"] = n;
            j["word"] = w;
            j["subset"] = R.indices;
            j["left"] = {{"element", report::element_json(a)}, {"length", length(a)}, {"word", normal_form(a).expand()}};
            j["right"] = {{"element", report::element_json(b)}, {"length", length(b)}, {"word", normal_form(b).expand()}};
            print(j);
            return kOk;
        }
        if (*w_long) {
            json j = header("weyl longest");
            j["n"] = n;
            SignedPermutation x = longest_element(n);
            if (!subset_s.empty()) {
                ParabolicSubset R(n, parse_indices(subset_s, n));
                x = longest_quotient_element(n, R);
                j["subset"] = R.indices;
            }
            j["element"] = report::element_json(x);
            j["length"] = length(x);
            j["word"] = normal_form(x).expand();
            print(j);
            return kOk;
        }
        if (*w_dims) {
            if (m < 1 || m > n) throw UsageError("--m must satisfy 1 <= m <= n");
            ClassicalDims d = classical_dimensions(n, m);
            json j = header("weyl dims");
            j["n"] = n;
            j["m"] = m;
            j["quotient_dim"] = d.quotient_dim;
            j["group_dim"] = d.group_dim;
            j["subgroup_dim"] = d.subgroup_dim;
            print(j);
            return kOk;
        }
        if (*r_ver) {
            Word w = parse_word(word_s, n);
            std::vector<cplx> t = parse_torus(torus_s, n);
            GeneratorImageTable T = rep_table(RepSpec{n, t, w});
            RelationReport orth = verify_orthogonality(T, cfg.cutoff, cfg.q);
            RelationReport lit = verify_orthogonality(T, cfg.cutoff, cfg.q, DConvention::literal);
            json j = header("rep verify");
            j["n"] = n;
            j["word"] = w;
            j["orthogonality"] = {{"max_deviation", orth.max_deviation},
                                  {"worst", orth.worst},
                                  {"pass", orth.pass(cfg.tol)}};
            j["orthogonality_diagonal_d"] = {{"max_deviation", lit.max_deviation}, {"worst", lit.worst}};
            if (!word2_s.empty()) {
                Word w2 = parse_word(word2_s, n);
                BraidReport b = verify_braid_independence(w, w2, n, t, cfg.cutoff, cfg.q, cfg.tol);
                StateReport st = vacuum_state_distance(T, rep_table(RepSpec{n, t, w2}), cfg.q, cfg.seed);
                j["braid"] = {{"word2", w2},
                              {"entrywise_equal", b.equal},
                              {"max_deviation", b.max_deviation},
                              {"worst_entry", {b.k, b.l}},
                              {"vacuum_state_deviation", st.max_deviation},
                              {"vacuum_state_equal", st.max_deviation < cfg.tol},
                              {"words_checked", st.words_checked}};
            }
            if (frt) {
                FrtReport f = verify_frt(T, cfg.cutoff, cfg.q, cfg.tol);
                j["frt"] = {{"max_deviation", f.max_deviation},
                            {"quadruple", {f.i, f.j, f.s, f.t}},
                            {"nonzero_quadruples", f.nonzero_quadruples}};
            }
            print(j);
            return orth.pass(cfg.tol) ? kOk : kCertificate;
        }
        if (*r_ent) {
            Word w = parse_word(word_s, n);
            if (k < 1 || l < 1 || k > 2 * n + 1 || l > 2 * n + 1) throw UsageError("generator index out of range");
            GeneratorImageTable T = rep_table(RepSpec{n, parse_torus(torus_s, n), w});
            json j = header("rep entry");
            j["n"] = n;
            j["word"] = w;
            j["k"] = k;
            j["l"] = l;
            j["operator"] = T(k, l).to_string();
            j["summands"] = T(k, l).summands.size();
            print(j);
            return kOk;
        }
        if (*d_dot) {
            std::cout << render_dot(word_diagram(n, parse_word(word_s, n)));
            return kOk;
        }
        if (*d_paths) {
            Diagram D = word_diagram(n, parse_word(word_s, n));
            if (from < 1 || to < 1 || from > 2 * n + 1 || to > 2 * n + 1) throw UsageError("node out of range");
            json ps = json::array();
            for (const DiagramPath& p : paths(D, from, to)) {
                json nodes = json::array({from});
                json tags = json::array();
                for (const DiagramEdge* e : p) {
                    nodes.push_back(e->right);
                    tags.push_back(to_string(e->primitive.tag));
                }
                ps.push_back({{"nodes", nodes}, {"edges", tags}});
            }
            json j = header("diagram paths");
            j["n"] = n;
            j["from"] = from;
            j["to"] = to;
            j["count"] = ps.size();
            j["paths"] = ps;
            j["operator"] = path_sum(D, from, to).to_string();
            print(j);
            return kOk;
        }
        GrowthOptions opt;
        opt.q = cfg.q;
        opt.tol = cfg.tol;
        opt.basis_cap = cfg.basis_cap;
        opt.threads = cfg.threads;
        if (*g_mod) {
            RepSpec spec{n, parse_torus(torus_s, n), parse_word(word_s, n)};
            if (!is_reduced(spec.word, n)) throw UsageError("word is not reduced");
            opt.r_max = cfg.r_max;
            ModuleCertificate c = module_certificate(spec, opt, budget);
            json j = report::module_json(spec, c);
            if (!csv_path.empty()) write_text(csv_path, report::module_csv(c));
            if (csv_path != "-") print(j);
            if (c.series.truncated) return kPartial;
            return c.pass() ? kOk : kCertificate;
        }
        if (*g_hom) {
            if (m < 1 || m > n) throw UsageError("--m must satisfy 1 <= m <= n");
            opt.r_max = rmax >= 0 ? rmax : 3;
            HomogeneousCertificate c = homogeneous_certificate(n, m, r_lower, cfg.probe_cutoff, opt);
            json j = report::homogeneous_json(c);
            if (!csv_path.empty()) write_text(csv_path, report::homogeneous_csv(c));
            if (csv_path != "-") print(j);
            if (c.growth.series.truncated || !c.growth.stabilized) return kPartial;
            return c.pass() ? kOk : kCertificate;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "out of range: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
