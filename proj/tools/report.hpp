#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

#include <bqdim/bqdim.hpp>

namespace bqdim::report {

using nlohmann::json;

inline constexpr const char* kSchema = "bqdim/1";

inline json word_json(const Word& w) { return json(w); }

inline json element_json(const SignedPermutation& w) { return json(w.images()); }

inline json normal_form_json(const NormalForm& nf) {
    json parts = json::array();
    for (int r = nf.n; r >= 1; --r) {
        const PsiPart& p = nf.psi[r - 1];
        parts.push_back({{"r", r}, {"eps", p.eps}, {"k", p.k}, {"word", nf.part_word(r)}});
    }
    return parts;
}

inline json series_json(const GrowthSeries& s) {
    json a = json::array();
    for (const GrowthPoint& p : s.values) a.push_back({{"r", p.r}, {"d", p.d}});
    return a;
}

inline std::string integer_string(double x) {
    std::ostringstream os;
    os.precision(0);
    os << std::fixed << x;
    return os.str();
}

inline json module_json(const RepSpec& spec, const ModuleCertificate& c) {
    json j;
    j["schema"] = kSchema;
    j["mode"] = "module";
    j["n"] = spec.n;
    j["word"] = spec.word;
    j["target"] = c.target;
    j["exact_rank"] = c.series.exact;
    j["truncated"] = c.series.truncated;
    j["witness"] = {{"patterns", c.witness.patterns},
                    {"worst_deficit", c.witness.worst_deficit},
                    {"pass", c.witness_ok}};
    json rows = json::array();
    for (std::size_t i = 0; i < c.series.values.size(); ++i) {
        const GrowthPoint& p = c.series.values[i];
        const LowerBoundRecord& lb = c.lower[i];
        bool ok = lb.verified == lb.required && lb.verified <= p.d && static_cast<double>(p.d) <= c.upper[i];
        rows.push_back({{"r", p.r},
                        {"d", p.d},
                        {"lower", lb.verified},
                        {"lower_r", lb.r},
                        {"upper", c.upper[i]},
                        {"pass", ok}});
    }
    j["series"] = rows;
    j["estimate"] = {{"log_ratio", c.estimate.log_ratio}, {"slope", c.estimate.slope}};
    j["pass"] = c.pass();
    return j;
}

inline std::string module_csv(const ModuleCertificate& c) {
    std::ostringstream os;
    os << "r,d,lower,upper\n";
    for (std::size_t i = 0; i < c.series.values.size(); ++i)
        os << c.series.values[i].r << ',' << c.series.values[i].d << ',' << c.lower[i].verified << ','
           << integer_string(c.upper[i]) << '\n';
    return os.str();
}

inline json homogeneous_json(const HomogeneousCertificate& c) {
    json j;
    j["schema"] = kSchema;
    j["mode"] = "homogeneous";
    j["n"] = c.n;
    j["m"] = c.m;
    j["word"] = c.word;
    j["target"] = c.target;
    j["quotient_dim"] = c.quotient_dim;
    j["exact_rank"] = c.growth.series.exact;
    j["truncated"] = c.growth.series.truncated;
    j["probe_cutoff"] = c.growth.probe_cutoff;
    j["stabilized"] = c.growth.stabilized;
    j["witness"] = {{"patterns", c.witness.patterns},
                    {"worst_deficit", c.witness.worst_deficit},
                    {"pass", c.witness_ok}};
    json rows = json::array();
    for (const HomogeneousRecord& r : c.records) {
        json row = {{"r", r.r}, {"word_length", r.word_length}, {"required", r.required}, {"upper", r.container}};
        row["independent"] = r.independent ? json(*r.independent) : json(nullptr);
        row["d"] = r.d ? json(*r.d) : json(nullptr);
        rows.push_back(row);
    }
    j["series"] = rows;
    j["lower_pass"] = c.lower_ok;
    j["upper_pass"] = c.upper_ok;
    j["pass"] = c.pass();
    return j;
}

inline std::string homogeneous_csv(const HomogeneousCertificate& c) {
    std::ostringstream os;
    os << "r,d,lower,upper\n";
    for (const HomogeneousRecord& r : c.records) {
        os << r.r << ',';
        if (r.d) os << *r.d;
        os << ',';
        if (r.independent) os << *r.independent;
        os << ',' << integer_string(r.container) << '\n';
    }
    return os.str();
}

} // namespace bqdim::report
