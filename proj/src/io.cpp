#include "ppp/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ppp {

namespace {

double number(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw std::invalid_argument(std::string("expected numeric field '") + key + "'");
    }
    return j.at(key).get<double>();
}

Json pieces_json(const std::vector<UniformPiece>& pieces) {
    Json arr = Json::array();
    for (const auto& p : pieces) arr.push_back({{"lo", p.lo}, {"hi", p.hi}, {"mass", p.mass}});
    return arr;
}

std::vector<UniformPiece> pieces_from(const Json& j) {
    if (!j.is_array()) throw std::invalid_argument("expected an array of uniform pieces");
    std::vector<UniformPiece> out;
    for (const auto& p : j) out.push_back({number(p, "lo"), number(p, "hi"), number(p, "mass")});
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& text, const std::string& where) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw std::invalid_argument(where + ": not a number: '" + text + "'");
    }
    return v;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path + "'");
    return in;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// ------------------------------------------------------------------ dist

Json to_json(const SubUniformDist& d) {
    if (std::holds_alternative<Uniform01>(d.variant())) return {{"kind", "uniform"}};
    if (std::holds_alternative<Beta22>(d.variant())) return {{"kind", "beta22"}};
    const auto& m = *d.mixture();
    Json atoms = Json::array();
    for (const auto& a : m.atoms) atoms.push_back({{"location", a.location}, {"mass", a.mass}});
    return {{"kind", "mixture"}, {"atoms", atoms}, {"uniform_pieces", pieces_json(m.uniform_pieces)}};
}

SubUniformDist dist_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
        throw std::invalid_argument("distribution: expected an object with a string 'kind'");
    }
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "uniform") return SubUniformDist(Uniform01{});
    if (kind == "beta22") return SubUniformDist(Beta22{});
    if (kind == "p2alpha") return p2alpha(number(j, "alpha"));
    if (kind == "mixture") {
        PointMassUniformMixture m;
        if (j.contains("atoms")) {
            if (!j.at("atoms").is_array()) throw std::invalid_argument("'atoms' must be an array");
            for (const auto& a : j.at("atoms")) m.atoms.push_back({number(a, "location"), number(a, "mass")});
        }
        if (j.contains("uniform_pieces")) m.uniform_pieces = pieces_from(j.at("uniform_pieces"));
        return SubUniformDist(std::move(m));
    }
    throw std::invalid_argument("distribution: unknown kind '" + kind + "'");
}

// ------------------------------------------------------------------- idf

Json to_json(const IntegratedDF& idf) {
    if (idf.is_analytic()) {
        return {{"kind", "analytic"},
                {"family", *idf.family() == AnalyticFamily::Uniform01 ? "uniform" : "beta22"}};
    }
    return {{"kind", "piecewise"},
            {"breakpoints", idf.breakpoints()},
            {"cdf", idf.cdf_values()},
            {"cdf_left", idf.cdf_left_values()},
            {"family", nullptr}};
}

IntegratedDF idf_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind")) throw std::invalid_argument("idf: missing 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "analytic") {
        const auto fam = j.at("family").get<std::string>();
        if (fam == "uniform") return IntegratedDF::analytic(AnalyticFamily::Uniform01);
        if (fam == "beta22") return IntegratedDF::analytic(AnalyticFamily::Beta22);
        throw std::invalid_argument("idf: unknown family '" + fam + "'");
    }
    if (kind != "piecewise") throw std::invalid_argument("idf: unknown kind '" + kind + "'");
    auto x = j.at("breakpoints").get<std::vector<double>>();
    auto f = j.at("cdf").get<std::vector<double>>();
    std::vector<double> fl;
    if (j.contains("cdf_left")) fl = j.at("cdf_left").get<std::vector<double>>();
    if (x.empty() || x.size() != f.size() || (!fl.empty() && fl.size() != x.size())) {
        throw std::invalid_argument("idf: breakpoint and cdf arrays must be non-empty and of equal length");
    }
    return IntegratedDF::piecewise(std::move(x), std::move(f), std::move(fl));
}

// ---------------------------------------------------------------- bounds

Json to_json(const FisherReport& r) {
    auto optional = [](const OptionalBound& b) -> Json {
        return b.value ? Json(*b.value) : Json(nullptr);
    };
    auto reason = [](const OptionalBound& b) -> Json {
        return b.value ? Json(nullptr) : Json(b.reason);
    };
    return {{"score", r.score},
            {"m", r.m},
            {"nominal_p", r.nominal_p},
            {"bound_shifted_chi2", r.bound_shifted_chi2},
            {"bound_cantelli", optional(r.bound_cantelli)},
            {"bound_cantelli_reason", reason(r.bound_cantelli)},
            {"bound_mgf", optional(r.bound_mgf)},
            {"bound_mgf_reason", reason(r.bound_mgf)},
            {"conservative_p", r.conservative_p},
            {"floored_zeros", r.floored_zeros}};
}

Json to_json(const RunSummary& s) {
    Json tails = Json::array();
    for (std::size_t i = 0; i < s.tail_alphas.size(); ++i) {
        tails.push_back({{"alpha", s.tail_alphas[i]}, {"p_le_alpha", s.tail_probs[i]}});
    }
    return {{"n", s.n},
            {"mean", s.mean},
            {"variance", s.variance},
            {"tail", tails},
            {"max_idf_excess", s.max_idf_excess},
            {"ecdf", {{"x", s.ecdf_grid}, {"F", s.ecdf_values}}}};
}

// ----------------------------------------------------------------- model

Json to_json(const SyntheticPPPModel& m) {
    Json atoms = Json::array();
    for (const auto& a : m.coupling().atoms) {
        atoms.push_back({{"p", a.law.p()}, {"mass", a.mass}, {"cells", pieces_json(a.law.cells())}});
    }
    const auto& r = m.report();
    return {{"target", to_json(m.target())},
            {"g", m.g().name()},
            {"seed", m.seed()},
            {"method", r.method},
            {"discretization_ks", r.discretization_ks},
            {"kernel_scale", r.kernel_scale},
            {"martingale_residual", r.martingale_residual},
            {"coupling", {{"atoms", atoms}, {"diagonal", pieces_json(m.coupling().diagonal)}}}};
}

SyntheticPPPModel model_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("model: expected an object");
    SubUniformDist target = dist_from_json(j.at("target"));
    NamedCdf g = named_cdf(j.at("g").get<std::string>());
    ConditionalLaw law;
    const auto& c = j.at("coupling");
    for (const auto& a : c.at("atoms")) {
        const double p = number(a, "p");
        auto cells = pieces_from(a.at("cells"));
        law.atoms.push_back({number(a, "mass"),
                             cells.empty() ? PointLaw::singular(p) : PointLaw::from_table(p, std::move(cells))});
    }
    law.diagonal = pieces_from(c.at("diagonal"));
    SynthesisReport r;
    r.method = j.at("method").get<std::string>();
    r.discretization_ks = number(j, "discretization_ks");
    r.kernel_scale = number(j, "kernel_scale");
    r.martingale_residual = law.martingale_residual();
    r.atoms = law.atoms.size();
    return SyntheticPPPModel(std::move(target), std::move(law), g, j.at("seed").get<std::uint64_t>(),
                             std::move(r));
}

// ------------------------------------------------------------------ files

std::vector<double> read_values_csv(const std::string& path) {
    auto in = open_in(path);
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        out.push_back(parse_double(t, path + ":" + std::to_string(lineno)));
    }
    if (in.bad()) throw IoError("error while reading '" + path + "'");
    return out;
}

void write_values_csv(std::ostream& os, std::span<const double> values) {
    for (double v : values) os << format_double(v) << '\n';
}

void write_values_csv(const std::string& path, std::span<const double> values) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_values_csv(out, values);
    if (!out) throw IoError("error while writing '" + path + "'");
}

std::vector<std::vector<double>> read_pmf_csv(const std::string& path) {
    auto in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(t);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            row.push_back(parse_double(trim(cell), path + ":" + std::to_string(lineno)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Json read_json_file(const std::string& path) {
    auto in = open_in(path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
    }
}

} // namespace ppp
