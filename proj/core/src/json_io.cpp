#include "usd2p/json_io.hpp"

#include "usd2p/errors.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace usd2p::io {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

json params_json(const Space& x, const CmParams& p) {
    return json{{"space", x.to_string()}, {"n", p.n}, {"epsilon", p.epsilon}, {"alpha", p.alpha}, {"m", p.m}};
}

json decomposition_json(const ConvexDecomposition& d) {
    json gens = json::array();
    for (const auto& g : d.generators) gens.push_back(g);
    return json{{"weights", d.weights}, {"generators", std::move(gens)}};
}

json bracket_json(const Space& x, const CmParams& params, std::span<const double> z, const DistanceBracket& b) {
    json j;
    j["params"] = params_json(x, params);
    j["z"] = std::vector<double>(z.begin(), z.end());
    j["lower"] = b.lower;
    j["upper"] = b.upper;
    j["gap"] = b.upper - b.lower;
    j["witness"] = b.witness ? decomposition_json(*b.witness) : json(nullptr);
    j["method"] = json{{"lower", b.lower_method},
                       {"upper", b.upper_method},
                       {"solver_gap", b.solver_gap},
                       {"resolution", b.resolution},
                       {"covering_constant", b.covering_constant}};
    j["seed"] = b.seed;
    return j;
}

json ring_family_json(const RingFamily& family) {
    json entries = json::array();
    for (const auto& e : family.entries)
        entries.push_back(json{{"t", e.t}, {"tau", e.tau}, {"r", e.r}, {"rho", e.rho}, {"R", e.R}});
    return json{{"epsilon", family.epsilon}, {"entries", std::move(entries)}};
}

namespace {

double number_field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ParseError(where + ": field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

std::size_t index_field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number_unsigned())
        throw ParseError(where + ": field '" + key + "' must be a nonnegative integer");
    return j.at(key).get<std::size_t>();
}

}  // namespace

RingFamily ring_family_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("ring family must be a JSON object");
    RingFamily f;
    f.epsilon = number_field(j, "epsilon", "ring family");
    if (!j.contains("entries") || !j.at("entries").is_array())
        throw ParseError("ring family: field 'entries' must be an array");
    std::size_t i = 0;
    for (const auto& e : j.at("entries")) {
        const std::string where = "entries[" + std::to_string(i++) + "]";
        if (!e.is_object()) throw ParseError(where + " must be an object");
        f.entries.push_back({index_field(e, "t", where), index_field(e, "tau", where), number_field(e, "r", where),
                             number_field(e, "rho", where), number_field(e, "R", where)});
    }
    return f;
}

json report_json(const CertificateReport& report) {
    json checks = json::array();
    for (const auto& c : report.checks)
        checks.push_back(
            json{{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"slack", c.slack}, {"pass", c.pass}});
    return json{{"checks", std::move(checks)}, {"pass", report.pass()}};
}

namespace {

json entry_json(const DkEntry& e) {
    json j;
    j["k"] = e.k;
    j["lower"] = e.bracket.lower;
    j["upper"] = e.bracket.upper;
    j["certified"] = e.certified;
    j["method"] = json{{"lower", e.bracket.lower_method},
                       {"upper", e.bracket.upper_method},
                       {"resolution", e.bracket.resolution},
                       {"covering_constant", e.bracket.covering_constant}};
    j["witness_id"] = e.witness_id;
    j["witness_z"] = e.witness_z;
    j["decomposition"] = e.bracket.witness ? decomposition_json(*e.bracket.witness) : json(nullptr);
    return j;
}

}  // namespace

json profile_json(const DkProfile& p) {
    json entries = json::array();
    for (const auto& e : p.entries) entries.push_back(entry_json(e));
    return json{{"params", {{"space", p.space.to_string()}, {"n", p.n}, {"epsilon", p.epsilon}, {"alpha", p.alpha}}},
                {"seed", p.seed},
                {"candidates", p.traces.size()},
                {"entries", std::move(entries)}};
}

json constructive_json(const ConstructiveBound& b) {
    json entries = json::array();
    for (const auto& [k, u] : b.upper) entries.push_back(json{{"k", k}, {"upper", u}});
    const auto* fail = b.panel.first_failure();
    return json{{"route", b.route},
                {"capacity", b.capacity},
                {"entries", std::move(entries)},
                {"panel_checks", b.panel.checks.size()},
                {"panel_pass", fail == nullptr}};
}

json floor_json(const FloorReport& r) {
    json entries = json::array();
    for (const auto& e : r.entries) entries.push_back(entry_json(e));
    return json{{"floor", r.floor},
                {"conclusive", r.conclusive},
                {"resolution", r.resolution},
                {"resolution_error", r.resolution_error},
                {"entries", std::move(entries)}};
}

std::vector<CsvRow> csv_rows(const std::vector<DkEntry>& entries) {
    std::vector<CsvRow> rows;
    for (const auto& e : entries)
        rows.push_back({e.k, e.bracket.lower, e.bracket.upper, e.bracket.lower_method + "/" + e.bracket.upper_method,
                        std::to_string(e.witness_id)});
    return rows;
}

void write_profile_csv(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& header,
                       const std::vector<CsvRow>& rows) {
    for (const auto& [k, v] : header) out << "# " << k << '=' << v << '\n';
    out << "k,lower,upper,method,witness-id\n";
    for (const auto& r : rows)
        out << r.k << ',' << format_double(r.lower) << ',' << format_double(r.upper) << ',' << r.method << ','
            << r.witness_id << '\n';
}

}  // namespace usd2p::io
