#pragma once

// JSON and CSV shapes of brackets, ring families, certificate reports and
// profiles. Doubles are written in shortest round-trip form, so equal values
// always serialize to equal bytes.

#include "usd2p/certificates.hpp"
#include "usd2p/dkprofile.hpp"
#include "usd2p/hullgeom.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace usd2p::io {

using json = nlohmann::ordered_json;

json params_json(const Space& x, const CmParams& params);
json decomposition_json(const ConvexDecomposition& d);

/// {params, z, lower, upper, gap, witness, method, seed}.
json bracket_json(const Space& x, const CmParams& params, std::span<const double> z, const DistanceBracket& b);

/// {epsilon, entries: [{t, tau, r, rho, R}]}.
json ring_family_json(const RingFamily& family);
/// Throws ParseError on missing or mistyped fields.
RingFamily ring_family_from_json(const json& j);

/// {checks: [{name, value, bound, slack, pass}], pass}.
json report_json(const CertificateReport& report);

json profile_json(const DkProfile& profile);
json constructive_json(const ConstructiveBound& bound);
json floor_json(const FloorReport& report);

struct CsvRow {
    std::size_t k = 0;
    double lower = 0.0;
    double upper = 0.0;
    std::string method;
    std::string witness_id;
};

std::vector<CsvRow> csv_rows(const std::vector<DkEntry>& entries);

/// Writes `# key=value` lines, then the columns k,lower,upper,method,witness-id.
void write_profile_csv(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& header,
                       const std::vector<CsvRow>& rows);

/// Shortest round-trip decimal form of x ("inf", "-inf", "nan" for non-finite values).
std::string format_double(double x);

}  // namespace usd2p::io
