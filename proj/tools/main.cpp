// usd2p: batch front end for metric generators, Lipschitz seminorms, ring
// families, certificates, distance brackets and D_k profiles.
//
// Exit status: 0 success, 1 verification failure, 2 input error,
// 3 search found nothing, 4 capability refusal.

#include "cli_args.hpp"

#include "usd2p/certificates.hpp"
#include "usd2p/dkprofile.hpp"
#include "usd2p/errors.hpp"
#include "usd2p/hullgeom.hpp"
#include "usd2p/json_io.hpp"
#include "usd2p/lipmetric.hpp"
#include "usd2p/spaces.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace usd2p;
using io::json;

enum Exit { kOk = 0, kVerifyFail = 1, kInputError = 2, kNotFound = 3, kRefused = 4 };

struct RunConfig {
    std::string command;
    std::string space;
    std::string metric;
    std::size_t n = 2;
    double eps = 0.1;
    std::string alpha = "plain";
    std::string k;
    std::size_t m = 0;
    std::size_t budget = 0;
    std::optional<std::uint64_t> seed;
    double resolution = 0.0;
    std::string out;
    std::string format = "json";
    // Command-specific inputs.
    std::string values;
    std::string mask;
    std::optional<double> extend;
    std::string family;
    std::string route;
    std::string mode = "profile";
    std::string kind;
    std::string z;
    double q = 0.01;
    std::size_t levels = 12;
    double growth = 4.0;
    std::size_t candidates = 24;
};

// Every output repeats the configuration that produced it, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_pairs(const RunConfig& c) {
    auto num = [](double x) { return io::format_double(x); };
    return {{"command", c.command},
            {"space", c.space},
            {"metric", c.metric},
            {"n", std::to_string(c.n)},
            {"eps", num(c.eps)},
            {"alpha", c.alpha},
            {"k", c.k},
            {"m", std::to_string(c.m)},
            {"budget", std::to_string(c.budget)},
            {"seed", c.seed ? std::to_string(*c.seed) : ""},
            {"resolution", num(c.resolution)},
            {"format", c.format},
            {"values", c.values},
            {"mask", c.mask},
            {"extend", c.extend ? num(*c.extend) : ""},
            {"family", c.family},
            {"route", c.route},
            {"mode", c.mode},
            {"kind", c.kind},
            {"z", c.z},
            {"q", num(c.q)},
            {"levels", std::to_string(c.levels)},
            {"growth", num(c.growth)},
            {"candidates", std::to_string(c.candidates)}};
}

json config_json(const RunConfig& c) {
    json j = json::object();
    for (const auto& [k, v] : config_pairs(c)) j[k] = v;
    return j;
}

void emit(const RunConfig& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw ParameterError("cannot open output file '" + c.out + "'");
    f << text;
}

void emit_json(const RunConfig& c, json body) {
    json j;
    j["config"] = config_json(c);
    for (auto& [k, v] : body.items()) j[k] = std::move(v);
    emit(c, j.dump(2) + "\n");
}

std::uint64_t require_seed(const RunConfig& c) {
    if (!c.seed) throw ParameterError("command '" + c.command + "' is stochastic and needs --seed");
    return *c.seed;
}

void require_json(const RunConfig& c) {
    if (c.format != "json") throw ParameterError("command '" + c.command + "' only writes json");
}

FiniteMetricSpace load_metric(const std::string& path) {
    if (path.empty()) throw ParameterError("--metric is required");
    std::ifstream f(path);
    if (!f) throw ParameterError("cannot open metric file '" + path + "'");
    try {
        return read_metric(f);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParameterError("cannot open '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

// Uniform in the cube, pulled into the unit ball.
std::vector<double> random_ball_point(const Space& s, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(s.dim());
    for (double& x : v) x = u(rng);
    const double nv = s.norm(v);
    if (nv > 1.0)
        for (double& x : v) x /= nv;
    return v;
}

int cmd_gen(RunConfig& c) {
    std::optional<FiniteMetricSpace> m;
    if (c.kind == "chain")
        m = geometric_chain(c.q, c.levels);
    else if (c.kind == "ray")
        m = integer_ray(c.levels, c.growth);
    else
        throw ParameterError("--kind must be 'chain' or 'ray'");
    std::ostringstream os;
    for (const auto& [k, v] : config_pairs(c)) os << "# " << k << '=' << v << '\n';
    write_metric(os, *m);
    emit(c, os.str());
    return kOk;
}

int cmd_lip(RunConfig& c) {
    require_json(c);
    const auto m = load_metric(c.metric);
    const auto values = cli::parse_reals(c.values);
    LipFunction f{values, std::nullopt};
    if (!c.mask.empty()) f.domain = cli::parse_indices(c.mask);
    json body;
    body["points"] = m.size();
    body["seminorm"] = lip_seminorm(m, f);
    if (c.extend) {
        const auto ext = mcshane_extend(m, f, *c.extend);
        bool agrees = true;
        for (std::size_t p : f.points(m.size())) agrees = agrees && ext.values[p] == values[p];
        body["extension"] = json{{"lipschitz_constant", *c.extend},
                                 {"values", ext.values},
                                 {"seminorm", lip_seminorm(m, ext)},
                                 {"agrees_on_domain", agrees}};
    }
    emit_json(c, std::move(body));
    return kOk;
}

std::size_t single_k(const RunConfig& c, std::size_t fallback) {
    if (c.k.empty()) return fallback;
    const auto ks = cli::parse_k_range(c.k);
    return ks.back();
}

int cmd_rings(RunConfig& c) {
    require_json(c);
    const auto m = load_metric(c.metric);
    const std::size_t target = single_k(c, 3);
    const auto fam = find_ring_family(m, c.eps, target);
    if (!fam) throw NotFoundError("no family of " + std::to_string(target) + " disjoint rings at eps=" +
                                  io::format_double(c.eps));
    const auto check = validate_ring_family(m, *fam);
    emit_json(c, json{{"family", io::ring_family_json(*fam)}, {"validation", io::report_json(check)}});
    return check.pass() ? kOk : kVerifyFail;
}

int cmd_cert_centralizer(RunConfig& c) {
    const Space x = Space::parse(c.space.empty() ? "fmod(8, lp(2,1))" : c.space);
    Space module = x;
    if (x.kind() == Space::Kind::Lp && x.exponent().is_infinite())
        module = Space::function_module(x.dim(), Space::lp(Exponent::infinity(), 1));
    if (module.kind() != Space::Kind::FunctionModule)
        throw ParameterError("centralizer certificates need fmod(N, fiber) or lp(inf, d)");
    const std::size_t sets_count = c.m ? c.m : module.count();
    if (sets_count > module.count())
        throw ParameterError("--m " + std::to_string(sets_count) + " exceeds the base size " +
                             std::to_string(module.count()));
    std::mt19937_64 rng(require_seed(c));
    const Space tuple = Space::sup_tuple(c.n, module);
    // Unit section along the first fiber direction.
    std::vector<double> u = extreme_candidates(module.inner(), 1).front();
    const double nu = module.inner().norm(u);
    for (double& v : u) v /= nu;
    std::vector<double> e;
    for (std::size_t t = 0; t < module.count(); ++t) e.insert(e.end(), u.begin(), u.end());

    const auto sets = singleton_sets(sets_count);
    CertificateReport all;
    json panel = json::array();
    double worst = 0.0;
    for (std::size_t p = 0; p < std::max<std::size_t>(c.budget, 1); ++p) {
        const auto z = random_ball_point(tuple, rng);
        const auto built = centralizer_construct(module, c.n, z, e, sets);
        const auto rep = centralizer_verify(module, c.n, z, built, sets);
        for (const auto& chk : rep.checks)
            if (chk.name.rfind("approximation", 0) == 0) worst = std::max(worst, chk.value);
        all.append(rep);
        panel.push_back(json{{"z", z}, {"pass", rep.pass()}});
    }
    emit_json(c, json{{"route", "centralizer"},
                      {"module", module.to_string()},
                      {"sets", sets_count},
                      {"panel", std::move(panel)},
                      {"approximation_max", worst},
                      {"approximation_bound", 2.0 / static_cast<double>(sets_count)},
                      {"report", io::report_json(all)}});
    return all.pass() ? kOk : kVerifyFail;
}

int cmd_cert_ivakhno(RunConfig& c) {
    const auto m = load_metric(c.metric);
    RingFamily fam;
    if (!c.family.empty()) {
        const auto j = load_json(c.family);
        fam = io::ring_family_from_json(j.contains("family") ? j.at("family") : j);
    } else {
        auto found = find_ring_family(m, c.eps, single_k(c, 3));
        if (!found) throw NotFoundError("no ring family found at eps=" + io::format_double(c.eps));
        fam = std::move(*found);
    }
    const std::size_t k = std::min(single_k(c, fam.size()), fam.size());
    CertificateReport all = validate_ring_family(m, fam);
    json panel = json::array();
    json approx = json::array();
    if (all.pass()) {
        std::mt19937_64 rng(require_seed(c));
        std::vector<double> worst(k + 1, 0.0);
        for (std::size_t p = 0; p < std::max<std::size_t>(c.budget, 1); ++p) {
            const auto z = sample_unit_lipschitz(m, c.n, rng());
            const auto built = ivakhno_construct(m, z, fam);
            bool ok = true;
            for (std::size_t kk = 1; kk <= k; ++kk) {
                const auto rep = ivakhno_verify(m, z, built, fam, kk);
                for (const auto& chk : rep.checks)
                    if (chk.name.rfind("approximation", 0) == 0) worst[kk] = std::max(worst[kk], chk.value);
                ok = ok && rep.pass();
                all.append(rep);
            }
            panel.push_back(json{{"z", z}, {"pass", ok}});
        }
        for (std::size_t kk = 1; kk <= k; ++kk)
            approx.push_back(json{{"k", kk},
                                  {"value", worst[kk]},
                                  {"bound", (4.0 + 2.0 * fam.epsilon) / static_cast<double>(kk)}});
    }
    json body{{"route", "ivakhno"}, {"family", io::ring_family_json(fam)}, {"panel", std::move(panel)},
              {"approximation", std::move(approx)}, {"report", io::report_json(all)}};
    if (const auto* f = all.first_failure()) body["first_failure"] = f->name;
    emit_json(c, std::move(body));
    return all.pass() ? kOk : kVerifyFail;
}

int cmd_cert(RunConfig& c) {
    require_json(c);
    if (c.route == "centralizer") return cmd_cert_centralizer(c);
    if (c.route == "ivakhno") return cmd_cert_ivakhno(c);
    throw ParameterError("--route must be 'centralizer' or 'ivakhno'");
}

int cmd_dist(RunConfig& c) {
    require_json(c);
    const Space x = Space::parse(c.space);
    const CmParams params{c.n, c.eps, cli::parse_alpha(c.alpha, c.eps), c.m ? c.m : 1};
    params.validate();
    const auto z = cli::parse_reals(c.z);
    DescentOptions d;
    d.budget = c.budget ? c.budget : 200;
    d.seed = require_seed(c);
    auto b = dist_to_cm_upper(x, z, params, d);
    if (c.resolution > 0.0) {
        GridOptions g;
        g.resolution = c.resolution;
        const auto gb = dist_to_cm_grid(x, z, params, g);
        b.lower = gb.lower;
        b.lower_method = gb.lower_method;
        b.resolution = gb.resolution;
        b.covering_constant = gb.covering_constant;
        if (gb.upper < b.upper) {
            b.upper = gb.upper;
            b.upper_method = gb.upper_method;
            b.witness = gb.witness;
            b.solver_gap = gb.solver_gap;
        }
    }
    emit_json(c, io::bracket_json(x, params, z, b));
    return kOk;
}

int cmd_dk(RunConfig& c) {
    if (c.format != "json" && c.format != "csv") throw ParameterError("--format must be json or csv");
    const auto ks = cli::parse_k_range(c.k.empty() ? "1..4" : c.k);
    const std::uint64_t seed = require_seed(c);
    std::vector<io::CsvRow> rows;
    json body;

    if (c.mode == "constructive") {
        ConstructiveConfig cc;
        cc.k_max = ks.back();
        cc.seed = seed;
        cc.panel = c.candidates;
        std::optional<FiniteMetricSpace> metric;
        Space x = Space::lp(Exponent(2.0), 1);
        if (c.route == "ivakhno") {
            metric = load_metric(c.metric);
            cc.route = ConstructiveRoute::Ivakhno;
            cc.metric = &*metric;
            if (!c.family.empty()) {
                const auto j = load_json(c.family);
                cc.family = io::ring_family_from_json(j.contains("family") ? j.at("family") : j);
            }
            x = lip_image_space(*metric);
        } else if (c.route.empty() || c.route == "centralizer") {
            x = Space::parse(c.space);
        } else {
            throw ParameterError("--route must be 'centralizer' or 'ivakhno'");
        }
        const auto bound = constructive_dk_upper(x, c.n, c.eps, cc);
        json entries = json::array();
        for (std::size_t k : ks) {
            const auto it = bound.upper.find(k);
            if (it == bound.upper.end()) continue;
            rows.push_back({k, 0.0, it->second, "none/constructive-" + bound.route, "-"});
            entries.push_back(json{{"k", k}, {"upper", it->second}});
        }
        body = io::constructive_json(bound);
        body["entries"] = std::move(entries);
    } else if (c.mode == "floor") {
        DkOptions o;
        o.seed = seed;
        o.candidates = c.candidates;
        o.budget = c.budget ? c.budget : 60;
        o.resolution = c.resolution;
        const auto rep = dk_floor_check(Space::parse(c.space), c.n, c.eps, ks.back(), o);
        rows = io::csv_rows(rep.entries);
        body = io::floor_json(rep);
    } else if (c.mode == "profile") {
        DkOptions o;
        o.seed = seed;
        o.candidates = c.candidates;
        o.budget = c.budget ? c.budget : 60;
        o.resolution = c.resolution;
        o.require_grid = c.resolution > 0.0;
        const Space x = Space::parse(c.space);
        const auto prof = estimate_dk(x, c.n, c.eps, cli::parse_alpha(c.alpha, c.eps), ks, o);
        rows = io::csv_rows(prof.entries);
        body = io::profile_json(prof);
    } else {
        throw ParameterError("--mode must be profile, constructive or floor");
    }

    if (c.format == "csv") {
        std::ostringstream os;
        io::write_profile_csv(os, config_pairs(c), rows);
        emit(c, os.str());
    } else {
        emit_json(c, std::move(body));
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"usd2p: deficiency profiles, distance brackets and constructive certificates"};
    app.require_subcommand(1, 1);
    RunConfig c;

    auto common = [&](CLI::App* s) {
        s->add_option("--out", c.out, "Output file (default: stdout)");
        s->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    };
    auto tuple_opts = [&](CLI::App* s) {
        s->add_option("--space", c.space, "Space grammar, e.g. 'sup(3, lp(inf,4))'");
        s->add_option("--n", c.n, "Tuple arity n")->check(CLI::PositiveNumber);
        s->add_option("--eps", c.eps, "epsilon in (0,1)");
        s->add_option("--alpha", c.alpha, "plain, plus or a positive real");
    };
    auto seeded = [&](CLI::App* s) {
        s->add_option("--seed", c.seed, "Random seed (required for stochastic commands)");
        s->add_option("--budget", c.budget, "Work budget (descent solves or panel size)");
    };

    auto* gen = app.add_subcommand("gen", "Write a generated metric space");
    gen->add_option("--kind", c.kind, "chain or ray")->required();
    gen->add_option("--q", c.q, "Chain ratio q in (0,1)");
    gen->add_option("--levels", c.levels, "Number of points L");
    gen->add_option("--growth", c.growth, "Ray growth a > 1");
    common(gen);

    auto* lip = app.add_subcommand("lip", "Lipschitz seminorm and McShane extension");
    lip->add_option("--metric", c.metric, "Metric file")->required();
    lip->add_option("--values", c.values, "Function values, comma separated")->required();
    lip->add_option("--mask", c.mask, "Domain indices, comma separated (default: all points)");
    lip->add_option("--extend", c.extend, "Extend with this Lipschitz constant");
    common(lip);

    auto* rings = app.add_subcommand("rings", "Search a ring family");
    rings->add_option("--metric", c.metric, "Metric file")->required();
    rings->add_option("--eps", c.eps, "epsilon > 0");
    rings->add_option("--k", c.k, "Target family size (default 3)");
    common(rings);

    auto* cert = app.add_subcommand("cert", "Construct and verify a certificate");
    cert->add_option("--route", c.route, "centralizer or ivakhno")->required();
    cert->add_option("--metric", c.metric, "Metric file (ivakhno)");
    cert->add_option("--family", c.family, "Ring family JSON (ivakhno; default: search)");
    cert->add_option("--k", c.k, "Largest k to verify (ivakhno)");
    cert->add_option("--m", c.m, "Number of base sets (centralizer; default: base size)");
    tuple_opts(cert);
    seeded(cert);
    common(cert);

    auto* dist = app.add_subcommand("dist", "Distance bracket d(z, C_m)");
    tuple_opts(dist);
    dist->add_option("--z", c.z, "Tuple coordinates, comma separated")->required();
    dist->add_option("--m", c.m, "At most m generators (default 1)");
    dist->add_option("--resolution", c.resolution, "Grid step for a certified lower side");
    seeded(dist);
    common(dist);

    auto* dk = app.add_subcommand("dk", "D_k profile");
    tuple_opts(dk);
    dk->add_option("--k", c.k, "k range: '3', '1..4' or '1,2,4'");
    dk->add_option("--mode", c.mode, "profile, constructive or floor");
    dk->add_option("--route", c.route, "Constructive route: centralizer or ivakhno");
    dk->add_option("--metric", c.metric, "Metric file (ivakhno route)");
    dk->add_option("--family", c.family, "Ring family JSON (ivakhno route)");
    dk->add_option("--resolution", c.resolution, "Grid step; enables certified lower sides");
    dk->add_option("--candidates", c.candidates, "Random candidates (or panel size)");
    seeded(dk);
    common(dk);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    try {
        if (gen->parsed()) return c.command = "gen", cmd_gen(c);
        if (lip->parsed()) return c.command = "lip", cmd_lip(c);
        if (rings->parsed()) return c.command = "rings", cmd_rings(c);
        if (cert->parsed()) return c.command = "cert", cmd_cert(c);
        if (dist->parsed()) return c.command = "dist", cmd_dist(c);
        if (dk->parsed()) return c.command = "dk", cmd_dk(c);
    } catch (const NotFoundError& e) {
        std::cerr << "not found: " << e.what() << '\n';
        return kNotFound;
    } catch (const CapabilityRefusal& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return kRefused;
    } catch (const InternalInconsistency& e) {
        std::cerr << "verification failed: " << e.what() << '\n';
        return kVerifyFail;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}
