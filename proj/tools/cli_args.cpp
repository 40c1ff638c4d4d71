#include "cli_args.hpp"

#include "usd2p/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace usd2p::cli {

namespace {

std::size_t parse_index(std::string_view s, const std::string& whole) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("expected a nonnegative integer in '" + whole + "', got '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view text, const char* seps) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t next = text.find_first_of(seps, pos);
        const std::size_t end = next == std::string_view::npos ? text.size() : next;
        auto tok = text.substr(pos, end - pos);
        while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
        while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
        if (!tok.empty()) out.push_back(tok);
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

}  // namespace

std::vector<std::size_t> parse_k_range(const std::string& text) {
    std::vector<std::size_t> ks;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const std::size_t lo = parse_index(std::string_view(text).substr(0, dots), text);
        const std::size_t hi = parse_index(std::string_view(text).substr(dots + 2), text);
        if (lo > hi) throw ParseError("empty k range '" + text + "'");
        if (hi - lo > 100000) throw ParseError("k range '" + text + "' is too long");
        for (std::size_t k = lo; k <= hi; ++k) ks.push_back(k);
    } else {
        const auto toks = split(text, ",");
        if (toks.size() != static_cast<std::size_t>(std::count(text.begin(), text.end(), ',')) + 1)
            throw ParseError("empty entry in k list '" + text + "'");
        for (auto tok : toks) ks.push_back(parse_index(tok, text));
    }
    if (ks.empty()) throw ParseError("empty k range '" + text + "'");
    if (ks.front() == 0) throw ParseError("k must be >= 1 in '" + text + "'");
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

std::vector<double> parse_reals(const std::string& text) {
    std::vector<double> out;
    for (auto tok : split(text, ", \t\n")) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
            throw ParseError("malformed real '" + std::string(tok) + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ParseError("expected at least one real number");
    return out;
}

std::vector<std::size_t> parse_indices(const std::string& text) {
    std::vector<std::size_t> out;
    for (auto tok : split(text, ", ")) out.push_back(parse_index(tok, text));
    return out;
}

double parse_alpha(const std::string& text, double epsilon) {
    if (text == "plain") return 1.0;
    if (text == "plus") return 1.0 + epsilon;
    const auto v = parse_reals(text);
    if (v.size() != 1 || !(v[0] > 0.0)) throw ParseError("alpha must be 'plain', 'plus' or a positive real");
    return v[0];
}

}  // namespace usd2p::cli
