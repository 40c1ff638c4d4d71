#pragma once

// Small argument parsers shared by the command-line tool and its tests.

#include <cstddef>
#include <string>
#include <vector>

namespace usd2p::cli {

/// "3", "1..4" or "1,2,4"; ascending and free of duplicates. Throws ParseError.
std::vector<std::size_t> parse_k_range(const std::string& text);

/// Comma- or whitespace-separated reals. Throws ParseError.
std::vector<double> parse_reals(const std::string& text);

/// Comma-separated indices. Throws ParseError.
std::vector<std::size_t> parse_indices(const std::string& text);

/// "plain" (1), "plus" (1 + eps) or a positive real. Throws ParseError.
double parse_alpha(const std::string& text, double epsilon);

}  // namespace usd2p::cli
