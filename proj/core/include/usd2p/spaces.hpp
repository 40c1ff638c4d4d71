#pragma once

// Finite-dimensional normed spaces described by a small recursive grammar:
//
//   space := lp(P, d)              l_p^d, P a real >= 1 or `inf`
//          | sup(n, space)         n-tuples with the max-of-block-norms norm
//          | dsum(P, space, space) direct sum, parts combined with an l_p norm
//          | fmod(N, space)        sections over an N-point discrete base,
//                                  sup over base points of the fiber norm
//
// Vectors are flat coordinate arrays; block structure is read off the space.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace usd2p {

/// Exponent of an l_p norm. Infinity is a distinct state, never a large float.
class Exponent {
public:
    /// Finite exponent, p >= 1 (throws ParameterError otherwise).
    explicit Exponent(double p);
    static Exponent infinity() noexcept { return Exponent(); }

    bool is_infinite() const noexcept { return infinite_; }
    /// Finite value; meaningless when is_infinite().
    double value() const noexcept { return value_; }
    /// Hoelder conjugate.
    Exponent conjugate() const;
    bool is_one() const noexcept { return !infinite_ && value_ == 1.0; }

    friend bool operator==(const Exponent&, const Exponent&) = default;

    std::string to_string() const;

private:
    Exponent() noexcept : value_(0.0), infinite_(true) {}
    double value_;
    bool infinite_;
};

class Space {
public:
    enum class Kind { Lp, SupTuple, DirectSum, FunctionModule };

    static Space lp(Exponent p, std::size_t d);
    static Space sup_tuple(std::size_t n, const Space& inner);
    static Space direct_sum(Exponent p, const Space& left, const Space& right);
    static Space function_module(std::size_t base_size, const Space& fiber);

    /// Parses the text grammar above; throws ParseError.
    static Space parse(std::string_view text);

    Kind kind() const noexcept;
    /// Total coordinate dimension.
    std::size_t dim() const noexcept;
    /// p for Lp and DirectSum.
    Exponent exponent() const;
    /// d for Lp, n for SupTuple, base size for FunctionModule.
    std::size_t count() const;
    /// Inner space for SupTuple, fiber for FunctionModule, left part for DirectSum.
    const Space& inner() const;
    /// Right part of a DirectSum.
    const Space& right() const;

    /// SupTuple and FunctionModule are both "blocked": count() copies of inner().
    bool is_blocked() const noexcept;
    std::size_t block_count() const;
    std::size_t block_dim() const;

    double norm(std::span<const double> v) const;
    double dual_norm(std::span<const double> functional) const;
    /// Writes a functional phi with dual_norm(phi) == 1 and phi(v) == norm(v).
    void norming_functional(std::span<const double> v, std::span<double> out) const;
    /// True when the unit ball is a polytope (every exponent is 1 or inf).
    bool is_polyhedral() const noexcept;

    std::string to_string() const;

    friend bool operator==(const Space& a, const Space& b);

private:
    struct Node;
    explicit Space(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct Vector {
    Vector(Space space, std::vector<double> coords);
    /// Zero vector of the space.
    explicit Vector(Space space);

    Space space;
    std::vector<double> coords;
};

/// Throws StructuralError naming both sizes when `v.size() != space.dim()`.
void require_dim(const Space& space, std::span<const double> v);

double norm(const Vector& v);
double norm(const Space& space, std::span<const double> v);

/// Arithmetic mean of the blocks of a SupTuple (or FunctionModule) vector.
Vector mean_block(const Vector& z);
void mean_block(const Space& blocked, std::span<const double> z, std::span<double> out);

/// Linear functional evaluation <phi, v>.
double apply(std::span<const double> functional, std::span<const double> v);

/// Unit-norm candidates for ball extreme points (sign-pattern vertices for
/// l_inf, +-e_i for l_1, products for sup-tuples), deduplicated, at most `cap`.
std::vector<std::vector<double>> extreme_candidates(const Space& space, std::size_t cap);

/// Deterministic sample of the closed unit ball: extreme candidates first,
/// then seeded random fill (alternately on the sphere and in the interior).
std::vector<Vector> sample_unit_ball(const Space& space, std::size_t count, std::uint64_t seed);

}  // namespace usd2p
