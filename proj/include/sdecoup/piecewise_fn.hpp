#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sdecoup {

/// a + b*x on the piece's open interval.
struct AffinePiece {
    double a = 0.0;
    double b = 0.0;
};

/// Black-box piece. The evaluator may be absent (e.g. after parsing from
/// text); declared constants then stand in for anything that would need
/// function values.
struct GenericPiece {
    std::function<double(double)> eval;
    std::optional<double> lipschitz;
    double left_limit = 0.0;   // limit at the piece's left endpoint (if finite)
    double right_limit = 0.0;  // limit at the piece's right endpoint (if finite)
    std::optional<double> bound; // declared sup|f| over the piece, if any
};

using Piece = std::variant<AffinePiece, GenericPiece>;

/// Flags for the structural conditions a drift coefficient may satisfy:
/// piecewise Lipschitz (mu1), piecewise Lipschitz derivative (mu2),
/// at least one nonzero jump (mu3), nondecreasing (mu4), bounded (mu5).
struct ConditionReport {
    struct Entry {
        bool ok = false;
        std::string witness; // populated when the check fails or was not computable
    };
    Entry mu1, mu2, mu3, mu4, mu5;
};

/// Piecewise-Lipschitz function with finitely many breakpoints.
/// Piece i lives on (xi_{i-1}, xi_i) with xi_0 = -inf, xi_{k+1} = +inf;
/// the value AT a breakpoint is declared explicitly (default: right limit).
/// Immutable after construction; safe for concurrent reads.
class PiecewiseLipschitzFn {
public:
    PiecewiseLipschitzFn(std::vector<double> breakpoints, std::vector<Piece> pieces,
                         std::vector<double> breakpoint_values = {});

    // -- named constructors used throughout the experiments
    static PiecewiseLipschitzFn constant(double c);
    static PiecewiseLipschitzFn identity();
    /// Heaviside-type drift 1_{[threshold, inf)}.
    static PiecewiseLipschitzFn indicator(double threshold);
    /// Piecewise-constant function: levels[i] on (breaks[i-1], breaks[i]).
    static PiecewiseLipschitzFn step(std::vector<double> breaks, std::vector<double> levels);

    double eval(double x) const {
        std::size_t i = 0;
        const std::size_t k = breakpoints_.size();
        while (i < k && x > breakpoints_[i]) ++i;
        if (i < k && x == breakpoints_[i]) return breakpoint_values_[i];
        return eval_piece(i, x);
    }

    std::size_t breakpoint_count() const { return breakpoints_.size(); }
    double breakpoint(std::size_t i) const;
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& breakpoint_values() const { return breakpoint_values_; }
    const std::vector<Piece>& pieces() const { return pieces_; }

    /// (left limit, right limit) of the function at breakpoint i (0-based).
    std::pair<double, double> one_sided_limits(std::size_t i) const;

    /// right limit minus left limit at breakpoint i (0-based).
    double jump(std::size_t i) const;

    /// Structural checks. Affine pieces are verified exactly; generic pieces
    /// with an evaluator are probed on a dense grid, declaration-only pieces
    /// are taken at their word.
    ConditionReport validate() const;

    /// A constant c with |f(x)| <= c(1+|x|), assembled from piece Lipschitz
    /// constants and anchor values, then spot-checked by sampling.
    double linear_growth_constant() const;

    /// Indices i with (x - xi_i)(y - xi_i) <= 0 (0-based).
    std::vector<std::size_t> straddles(double x, double y) const;

    std::string to_text() const;
    static PiecewiseLipschitzFn from_text(std::string_view text);

    /// Structural equality (breakpoints, values, piece parameters); generic
    /// evaluators are compared by declaration only.
    bool same_structure(const PiecewiseLipschitzFn& other) const;

private:
    double eval_piece(std::size_t i, double x) const;
    double piece_limit_at(std::size_t piece_index, bool right_end) const;

    std::vector<double> breakpoints_;
    std::vector<Piece> pieces_;
    std::vector<double> breakpoint_values_;
};

} // namespace sdecoup
