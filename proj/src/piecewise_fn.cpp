#include "sdecoup/piecewise_fn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sdecoup {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kSamplesPerPiece = 10000;
constexpr double kSampleWindow = 100.0;  // validation samples live in [-100, 100]
constexpr double kEndpointOffset = 1e-8;
// Cap on the sampled second difference quotient used as the (heuristic)
// piecewise-C^{1,1} probe for black-box pieces.
constexpr double kCurvatureCap = 1e6;

std::string describe_point(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

PiecewiseLipschitzFn::PiecewiseLipschitzFn(std::vector<double> breakpoints,
                                           std::vector<Piece> pieces,
                                           std::vector<double> breakpoint_values)
    : breakpoints_(std::move(breakpoints)),
      pieces_(std::move(pieces)),
      breakpoint_values_(std::move(breakpoint_values)) {
    const std::size_t k = breakpoints_.size();
    if (pieces_.size() != k + 1)
        throw std::invalid_argument("PiecewiseLipschitzFn: need k+1 pieces for k breakpoints");
    for (std::size_t i = 0; i + 1 < k; ++i)
        if (!(breakpoints_[i] < breakpoints_[i + 1]))
            throw std::invalid_argument("PiecewiseLipschitzFn: breakpoints must be strictly increasing");
    for (double b : breakpoints_)
        if (!std::isfinite(b))
            throw std::invalid_argument("PiecewiseLipschitzFn: breakpoints must be finite");
    for (std::size_t i = 0; i <= k; ++i) {
        if (const auto* g = std::get_if<GenericPiece>(&pieces_[i])) {
            const bool has_left = i > 0;
            const bool has_right = i < k;
            if (has_left && !std::isfinite(g->left_limit))
                throw std::invalid_argument("PiecewiseLipschitzFn: non-finite left limit");
            if (has_right && !std::isfinite(g->right_limit))
                throw std::invalid_argument("PiecewiseLipschitzFn: non-finite right limit");
        }
    }
    if (breakpoint_values_.empty()) {
        breakpoint_values_.reserve(k);
        for (std::size_t i = 0; i < k; ++i)
            breakpoint_values_.push_back(piece_limit_at(i + 1, /*right_end=*/false));
    } else if (breakpoint_values_.size() != k) {
        throw std::invalid_argument("PiecewiseLipschitzFn: breakpoint value count mismatch");
    }
    for (double v : breakpoint_values_)
        if (!std::isfinite(v))
            throw std::invalid_argument("PiecewiseLipschitzFn: breakpoint values must be finite");
}

PiecewiseLipschitzFn PiecewiseLipschitzFn::constant(double c) {
    return PiecewiseLipschitzFn({}, {AffinePiece{c, 0.0}});
}

PiecewiseLipschitzFn PiecewiseLipschitzFn::identity() {
    return PiecewiseLipschitzFn({}, {AffinePiece{0.0, 1.0}});
}

PiecewiseLipschitzFn PiecewiseLipschitzFn::indicator(double threshold) {
    return PiecewiseLipschitzFn({threshold}, {AffinePiece{0.0, 0.0}, AffinePiece{1.0, 0.0}});
}

PiecewiseLipschitzFn PiecewiseLipschitzFn::step(std::vector<double> breaks,
                                                std::vector<double> levels) {
    if (levels.size() != breaks.size() + 1)
        throw std::invalid_argument("step: need one level per interval");
    std::vector<Piece> pieces;
    pieces.reserve(levels.size());
    for (double lvl : levels) pieces.push_back(AffinePiece{lvl, 0.0});
    return PiecewiseLipschitzFn(std::move(breaks), std::move(pieces));
}

double PiecewiseLipschitzFn::breakpoint(std::size_t i) const {
    if (i >= breakpoints_.size()) throw std::out_of_range("breakpoint index");
    return breakpoints_[i];
}

double PiecewiseLipschitzFn::eval_piece(std::size_t i, double x) const {
    if (const auto* a = std::get_if<AffinePiece>(&pieces_[i])) return a->a + a->b * x;
    const auto& g = std::get<GenericPiece>(pieces_[i]);
    if (!g.eval)
        throw std::runtime_error("PiecewiseLipschitzFn: generic piece has no evaluator");
    return g.eval(x);
}

double PiecewiseLipschitzFn::piece_limit_at(std::size_t piece_index, bool right_end) const {
    // right_end: limit at the piece's right endpoint, else at its left endpoint
    const Piece& p = pieces_[piece_index];
    const double endpoint = right_end ? breakpoints_[piece_index]       // xi_i for piece i
                                      : breakpoints_[piece_index - 1];  // xi_{i-1}
    if (const auto* a = std::get_if<AffinePiece>(&p)) return a->a + a->b * endpoint;
    const auto& g = std::get<GenericPiece>(p);
    return right_end ? g.right_limit : g.left_limit;
}

std::pair<double, double> PiecewiseLipschitzFn::one_sided_limits(std::size_t i) const {
    if (i >= breakpoints_.size()) throw std::out_of_range("one_sided_limits index");
    // left limit comes from piece i (interval ending at xi_i), right limit
    // from piece i+1 (interval starting at xi_i)
    return {piece_limit_at(i, /*right_end=*/true), piece_limit_at(i + 1, /*right_end=*/false)};
}

double PiecewiseLipschitzFn::jump(std::size_t i) const {
    const auto [l, r] = one_sided_limits(i);
    return r - l;
}

std::vector<std::size_t> PiecewiseLipschitzFn::straddles(double x, double y) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < breakpoints_.size(); ++i)
        if ((x - breakpoints_[i]) * (y - breakpoints_[i]) <= 0.0) out.push_back(i);
    return out;
}

namespace {

struct PieceSpan {
    double lo, hi;  // open interval of the piece
};

// Sample grid on piece ∩ [-window, window], plus points hugging finite endpoints.
std::vector<double> sample_grid(const PieceSpan& span) {
    const double lo = std::max(span.lo, -kSampleWindow);
    const double hi = std::min(span.hi, kSampleWindow);
    std::vector<double> xs;
    if (!(lo < hi)) return xs;
    xs.reserve(kSamplesPerPiece + 4);
    for (std::size_t j = 0; j <= kSamplesPerPiece; ++j)
        xs.push_back(lo + (hi - lo) * double(j) / double(kSamplesPerPiece));
    if (std::isfinite(span.lo)) xs.push_back(span.lo + kEndpointOffset);
    if (std::isfinite(span.hi)) xs.push_back(span.hi - kEndpointOffset);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    // keep strictly inside the open piece
    std::erase_if(xs, [&](double x) { return !(x > span.lo && x < span.hi); });
    return xs;
}

} // namespace

ConditionReport PiecewiseLipschitzFn::validate() const {
    ConditionReport rep;
    const std::size_t k = breakpoints_.size();

    rep.mu1.ok = true;
    rep.mu2.ok = true;
    rep.mu4.ok = true;
    rep.mu5.ok = true;

    for (std::size_t i = 0; i <= k; ++i) {
        const PieceSpan span{i == 0 ? -kInf : breakpoints_[i - 1],
                             i == k ? kInf : breakpoints_[i]};
        const bool unbounded_span = !std::isfinite(span.lo) || !std::isfinite(span.hi);

        if (const auto* a = std::get_if<AffinePiece>(&pieces_[i])) {
            if (a->b < 0.0 && rep.mu4.ok) {
                rep.mu4.ok = false;
                rep.mu4.witness = "piece " + std::to_string(i) + " has negative slope";
            }
            if (unbounded_span && a->b != 0.0 && rep.mu5.ok) {
                rep.mu5.ok = false;
                rep.mu5.witness = "piece " + std::to_string(i) + " is affine with nonzero slope on an unbounded interval";
            }
            continue;
        }

        const auto& g = std::get<GenericPiece>(pieces_[i]);
        if (unbounded_span && !g.bound && rep.mu5.ok) {
            rep.mu5.ok = false;
            rep.mu5.witness = "piece " + std::to_string(i) + " is unbounded-side generic with no declared bound";
        }
        if (!g.lipschitz) {
            rep.mu1.ok = false;
            rep.mu1.witness = "piece " + std::to_string(i) + " has no declared Lipschitz constant";
            continue;
        }
        if (!g.eval) continue;  // declaration-only: nothing further to probe

        const auto xs = sample_grid(span);
        const double L = *g.lipschitz;
        double prev_slope = 0.0;
        bool have_prev_slope = false;
        for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
            const double dx = xs[j + 1] - xs[j];
            if (dx <= 0.0) continue;
            const double fy = g.eval(xs[j + 1]);
            const double fx = g.eval(xs[j]);
            const double slope = (fy - fx) / dx;
            if (rep.mu1.ok && std::fabs(slope) > L * (1.0 + 1e-9) + 1e-12) {
                rep.mu1.ok = false;
                rep.mu1.witness = "piece " + std::to_string(i) + ": |difference quotient| " +
                                  describe_point(std::fabs(slope)) + " exceeds declared constant at x=" +
                                  describe_point(xs[j]);
            }
            if (rep.mu4.ok && fy < fx - 1e-12) {
                rep.mu4.ok = false;
                rep.mu4.witness = "piece " + std::to_string(i) + " decreases near x=" + describe_point(xs[j]);
            }
            if (have_prev_slope && rep.mu2.ok) {
                const double curv = std::fabs(slope - prev_slope) / dx;
                if (curv > kCurvatureCap) {
                    rep.mu2.ok = false;
                    rep.mu2.witness = "piece " + std::to_string(i) + ": second difference quotient " +
                                      describe_point(curv) + " near x=" + describe_point(xs[j]);
                }
            }
            prev_slope = slope;
            have_prev_slope = true;
        }
    }

    // mu3: at least one nonzero jump
    for (std::size_t i = 0; i < k; ++i) {
        if (jump(i) != 0.0) {
            rep.mu3.ok = true;
            break;
        }
    }
    if (!rep.mu3.ok) rep.mu3.witness = "all jumps are zero";

    // mu4 also needs nonnegative jumps and breakpoint values between the limits
    for (std::size_t i = 0; i < k && rep.mu4.ok; ++i) {
        const auto [l, r] = one_sided_limits(i);
        if (r < l) {
            rep.mu4.ok = false;
            rep.mu4.witness = "negative jump at breakpoint " + std::to_string(i);
        } else if (breakpoint_values_[i] < l - 1e-12 || breakpoint_values_[i] > r + 1e-12) {
            rep.mu4.ok = false;
            rep.mu4.witness = "value at breakpoint " + std::to_string(i) + " lies outside the one-sided limits";
        }
    }
    return rep;
}

double PiecewiseLipschitzFn::linear_growth_constant() const {
    const std::size_t k = breakpoints_.size();
    double lip = 0.0;
    for (const Piece& p : pieces_) {
        if (const auto* a = std::get_if<AffinePiece>(&p)) {
            lip = std::max(lip, std::fabs(a->b));
        } else {
            const auto& g = std::get<GenericPiece>(p);
            if (!g.lipschitz)
                throw std::runtime_error("linear_growth_constant: generic piece lacks a Lipschitz constant");
            lip = std::max(lip, *g.lipschitz);
        }
    }

    // anchor each piece at an interior point; unbounded pieces anchor one
    // unit past the breakpoint
    double anchor_term = 0.0;
    for (std::size_t i = 0; i <= k; ++i) {
        const double lo = i == 0 ? -kInf : breakpoints_[i - 1];
        const double hi = i == k ? kInf : breakpoints_[i];
        double x;
        if (std::isfinite(lo) && std::isfinite(hi)) x = 0.5 * (lo + hi);
        else if (std::isfinite(hi)) x = hi - 1.0;
        else if (std::isfinite(lo)) x = lo + 1.0;
        else x = 0.0;

        double fx;
        if (const auto* a = std::get_if<AffinePiece>(&pieces_[i])) {
            fx = std::fabs(a->a + a->b * x);
        } else {
            const auto& g = std::get<GenericPiece>(pieces_[i]);
            if (g.eval) {
                fx = std::fabs(g.eval(x));
            } else {
                // bound the anchor value from the declared limit nearest to x
                const double ref = std::isfinite(hi) ? g.right_limit : g.left_limit;
                const double ref_x = std::isfinite(hi) ? hi : lo;
                fx = std::fabs(ref) + *g.lipschitz * std::fabs(x - ref_x);
            }
        }
        anchor_term = std::max(anchor_term, lip * std::fabs(x) + fx);
    }
    double bp_term = 0.0;
    for (double v : breakpoint_values_) bp_term = std::max(bp_term, std::fabs(v));

    const double c = std::max(lip, anchor_term + bp_term);

    // spot check on a dense grid (skips declaration-only generic pieces)
    bool evaluable = true;
    for (const Piece& p : pieces_)
        if (const auto* g = std::get_if<GenericPiece>(&p); g && !g->eval) evaluable = false;
    if (evaluable) {
        for (int j = 0; j <= 4000; ++j) {
            const double x = -kSampleWindow + 2.0 * kSampleWindow * double(j) / 4000.0;
            if (std::fabs(eval(x)) > c * (1.0 + std::fabs(x)) * (1.0 + 1e-12))
                throw std::logic_error("linear_growth_constant: sampled violation at x=" + describe_point(x));
        }
    }
    return c;
}

std::string PiecewiseLipschitzFn::to_text() const {
    std::ostringstream os;
    char buf[512];
    const std::size_t k = breakpoints_.size();
    for (std::size_t i = 0; i <= k; ++i) {
        const double lo = i == 0 ? -kInf : breakpoints_[i - 1];
        const double hi = i == k ? kInf : breakpoints_[i];
        if (const auto* a = std::get_if<AffinePiece>(&pieces_[i])) {
            std::snprintf(buf, sizeof buf, "piece %.17g %.17g affine %.17g %.17g\n", lo, hi, a->a, a->b);
        } else {
            const auto& g = std::get<GenericPiece>(pieces_[i]);
            if (!g.lipschitz)
                throw std::runtime_error("to_text: generic piece lacks a Lipschitz constant");
            std::snprintf(buf, sizeof buf, "piece %.17g %.17g generic %.17g %.17g %.17g\n", lo, hi,
                          *g.lipschitz, g.left_limit, g.right_limit);
        }
        os << buf;
    }
    for (std::size_t i = 0; i < k; ++i) {
        std::snprintf(buf, sizeof buf, "breakpoint %.17g %.17g\n", breakpoints_[i], breakpoint_values_[i]);
        os << buf;
    }
    return os.str();
}

PiecewiseLipschitzFn PiecewiseLipschitzFn::from_text(std::string_view text) {
    struct RawPiece {
        double lo, hi;
        Piece piece;
    };
    std::vector<RawPiece> raw;
    std::vector<std::pair<double, double>> bp_lines;

    std::istringstream is{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        const auto fail = [&](const std::string& why) -> std::runtime_error {
            return std::runtime_error("drift text line " + std::to_string(line_no) + ": " + why);
        };
        // stream extraction of doubles rejects "inf", so numbers go through strtod
        const auto number = [&](const char* what) -> double {
            std::string tok;
            if (!(ls >> tok)) throw fail(std::string("missing ") + what);
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end != tok.c_str() + tok.size())
                throw fail(std::string("bad number '") + tok + "' for " + what);
            return v;
        };
        if (word == "piece") {
            const double lo = number("piece lower bound");
            const double hi = number("piece upper bound");
            std::string kind;
            if (!(ls >> kind)) throw fail("expected '<lo> <hi> <kind> ...'");
            if (kind == "affine") {
                AffinePiece a;
                a.a = number("affine intercept");
                a.b = number("affine slope");
                raw.push_back({lo, hi, a});
            } else if (kind == "generic") {
                GenericPiece g;
                g.lipschitz = number("lipschitz constant");
                g.left_limit = number("left limit");
                g.right_limit = number("right limit");
                raw.push_back({lo, hi, std::move(g)});
            } else {
                throw fail("unknown piece kind '" + kind + "'");
            }
        } else if (word == "breakpoint") {
            const double xi = number("breakpoint position");
            const double v = number("breakpoint value");
            bp_lines.emplace_back(xi, v);
        } else {
            throw fail("unknown directive '" + word + "'");
        }
        std::string extra;
        if (ls >> extra) throw fail("trailing token '" + extra + "'");
    }

    if (raw.empty()) throw std::runtime_error("drift text: no pieces");
    if (raw.front().lo != -kInf) throw std::runtime_error("drift text: first piece must start at -inf");
    if (raw.back().hi != kInf) throw std::runtime_error("drift text: last piece must end at inf");
    std::vector<double> breaks;
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (i + 1 < raw.size()) {
            if (!(raw[i].hi == raw[i + 1].lo))
                throw std::runtime_error("drift text: pieces are not contiguous");
            breaks.push_back(raw[i].hi);
        }
        pieces.push_back(std::move(raw[i].piece));
    }

    PiecewiseLipschitzFn fn(breaks, std::move(pieces));
    for (const auto& [xi, v] : bp_lines) {
        const auto it = std::find(fn.breakpoints_.begin(), fn.breakpoints_.end(), xi);
        if (it == fn.breakpoints_.end())
            throw std::runtime_error("drift text: breakpoint line does not match any piece boundary");
        fn.breakpoint_values_[std::size_t(it - fn.breakpoints_.begin())] = v;
    }
    for (double v : fn.breakpoint_values_)
        if (!std::isfinite(v)) throw std::runtime_error("drift text: non-finite breakpoint value");
    return fn;
}

bool PiecewiseLipschitzFn::same_structure(const PiecewiseLipschitzFn& other) const {
    if (breakpoints_ != other.breakpoints_) return false;
    if (breakpoint_values_ != other.breakpoint_values_) return false;
    if (pieces_.size() != other.pieces_.size()) return false;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const auto* a = std::get_if<AffinePiece>(&pieces_[i]);
        const auto* b = std::get_if<AffinePiece>(&other.pieces_[i]);
        if ((a == nullptr) != (b == nullptr)) return false;
        if (a) {
            if (a->a != b->a || a->b != b->b) return false;
        } else {
            const auto& g = std::get<GenericPiece>(pieces_[i]);
            const auto& h = std::get<GenericPiece>(other.pieces_[i]);
            if (g.lipschitz != h.lipschitz || g.left_limit != h.left_limit ||
                g.right_limit != h.right_limit)
                return false;
        }
    }
    return true;
}

} // namespace sdecoup
