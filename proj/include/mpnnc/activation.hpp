#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mpnnc/detail.hpp"
#include "mpnnc/errors.hpp"
#include "mpnnc/interval.hpp"

namespace mpnnc {

enum class NamedFn { id, relu, tanh, sigmoid, sin, abs };

inline std::string_view to_string(NamedFn f) {
    switch (f) {
        case NamedFn::id: return "id";
        case NamedFn::relu: return "relu";
        case NamedFn::tanh: return "tanh";
        case NamedFn::sigmoid: return "sigmoid";
        case NamedFn::sin: return "sin";
        case NamedFn::abs: return "abs";
    }
    return "?";
}

inline std::optional<NamedFn> named_fn_from_string(std::string_view name) {
    for (NamedFn f : {NamedFn::id, NamedFn::relu, NamedFn::tanh, NamedFn::sigmoid, NamedFn::sin, NamedFn::abs})
        if (to_string(f) == name) return f;
    return std::nullopt;
}

struct BreakPoint {
    double x;
    double y;
    friend bool operator==(const BreakPoint&, const BreakPoint&) = default;
};

/// Linear interpolation through strictly increasing breakpoints, constant
/// beyond the first and last.
struct PiecewiseLinear {
    std::vector<BreakPoint> points;
    friend bool operator==(const PiecewiseLinear&, const PiecewiseLinear&) = default;
};

/// One summand c * ReLU(a*x - b).
struct ReluTerm {
    double a;
    double b;
    double c;
    friend bool operator==(const ReluTerm&, const ReluTerm&) = default;
};

/// x -> sum_i c_i * ReLU(a_i * x - b_i).
struct ReluSum {
    std::vector<ReluTerm> terms;

    double operator()(double x) const {
        double acc = 0.0;
        for (const ReluTerm& t : terms) acc += t.c * std::max(0.0, t.a * x - t.b);
        return acc;
    }

    friend bool operator==(const ReluSum&, const ReluSum&) = default;
};

class Activation;

/// Two activations embedded in one: `left` shifted so its input bound M sits
/// at -1, `right` shifted so its input bound m sits at +1, joined by the
/// straight segment between the two seam values.
struct Merged {
    std::shared_ptr<const Activation> left;
    double M;
    std::shared_ptr<const Activation> right;
    double m;
};

/// Closed catalog of continuous R -> R activations.
class Activation {
public:
    using Repr = std::variant<NamedFn, PiecewiseLinear, ReluSum, Merged>;

    Activation(NamedFn f) : repr_(f) {}  // NOLINT: implicit by design of the catalog

    static Activation piecewise_linear(std::vector<BreakPoint> points) {
        if (points.empty()) throw std::invalid_argument("piecewise-linear activation needs a breakpoint");
        for (std::size_t i = 1; i < points.size(); ++i)
            if (!(points[i - 1].x < points[i].x))
                throw std::invalid_argument("piecewise-linear breakpoints must be strictly increasing");
        return Activation(PiecewiseLinear{std::move(points)});
    }

    static Activation relu_sum(ReluSum sum) { return Activation(std::move(sum)); }

    static Activation merged(const Activation& left, double M, const Activation& right, double m) {
        if (!std::isfinite(M) || !std::isfinite(m)) throw std::invalid_argument("merge bounds must be finite");
        return Activation(Merged{std::make_shared<const Activation>(left), M,
                                 std::make_shared<const Activation>(right), m});
    }

    const Repr& repr() const { return repr_; }

    bool is(NamedFn f) const {
        const NamedFn* named = std::get_if<NamedFn>(&repr_);
        return named != nullptr && *named == f;
    }

    double operator()(double x) const;

    friend bool operator==(const Activation& a, const Activation& b);

private:
    explicit Activation(Repr r) : repr_(std::move(r)) {}
    Repr repr_;
};

inline bool operator==(const Merged& a, const Merged& b) {
    return a.M == b.M && a.m == b.m && *a.left == *b.left && *a.right == *b.right;
}

inline bool operator==(const Activation& a, const Activation& b) { return a.repr_ == b.repr_; }

namespace detail {

inline double apply_named(NamedFn f, double x) {
    switch (f) {
        case NamedFn::id: return x;
        case NamedFn::relu: return std::max(0.0, x);
        case NamedFn::tanh: return std::tanh(x);
        case NamedFn::sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case NamedFn::sin: return std::sin(x);
        case NamedFn::abs: return std::fabs(x);
    }
    return x;
}

inline double apply_pl(const PiecewiseLinear& f, double x) {
    const auto& p = f.points;
    if (x <= p.front().x) return p.front().y;
    if (x >= p.back().x) return p.back().y;
    // first breakpoint strictly greater than x; x == p[j].x lands at t == 0
    auto it = std::upper_bound(p.begin(), p.end(), x, [](double v, const BreakPoint& bp) { return v < bp.x; });
    const BreakPoint& r = *it;
    const BreakPoint& l = *(it - 1);
    const double t = (x - l.x) / (r.x - l.x);
    return l.y + t * (r.y - l.y);
}

inline Interval widen_ulp(Interval y) {
    return {std::nextafter(y.lo, -std::numeric_limits<double>::infinity()),
            std::nextafter(y.hi, std::numeric_limits<double>::infinity())};
}

}  // namespace detail

inline double Activation::operator()(double x) const {
    return std::visit(
        detail::overloaded{
            [x](NamedFn f) { return detail::apply_named(f, x); },
            [x](const PiecewiseLinear& f) { return detail::apply_pl(f, x); },
            [x](const ReluSum& f) { return f(x); },
            [x](const Merged& f) {
                if (x <= -1.0) return (*f.left)(x + f.M + 1.0);
                if (x >= 1.0) return (*f.right)(x + f.m - 1.0);
                const double seam_left = (*f.left)(-1.0 + f.M + 1.0);
                const double seam_right = (*f.right)(1.0 + f.m - 1.0);
                return seam_left + (x + 1.0) / 2.0 * (seam_right - seam_left);
            },
        },
        repr_);
}

inline double apply(const Activation& f, double x) { return f(x); }

/// Short human-readable label, used in reports.
inline std::string describe(const Activation& f) {
    return std::visit(detail::overloaded{
                          [](NamedFn n) { return std::string(to_string(n)); },
                          [](const PiecewiseLinear& p) { return "pl[" + std::to_string(p.points.size()) + "]"; },
                          [](const ReluSum& s) { return "relusum[" + std::to_string(s.terms.size()) + "]"; },
                          [](const Merged& m) { return "merged(" + describe(*m.left) + "," + describe(*m.right) + ")"; },
                      },
                      f.repr());
}

/// Sound enclosure of f(y). Exact for id/relu/abs and ReLU sums (the latter
/// as a sum of per-term images); one ulp outward for the rest.
inline Interval interval_image(const Activation& f, const Interval& y) {
    return std::visit(
        detail::overloaded{
            [&](NamedFn n) -> Interval {
                switch (n) {
                    case NamedFn::id: return y;
                    case NamedFn::relu: return {std::max(0.0, y.lo), std::max(0.0, y.hi)};
                    case NamedFn::abs:
                        if (y.lo >= 0.0) return y;
                        if (y.hi <= 0.0) return {-y.hi, -y.lo};
                        return {0.0, std::max(-y.lo, y.hi)};
                    case NamedFn::tanh:
                    case NamedFn::sigmoid:
                        return detail::widen_ulp({detail::apply_named(n, y.lo), detail::apply_named(n, y.hi)});
                    case NamedFn::sin: {
                        constexpr double two_pi = 2.0 * std::numbers::pi;
                        if (y.width() >= two_pi) return {-1.0, 1.0};
                        double a = std::sin(y.lo), b = std::sin(y.hi);
                        double lo = std::min(a, b), hi = std::max(a, b);
                        const double k_max = std::ceil((y.lo - std::numbers::pi / 2) / two_pi);
                        if (std::numbers::pi / 2 + k_max * two_pi <= y.hi) hi = 1.0;
                        const double k_min = std::ceil((y.lo + std::numbers::pi / 2) / two_pi);
                        if (-std::numbers::pi / 2 + k_min * two_pi <= y.hi) lo = -1.0;
                        Interval w = detail::widen_ulp({lo, hi});
                        return {std::max(-1.0, w.lo), std::min(1.0, w.hi)};
                    }
                }
                return y;
            },
            [&](const PiecewiseLinear& p) -> Interval {
                Interval out = Interval::point(detail::apply_pl(p, y.lo));
                out = hull(out, detail::apply_pl(p, y.hi));
                for (const BreakPoint& bp : p.points)
                    if (y.contains(bp.x)) out = hull(out, bp.y);
                return detail::widen_ulp(out);
            },
            [&](const ReluSum& s) -> Interval {
                double lo = 0.0, hi = 0.0;
                for (const ReluTerm& t : s.terms) {
                    Interval pre = t.a * y + (-t.b);
                    Interval post{std::max(0.0, pre.lo), std::max(0.0, pre.hi)};
                    Interval scaled = t.c * post;
                    lo += scaled.lo;
                    hi += scaled.hi;
                }
                return {lo, hi};
            },
            [&](const Merged& m) -> Interval {
                std::optional<Interval> out;
                auto join = [&out](Interval piece) { out = out ? hull(*out, piece) : piece; };
                if (y.lo <= -1.0) {
                    Interval part{y.lo, std::min(y.hi, -1.0)};
                    join(interval_image(*m.left, Interval{part.lo + m.M + 1.0, part.hi + m.M + 1.0}));
                }
                if (y.hi >= 1.0) {
                    Interval part{std::max(y.lo, 1.0), y.hi};
                    join(interval_image(*m.right, Interval{part.lo + m.m - 1.0, part.hi + m.m - 1.0}));
                }
                if (y.lo < 1.0 && y.hi > -1.0) {
                    const Activation self = Activation::merged(*m.left, m.M, *m.right, m.m);
                    const double a = self(std::max(y.lo, -1.0));
                    const double b = self(std::min(y.hi, 1.0));
                    join(Interval{std::min(a, b), std::max(a, b)});
                }
                return *out;
            },
        },
        f.repr());
}

/// Single activation that reproduces `left` on inputs x - (M+1) for x <= M
/// and `right` on inputs x - (m-1) for x >= m.
inline Activation merge(const Activation& left, double M, const Activation& right, double m) {
    return Activation::merged(left, M, right, m);
}

/// Exact ReLU-sum form of a piecewise-linear function: a constant term
/// c*ReLU(0*x+1) plus one hinge per breakpoint carrying the slope change.
inline ReluSum pl_to_relu_sum(const PiecewiseLinear& f) {
    ReluSum out;
    const auto& p = f.points;
    if (p.front().y != 0.0) out.terms.push_back({0.0, -1.0, p.front().y});
    double slope_before = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double slope_after = j + 1 < p.size() ? (p[j + 1].y - p[j].y) / (p[j + 1].x - p[j].x) : 0.0;
        const double change = slope_after - slope_before;
        if (change != 0.0) out.terms.push_back({1.0, p[j].x, change});
        slope_before = slope_after;
    }
    return out;
}

struct ApproxOptions {
    std::size_t certificate_samples = 100000;
    std::size_t max_segments = 100000;
    std::size_t probes_per_segment = 8;
};

/// Largest |f(x) - g(x)| over `samples` evenly spaced points of y.
template <class F, class G>
double sampled_sup_distance(const F& f, const G& g, const Interval& y, std::size_t samples) {
    double worst = 0.0;
    const std::size_t n = std::max<std::size_t>(samples, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = i + 1 == n ? y.hi : y.lo + y.width() * static_cast<double>(i) / static_cast<double>(n - 1);
        worst = std::max(worst, std::fabs(f(x) - g(x)));
    }
    return worst;
}

/// ReLU sum within eps of f on y, certified on a dense sample grid. Built by
/// adaptively refined linear interpolation followed by pl_to_relu_sum.
/// Throws CertificateError when the segment budget runs out.
inline ReluSum relu_approximate(const Activation& f, const Interval& y, double eps, const ApproxOptions& opts = {}) {
    if (!(eps > 0.0)) throw std::invalid_argument("approximation tolerance must be positive");
    if (const auto* s = std::get_if<ReluSum>(&f.repr())) return *s;
    if (const auto* p = std::get_if<PiecewiseLinear>(&f.repr())) return pl_to_relu_sum(*p);
    if (f.is(NamedFn::relu)) return ReluSum{{{1.0, 0.0, 1.0}}};
    if (f.is(NamedFn::id)) return ReluSum{{{1.0, 0.0, 1.0}, {-1.0, 0.0, -1.0}}};

    if (y.width() == 0.0) return pl_to_relu_sum(PiecewiseLinear{{{y.lo, f(y.lo)}}});

    std::vector<double> knots;
    constexpr std::size_t initial = 8;
    for (std::size_t i = 0; i <= initial; ++i)
        knots.push_back(i == initial ? y.hi : y.lo + y.width() * static_cast<double>(i) / initial);

    auto segment_error = [&](double a, double b) {
        const double fa = f(a), fb = f(b);
        double worst = 0.0;
        const std::size_t probes = opts.probes_per_segment;
        for (std::size_t j = 1; j <= probes; ++j) {
            const double t = static_cast<double>(j) / static_cast<double>(probes + 1);
            const double x = a + t * (b - a);
            worst = std::max(worst, std::fabs(f(x) - (fa + t * (fb - fa))));
        }
        return worst;
    };
    auto splittable = [&](double a, double b) { return (b - a) > 1e-12 * (1.0 + std::fabs(a)); };

    // Refine until every segment passes its probes at half the budget.
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<double> next{knots.front()};
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            const double a = knots[i], b = knots[i + 1];
            if (knots.size() + next.size() < opts.max_segments && splittable(a, b) &&
                segment_error(a, b) > 0.5 * eps) {
                next.push_back(0.5 * (a + b));
                changed = true;
            }
            next.push_back(b);
        }
        knots = std::move(next);
    }

    for (;;) {
        PiecewiseLinear pl;
        for (double x : knots) pl.points.push_back({x, f(x)});
        ReluSum candidate = pl_to_relu_sum(pl);

        // Dense certificate; split any segment holding a failing sample.
        const std::size_t n = std::max<std::size_t>(opts.certificate_samples, 2);
        std::vector<bool> split(knots.size(), false);
        bool ok = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = i + 1 == n ? y.hi : y.lo + y.width() * static_cast<double>(i) / static_cast<double>(n - 1);
            if (std::fabs(f(x) - candidate(x)) > eps) {
                ok = false;
                auto it = std::upper_bound(knots.begin(), knots.end(), x);
                std::size_t seg = it == knots.begin() ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
                split[std::min(seg, knots.size() - 2)] = true;
            }
        }
        if (ok) return candidate;

        std::vector<double> next{knots.front()};
        bool progressed = false;
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            if (split[i] && splittable(knots[i], knots[i + 1])) {
                next.push_back(0.5 * (knots[i] + knots[i + 1]));
                progressed = true;
            }
            next.push_back(knots[i + 1]);
        }
        if (!progressed || next.size() > opts.max_segments)
            throw CertificateError("no ReLU sum within " + detail::format_real(eps) + " of " + describe(f) +
                                   " found within " + std::to_string(opts.max_segments) + " segments");
        knots = std::move(next);
    }
}

/// Step delta such that the sampled oscillation of f over windows of width
/// delta inside y stays below eps; halved once more before returning.
inline double modulus_delta(const Activation& f, const Interval& y, double eps, std::size_t samples = 100000) {
    if (!(eps > 0.0)) throw std::invalid_argument("modulus tolerance must be positive");
    if (y.width() == 0.0) return eps;
    const std::size_t n = std::max<std::size_t>(samples, 2);
    const double h = y.width() / static_cast<double>(n - 1);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = f(i + 1 == n ? y.hi : y.lo + h * static_cast<double>(i));

    // max over i of (max - min) of values[i..i+window], via monotone deques
    auto oscillation = [&](std::size_t window) {
        std::deque<std::size_t> hi_q, lo_q;
        double worst = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            while (!hi_q.empty() && values[hi_q.back()] <= values[j]) hi_q.pop_back();
            while (!lo_q.empty() && values[lo_q.back()] >= values[j]) lo_q.pop_back();
            hi_q.push_back(j);
            lo_q.push_back(j);
            while (hi_q.front() + window < j) hi_q.pop_front();
            while (lo_q.front() + window < j) lo_q.pop_front();
            worst = std::max(worst, values[hi_q.front()] - values[lo_q.front()]);
        }
        return worst;
    };

    double delta = y.width();
    // below one grid step the estimate cannot shrink further
    while (delta >= h && oscillation(static_cast<std::size_t>(std::ceil(delta / h))) >= eps) delta /= 2.0;
    return delta / 2.0;
}

}  // namespace mpnnc
