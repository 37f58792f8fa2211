#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mpnnc/activation.hpp"
#include "mpnnc/compiler.hpp"
#include "mpnnc/equivalence.hpp"
#include "mpnnc/graph.hpp"
#include "mpnnc/mpnn.hpp"

// JSON interchange:
//   graph     {"nodes": n, "edges": [[u, v], ...]}
//   features  {"dim": d, "values": [[...], ...]}
//   mpnn      {"layers": [{"W1": [[...]], "W2": [[...]], "b": [...], "sigma": <activation>}, ...]}
//   box       [[lo, hi], ...]

namespace mpnnc::io {

using json = nlohmann::json;

/// Malformed interchange document (bad JSON or wrong shape).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

inline json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(what + ": " + e.what());
    }
}

template <class F>
auto reading(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw FormatError(what + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Graphs, features, boxes

inline json to_json(const Graph& g) {
    json edges = json::array();
    for (const Edge& e : g.edges()) edges.push_back({e.first, e.second});
    return {{"nodes", g.node_count()}, {"edges", edges}};
}

inline Graph graph_from_json(const json& j) {
    return reading("graph", [&] {
        std::vector<Edge> edges;
        for (const json& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw FormatError("graph: each edge must be a pair [u, v]");
            edges.emplace_back(e[0].get<NodeId>(), e[1].get<NodeId>());
        }
        return Graph(j.at("nodes").get<std::size_t>(), edges);
    });
}

inline json to_json(const FeatureMap& chi) {
    json rows = json::array();
    for (NodeId v = 0; v < chi.node_count(); ++v) rows.push_back(std::vector<double>(chi[v].begin(), chi[v].end()));
    return {{"dim", chi.dim()}, {"values", rows}};
}

inline FeatureMap features_from_json(const json& j) {
    return reading("features", [&] {
        const auto dim = j.at("dim").get<std::size_t>();
        const json& rows = j.at("values");
        FeatureMap chi(rows.size(), dim);
        for (std::size_t v = 0; v < rows.size(); ++v) {
            const auto row = rows[v].get<std::vector<double>>();
            if (row.size() != dim)
                throw ArityError("features: row " + std::to_string(v) + " has " + std::to_string(row.size()) +
                                 " values, expected " + std::to_string(dim));
            std::copy(row.begin(), row.end(), chi[v].begin());
        }
        return chi;
    });
}

inline json to_json(const Interval& y) { return json::array({y.lo, y.hi}); }

inline json to_json(const DomainBox& box) {
    json out = json::array();
    for (const Interval& y : box.sides()) out.push_back(to_json(y));
    return out;
}

inline DomainBox box_from_json(const json& j) {
    return reading("box", [&] {
        if (!j.is_array() || j.empty()) throw FormatError("box: expected [[lo, hi], ...]");
        std::vector<Interval> sides;
        for (const json& s : j) {
            if (!s.is_array() || s.size() != 2) throw FormatError("box: each side must be [lo, hi]");
            const double lo = s[0].get<double>(), hi = s[1].get<double>();
            if (!(lo <= hi)) throw FormatError("box: side with lo > hi");
            sides.push_back({lo, hi});
        }
        return DomainBox(std::move(sides));
    });
}

inline DomainBox parse_box(const std::string& text) { return box_from_json(parse_json(text, "box")); }

// ---------------------------------------------------------------------------
// Activations and networks

inline json to_json(const Activation& f) {
    return std::visit(
        detail::overloaded{
            [](NamedFn n) -> json { return {{"kind", "named"}, {"name", std::string(to_string(n))}}; },
            [](const PiecewiseLinear& pl) -> json {
                json pts = json::array();
                for (const BreakPoint& p : pl.points) pts.push_back({p.x, p.y});
                return {{"kind", "pl"}, {"points", pts}};
            },
            [](const ReluSum& s) -> json {
                json terms = json::array();
                for (const ReluTerm& t : s.terms) terms.push_back({t.a, t.b, t.c});
                return {{"kind", "relusum"}, {"terms", terms}};
            },
            [](const Merged& m) -> json {
                return {{"kind", "merged"}, {"left", to_json(*m.left)}, {"M", m.M}, {"right", to_json(*m.right)},
                        {"m", m.m}};
            },
        },
        f.repr());
}

inline Activation activation_from_json(const json& j) {
    return reading("activation", [&]() -> Activation {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "named") {
            const auto name = j.at("name").get<std::string>();
            const auto fn = named_fn_from_string(name);
            if (!fn) throw FormatError("activation: unknown function '" + name + "'");
            return *fn;
        }
        if (kind == "pl") {
            std::vector<BreakPoint> pts;
            for (const json& p : j.at("points")) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            try {
                return Activation::piecewise_linear(std::move(pts));
            } catch (const std::invalid_argument& e) {
                throw FormatError(std::string("activation: ") + e.what());
            }
        }
        if (kind == "relusum") {
            ReluSum s;
            for (const json& t : j.at("terms"))
                s.terms.push_back({t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()});
            return Activation::relu_sum(std::move(s));
        }
        if (kind == "merged")
            return Activation::merged(activation_from_json(j.at("left")), j.at("M").get<double>(),
                                      activation_from_json(j.at("right")), j.at("m").get<double>());
        throw FormatError("activation: unknown kind '" + kind + "'");
    });
}

// -0 prints as 0
inline double tidy(double x) { return x == 0.0 ? 0.0 : x; }

inline json to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(tidy(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j, std::size_t cols_if_empty) {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    if (rows.empty()) return Matrix(0, cols_if_empty);
    for (const auto& r : rows)
        if (r.size() != rows.front().size()) throw FormatError("matrix rows differ in length");
    return Matrix::from_rows(rows);
}

inline std::vector<double> tidy_all(std::vector<double> v) {
    for (double& x : v) x = tidy(x);
    return v;
}

inline json to_json(const Layer& L) {
    return {{"W1", to_json(L.w1())}, {"W2", to_json(L.w2())}, {"b", tidy_all(L.bias())}, {"sigma", to_json(L.activation())}};
}

inline json to_json(const Mpnn& N) {
    json layers = json::array();
    for (const Layer& L : N.layers()) layers.push_back(to_json(L));
    return {{"layers", layers}};
}

inline Mpnn mpnn_from_json(const json& j) {
    return reading("mpnn", [&] {
        std::vector<Layer> layers;
        for (const json& l : j.at("layers"))
            layers.emplace_back(matrix_from_json(l.at("W1"), 0), matrix_from_json(l.at("W2"), 0),
                                l.at("b").get<std::vector<double>>(), activation_from_json(l.at("sigma")));
        return Mpnn(std::move(layers));
    });
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const LayerBounds& b) {
    json comps = json::array();
    for (const Interval& y : b.components) comps.push_back(to_json(y));
    return {{"preactivation", comps}, {"M", b.M}, {"m", b.m}};
}

inline std::size_t count_merged(const Mpnn& N) {
    std::size_t n = 0;
    for (const Activation& f : activations_used(N))
        if (std::holds_alternative<Merged>(f.repr())) ++n;
    return n;
}

/// {"mode", "layers", "max_width", "merged_activations", "activations", "bounds"}
inline json compile_report(CompileMode mode, const Mpnn& N, const std::vector<LayerBounds>& bounds = {}) {
    std::size_t width = 0;
    for (const Layer& L : N.layers()) width = std::max(width, L.output_arity());
    json acts = json::array();
    for (const Activation& f : activations_used(N)) acts.push_back(describe(f));
    json b = json::array();
    for (const LayerBounds& lb : bounds) b.push_back(to_json(lb));
    return {{"mode", std::string(to_string(mode))},
            {"layers", N.size()},
            {"max_width", width},
            {"merged_activations", count_merged(N)},
            {"activations", acts},
            {"bounds", b}};
}

inline json to_json(const Witness& w) {
    return {{"trial", w.trial},         {"graph", to_json(w.graph)}, {"features", to_json(w.features)},
            {"node", w.node},           {"component", w.component},  {"a", w.a},
            {"b", w.b},                 {"deviation", w.deviation}};
}

inline Witness witness_from_json(const json& j) {
    return reading("witness", [&] {
        Witness w;
        w.trial = j.value("trial", std::size_t{0});
        w.graph = graph_from_json(j.at("graph"));
        w.features = features_from_json(j.at("features"));
        w.node = j.at("node").get<NodeId>();
        w.component = j.value("component", std::size_t{0});
        w.a = j.value("a", 0.0);
        w.b = j.value("b", 0.0);
        w.deviation = j.value("deviation", 0.0);
        if (w.features.node_count() != w.graph.node_count() || w.node >= w.graph.node_count())
            throw ArityError("witness: node or features do not match the graph");
        return w;
    });
}

}  // namespace mpnnc::io
