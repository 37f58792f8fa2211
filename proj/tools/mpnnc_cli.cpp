// mpnnc: parse, evaluate, compile, approximate and cross-check MPLang
// expressions and MPNNs.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mpnnc/io.hpp"
#include "mpnnc/mpnnc.hpp"

namespace {

using namespace mpnnc;
using io::json;

enum Exit : int {
    ok = 0,
    parse_failure = 1,
    arity_failure = 2,
    mode_failure = 3,
    certificate_failure = 4,
    not_equivalent = 5,
    usage = 64,
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string expr;
    std::string expr_file;
    std::string mpnn_file;
    std::string graph_file;
    std::string features_file;
    std::string mode = "auto";
    std::optional<std::size_t> degree_bound;
    std::string box;
    double epsilon = 0.0;
    std::size_t trials = 1000;
    double tolerance = 1e-9;
    double abs_tolerance = 1e-12;
    std::uint64_t seed = 0;
    std::size_t arity = 0;
    std::string out;
    std::string report;
    std::string compile_out;
    std::string replay;
    std::string lhs;
    std::string rhs;
};

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-")
        std::cout << text;
    else
        io::write_file(path, text);
}

// Expression text from --expr or --expr-file.
std::string expression_text(const Options& o) {
    if (!o.expr.empty() && !o.expr_file.empty()) throw UsageError("give either --expr or --expr-file, not both");
    if (!o.expr.empty()) return o.expr;
    if (!o.expr_file.empty()) return io::read_file(o.expr_file);
    throw UsageError("an expression is required (--expr or --expr-file)");
}

std::vector<Expr> parse_text(const std::string& text) {
    try {
        return parse_components(text);
    } catch (const ParseError& e) {
        if (text.find('\n') == std::string::npos) {
            std::cerr << "  " << text << "\n  " << std::string(e.position(), ' ') << "^\n";
        }
        throw;
    }
}

std::size_t max_projection(const std::vector<Expr>& es) {
    std::size_t d = 0;
    for (const Expr& e : es) d = std::max(d, mpnnc::max_projection(e));
    return d;
}

std::optional<DomainBox> box_option(const Options& o) {
    if (o.box.empty()) return std::nullopt;
    return io::parse_box(o.box);
}

// Input arity: --arity, else the box, else the largest projection used.
std::size_t arity_for(const Options& o, const std::vector<Expr>& es, const std::optional<DomainBox>& box) {
    if (o.arity != 0) return o.arity;
    if (box) return box->dim();
    return std::max<std::size_t>(max_projection(es), 1);
}

ExprTuple tuple_for(const Options& o, const std::vector<Expr>& es, const std::optional<DomainBox>& box) {
    return make_tuple(es, arity_for(o, es, box));
}

// A check operand: an MPNN file, an expression file, or expression text.
Program load_program(const std::string& operand, std::optional<std::size_t> arity) {
    std::string text = operand;
    if (std::filesystem::is_regular_file(operand)) {
        text = io::read_file(operand);
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first != std::string::npos && text[first] == '{') {
            const json j = io::parse_json(text, operand);
            if (j.contains("layers")) return io::mpnn_from_json(j);
            throw io::FormatError(operand + ": JSON input must be an MPNN with a \"layers\" array");
        }
    }
    const std::vector<Expr> es = parse_text(text);
    return make_tuple(es, arity ? *arity : std::max<std::size_t>(max_projection(es), 1));
}

// ---------------------------------------------------------------------------

int cmd_eval(const Options& o) {
    if (o.graph_file.empty() || o.features_file.empty()) throw UsageError("eval needs --graph and --features");
    const Graph g = io::graph_from_json(io::parse_json(io::read_file(o.graph_file), o.graph_file));
    const FeatureMap chi = io::features_from_json(io::parse_json(io::read_file(o.features_file), o.features_file));
    if (chi.node_count() != g.node_count())
        throw ArityError("features have " + std::to_string(chi.node_count()) + " rows but the graph has " +
                         std::to_string(g.node_count()) + " nodes");
    FeatureMap y;
    if (!o.mpnn_file.empty()) {
        y = eval(io::mpnn_from_json(io::parse_json(io::read_file(o.mpnn_file), o.mpnn_file)), g, chi);
    } else {
        y = eval_tuple(make_tuple(parse_text(expression_text(o)), chi.dim()), g, chi);
    }
    emit(o.out, io::to_json(y).dump() + "\n");
    return ok;
}

int cmd_compile(const Options& o) {
    const std::vector<Expr> es = parse_text(expression_text(o));
    const auto box = box_option(o);
    const ExprTuple t = tuple_for(o, es, box);
    const bool have_domain = o.degree_bound.has_value() && box.has_value();

    std::optional<CompileMode> mode;
    if (o.mode == "auto") {
        ExprClass merged;
        for (const Expr& e : es) {
            const ExprClass c = classify(e);
            merged.relu_only = merged.relu_only && c.relu_only;
            merged.addition_free = merged.addition_free && c.addition_free;
            merged.summation_free = merged.summation_free && c.summation_free;
        }
        if (es.size() > 1) merged.addition_free = merged.summation_free = false;
        mode = strongest_mode(merged, have_domain);
        if (!mode)
            throw ModeError(
                "no exact compilation applies without a domain; supply --degree-bound and --box for mixed "
                "mode, or use 'approx' for a ReLU approximation");
    } else if (o.mode == "relu") {
        mode = CompileMode::relu_exact;
    } else if (o.mode == "mixed") {
        mode = CompileMode::mixed;
    } else if (o.mode == "addition-free") {
        mode = CompileMode::addition_free;
    } else if (o.mode == "pointwise") {
        mode = CompileMode::pointwise;
    }

    std::optional<Mpnn> net;
    std::vector<LayerBounds> bounds;
    switch (*mode) {
        case CompileMode::relu_exact:
            for (const Expr& e : es)
                if (!classify(e).relu_only)
                    throw ModeError("relu mode needs a ReLU-only expression; try --mode mixed or 'approx'");
            net = compile_relu_tuple(t);
            break;
        case CompileMode::mixed: {
            if (!have_domain) throw ModeError("mixed mode needs --degree-bound and --box");
            CompiledNetwork c = compile_mixed_tuple(t, DegreeBound{*o.degree_bound}, *box);
            net = std::move(c.network);
            bounds = std::move(c.bounds);
            break;
        }
        case CompileMode::addition_free:
        case CompileMode::pointwise:
            if (es.size() != 1) throw ModeError(std::string(to_string(*mode)) + " mode compiles a single expression");
            net = *mode == CompileMode::pointwise ? compile_pointwise(es[0], t.input_arity)
                                                  : compile_addition_free(es[0], t.input_arity);
            break;
    }

    emit(o.out, io::to_json(*net).dump() + "\n");
    const std::string report = io::compile_report(*mode, *net, bounds).dump() + "\n";
    if (o.report.empty())
        std::cerr << report;
    else
        io::write_file(o.report, report);
    return ok;
}

int cmd_approx(const Options& o) {
    if (!(o.epsilon > 0.0)) throw UsageError("--epsilon must be positive");
    if (!o.degree_bound || o.box.empty()) throw UsageError("approx needs --degree-bound and --box");
    const std::vector<Expr> es = parse_text(expression_text(o));
    if (es.size() != 1) throw UsageError("approx takes a single expression");
    const DomainBox box = io::parse_box(o.box);
    const DegreeBound p{*o.degree_bound};
    const Expr approx = approximate(es[0], p, box, o.epsilon);

    emit(o.out, to_string(approx) + "\n");
    if (!o.compile_out.empty()) io::write_file(o.compile_out, io::to_json(compile_relu(approx, box.dim())).dump() + "\n");
    const double rho = uniform_distance_estimate(es[0], approx, p, box, o.trials, o.seed);
    std::cerr << "sampled distance " << detail::format_real(rho) << " over " << o.trials << " instances (epsilon "
              << detail::format_real(o.epsilon) << ")\n";
    return ok;
}

int cmd_check(const Options& o) {
    auto box = box_option(o);
    std::optional<std::size_t> arity;
    if (o.arity != 0) arity = o.arity;
    if (!arity && box) arity = box->dim();

    Program a = load_program(o.lhs, arity);
    if (!arity && std::holds_alternative<Mpnn>(a)) arity = input_arity(a);
    Program b = load_program(o.rhs, arity);
    if (!arity && std::holds_alternative<Mpnn>(b)) {
        arity = input_arity(b);
        a = load_program(o.lhs, arity);
    }
    if (!arity) {
        // both expressions: align on the larger arity
        const std::size_t d = std::max(input_arity(a), input_arity(b));
        a = load_program(o.lhs, d);
        b = load_program(o.rhs, d);
    }
    require_same_shape(a, b);

    if (!o.replay.empty()) {
        const Witness w = io::witness_from_json(io::parse_json(io::read_file(o.replay), o.replay));
        const Witness r = replay(a, b, w);
        std::cout << "replay deviation " << detail::format_real(r.deviation) << " at node " << r.node << "\n";
        const Tolerance tol{o.tolerance, o.abs_tolerance};
        const bool pass = tol.accepts(r.a, r.b);
        std::cout << (pass ? "PASS" : "FAIL") << "\n";
        return pass ? ok : not_equivalent;
    }

    const std::size_t d = input_arity(a);
    const DomainBox domain = box ? *box : DomainBox::cube(d, -10.0, 10.0);
    CheckOptions opts;
    opts.trials = o.trials;
    opts.tolerance = {o.tolerance, o.abs_tolerance};
    opts.seed = o.seed;
    const DegreeBound p{o.degree_bound ? *o.degree_bound : opts.sampler.max_nodes - 1};
    const CheckResult res = check_equivalence(a, b, p, domain, opts);

    std::cout << "max deviation " << detail::format_real(res.max_deviation) << " over " << res.trials
              << " trials\n";
    if (res.passed) {
        std::cout << "PASS\n";
        return ok;
    }
    std::cout << "FAIL\n";
    emit(o.out, io::to_json(*res.witness).dump() + "\n");
    return not_equivalent;
}

int cmd_bounds(const Options& o) {
    const std::vector<Expr> es = parse_text(expression_text(o));
    DomainBox box = o.box.empty() ? DomainBox() : io::parse_box(o.box);
    const DegreeBound p{o.degree_bound.value_or(0)};
    for (const Expr& e : es) {
        const Interval y = image_bounds(e, p, box);
        std::cout << "[" << detail::format_real(y.lo) << ", " << detail::format_real(y.hi) << "]\n";
    }
    return ok;
}

int cmd_fmt(const Options& o) {
    for (const Expr& e : parse_text(expression_text(o))) std::cout << to_string(e) << "\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compile MPLang expressions into message-passing neural networks"};
    app.require_subcommand(1);
    Options o;

    auto add_expr = [&](CLI::App* cmd) {
        cmd->add_option("--expr", o.expr, "Expression text; ';' separates tuple components");
        cmd->add_option("--expr-file", o.expr_file, "File with one expression per line ('#' starts a comment)");
    };
    auto add_domain = [&](CLI::App* cmd) {
        cmd->add_option("-p,--degree-bound", o.degree_bound, "Maximum node degree p");
        cmd->add_option("--box", o.box, "Feature box as JSON, e.g. \"[[-1,1],[0,2]]\"");
    };

    auto* eval_cmd = app.add_subcommand("eval", "Evaluate an expression or MPNN on a graph");
    add_expr(eval_cmd);
    eval_cmd->add_option("--mpnn", o.mpnn_file, "MPNN JSON file (instead of an expression)");
    eval_cmd->add_option("--graph", o.graph_file, "Graph JSON file")->required();
    eval_cmd->add_option("--features", o.features_file, "Feature JSON file")->required();
    eval_cmd->add_option("--out", o.out, "Output feature file (default stdout)");

    auto* compile_cmd = app.add_subcommand("compile", "Compile an expression into an equivalent MPNN");
    add_expr(compile_cmd);
    add_domain(compile_cmd);
    compile_cmd->add_option("--mode", o.mode, "relu | addition-free | pointwise | mixed | auto")
        ->check(CLI::IsMember({"relu", "addition-free", "pointwise", "mixed", "auto"}))
        ->capture_default_str();
    compile_cmd->add_option("--arity", o.arity, "Input arity (default: box dimension or largest projection)");
    compile_cmd->add_option("--out", o.out, "MPNN output file (default stdout)");
    compile_cmd->add_option("--report", o.report, "Compilation report file (default stderr)");

    auto* approx_cmd = app.add_subcommand("approx", "Approximate an expression by a ReLU-only expression");
    add_expr(approx_cmd);
    add_domain(approx_cmd);
    approx_cmd->add_option("--epsilon", o.epsilon, "Uniform error budget (> 0)")->required();
    approx_cmd->add_option("--trials", o.trials, "Instances sampled for the reported distance")->capture_default_str();
    approx_cmd->add_option("--seed", o.seed, "Sampling seed")->capture_default_str();
    approx_cmd->add_option("--out", o.out, "Output expression file (default stdout)");
    approx_cmd->add_option("--compile", o.compile_out, "Also write the compiled ReLU-MPNN to this file");

    auto* check_cmd = app.add_subcommand("check", "Test two expressions or MPNNs for equivalence on random inputs");
    check_cmd->add_option("a", o.lhs, "Expression text, expression file, or MPNN JSON file")->required();
    check_cmd->add_option("b", o.rhs, "Expression text, expression file, or MPNN JSON file")->required();
    add_domain(check_cmd);
    check_cmd->add_option("--arity", o.arity, "Input arity for expressions");
    check_cmd->add_option("--trials", o.trials, "Random instances")->capture_default_str();
    check_cmd->add_option("--tolerance", o.tolerance, "Relative tolerance")->capture_default_str();
    check_cmd->add_option("--abs-tolerance", o.abs_tolerance, "Absolute tolerance floor")->capture_default_str();
    check_cmd->add_option("--seed", o.seed, "Sampling seed")->capture_default_str();
    check_cmd->add_option("--out", o.out, "Where to write a failing witness (default stdout)");
    check_cmd->add_option("--replay", o.replay, "Re-evaluate a saved witness instead of sampling");
    check_cmd->footer(
        "Without --box features are drawn from [-10,10]^d; without --degree-bound graphs have up to 12 nodes and "
        "any degree.");

    auto* bounds_cmd = app.add_subcommand("bounds", "Interval enclosing an expression's values over G_p and a box");
    add_expr(bounds_cmd);
    add_domain(bounds_cmd);

    auto* fmt_cmd = app.add_subcommand("fmt", "Parse and pretty-print expressions");
    add_expr(fmt_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (eval_cmd->parsed()) return cmd_eval(o);
        if (compile_cmd->parsed()) return cmd_compile(o);
        if (approx_cmd->parsed()) return cmd_approx(o);
        if (check_cmd->parsed()) return cmd_check(o);
        if (bounds_cmd->parsed()) return cmd_bounds(o);
        if (fmt_cmd->parsed()) return cmd_fmt(o);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return parse_failure;
    } catch (const io::FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return parse_failure;
    } catch (const ArityError& e) {
        std::cerr << "arity error: " << e.what() << "\n";
        return arity_failure;
    } catch (const GraphError& e) {
        std::cerr << "graph error: " << e.what() << "\n";
        return arity_failure;
    } catch (const ModeError& e) {
        std::cerr << "mode error: " << e.what() << "\n";
        return mode_failure;
    } catch (const CertificateError& e) {
        std::cerr << "certificate error: " << e.what() << "\n";
        return certificate_failure;
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }
    return usage;
}
