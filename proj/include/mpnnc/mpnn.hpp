#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mpnnc/activation.hpp"
#include "mpnnc/errors.hpp"
#include "mpnnc/graph.hpp"

namespace mpnnc {

/// Dense row-major real matrix with explicit dimensions.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
        const std::size_t c = rows.empty() ? 0 : rows.front().size();
        Matrix m(rows.size(), c);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != c) throw ArityError("ragged matrix rows");
            for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    Matrix scaled(double a) const {
        Matrix m = *this;
        for (double& x : m.data_) x *= a;
        return m;
    }

    /// [top; bottom]
    static Matrix vstack(const Matrix& top, const Matrix& bottom) {
        if (top.cols_ != bottom.cols_) throw ArityError("vstack needs equal column counts");
        Matrix m(top.rows_ + bottom.rows_, top.cols_);
        std::copy(top.data_.begin(), top.data_.end(), m.data_.begin());
        std::copy(bottom.data_.begin(), bottom.data_.end(), m.data_.begin() + static_cast<std::ptrdiff_t>(top.data_.size()));
        return m;
    }

    /// [left | right]
    static Matrix hstack(const Matrix& left, const Matrix& right) {
        if (left.rows_ != right.rows_) throw ArityError("hstack needs equal row counts");
        Matrix m(left.rows_, left.cols_ + right.cols_);
        for (std::size_t i = 0; i < m.rows_; ++i) {
            for (std::size_t j = 0; j < left.cols_; ++j) m(i, j) = left(i, j);
            for (std::size_t j = 0; j < right.cols_; ++j) m(i, left.cols_ + j) = right(i, j);
        }
        return m;
    }

    /// [a 0; 0 b]
    static Matrix block_diag(const Matrix& a, const Matrix& b) {
        Matrix m(a.rows_ + b.rows_, a.cols_ + b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j) m(i, j) = a(i, j);
        for (std::size_t i = 0; i < b.rows_; ++i)
            for (std::size_t j = 0; j < b.cols_; ++j) m(a.rows_ + i, a.cols_ + j) = b(i, j);
        return m;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// One message-passing layer of type d -> r:
/// v |-> sigma(W1 x(v) + W2 sum_{u in N(v)} x(u) + b).
class Layer {
public:
    Layer(Matrix w1, Matrix w2, std::vector<double> b, Activation sigma)
        : w1_(std::move(w1)), w2_(std::move(w2)), b_(std::move(b)), sigma_(std::move(sigma)) {
        if (w1_.rows() != w2_.rows() || w1_.cols() != w2_.cols())
            throw ArityError("layer weight matrices differ in shape");
        if (b_.size() != w1_.rows()) throw ArityError("layer bias length does not match its row count");
    }

    /// Scalar layer (w1, w2, b, sigma) of type 1 -> 1.
    static Layer scalar(double w1, double w2, double b, Activation sigma) {
        return Layer(Matrix(1, 1, w1), Matrix(1, 1, w2), {b}, std::move(sigma));
    }

    /// (I, 0, 0, sigma) on n channels.
    static Layer identity(std::size_t n, Activation sigma = NamedFn::id) {
        return Layer(Matrix::identity(n), Matrix(n, n), std::vector<double>(n, 0.0), std::move(sigma));
    }

    const Matrix& w1() const { return w1_; }
    const Matrix& w2() const { return w2_; }
    const std::vector<double>& bias() const { return b_; }
    const Activation& activation() const { return sigma_; }

    std::size_t input_arity() const { return w1_.cols(); }
    std::size_t output_arity() const { return w1_.rows(); }

    Layer with_activation(Activation sigma) const { return Layer(w1_, w2_, b_, std::move(sigma)); }
    Layer with_bias(std::vector<double> b) const { return Layer(w1_, w2_, std::move(b), sigma_); }

    friend bool operator==(const Layer&, const Layer&) = default;

private:
    Matrix w1_;
    Matrix w2_;
    std::vector<double> b_;
    Activation sigma_;
};

/// Nonempty chain of layers; each layer's input arity equals the previous
/// layer's output arity.
class Mpnn {
public:
    explicit Mpnn(std::vector<Layer> layers) : layers_(std::move(layers)) {
        if (layers_.empty()) throw std::invalid_argument("an MPNN needs at least one layer");
        for (std::size_t i = 1; i < layers_.size(); ++i)
            if (layers_[i].input_arity() != layers_[i - 1].output_arity())
                throw ArityError("layer " + std::to_string(i) + " expects arity " +
                                 std::to_string(layers_[i].input_arity()) + " but receives " +
                                 std::to_string(layers_[i - 1].output_arity()));
    }
    Mpnn(std::initializer_list<Layer> layers) : Mpnn(std::vector<Layer>(layers)) {}

    const std::vector<Layer>& layers() const { return layers_; }
    std::size_t size() const { return layers_.size(); }
    const Layer& operator[](std::size_t i) const { return layers_.at(i); }
    const Layer& back() const { return layers_.back(); }

    std::size_t input_arity() const { return layers_.front().input_arity(); }
    std::size_t output_arity() const { return layers_.back().output_arity(); }

    friend bool operator==(const Mpnn&, const Mpnn&) = default;

private:
    std::vector<Layer> layers_;
};

// ---------------------------------------------------------------------------
// Evaluation

/// W1 x(v) + W2 sum_{u in N(v)} x(u) + b per node, before the activation.
/// Accumulation order: own-term row sum, neighbour-term row sum, then bias.
inline FeatureMap preactivation(const Layer& L, const Graph& g, const FeatureMap& chi) {
    if (chi.node_count() != g.node_count()) throw ArityError("feature map does not match the graph");
    if (chi.dim() != L.input_arity())
        throw ArityError("layer expects input arity " + std::to_string(L.input_arity()) + ", features have " +
                         std::to_string(chi.dim()));
    const std::size_t d = L.input_arity(), r = L.output_arity();
    FeatureMap out(g.node_count(), r);
    std::vector<double> nsum(d);
    for (NodeId v = 0; v < g.node_count(); ++v) {
        std::fill(nsum.begin(), nsum.end(), 0.0);
        for (NodeId u : g.neighbors(v))
            for (std::size_t k = 0; k < d; ++k) nsum[k] += chi[u][k];
        const auto x = chi[v];
        for (std::size_t i = 0; i < r; ++i) {
            double own = 0.0, nb = 0.0;
            for (std::size_t k = 0; k < d; ++k) own += L.w1()(i, k) * x[k];
            for (std::size_t k = 0; k < d; ++k) nb += L.w2()(i, k) * nsum[k];
            out[v][i] = own + nb + L.bias()[i];
        }
    }
    return out;
}

inline FeatureMap eval_layer(const Layer& L, const Graph& g, const FeatureMap& chi) {
    FeatureMap out = preactivation(L, g, chi);
    const Activation& sigma = L.activation();
    if (sigma.is(NamedFn::id)) return out;
    for (NodeId v = 0; v < out.node_count(); ++v)
        for (double& z : out[v]) z = sigma(z);
    return out;
}

inline FeatureMap eval(const Mpnn& N, const Graph& g, const FeatureMap& chi) {
    FeatureMap x = eval_layer(N[0], g, chi);
    for (std::size_t i = 1; i < N.size(); ++i) x = eval_layer(N[i], g, x);
    return x;
}

// ---------------------------------------------------------------------------
// Shape predicates

/// All layers use sigma, except that the last may use id instead.
inline bool is_sigma_mpnn(const Mpnn& N, const Activation& sigma) {
    for (std::size_t i = 0; i < N.size(); ++i) {
        const Activation& a = N[i].activation();
        if (a == sigma) continue;
        if (i + 1 == N.size() && a.is(NamedFn::id)) continue;
        return false;
    }
    return true;
}

inline bool is_relu_mpnn(const Mpnn& N) { return is_sigma_mpnn(N, NamedFn::relu); }

/// Distinct activations used by the layers, in first-use order.
inline std::vector<Activation> activations_used(const Mpnn& N) {
    std::vector<Activation> out;
    for (const Layer& L : N.layers())
        if (std::find(out.begin(), out.end(), L.activation()) == out.end()) out.push_back(L.activation());
    return out;
}

// ---------------------------------------------------------------------------
// Combinators

/// L | K: both layers read the same input; outputs are stacked.
inline Layer concat_layers(const Layer& L, const Layer& K) {
    if (L.input_arity() != K.input_arity()) throw ArityError("concatenated layers need equal input arity");
    if (!(L.activation() == K.activation()))
        throw std::invalid_argument("concatenated layers need the same activation");
    std::vector<double> b = L.bias();
    b.insert(b.end(), K.bias().begin(), K.bias().end());
    return Layer(Matrix::vstack(L.w1(), K.w1()), Matrix::vstack(L.w2(), K.w2()), std::move(b), L.activation());
}

/// L || K: L reads the first d_L input channels, K the remaining d_K.
inline Layer parallel_layers(const Layer& L, const Layer& K) {
    if (!(L.activation() == K.activation()))
        throw std::invalid_argument("parallel layers need the same activation");
    std::vector<double> b = L.bias();
    b.insert(b.end(), K.bias().begin(), K.bias().end());
    return Layer(Matrix::block_diag(L.w1(), K.w1()), Matrix::block_diag(L.w2(), K.w2()), std::move(b),
                 L.activation());
}

/// Rewrites id-layer L followed by K as a ReLU layer L' followed by K', using
/// x = ReLU(x) - ReLU(-x).
inline std::pair<Layer, Layer> eliminate_id_layer(const Layer& L, const Layer& K) {
    if (!L.activation().is(NamedFn::id)) throw std::invalid_argument("eliminate_id_layer needs an id-layer first");
    if (K.input_arity() != L.output_arity()) throw ArityError("layers do not chain");
    std::vector<double> neg_b = L.bias();
    for (double& x : neg_b) x = -x;
    Layer pos(L.w1(), L.w2(), L.bias(), NamedFn::relu);
    Layer neg(L.w1().scaled(-1.0), L.w2().scaled(-1.0), std::move(neg_b), NamedFn::relu);
    Layer k_prime(Matrix::hstack(K.w1(), K.w1().scaled(-1.0)), Matrix::hstack(K.w2(), K.w2().scaled(-1.0)), K.bias(),
                  K.activation());
    return {concat_layers(pos, neg), std::move(k_prime)};
}

/// Removes every non-final id-layer from a chain of relu/id layers.
inline Mpnn normalize_relu(std::vector<Layer> layers) {
    for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
        const Activation& a = layers[i].activation();
        if (a.is(NamedFn::relu)) continue;
        if (!a.is(NamedFn::id)) throw std::invalid_argument("normalize_relu accepts only relu and id layers");
        auto [l, k] = eliminate_id_layer(layers[i], layers[i + 1]);
        layers[i] = std::move(l);
        layers[i + 1] = std::move(k);
    }
    return Mpnn(std::move(layers));
}

/// Equivalent ReLU-MPNN with exactly `target` layers. Pads with (I, 0, 0,
/// relu) right after the first layer, whose output is already nonnegative.
inline Mpnn pad_relu(const Mpnn& N, std::size_t target) {
    if (!is_relu_mpnn(N)) throw std::invalid_argument("pad_relu needs a ReLU-MPNN");
    if (target < N.size()) throw std::invalid_argument("pad_relu cannot shorten a network");
    if (target == N.size()) return N;
    std::vector<Layer> layers = N.layers();
    if (layers.size() == 1 && layers[0].activation().is(NamedFn::id)) {
        auto [l, k] = eliminate_id_layer(layers[0], Layer::identity(layers[0].output_arity()));
        layers = {std::move(l), std::move(k)};
    }
    const Layer pad = Layer::identity(layers[0].output_arity(), NamedFn::relu);
    layers.insert(layers.begin() + 1, target - layers.size(), pad);
    return Mpnn(std::move(layers));
}

/// L | K for ReLU-MPNNs of equal input arity:
/// (L1 | K1); (L2 || K2); ...; (Ln || Kn) after equalizing lengths.
inline Mpnn concat_mpnns(const Mpnn& L, const Mpnn& K) {
    if (!is_relu_mpnn(L) || !is_relu_mpnn(K)) throw std::invalid_argument("concat_mpnns needs ReLU-MPNNs");
    if (L.input_arity() != K.input_arity()) throw ArityError("concatenated networks need equal input arity");
    Mpnn a = L, b = K;
    // Final activations must agree; an id tail is appended to a relu-ending side.
    const bool a_id = a.back().activation().is(NamedFn::id);
    const bool b_id = b.back().activation().is(NamedFn::id);
    auto with_id_tail = [](const Mpnn& n) {
        std::vector<Layer> layers = n.layers();
        layers.push_back(Layer::identity(n.output_arity()));
        return Mpnn(std::move(layers));
    };
    if (a_id && !b_id) b = with_id_tail(b);
    if (b_id && !a_id) a = with_id_tail(a);
    const std::size_t n = std::max(a.size(), b.size());
    a = pad_relu(a, n);
    b = pad_relu(b, n);
    std::vector<Layer> layers{concat_layers(a[0], b[0])};
    for (std::size_t i = 1; i < n; ++i) layers.push_back(parallel_layers(a[i], b[i]));
    return Mpnn(std::move(layers));
}

}  // namespace mpnnc
