#pragma once

#include "hris/numerics.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <vector>

namespace hris::nn {

/// Fully connected network: tanh on hidden layers, identity on the output.
/// Inputs are batched column-wise (features x batch).
template <class Scalar>
class DenseNet {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    struct Gradients {
        std::vector<Matrix> weight;
        std::vector<Vector> bias;

        void set_zero()
        {
            for (auto& w : weight) w.setZero();
            for (auto& b : bias) b.setZero();
        }
    };

    DenseNet() = default;

    /// Zero-initialized network with the given layer widths (input first).
    explicit DenseNet(std::vector<int> sizes) : sizes_(std::move(sizes))
    {
        if (sizes_.size() < 2) throw ShapeError("DenseNet needs at least an input and an output width");
        for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
            weight_.push_back(Matrix::Zero(sizes_[l + 1], sizes_[l]));
            bias_.push_back(Vector::Zero(sizes_[l + 1]));
        }
    }

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) on every weight and bias.
    DenseNet(std::vector<int> sizes, Rng& rng) : DenseNet(std::move(sizes))
    {
        for (std::size_t l = 0; l < weight_.size(); ++l) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
            for (Eigen::Index i = 0; i < weight_[l].size(); ++i) {
                weight_[l].data()[i] = static_cast<Scalar>(rng.uniform(-bound, bound));
            }
            for (Eigen::Index i = 0; i < bias_[l].size(); ++i) {
                bias_[l][i] = static_cast<Scalar>(rng.uniform(-bound, bound));
            }
        }
    }

    int input_size() const { return sizes_.front(); }
    int output_size() const { return sizes_.back(); }
    const std::vector<int>& sizes() const { return sizes_; }
    std::size_t layers() const { return weight_.size(); }

    Matrix& weight(std::size_t l) { return weight_[l]; }
    const Matrix& weight(std::size_t l) const { return weight_[l]; }
    Vector& bias(std::size_t l) { return bias_[l]; }
    const Vector& bias(std::size_t l) const { return bias_[l]; }

    /// Forward pass without touching the backprop cache.
    Matrix predict(const Matrix& x) const
    {
        check_input(x);
        Matrix a = x;
        for (std::size_t l = 0; l < weight_.size(); ++l) {
            Matrix z = weight_[l] * a;
            z.colwise() += bias_[l];
            if (l + 1 < weight_.size()) z = z.array().tanh().matrix();
            a = std::move(z);
        }
        return a;
    }

    Vector predict(const Vector& x) const { return predict(Matrix(x)).col(0); }

    /// Forward pass that records activations for a subsequent backward().
    const Matrix& forward(const Matrix& x)
    {
        check_input(x);
        activations_.resize(weight_.size() + 1);
        activations_[0] = x;
        for (std::size_t l = 0; l < weight_.size(); ++l) {
            Matrix& z = activations_[l + 1];
            z.noalias() = weight_[l] * activations_[l];
            z.colwise() += bias_[l];
            if (l + 1 < weight_.size()) z = z.array().tanh().matrix();
        }
        return activations_.back();
    }

    /// Reverse-mode pass for d(loss)/d(output) = `output_grad`.
    /// Writes parameter gradients into `grads` and returns d(loss)/d(input).
    Matrix backward(const Matrix& output_grad, Gradients& grads) const
    {
        if (activations_.size() != weight_.size() + 1) throw ShapeError("backward called before forward");
        if (output_grad.rows() != output_size() || output_grad.cols() != activations_.back().cols()) {
            throw ShapeError("backward: output gradient shape mismatch");
        }
        ensure_shape(grads);
        Matrix delta = output_grad;
        for (std::size_t l = weight_.size(); l-- > 0;) {
            grads.weight[l].noalias() = delta * activations_[l].transpose();
            grads.bias[l] = delta.rowwise().sum();
            Matrix upstream = weight_[l].transpose() * delta;
            if (l > 0) {
                upstream.array() *= (Scalar(1) - activations_[l].array().square());
            }
            delta = std::move(upstream);
        }
        return delta;
    }

    /// Input gradient only; parameter gradients are not formed.
    Matrix input_gradient(const Matrix& output_grad) const
    {
        if (activations_.size() != weight_.size() + 1) throw ShapeError("input_gradient called before forward");
        if (output_grad.rows() != output_size() || output_grad.cols() != activations_.back().cols()) {
            throw ShapeError("input_gradient: output gradient shape mismatch");
        }
        Matrix delta = output_grad;
        for (std::size_t l = weight_.size(); l-- > 0;) {
            Matrix upstream = weight_[l].transpose() * delta;
            if (l > 0) {
                upstream.array() *= (Scalar(1) - activations_[l].array().square());
            }
            delta = std::move(upstream);
        }
        return delta;
    }

    Gradients zero_gradients() const
    {
        Gradients g;
        ensure_shape(g);
        g.set_zero();
        return g;
    }

    std::size_t parameter_count() const
    {
        std::size_t n = 0;
        for (std::size_t l = 0; l < weight_.size(); ++l) {
            n += static_cast<std::size_t>(weight_[l].size() + bias_[l].size());
        }
        return n;
    }

    /// Flattened parameters: per layer, column-major weights then biases.
    std::vector<Scalar> parameters() const
    {
        std::vector<Scalar> flat;
        flat.reserve(parameter_count());
        for (std::size_t l = 0; l < weight_.size(); ++l) {
            flat.insert(flat.end(), weight_[l].data(), weight_[l].data() + weight_[l].size());
            flat.insert(flat.end(), bias_[l].data(), bias_[l].data() + bias_[l].size());
        }
        return flat;
    }

    void set_parameters(const std::vector<Scalar>& flat)
    {
        if (flat.size() != parameter_count()) throw ShapeError("set_parameters: size mismatch");
        std::size_t k = 0;
        for (std::size_t l = 0; l < weight_.size(); ++l) {
            for (Eigen::Index i = 0; i < weight_[l].size(); ++i) weight_[l].data()[i] = flat[k++];
            for (Eigen::Index i = 0; i < bias_[l].size(); ++i) bias_[l][i] = flat[k++];
        }
    }

    static std::vector<Scalar> flatten(const Gradients& g)
    {
        std::vector<Scalar> flat;
        for (std::size_t l = 0; l < g.weight.size(); ++l) {
            flat.insert(flat.end(), g.weight[l].data(), g.weight[l].data() + g.weight[l].size());
            flat.insert(flat.end(), g.bias[l].data(), g.bias[l].data() + g.bias[l].size());
        }
        return flat;
    }

    /// this <- tau * source + (1 - tau) * this
    void soft_update(const DenseNet& source, Scalar tau)
    {
        for (std::size_t l = 0; l < weight_.size(); ++l) {
            if (tau == Scalar(1)) {
                weight_[l] = source.weight_[l];
                bias_[l] = source.bias_[l];
            } else {
                weight_[l] = tau * source.weight_[l] + (Scalar(1) - tau) * weight_[l];
                bias_[l] = tau * source.bias_[l] + (Scalar(1) - tau) * bias_[l];
            }
        }
    }

    bool same_parameters(const DenseNet& other) const
    {
        if (sizes_ != other.sizes_) return false;
        for (std::size_t l = 0; l < weight_.size(); ++l) {
            if (weight_[l] != other.weight_[l] || bias_[l] != other.bias_[l]) return false;
        }
        return true;
    }

private:
    void check_input(const Matrix& x) const
    {
        if (x.rows() != input_size()) {
            throw ShapeError("DenseNet: input has " + std::to_string(x.rows()) + " rows, expected " +
                             std::to_string(input_size()));
        }
    }

    void ensure_shape(Gradients& g) const
    {
        g.weight.resize(weight_.size());
        g.bias.resize(bias_.size());
        for (std::size_t l = 0; l < weight_.size(); ++l) {
            g.weight[l].resize(weight_[l].rows(), weight_[l].cols());
            g.bias[l].resize(bias_[l].size());
        }
    }

    std::vector<int> sizes_;
    std::vector<Matrix> weight_;
    std::vector<Vector> bias_;
    std::vector<Matrix> activations_;
};

/// Adaptive moment estimation over one network's parameters.
template <class Scalar>
class Adam {
public:
    using Net = DenseNet<Scalar>;

    Scalar beta1 = Scalar(0.9);
    Scalar beta2 = Scalar(0.999);
    Scalar epsilon = Scalar(1e-8);

    Adam() = default;
    explicit Adam(const Net& net) : m_(net.zero_gradients()), v_(net.zero_gradients()) {}

    void step(Net& net, const typename Net::Gradients& grads, Scalar lr)
    {
        ++t_;
        const Scalar c1 = Scalar(1) - std::pow(beta1, static_cast<Scalar>(t_));
        const Scalar c2 = Scalar(1) - std::pow(beta2, static_cast<Scalar>(t_));
        for (std::size_t l = 0; l < net.layers(); ++l) {
            apply(net.weight(l), m_.weight[l], v_.weight[l], grads.weight[l], lr, c1, c2);
            apply(net.bias(l), m_.bias[l], v_.bias[l], grads.bias[l], lr, c1, c2);
        }
    }

    long steps() const { return t_; }
    void set_steps(long t) { t_ = t; }
    typename Net::Gradients& first_moment() { return m_; }
    typename Net::Gradients& second_moment() { return v_; }
    const typename Net::Gradients& first_moment() const { return m_; }
    const typename Net::Gradients& second_moment() const { return v_; }

private:
    template <class P, class G>
    void apply(P& param, P& m, P& v, const G& g, Scalar lr, Scalar c1, Scalar c2)
    {
        m = beta1 * m + (Scalar(1) - beta1) * g;
        v = beta2 * v + (Scalar(1) - beta2) * g.cwiseProduct(g);
        param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + epsilon);
    }

    typename Net::Gradients m_;
    typename Net::Gradients v_;
    long t_ = 0;
};

/// Adam on a single scalar (the SAC log-temperature).
struct ScalarAdam {
    double m = 0.0;
    double v = 0.0;
    long t = 0;

    void step(double& param, double grad, double lr)
    {
        ++t;
        m = 0.9 * m + 0.1 * grad;
        v = 0.999 * v + 0.001 * grad * grad;
        const double mhat = m / (1.0 - std::pow(0.9, static_cast<double>(t)));
        const double vhat = v / (1.0 - std::pow(0.999, static_cast<double>(t)));
        param -= lr * mhat / (std::sqrt(vhat) + 1e-8);
    }
};

} // namespace hris::nn
