#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "stylelab/common.hpp"

namespace stylelab {

// Dense row-major tensor. Most of the library works with rank-2 tensors
// (batch x features); rank-1 is used for vectors and rank-0 is not allowed.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<int> shape, real fill = 0) : shape_(std::move(shape)) {
        int64_t n = 1;
        for (int d : shape_) {
            require(d > 0, "Tensor: dimensions must be positive");
            n *= d;
        }
        require(!shape_.empty(), "Tensor: rank must be >= 1");
        data_.assign(static_cast<size_t>(n), fill);
    }

    static Tensor from(std::vector<int> shape, std::vector<real> values) {
        Tensor t(std::move(shape));
        if (t.data_.size() != values.size()) throw ShapeError("Tensor::from: size mismatch");
        t.data_ = std::move(values);
        return t;
    }

    static Tensor row(std::vector<real> values) {
        int n = static_cast<int>(values.size());
        return from({1, n}, std::move(values));
    }

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
    int64_t numel() const { return static_cast<int64_t>(data_.size()); }
    bool empty() const { return data_.empty(); }

    int rows() const {
        if (rank() != 2) throw ShapeError("Tensor::rows: rank-2 required");
        return shape_[0];
    }
    int cols() const {
        if (rank() != 2) throw ShapeError("Tensor::cols: rank-2 required");
        return shape_[1];
    }

    real* data() { return data_.data(); }
    const real* data() const { return data_.data(); }

    real& at(int64_t i) { return data_[static_cast<size_t>(i)]; }
    real at(int64_t i) const { return data_[static_cast<size_t>(i)]; }

    real& operator()(int i, int j) { return data_[static_cast<size_t>(i) * shape_[1] + j]; }
    real operator()(int i, int j) const { return data_[static_cast<size_t>(i) * shape_[1] + j]; }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    void fill(real v) { std::fill(data_.begin(), data_.end(), v); }

    bool all_finite() const {
        for (real v : data_)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

private:
    std::vector<int> shape_;
    std::vector<real> data_;
};

inline Tensor zeros_like(const Tensor& t) { return Tensor(t.shape()); }

// C = A(m x k) * B(k x n), optionally accumulating into C.
inline void matmul_into(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate = false) {
    int m = a.rows(), k = a.cols(), n = b.cols();
    if (b.rows() != k) throw ShapeError("matmul: inner dimensions differ");
    if (!accumulate) c = Tensor({m, n});
    const real* pa = a.data();
    const real* pb = b.data();
    real* pc = c.data();
    for (int i = 0; i < m; ++i) {
        real* crow = pc + static_cast<size_t>(i) * n;
        for (int l = 0; l < k; ++l) {
            real aval = pa[static_cast<size_t>(i) * k + l];
            if (aval == 0) continue;
            const real* brow = pb + static_cast<size_t>(l) * n;
            for (int j = 0; j < n; ++j) crow[j] += aval * brow[j];
        }
    }
}

// C = A^T(m x k from A(k x m)) * B(k x n).
inline void matmul_tA_into(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate = false) {
    int k = a.rows(), m = a.cols(), n = b.cols();
    if (b.rows() != k) throw ShapeError("matmul_tA: inner dimensions differ");
    if (!accumulate) c = Tensor({m, n});
    const real* pa = a.data();
    const real* pb = b.data();
    real* pc = c.data();
    for (int l = 0; l < k; ++l) {
        const real* arow = pa + static_cast<size_t>(l) * m;
        const real* brow = pb + static_cast<size_t>(l) * n;
        for (int i = 0; i < m; ++i) {
            real aval = arow[i];
            if (aval == 0) continue;
            real* crow = pc + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) crow[j] += aval * brow[j];
        }
    }
}

// C = A(m x k) * B^T(k x n from B(n x k)).
inline void matmul_tB_into(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate = false) {
    int m = a.rows(), k = a.cols(), n = b.rows();
    if (b.cols() != k) throw ShapeError("matmul_tB: inner dimensions differ");
    if (!accumulate) c = Tensor({m, n});
    const real* pa = a.data();
    const real* pb = b.data();
    real* pc = c.data();
    for (int i = 0; i < m; ++i) {
        const real* arow = pa + static_cast<size_t>(i) * k;
        real* crow = pc + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const real* brow = pb + static_cast<size_t>(j) * k;
            real acc = 0;
            for (int l = 0; l < k; ++l) acc += arow[l] * brow[l];
            crow[j] += acc;
        }
    }
}

inline Tensor matmul(const Tensor& a, const Tensor& b) {
    Tensor c;
    matmul_into(a, b, c);
    return c;
}

inline void axpy(real alpha, const Tensor& x, Tensor& y) {
    if (!x.same_shape(y)) throw ShapeError("axpy: shape mismatch");
    const real* px = x.data();
    real* py = y.data();
    int64_t n = x.numel();
    for (int64_t i = 0; i < n; ++i) py[i] += alpha * px[i];
}

inline double sum(const Tensor& t) {
    double s = 0;
    for (int64_t i = 0; i < t.numel(); ++i) s += t.at(i);
    return s;
}

inline double squared_l2(const Tensor& t) {
    double s = 0;
    for (int64_t i = 0; i < t.numel(); ++i) {
        double v = t.at(i);
        s += v * v;
    }
    return s;
}

}  // namespace stylelab
