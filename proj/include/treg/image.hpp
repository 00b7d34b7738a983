#pragma once

// Dense row-major 2D arrays used throughout: scalar images and the
// two-channel fields that hold gradients / multipliers.

#include <cmath>
#include <cstddef>
#include <vector>

#include "treg/errors.hpp"

namespace treg {

class Image2D {
  public:
    Image2D() = default;
    Image2D(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {
        if (rows == 0 || cols == 0) throw ConfigError("Image2D: empty dimensions");
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator[](std::size_t k) { return data_[k]; }
    double operator[](std::size_t k) const { return data_[k]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool same_shape(const Image2D& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    double sq_norm() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return s;
    }
    double norm() const { return std::sqrt(sq_norm()); }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::fabs(v));
        return m;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// Elementwise helpers (shapes must agree; checked).
inline void check_same_shape(const Image2D& a, const Image2D& b, const char* where) {
    if (!a.same_shape(b)) throw DomainError(std::string(where) + ": shape mismatch");
}

inline double dot(const Image2D& a, const Image2D& b) {
    check_same_shape(a, b, "dot");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double diff_norm(const Image2D& a, const Image2D& b) {
    check_same_shape(a, b, "diff_norm");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

// Pair of images holding the x/y channels of a discrete vector field
// (forward differences, dual variables, multipliers).
struct DualField {
    Image2D x, y;

    DualField() = default;
    DualField(std::size_t rows, std::size_t cols) : x(rows, cols), y(rows, cols) {}

    std::size_t rows() const { return x.rows(); }
    std::size_t cols() const { return x.cols(); }

    void fill(double v) {
        x.fill(v);
        y.fill(v);
    }

    double sq_norm() const { return x.sq_norm() + y.sq_norm(); }
    double norm() const { return std::sqrt(sq_norm()); }
};

inline double diff_norm(const DualField& a, const DualField& b) {
    double s = diff_norm(a.x, b.x);
    double t = diff_norm(a.y, b.y);
    return std::sqrt(s * s + t * t);
}

}  // namespace treg
