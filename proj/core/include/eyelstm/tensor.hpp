#pragma once

#include <cstddef>
#include <vector>

#include "eyelstm/errors.hpp"

namespace eyelstm {

// Row-major (time x channels) matrix of 64-bit reals. All network math is
// double precision so finite-difference gradient checks are meaningful.
struct Tensor2 {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Tensor2() = default;
    Tensor2(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double* row(std::size_t r) { return data.data() + r * cols; }

    std::size_t size() const { return data.size(); }

    bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }
};

inline void require_shape(const Tensor2& t, std::size_t rows, std::size_t cols,
                          const char* what) {
    if (t.rows != rows || t.cols != cols)
        throw DimensionError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                             std::to_string(cols) + ", got " + std::to_string(t.rows) + "x" +
                             std::to_string(t.cols));
}

}  // namespace eyelstm
