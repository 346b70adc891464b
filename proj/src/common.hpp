#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace usqt {

enum class ErrorCode {
    argument = 1,        // caller violated a precondition
    param_domain = 2,    // distribution parameter outside its domain
    degenerate_data = 3, // data carries no usable information (constant, empty)
    convergence = 4,     // iterative routine exhausted its budget
    format = 5,          // malformed file content
    io = 6,              // filesystem failure
    config = 7,          // bad configuration key or value
    internal = 8,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool ok, ErrorCode code, const std::string& message) {
    if (!ok) fail(code, message);
}

// Dense row-major matrix. Deliberately minimal: the pipeline only needs
// shape-checked storage with contiguous access.
template <typename T>
class Matrix {
  public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols, T fill = T{}) { resize(rows, cols, fill); }

    void resize(int rows, int cols, T fill = T{}) {
        require(rows >= 0 && cols >= 0, ErrorCode::argument,
                "matrix dimensions must be non-negative");
        rows_ = rows;
        cols_ = cols;
        data_.assign(static_cast<size_t>(rows) * cols, fill);
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    const T& operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& storage() { return data_; }
    const std::vector<T>& storage() const { return data_; }

  private:
    int rows_;
    int cols_;
    std::vector<T> data_;
};

using MatrixF = Matrix<float>;
using MatrixD = Matrix<double>;

enum class ModelKind { rayleigh = 0, rician = 1, k = 2, nakagami = 3, nig = 4 };

inline constexpr int kModelCount = 5;

const char* model_name(ModelKind kind);
ModelKind model_from_name(const std::string& name);
int model_param_count(ModelKind kind);
const char* model_param_name(ModelKind kind, int index);

// Two-class outcome labels used throughout the classification pipeline.
enum class ClassLabel : int { respondent = 0, non_respondent = 1 };

const char* class_label_name(ClassLabel label);
ClassLabel class_label_from_name(const std::string& name);

} // namespace usqt
