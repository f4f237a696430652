#pragma once

#include <stdexcept>
#include <string>

namespace pctladp {

/// Base for every error raised by the library. `category()` drives CLI exit codes.
class Error : public std::runtime_error {
public:
    enum class Category { input, structural, numeric, non_convergence, constraint };

    Error(Category c, const std::string& what) : std::runtime_error(what), category_(c) {}

    Category category() const noexcept { return category_; }

private:
    Category category_;
};

/// Malformed user input: bad files, bad formulas, empty supports, out-of-range values.
class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(Category::input, what) {}
};

/// Dimension or shape mismatch between objects that must agree.
class StructuralError : public Error {
public:
    explicit StructuralError(const std::string& what) : Error(Category::structural, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(Category::numeric, what) {}
};

class NonConvergenceError : public Error {
public:
    explicit NonConvergenceError(const std::string& what) : Error(Category::non_convergence, what) {}
};

}  // namespace pctladp
