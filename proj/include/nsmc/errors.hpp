#pragma once

#include <stdexcept>
#include <string>

namespace nsmc {

// Elimination hit a pivot that is zero to working precision.
class SingularMatrix : public std::runtime_error {
public:
    explicit SingularMatrix(const std::string& what) : std::runtime_error(what) {}
};

// A matrix expected to be row-stochastic (or an indexed family member) is not.
// `index` is the offending row, or the offending sequence index for
// sequence-level failures; see the message for which.
class NotStochastic : public std::runtime_error {
public:
    NotStochastic(const std::string& what, int index)
        : std::runtime_error(what), index(index) {}
    int index;
};

// A stationary-distribution or rate-matrix solve failed in a way that
// signals a reducible (or otherwise degenerate) chain.
class NotIrreducible : public std::runtime_error {
public:
    explicit NotIrreducible(const std::string& what) : std::runtime_error(what) {}
};

// No power of the given matrix has norm < 1 within the searched range;
// hitting-time machinery requires such a contraction.
class NotContracting : public std::runtime_error {
public:
    explicit NotContracting(const std::string& what) : std::runtime_error(what) {}
};

// Model-document parsing failure; `line` is 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line)
        : std::runtime_error(what), line(line) {}
    int line;
};

} // namespace nsmc
