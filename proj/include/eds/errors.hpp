#pragma once

#include <stdexcept>
#include <string>

namespace eds {

/// Base class for all domain errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

struct ZeroDivision : Error {
    ZeroDivision() : Error("division by zero expression") {}
};

struct PoleAtPoint : Error {
    explicit PoleAtPoint(const std::string &what) : Error("pole at point: " + what) {}
};

struct UnboundSymbol : Error {
    explicit UnboundSymbol(const std::string &sym) : Error("unbound symbol: " + sym), symbol(sym) {}
    std::string symbol;
};

struct UnknownSymbol : Error {
    explicit UnknownSymbol(const std::string &sym)
        : Error("unknown symbol (no declared differential): " + sym), symbol(sym) {}
    std::string symbol;
};

struct DSquaredNonzero : Error {
    DSquaredNonzero(const std::string &sym, const std::string &residual)
        : Error("d(d " + sym + ") != 0, residual: " + residual), symbol(sym) {}
    std::string symbol;
};

struct DegreeError : Error {
    explicit DegreeError(const std::string &msg) : Error(msg) {}
};

struct DegreeZeroGenerator : Error {
    DegreeZeroGenerator()
        : Error("degree-0 generator not allowed; restrict the manifold to its zero locus first") {}
};

struct DependentBasis : Error {
    DependentBasis() : Error("basis vectors are linearly dependent") {}
};

struct NegativeLastCharacter : Error {
    explicit NegativeLastCharacter(const std::string &msg) : Error(msg) {}
};

struct BadIndependenceCondition : Error {
    explicit BadIndependenceCondition(const std::string &msg) : Error(msg) {}
};

struct AffineOnly : Error {
    explicit AffineOnly(const std::string &eq)
        : Error("chart equation is not affine in the unknowns: " + eq) {}
};

struct NotSolvable : Error {
    explicit NotSolvable(const std::string &sym)
        : Error("equation not affinely solvable for symbol: " + sym), symbol(sym) {}
    std::string symbol;
};

struct NotCoordinateManifold : Error {
    NotCoordinateManifold() : Error("operation requires a coordinate manifold") {}
};

struct NotAGraph : Error {
    explicit NotAGraph(const std::string &msg) : Error(msg) {}
};

/// Parse-time failure with source location.
struct ParseError : Error {
    ParseError(int line_, int col_, const std::string &msg)
        : Error("parse error at " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
          line(line_), col(col_) {}
    int line;
    int col;
};

} // namespace eds
