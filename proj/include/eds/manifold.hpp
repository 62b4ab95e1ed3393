#pragma once

#include "eds/scalar.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace eds {

class DForm;
class Manifold;
using ManifoldPtr = std::shared_ptr<const Manifold>;

/// Strictly increasing tuple of 1-based coframe indices.
using IndexTuple = std::vector<int>;

/// Raw term data of a differential form: multi-index -> coefficient.
using TermMap = std::map<IndexTuple, ScalarExpr>;

/// Tangent vector given by its pairings with the coframe: theta_i(v) = comps[i-1].
struct TangentVector {
    std::vector<ScalarExpr> comps;

    static TangentVector basis(int dim, int i); // dual basis vector e_i (1-based)
    std::vector<mpq_class> numeric(const Point &p) const;
};

/// A manifold model: named coframe with declared structure equations and a list
/// of declared scalar functions, each carrying its differential expanded in the
/// coframe. Immutable after creation; create() validates d.d = 0 throughout.
class Manifold : public std::enable_shared_from_this<Manifold> {
public:
    /// structure: coframe name -> degree-2 term map (missing entries mean d theta = 0).
    /// scalars: ordered (name, degree-1 term map) declarations.
    static ManifoldPtr create(std::string name, std::vector<std::string> coframe,
                              std::map<std::string, TermMap> structure,
                              std::vector<std::pair<std::string, TermMap>> scalars);

    /// Coordinate manifold: coframe elements named "d"+coord, all closed, and each
    /// coordinate declared as a scalar whose differential is its coframe element.
    static ManifoldPtr coordinates(std::string name, const std::vector<std::string> &coords);

    const std::string &name() const { return name_; }
    int dim() const { return static_cast<int>(coframe_.size()); }
    const std::vector<std::string> &coframe() const { return coframe_; }
    int coframe_index(const std::string &name) const; // 1-based, 0 if absent
    bool is_coordinate() const { return coordinate_; }

    const std::vector<std::string> &scalar_names() const { return scalar_names_; }
    bool has_scalar(const std::string &name) const { return scalar_diff_.count(name) != 0; }

    DForm d_theta(int i) const; // declared d(theta_i), 1-based
    DForm scalar_differential(const std::string &name) const;

    /// d of a scalar coefficient by the chain rule over declared scalars.
    DForm d_scalar(const ScalarExpr &c) const;

    DForm zero_form(int degree) const;
    DForm coframe_form(int i) const;
    DForm scalar_form(const ScalarExpr &c) const;
    DForm form(int degree, TermMap terms) const;

private:
    friend class DForm;
    Manifold() = default;
    void validate() const; // throws DSquaredNonzero / UnknownSymbol

    std::string name_;
    std::vector<std::string> coframe_;
    std::vector<TermMap> structure_; // per coframe element
    std::vector<std::string> scalar_names_;
    std::map<std::string, TermMap> scalar_diff_;
    bool coordinate_ = false;
};

} // namespace eds
