#pragma once

#include "eds/system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eds {

/// Parsed .eds document: one or more manifolds, at most one system, and the
/// optional point / element / covector / seed blocks.
struct SpecFile {
    std::vector<ManifoldPtr> manifolds;
    std::string system_name;
    std::optional<ExteriorSystem> system;
    std::optional<Point> point;
    std::optional<std::vector<std::vector<mpq_class>>> element_a;
    std::optional<std::vector<std::vector<mpq_class>>> element_basis;
    std::optional<std::vector<mpq_class>> covector;
    std::optional<std::uint64_t> seed;

    ManifoldPtr manifold_by_name(const std::string &name) const;
};

/// Parses DSL text; throws ParseError with line/column on the first failure.
SpecFile parse_specfile(const std::string &text);

/// Serializations that re-parse to an identical document.
std::string print_manifold(const ManifoldPtr &m);
std::string print_system(const std::string &name, const ExteriorSystem &s);
std::string print_point(const Point &p);
std::string print_specfile(const SpecFile &spec);

} // namespace eds
