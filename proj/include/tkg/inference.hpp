#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>

#include "tkg/quad_store.hpp"

namespace tkg {

/// Schema-level statements that drive RDFS-lite entailment. Cycles are allowed.
struct ClassHierarchy {
    std::set<std::pair<std::string, std::string>> subclass_of;     // (sub, super)
    std::set<std::pair<std::string, std::string>> subproperty_of;  // (sub, super)
    std::set<std::pair<std::string, std::string>> domain;          // (property, class)
    std::set<std::pair<std::string, std::string>> range;           // (property, class)

    bool empty() const { return subclass_of.empty() && subproperty_of.empty() && domain.empty() && range.empty(); }
};

/// Forward-chains the store to the least fixpoint of:
///   x type C, C ⊑ D        => x type D       (with ⊑ transitive)
///   x p y,    p ⊑ q        => x q y
///   x p y,    domain(p)=C  => x type C
///   x p y,    range(p)=C   => y type C       (y not a literal)
/// Each conclusion goes to the graph of its premise and is flagged inferred.
/// When `graph` is set only that graph is read and extended.
/// Returns the number of quads added.
std::size_t rdfs_closure(QuadStore& store, const ClassHierarchy& hierarchy,
                         const std::optional<Term>& graph = std::nullopt);

}  // namespace tkg
