#include "tkg/inference.hpp"

#include <map>
#include <vector>

namespace tkg {

namespace {

using Edges = std::map<std::string, std::vector<std::string>>;

Edges index(const std::set<std::pair<std::string, std::string>>& pairs) {
    Edges out;
    for (const auto& [from, to] : pairs) out[from].push_back(to);
    return out;
}

const std::vector<std::string>* find(const Edges& e, const std::string& key) {
    auto it = e.find(key);
    return it == e.end() ? nullptr : &it->second;
}

}  // namespace

std::size_t rdfs_closure(QuadStore& store, const ClassHierarchy& hierarchy, const std::optional<Term>& graph) {
    if (hierarchy.empty()) return 0;

    const Edges super_class = index(hierarchy.subclass_of);
    const Edges super_prop = index(hierarchy.subproperty_of);
    const Edges domains = index(hierarchy.domain);
    const Edges ranges = index(hierarchy.range);
    const Term rdf_type = Term::iri(std::string(vocab::kRdfType));

    QuadPattern scope;
    scope.graph = graph;
    std::vector<Quad> work = store.match(scope);
    std::size_t added = 0;

    auto derive = [&](Quad q) {
        if (store.contains(q)) return;
        store.add(q, Provenance::Inferred);
        ++added;
        work.push_back(std::move(q));
    };

    // Semi-naive: every quad (premise or conclusion) passes through the
    // worklist once, and every rule has a single store premise.
    while (!work.empty()) {
        const Quad q = std::move(work.back());
        work.pop_back();
        const std::string& p = q.predicate.value();

        if (q.predicate == rdf_type && !q.object.is_literal()) {
            if (auto* supers = find(super_class, q.object.value()))
                for (const auto& d : *supers) derive({q.subject, rdf_type, Term::iri(d), q.graph});
        }
        if (auto* supers = find(super_prop, p))
            for (const auto& sp : *supers) derive({q.subject, Term::iri(sp), q.object, q.graph});
        if (auto* cs = find(domains, p))
            for (const auto& c : *cs) derive({q.subject, rdf_type, Term::iri(c), q.graph});
        if (!q.object.is_literal()) {
            if (auto* cs = find(ranges, p))
                for (const auto& c : *cs) derive({q.object, rdf_type, Term::iri(c), q.graph});
        }
    }
    return added;
}

}  // namespace tkg
