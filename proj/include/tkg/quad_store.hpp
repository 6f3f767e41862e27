#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "tkg/term.hpp"

namespace tkg {

enum class Provenance : unsigned char { Explicit, Inferred };

/// In-memory quad store with named graphs.
///
/// Set semantics: every quad is stored once, flagged explicit or inferred.
/// An explicit insertion of a quad that is currently inferred upgrades its flag.
/// Individual calls are atomic: concurrent readers are allowed, writers are
/// exclusive. Multi-call write sequences (ingestion) additionally take
/// `writer_gate()` so that they do not interleave.
class QuadStore {
public:
    QuadStore() = default;
    QuadStore(const QuadStore& other);
    QuadStore& operator=(const QuadStore& other);

    /// Inserts `quads`; returns how many were not present before.
    /// All quads are checked first; a malformed one rejects the whole call
    /// with an InvalidArgument naming its index.
    std::size_t add_quads(std::span<const Quad> quads, Provenance provenance = Provenance::Explicit);
    bool add(const Quad& quad, Provenance provenance = Provenance::Explicit);

    /// Removes the given quads; returns how many were present.
    std::size_t remove_quads(std::span<const Quad> quads);

    /// Quads matching all bound positions, in a deterministic index order.
    std::vector<Quad> match(const QuadPattern& pattern) const;
    std::vector<std::pair<Quad, Provenance>> match_with_provenance(const QuadPattern& pattern) const;

    bool contains(const Quad& quad) const;
    std::optional<Provenance> provenance(const Quad& quad) const;

    std::size_t size() const;
    std::size_t explicit_count() const;
    std::size_t inferred_count() const;

    /// Distinct graph labels in use, sorted.
    std::vector<Term> graphs() const;

    /// Serializes compound write sequences across callers.
    std::unique_lock<std::mutex> writer_gate() const { return std::unique_lock(gate_); }

private:
    using Id = std::uint32_t;
    using Key = std::array<Id, 4>;  // subject, predicate, object, graph

    enum class Order { Spog, Posg, Ospg, Gspo };

    Id intern(const Term& t);
    std::optional<Id> lookup(const Term& t) const;
    Quad decode(const Key& k) const;
    bool insert_locked(const Key& k, Provenance provenance);
    bool erase_locked(const Key& k);
    template <class Fn>
    void scan_locked(const QuadPattern& pattern, Fn&& fn) const;

    static Key permute(const Key& k, Order order);
    static Key unpermute(const Key& k, Order order);

    std::vector<Term> terms_;
    std::unordered_map<Term, Id, TermHash> ids_;
    std::map<Key, Provenance> quads_;  // SPOG order
    std::set<Key> posg_;
    std::set<Key> ospg_;
    std::set<Key> gspo_;
    std::size_t explicit_ = 0;
    std::size_t inferred_ = 0;

    mutable std::shared_mutex mutex_;
    mutable std::mutex gate_;
};

}  // namespace tkg
