#include "tkg/quad_store.hpp"

#include <algorithm>

#include "tkg/error.hpp"

namespace tkg {

QuadStore::QuadStore(const QuadStore& other) {
    std::shared_lock lock(other.mutex_);
    terms_ = other.terms_;
    ids_ = other.ids_;
    quads_ = other.quads_;
    posg_ = other.posg_;
    ospg_ = other.ospg_;
    gspo_ = other.gspo_;
    explicit_ = other.explicit_;
    inferred_ = other.inferred_;
}

QuadStore& QuadStore::operator=(const QuadStore& other) {
    if (this == &other) return *this;
    QuadStore copy(other);
    std::unique_lock lock(mutex_);
    terms_ = std::move(copy.terms_);
    ids_ = std::move(copy.ids_);
    quads_ = std::move(copy.quads_);
    posg_ = std::move(copy.posg_);
    ospg_ = std::move(copy.ospg_);
    gspo_ = std::move(copy.gspo_);
    explicit_ = copy.explicit_;
    inferred_ = copy.inferred_;
    return *this;
}

QuadStore::Key QuadStore::permute(const Key& k, Order order) {
    switch (order) {
        case Order::Spog: return k;
        case Order::Posg: return {k[1], k[2], k[0], k[3]};
        case Order::Ospg: return {k[2], k[0], k[1], k[3]};
        case Order::Gspo: return {k[3], k[0], k[1], k[2]};
    }
    return k;
}

QuadStore::Key QuadStore::unpermute(const Key& k, Order order) {
    switch (order) {
        case Order::Spog: return k;
        case Order::Posg: return {k[2], k[0], k[1], k[3]};
        case Order::Ospg: return {k[1], k[2], k[0], k[3]};
        case Order::Gspo: return {k[1], k[2], k[3], k[0]};
    }
    return k;
}

QuadStore::Id QuadStore::intern(const Term& t) {
    if (auto it = ids_.find(t); it != ids_.end()) return it->second;
    const auto id = static_cast<Id>(terms_.size());
    terms_.push_back(t);
    ids_.emplace(t, id);
    return id;
}

std::optional<QuadStore::Id> QuadStore::lookup(const Term& t) const {
    if (auto it = ids_.find(t); it != ids_.end()) return it->second;
    return std::nullopt;
}

Quad QuadStore::decode(const Key& k) const { return Quad{terms_[k[0]], terms_[k[1]], terms_[k[2]], terms_[k[3]]}; }

bool QuadStore::insert_locked(const Key& k, Provenance provenance) {
    auto [it, inserted] = quads_.emplace(k, provenance);
    if (!inserted) {
        if (it->second == Provenance::Inferred && provenance == Provenance::Explicit) {
            it->second = Provenance::Explicit;
            --inferred_;
            ++explicit_;
        }
        return false;
    }
    posg_.insert(permute(k, Order::Posg));
    ospg_.insert(permute(k, Order::Ospg));
    gspo_.insert(permute(k, Order::Gspo));
    (provenance == Provenance::Explicit ? explicit_ : inferred_)++;
    return true;
}

bool QuadStore::erase_locked(const Key& k) {
    auto it = quads_.find(k);
    if (it == quads_.end()) return false;
    (it->second == Provenance::Explicit ? explicit_ : inferred_)--;
    quads_.erase(it);
    posg_.erase(permute(k, Order::Posg));
    ospg_.erase(permute(k, Order::Ospg));
    gspo_.erase(permute(k, Order::Gspo));
    return true;
}

std::size_t QuadStore::add_quads(std::span<const Quad> quads, Provenance provenance) {
    for (std::size_t i = 0; i < quads.size(); ++i) {
        try {
            quads[i].check();
        } catch (const InvalidArgument& e) {
            throw InvalidArgument("malformed quad at index " + std::to_string(i) + ": " + e.what());
        }
    }
    std::unique_lock lock(mutex_);
    std::size_t added = 0;
    for (const auto& q : quads) {
        const Key k{intern(q.subject), intern(q.predicate), intern(q.object), intern(q.graph)};
        added += insert_locked(k, provenance);
    }
    return added;
}

bool QuadStore::add(const Quad& quad, Provenance provenance) {
    return add_quads(std::span(&quad, 1), provenance) == 1;
}

std::size_t QuadStore::remove_quads(std::span<const Quad> quads) {
    std::unique_lock lock(mutex_);
    std::size_t removed = 0;
    for (const auto& q : quads) {
        auto s = lookup(q.subject), p = lookup(q.predicate), o = lookup(q.object), g = lookup(q.graph);
        if (s && p && o && g) removed += erase_locked({*s, *p, *o, *g});
    }
    return removed;
}

template <class Fn>
void QuadStore::scan_locked(const QuadPattern& pattern, Fn&& fn) const {
    std::array<std::optional<Id>, 4> bound;
    const std::optional<Term>* positions[4] = {&pattern.subject, &pattern.predicate, &pattern.object,
                                               &pattern.graph};
    for (int i = 0; i < 4; ++i) {
        if (*positions[i]) {
            bound[i] = lookup(**positions[i]);
            if (!bound[i]) return;  // term never seen: nothing can match
        }
    }

    // Pick the permutation with the longest bound prefix.
    Order best = Order::Spog;
    std::size_t best_len = 0;
    for (Order order : {Order::Spog, Order::Posg, Order::Ospg, Order::Gspo}) {
        const Key idx = permute({0, 1, 2, 3}, order);
        std::size_t len = 0;
        while (len < 4 && bound[idx[len]]) ++len;
        if (len > best_len) {
            best_len = len;
            best = order;
        }
    }

    const Key positions_in_order = permute({0, 1, 2, 3}, best);
    Key low{0, 0, 0, 0};
    for (std::size_t i = 0; i < best_len; ++i) low[i] = *bound[positions_in_order[i]];

    auto prefix_matches = [&](const Key& pk) {
        for (std::size_t i = 0; i < best_len; ++i)
            if (pk[i] != low[i]) return false;
        return true;
    };
    auto rest_matches = [&](const Key& k) {
        for (int i = 0; i < 4; ++i)
            if (bound[i] && k[i] != *bound[i]) return false;
        return true;
    };

    if (best == Order::Spog) {
        for (auto it = quads_.lower_bound(low); it != quads_.end() && prefix_matches(it->first); ++it)
            if (rest_matches(it->first)) fn(it->first, it->second);
        return;
    }
    const std::set<Key>& index = best == Order::Posg ? posg_ : best == Order::Ospg ? ospg_ : gspo_;
    for (auto it = index.lower_bound(low); it != index.end() && prefix_matches(*it); ++it) {
        const Key k = unpermute(*it, best);
        if (rest_matches(k)) fn(k, quads_.at(k));
    }
}

std::vector<Quad> QuadStore::match(const QuadPattern& pattern) const {
    std::shared_lock lock(mutex_);
    std::vector<Quad> out;
    scan_locked(pattern, [&](const Key& k, Provenance) { out.push_back(decode(k)); });
    return out;
}

std::vector<std::pair<Quad, Provenance>> QuadStore::match_with_provenance(const QuadPattern& pattern) const {
    std::shared_lock lock(mutex_);
    std::vector<std::pair<Quad, Provenance>> out;
    scan_locked(pattern, [&](const Key& k, Provenance p) { out.emplace_back(decode(k), p); });
    return out;
}

bool QuadStore::contains(const Quad& quad) const { return provenance(quad).has_value(); }

std::optional<Provenance> QuadStore::provenance(const Quad& quad) const {
    std::shared_lock lock(mutex_);
    auto s = lookup(quad.subject), p = lookup(quad.predicate), o = lookup(quad.object), g = lookup(quad.graph);
    if (!(s && p && o && g)) return std::nullopt;
    if (auto it = quads_.find({*s, *p, *o, *g}); it != quads_.end()) return it->second;
    return std::nullopt;
}

std::size_t QuadStore::size() const {
    std::shared_lock lock(mutex_);
    return quads_.size();
}

std::size_t QuadStore::explicit_count() const {
    std::shared_lock lock(mutex_);
    return explicit_;
}

std::size_t QuadStore::inferred_count() const {
    std::shared_lock lock(mutex_);
    return inferred_;
}

std::vector<Term> QuadStore::graphs() const {
    std::shared_lock lock(mutex_);
    std::vector<Term> out;
    std::optional<Id> last;
    for (const auto& k : gspo_) {
        if (last != k[0]) {
            out.push_back(terms_[k[0]]);
            last = k[0];
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace tkg
