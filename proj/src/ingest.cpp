#include "tkg/ingest.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <set>

#include "tkg/jsonld.hpp"
#include "tkg/util.hpp"

namespace tkg::ingest {

namespace {

using json = nlohmann::json;

std::string doc_id(const json& doc, std::size_t index) {
    if (doc.is_object() && doc.contains("@id") && doc["@id"].is_string()) return doc["@id"].get<std::string>();
    return "#" + std::to_string(index);
}

std::string summarize(const ds::ValidationReport& report) {
    std::string out;
    for (const auto& f : report.errors) {
        if (!out.empty()) out += "; ";
        out += f.code + " at " + f.path;
    }
    return out;
}

// loser -> canonical subject, from `winner owl:sameAs loser` links in the graph.
std::map<Term, Term> merge_map(const QuadStore& store, const Term& graph) {
    QuadPattern p;
    p.predicate = Term::iri(std::string(vocab::kOwlSameAs));
    p.graph = graph;
    std::map<Term, Term> direct;
    for (const auto& q : store.match(p))
        if (q.object.kind() != Term::Kind::Literal) direct.emplace(q.object, q.subject);
    std::map<Term, Term> resolved;
    for (const auto& [loser, winner] : direct) {
        Term w = winner;
        for (std::size_t guard = 0; guard < direct.size(); ++guard) {
            auto it = direct.find(w);
            if (it == direct.end()) break;
            w = it->second;
        }
        resolved.emplace(loser, w);
    }
    return resolved;
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

std::size_t consolidate_locked(QuadStore& store, const Term& graph) {
    const Term name = Term::iri(vocab::schema("name"));
    const Term postal = Term::iri(vocab::schema("postalCode"));
    const Term address = Term::iri(vocab::schema("address"));

    auto values = [&](const Term& subject, const Term& predicate) {
        std::vector<std::string> out;
        QuadPattern p;
        p.subject = subject;
        p.predicate = predicate;
        p.graph = graph;
        for (const auto& q : store.match(p))
            if (q.object.kind() == Term::Kind::Literal) out.push_back(normalize_key(q.object.value()));
        return out;
    };

    QuadPattern named;
    named.predicate = name;
    named.graph = graph;
    std::vector<Term> subjects;
    for (const auto& q : store.match(named))
        if (subjects.empty() || subjects.back() != q.subject) subjects.push_back(q.subject);
    std::sort(subjects.begin(), subjects.end());
    subjects.erase(std::unique(subjects.begin(), subjects.end()), subjects.end());

    std::map<std::string, std::size_t> key_owner;
    UnionFind groups(subjects.size());
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        std::vector<std::string> codes = values(subjects[i], postal);
        QuadPattern ap;
        ap.subject = subjects[i];
        ap.predicate = address;
        ap.graph = graph;
        for (const auto& q : store.match(ap))
            if (q.object.kind() != Term::Kind::Literal)
                for (auto& c : values(q.object, postal)) codes.push_back(std::move(c));
        for (const auto& n : values(subjects[i], name)) {
            if (n.empty()) continue;
            for (const auto& c : codes) {
                if (c.empty()) continue;
                auto [it, inserted] = key_owner.emplace(n + '\x1f' + c, i);
                if (!inserted) groups.unite(i, it->second);
            }
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < subjects.size(); ++i) members[groups.find(i)].push_back(i);

    std::size_t merged = 0;
    const Term same_as = Term::iri(std::string(vocab::kOwlSameAs));
    for (const auto& [_, group] : members) {
        if (group.size() < 2) continue;
        std::size_t winner = group.front();
        for (std::size_t i : group)
            if (subjects[i].value() < subjects[winner].value()) winner = i;
        for (std::size_t i : group) {
            if (i == winner) continue;
            QuadPattern lp;
            lp.subject = subjects[i];
            lp.graph = graph;
            std::vector<Quad> old_explicit, new_explicit, old_inferred, new_inferred;
            for (const auto& [q, prov] : store.match_with_provenance(lp)) {
                Quad moved = q;
                moved.subject = subjects[winner];
                (prov == Provenance::Explicit ? old_explicit : old_inferred).push_back(q);
                (prov == Provenance::Explicit ? new_explicit : new_inferred).push_back(std::move(moved));
            }
            store.remove_quads(old_explicit);
            store.remove_quads(old_inferred);
            store.add_quads(new_explicit, Provenance::Explicit);
            store.add_quads(new_inferred, Provenance::Inferred);
            store.add(Quad{subjects[winner], same_as, subjects[i], graph});
            ++merged;
        }
    }
    return merged;
}

IngestReport ingest_locked(QuadStore& store, const std::vector<json>& docs, const Term& graph,
                           const IngestOptions& options) {
    IngestReport report;
    report.graphs.push_back(graph.value());
    report.documents_received = docs.size();

    std::vector<Quad> produced;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        try {
            jsonld::check_annotation(docs[i]);
            if (options.ds) {
                auto v = ds::validate(docs[i], *options.ds, Vocabulary::schema_org(), doc_id(docs[i], i));
                if (!v.valid()) {
                    report.rejected.push_back({i, doc_id(docs[i], i), "validation failed: " + summarize(v)});
                    continue;
                }
            }
            auto quads = jsonld::annotation_to_quads(docs[i], graph);
            produced.insert(produced.end(), std::make_move_iterator(quads.begin()),
                            std::make_move_iterator(quads.end()));
        } catch (const std::exception& e) {
            report.rejected.push_back({i, doc_id(docs[i], i), e.what()});
        }
    }

    const auto merges = merge_map(store, graph);
    if (!merges.empty())
        for (auto& q : produced)
            if (auto it = merges.find(q.subject); it != merges.end()) q.subject = it->second;

    // Duplicates count both within this batch and against the store.
    const std::size_t before = store.explicit_count();
    store.add_quads(produced, Provenance::Explicit);
    report.quads_written = store.explicit_count() - before;
    report.duplicates_suppressed = produced.size() - report.quads_written;

    if (options.consolidate) report.entities_consolidated = consolidate_locked(store, graph);
    if (options.infer) report.inferred_added = rdfs_closure(store, options.hierarchy, graph);
    return report;
}

}  // namespace

std::string SnapshotId::graph_iri() const { return "urn:snapshot:" + source + ":" + date.to_string(); }

json IngestReport::to_json() const {
    json rej = json::array();
    for (const auto& r : rejected) rej.push_back({{"index", r.index}, {"documentId", r.document_id}, {"reason", r.reason}});
    return {{"source", source},
            {"graphs", graphs},
            {"documentsReceived", documents_received},
            {"documentsRejected", rejected.size()},
            {"rejections", rej},
            {"quadsWritten", quads_written},
            {"duplicatesSuppressed", duplicates_suppressed},
            {"entitiesConsolidated", entities_consolidated},
            {"inferredAdded", inferred_added}};
}

IngestReport ingest_documents(QuadStore& store, const std::vector<json>& docs, const Term& graph,
                              const IngestOptions& options) {
    auto gate = store.writer_gate();
    return ingest_locked(store, docs, graph, options);
}

IngestReport ingest_snapshot(QuadStore& store, const std::vector<json>& docs, const SnapshotId& snapshot,
                             const IngestOptions& options) {
    IngestReport report = ingest_documents(store, docs, snapshot.graph(), options);
    report.source = snapshot.source;
    return report;
}

std::size_t consolidate_entities(QuadStore& store, const Term& graph) {
    auto gate = store.writer_gate();
    return consolidate_locked(store, graph);
}

MigrationOutcome migrate_daily(QuadStore& store, const std::vector<MigrationSource>& sources, Date date,
                               const ClassHierarchy& hierarchy) {
    MigrationOutcome outcome;
    std::vector<std::pair<Term, std::size_t>> touched;  // graph, owning report

    for (const auto& source : sources) {
        IngestOptions options;
        options.infer = false;
        options.ds = source.ds ? &*source.ds : nullptr;

        IngestReport report;
        report.source = source.id;
        if (source.kind == MigrationSource::Kind::Documents) {
            const SnapshotId snapshot{source.id, date};
            report = ingest_snapshot(store, source.documents, snapshot, options);
            touched.emplace_back(snapshot.graph(), outcome.reports.size());
        } else {
            if (!source.crawl) throw InvalidArgument("crawl source '" + source.id + "' has no crawl job");
            crawl::CrawlJob job = *source.crawl;
            job.crawl_date = date;
            std::mutex collected_mutex;
            std::map<std::string, std::vector<json>> collected;
            auto result = crawl::run_crawl(job, [&](const json& doc, const std::string& graph) {
                std::lock_guard lock(collected_mutex);
                collected[graph].push_back(doc);
            });
            for (const auto& site : result.sites) {
                auto part = ingest_documents(store, collected[site.graph_iri], Term::iri(site.graph_iri), options);
                report.graphs.push_back(site.graph_iri);
                report.documents_received += part.documents_received;
                for (auto& r : part.rejected) {
                    r.index += report.documents_received - part.documents_received;
                    report.rejected.push_back(std::move(r));
                }
                report.quads_written += part.quads_written;
                report.duplicates_suppressed += part.duplicates_suppressed;
                report.entities_consolidated += part.entities_consolidated;
                touched.emplace_back(Term::iri(site.graph_iri), outcome.reports.size());
            }
            outcome.crawls.push_back(std::move(result));
        }
        outcome.reports.push_back(std::move(report));
    }

    auto gate = store.writer_gate();
    for (const auto& [graph, owner] : touched) outcome.reports[owner].inferred_added += rdfs_closure(store, hierarchy, graph);
    return outcome;
}

}  // namespace tkg::ingest
