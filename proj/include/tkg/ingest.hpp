#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tkg/crawler.hpp"
#include "tkg/date.hpp"
#include "tkg/domain_spec.hpp"
#include "tkg/inference.hpp"
#include "tkg/quad_store.hpp"

namespace tkg::ingest {

struct SnapshotId {
    std::string source;
    Date date;

    /// `urn:snapshot:<source>:<YYYY-MM-DD>`
    std::string graph_iri() const;
    Term graph() const { return Term::iri(graph_iri()); }
};

struct Rejection {
    std::size_t index = 0;
    std::string document_id;
    std::string reason;
};

struct IngestReport {
    std::string source;
    std::vector<std::string> graphs;
    std::size_t documents_received = 0;
    std::vector<Rejection> rejected;
    std::size_t quads_written = 0;
    std::size_t duplicates_suppressed = 0;
    std::size_t entities_consolidated = 0;
    std::size_t inferred_added = 0;

    std::size_t documents_accepted() const { return documents_received - rejected.size(); }
    nlohmann::json to_json() const;
};

struct IngestOptions {
    const ds::DomainSpecification* ds = nullptr;  // validate before conversion when set
    bool consolidate = true;
    bool infer = true;
    ClassHierarchy hierarchy = Vocabulary::schema_org().hierarchy();
};

/// Converts documents into `graph`. Rejected documents are itemized; quads
/// outside `graph` are never touched. Subjects already merged away in the
/// graph are mapped onto their canonical subject before insertion, so
/// re-ingesting the same documents writes nothing.
IngestReport ingest_documents(QuadStore& store, const std::vector<nlohmann::json>& docs, const Term& graph,
                              const IngestOptions& options = {});

IngestReport ingest_snapshot(QuadStore& store, const std::vector<nlohmann::json>& docs, const SnapshotId& snapshot,
                             const IngestOptions& options = {});

/// Merges subjects of `graph` sharing normalized name and postal code.
/// The smallest subject IRI wins; the others' statements move onto it and
/// `winner owl:sameAs loser` is recorded. Returns the number of merged pairs.
std::size_t consolidate_entities(QuadStore& store, const Term& graph);

struct MigrationSource {
    enum class Kind { Documents, Crawl };
    std::string id;
    Kind kind = Kind::Documents;
    std::vector<nlohmann::json> documents;
    std::optional<ds::DomainSpecification> ds;
    std::optional<crawl::CrawlJob> crawl;  // seeds and policy; the date comes from the migration
};

struct MigrationOutcome {
    std::vector<IngestReport> reports;  // source order
    std::vector<crawl::CrawlResult> crawls;  // one per crawl source, in order
};

/// One snapshot (or set of crawl graphs) per source, ingested in order, then
/// one inference pass over every touched graph.
MigrationOutcome migrate_daily(QuadStore& store, const std::vector<MigrationSource>& sources, Date date,
                               const ClassHierarchy& hierarchy = Vocabulary::schema_org().hierarchy());

}  // namespace tkg::ingest
