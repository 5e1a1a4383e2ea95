#pragma once

#include "feedql/capabilities.hpp"
#include "feedql/eval.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace feedql {

/// A collection member: the feed-visible entry plus fields only the
/// collection can query (x: selectors).
struct Member {
    Entry entry;
    HiddenFields hidden;
};

struct FeedMeta {
    std::string id;
    std::string title;
    std::vector<Person> authors;
    Timestamp updated; // used when the collection is empty
};

/// Immutable-by-convention member store. Members keep their arrival slot
/// across updates; archives are cut from arrival order.
class Collection {
public:
    Collection(std::string name, FeedMeta meta, std::size_t page_size, std::size_t archive_size);

    const std::string& name() const { return name_; }
    const FeedMeta& meta() const { return meta_; }
    std::size_t page_size() const { return page_size_; }
    std::size_t archive_size() const { return archive_size_; }
    std::size_t size() const { return members_.size(); }

    /// Route prefix used for self/next/archive hrefs; "/feeds/<name>" by default.
    const std::string& base_href() const { return base_href_; }
    void set_base_href(std::string href) { base_href_ = std::move(href); }

    const Member* find(const std::string& id) const;

    /// Updated descending, ties by id ascending.
    std::vector<const Member*> by_recency() const;
    std::vector<const Member*> by_arrival() const;

    /// Union of hidden field names over all members, sorted.
    std::vector<std::string> hidden_field_names() const;

    friend Collection upsert_member(Collection c, Member m);

private:
    struct Slot {
        Member member;
        std::uint64_t arrival = 0;
    };

    std::string name_;
    FeedMeta meta_;
    std::size_t page_size_;
    std::size_t archive_size_;
    std::string base_href_;
    std::map<std::string, Slot> members_;
    std::uint64_t next_arrival_ = 0;
};

/// Inserts, or replaces the member with the same id when the incoming entry
/// is at least as new. Older incoming entries raise StaleUpdate.
Collection upsert_member(Collection c, Member m);

Feed current_feed(const Collection& c);
Feed paged_feed(const Collection& c, long long page);

std::size_t archive_count(const Collection& c);
bool archive_is_full(const Collection& c, long long index);
Feed archived_feed(const Collection& c, long long index);

/// Every member as an entry, updated descending.
Feed all_members_feed(const Collection& c);

/// eval_query over all members with x: predicates bound to hidden fields.
/// `declared` lists capabilities that may name hidden fields no member has.
Feed collection_query(const Collection& c, const Query& q, const EvalContext& ctx = {},
    const Capabilities* declared = nullptr);

/// Capability document for a collection's query endpoint.
Capabilities collection_capabilities(const Collection& c, Tier tier);

/// `id TAB field TAB value` lines, arrival order then field name.
std::string serialize_hidden(const Collection& c);

struct HiddenRecord {
    std::string id;
    std::string field;
    std::string value;
};

std::vector<HiddenRecord> parse_hidden(std::string_view text);

/// Reads `<name>.atom` and the optional hidden sidecar. Entries arrive in
/// document order.
Collection load_collection(const std::string& name, const std::filesystem::path& atom_path,
    const std::filesystem::path& hidden_path, std::size_t page_size, std::size_t archive_size);

/// Writes `<dir>/<name>.atom` and `<dir>/<name>.hidden.tsv`.
void save_collection(const Collection& c, const std::filesystem::path& dir);

/// Snapshot holder: readers take a consistent state, one writer at a time.
class CollectionStore {
public:
    explicit CollectionStore(Collection initial);

    std::shared_ptr<const Collection> snapshot() const;
    void upsert(Member m);

private:
    mutable std::mutex read_mutex_;
    std::mutex write_mutex_;
    std::shared_ptr<const Collection> current_;
};

} // namespace feedql
