#include "feedql/collection.hpp"

#include "feedql/error.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace feedql {

Collection::Collection(std::string name, FeedMeta meta, std::size_t page_size, std::size_t archive_size)
    : name_(std::move(name))
    , meta_(std::move(meta))
    , page_size_(page_size)
    , archive_size_(archive_size)
    , base_href_("/feeds/" + name_)
{
    if (page_size_ < 1 || archive_size_ < 1)
        throw Error(ErrorCode::InvariantViolation, "page_size and archive_size must be >= 1");
}

const Member* Collection::find(const std::string& id) const
{
    auto it = members_.find(id);
    return it == members_.end() ? nullptr : &it->second.member;
}

std::vector<const Member*> Collection::by_recency() const
{
    std::vector<const Member*> out;
    for (const auto& [id, slot] : members_)
        out.push_back(&slot.member);
    // members_ iterates in id order, so a stable sort leaves ties by id.
    std::stable_sort(out.begin(), out.end(),
        [](const Member* a, const Member* b) { return a->entry.updated > b->entry.updated; });
    return out;
}

std::vector<const Member*> Collection::by_arrival() const
{
    std::vector<const Slot*> slots;
    for (const auto& [id, slot] : members_)
        slots.push_back(&slot);
    std::sort(slots.begin(), slots.end(), [](const Slot* a, const Slot* b) { return a->arrival < b->arrival; });
    std::vector<const Member*> out;
    for (const auto* s : slots)
        out.push_back(&s->member);
    return out;
}

std::vector<std::string> Collection::hidden_field_names() const
{
    std::set<std::string> names;
    for (const auto& [id, slot] : members_)
        for (const auto& [field, value] : slot.member.hidden)
            names.insert(field);
    return {names.begin(), names.end()};
}

Collection upsert_member(Collection c, Member m)
{
    if (m.entry.id.empty())
        throw Error(ErrorCode::InvariantViolation, "member entry.id is empty");
    if (m.entry.title.empty())
        throw Error(ErrorCode::InvariantViolation, "member '" + m.entry.id + "' has an empty title");
    for (const auto& [field, value] : m.hidden)
        if (field.empty())
            throw Error(ErrorCode::InvariantViolation, "member '" + m.entry.id + "' has an empty hidden field name");

    auto it = c.members_.find(m.entry.id);
    if (it == c.members_.end()) {
        std::string id = m.entry.id;
        c.members_.emplace(std::move(id), Collection::Slot{std::move(m), c.next_arrival_++});
        return c;
    }
    if (m.entry.updated < it->second.member.entry.updated)
        throw Error(ErrorCode::StaleUpdate, "'" + m.entry.id + "' updated " + m.entry.updated.to_string()
                + " is older than stored " + it->second.member.entry.updated.to_string());
    it->second.member = std::move(m);
    return c;
}

namespace {

Feed feed_shell(const Collection& c, const std::vector<const Member*>& members)
{
    Feed f;
    f.id = c.meta().id;
    f.title = c.meta().title;
    f.authors = c.meta().authors;
    f.updated = c.meta().updated;
    for (const auto* m : members) {
        f.entries.push_back(m->entry);
        if (f.entries.size() == 1 || m->entry.updated > f.updated)
            f.updated = m->entry.updated;
    }
    return f;
}

std::string page_href(const Collection& c, long long page) { return c.base_href() + "?page=" + std::to_string(page); }

std::string archive_href(const Collection& c, long long index)
{
    return c.base_href() + "/archive/" + std::to_string(index);
}

} // namespace

Feed current_feed(const Collection& c)
{
    auto members = c.by_recency();
    if (members.size() > c.page_size())
        members.resize(c.page_size());
    Feed f = feed_shell(c, members);
    f.links.push_back({c.base_href(), "self", std::nullopt});
    if (auto n = archive_count(c); n > 0)
        f.links.push_back({archive_href(c, static_cast<long long>(n)), "prev-archive", std::nullopt});
    return f;
}

Feed paged_feed(const Collection& c, long long page)
{
    const auto members = c.by_recency();
    const long long page_size = static_cast<long long>(c.page_size());
    const long long total = static_cast<long long>(members.size());
    const long long last_page = std::max<long long>(1, (total + page_size - 1) / page_size);
    if (page < 1 || page > last_page)
        throw Error(ErrorCode::PageOutOfRange,
            "page " + std::to_string(page) + " of " + std::to_string(last_page) + " in '" + c.name() + "'");

    auto first = members.begin() + std::min(total, (page - 1) * page_size);
    auto last = members.begin() + std::min(total, page * page_size);
    Feed f = feed_shell(c, {first, last});
    f.links.push_back({page_href(c, page), "self", std::nullopt});
    if (page < last_page)
        f.links.push_back({page_href(c, page + 1), "next", std::nullopt});
    if (page > 1)
        f.links.push_back({page_href(c, page - 1), "previous", std::nullopt});
    return f;
}

std::size_t archive_count(const Collection& c) { return (c.size() + c.archive_size() - 1) / c.archive_size(); }

bool archive_is_full(const Collection& c, long long index)
{
    return index >= 1 && static_cast<std::size_t>(index) * c.archive_size() <= c.size();
}

Feed archived_feed(const Collection& c, long long index)
{
    const auto count = static_cast<long long>(archive_count(c));
    if (index < 1 || index > count)
        throw Error(ErrorCode::ArchiveOutOfRange,
            "archive " + std::to_string(index) + " of " + std::to_string(count) + " in '" + c.name() + "'");

    auto arrival = c.by_arrival();
    const std::size_t begin = static_cast<std::size_t>(index - 1) * c.archive_size();
    const std::size_t end = std::min(arrival.size(), begin + c.archive_size());
    std::vector<const Member*> block(arrival.begin() + static_cast<std::ptrdiff_t>(begin),
        arrival.begin() + static_cast<std::ptrdiff_t>(end));
    std::stable_sort(block.begin(), block.end(), [](const Member* a, const Member* b) {
        if (a->entry.updated != b->entry.updated)
            return a->entry.updated < b->entry.updated;
        return a->entry.id < b->entry.id;
    });

    Feed f = feed_shell(c, block);
    f.links.push_back({archive_href(c, index), "self", std::nullopt});
    f.links.push_back({c.base_href(), "current", std::nullopt});
    if (index > 1)
        f.links.push_back({archive_href(c, index - 1), "prev-archive", std::nullopt});
    // Fixed at the moment the archive fills, so its bytes never change again.
    if (archive_is_full(c, index))
        f.links.push_back({archive_href(c, index + 1), "next-archive", std::nullopt});
    return f;
}

Feed all_members_feed(const Collection& c) { return feed_shell(c, c.by_recency()); }

Feed collection_query(const Collection& c, const Query& q, const EvalContext& ctx, const Capabilities* declared)
{
    if (q.has_cooccur())
        throw Error(ErrorCode::CrossFeedFnHere, "cooccur is a cross-feed function; collections answer single-feed queries");

    const auto members = c.by_recency();
    const auto known = c.hidden_field_names();
    auto check_hidden = [&](const Selector& s) {
        if (!s.is_collection_scoped())
            return;
        if (std::binary_search(known.begin(), known.end(), s.path))
            return;
        if (declared && declared->supports_selector(s))
            return;
        throw Error(ErrorCode::UnknownHiddenField, "x:" + s.path + " in collection '" + c.name() + "'");
    };
    if (q.filter)
        q.filter->for_each_predicate([&](const Predicate& p) { check_hidden(p.selector); });
    if (q.shaping.group_by)
        check_hidden(*q.shaping.group_by);

    Feed all = feed_shell(c, members);
    std::vector<HiddenFields> hidden;
    hidden.reserve(members.size());
    for (const auto* m : members)
        hidden.push_back(m->hidden);
    return eval_query(q, all, ctx, hidden);
}

Capabilities collection_capabilities(const Collection& c, Tier tier)
{
    Capabilities caps = full_capabilities(c.hidden_field_names(), false);
    caps.tier = tier;
    return caps;
}

std::string serialize_hidden(const Collection& c)
{
    std::string out;
    for (const auto* m : c.by_arrival()) {
        for (const auto& [field, value] : m->hidden) {
            for (const auto* part : {&m->entry.id, &field, &value})
                if (part->find_first_of("\t\n") != std::string::npos)
                    throw Error(ErrorCode::BadStore,
                        "hidden field '" + field + "' of '" + m->entry.id + "' contains a TAB or LF");
            out += m->entry.id;
            out += '\t';
            out += field;
            out += '\t';
            out += value;
            out += '\n';
        }
    }
    return out;
}

std::vector<HiddenRecord> parse_hidden(std::string_view text)
{
    std::vector<HiddenRecord> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        ++line_no;
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        if (line.empty())
            continue;
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos)
            throw Error(ErrorCode::BadStore, "line " + std::to_string(line_no) + ": expected id<TAB>field<TAB>value");
        HiddenRecord r{std::string(line.substr(0, t1)), std::string(line.substr(t1 + 1, t2 - t1 - 1)),
            std::string(line.substr(t2 + 1))};
        if (r.id.empty() || r.field.empty())
            throw Error(ErrorCode::BadStore, "line " + std::to_string(line_no) + ": empty id or field");
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::BadStore, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << data))
        throw Error(ErrorCode::BadStore, "cannot write " + path.string());
}

} // namespace

Collection load_collection(const std::string& name, const std::filesystem::path& atom_path,
    const std::filesystem::path& hidden_path, std::size_t page_size, std::size_t archive_size)
{
    Feed feed = parse_feed(read_file(atom_path));
    Collection c(name, FeedMeta{feed.id, feed.title, feed.authors, feed.updated}, page_size, archive_size);

    std::map<std::string, HiddenFields> hidden;
    if (!hidden_path.empty()) {
        for (auto& r : parse_hidden(read_file(hidden_path)))
            hidden[r.id][r.field] = std::move(r.value);
    }
    for (auto& e : feed.entries) {
        Member m{std::move(e), {}};
        if (auto it = hidden.find(m.entry.id); it != hidden.end()) {
            m.hidden = std::move(it->second);
            hidden.erase(it);
        }
        c = upsert_member(std::move(c), std::move(m));
    }
    if (!hidden.empty())
        throw Error(ErrorCode::BadStore,
            hidden_path.string() + " names entry '" + hidden.begin()->first + "' which is not in " + atom_path.string());
    return c;
}

void save_collection(const Collection& c, const std::filesystem::path& dir)
{
    Feed f = feed_shell(c, c.by_arrival());
    auto hidden = serialize_hidden(c);
    write_file(dir / (c.name() + ".atom"), serialize_feed(f));
    write_file(dir / (c.name() + ".hidden.tsv"), hidden);
}

CollectionStore::CollectionStore(Collection initial)
    : current_(std::make_shared<const Collection>(std::move(initial)))
{
}

std::shared_ptr<const Collection> CollectionStore::snapshot() const
{
    std::lock_guard lock(read_mutex_);
    return current_;
}

void CollectionStore::upsert(Member m)
{
    std::lock_guard writer(write_mutex_);
    auto next = std::make_shared<const Collection>(upsert_member(*snapshot(), std::move(m)));
    std::lock_guard lock(read_mutex_);
    current_ = std::move(next);
}

} // namespace feedql
