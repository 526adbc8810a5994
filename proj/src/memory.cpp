#include "agentos/memory.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "agentos/error.hpp"
#include "agentos/util.hpp"

namespace agentos {

using nlohmann::json;

Embedding embed(std::string_view text, std::size_t dim) {
    Embedding v(dim, 0.0);
    if (dim == 0) return v;
    for (const auto& token : tokenize(text)) {
        const std::uint64_t h = stable_hash64(token);
        const std::size_t index = static_cast<std::size_t>(h % dim);
        const bool negative = ((h / dim) & 1U) != 0;
        v[index] += negative ? -1.0 : 1.0;
    }
    const double norm = l2_norm(v);
    if (norm == 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        return v;
    }
    for (auto& x : v) x /= norm;
    return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = std::min(a.size(), b.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

double l2_norm(std::span<const double> v) {
    return std::sqrt(dot(v, v));
}

double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

std::string_view to_string(MemoryKind kind) {
    switch (kind) {
        case MemoryKind::Message: return "MESSAGE";
        case MemoryKind::Fact: return "FACT";
        case MemoryKind::Goal: return "GOAL";
        case MemoryKind::Reflection: return "REFLECTION";
    }
    return "MESSAGE";
}

std::optional<MemoryKind> memory_kind_from_string(std::string_view s) {
    if (s == "MESSAGE") return MemoryKind::Message;
    if (s == "FACT") return MemoryKind::Fact;
    if (s == "GOAL") return MemoryKind::Goal;
    if (s == "REFLECTION") return MemoryKind::Reflection;
    return std::nullopt;
}

std::string_view to_string(GoalStatus status) {
    switch (status) {
        case GoalStatus::InProgress: return "IN_PROGRESS";
        case GoalStatus::Done: return "DONE";
        case GoalStatus::Failed: return "FAILED";
    }
    return "IN_PROGRESS";
}

namespace {

GoalStatus goal_status_from_string(std::string_view s) {
    if (s == "DONE") return GoalStatus::Done;
    if (s == "FAILED") return GoalStatus::Failed;
    if (s == "IN_PROGRESS") return GoalStatus::InProgress;
    throw Error(ErrorCode::InvalidArgument, "unknown goal status: " + std::string(s));
}

bool all_completed(const Goal& g) {
    return std::all_of(g.objectives.begin(), g.objectives.end(),
                       [](const Objective& o) { return o.completed; });
}

} // namespace

json to_json(const Attachment& a) {
    return {{"id", a.id},         {"url", a.url},
            {"title", a.title},   {"source", a.source},
            {"description", a.description}, {"contentType", a.content_type}};
}

Attachment attachment_from_json(const json& j) {
    Attachment a;
    a.id = j.value("id", "");
    a.url = j.value("url", "");
    a.title = j.value("title", "");
    a.source = j.value("source", "");
    a.description = j.value("description", "");
    a.content_type = j.value("contentType", "");
    return a;
}

json to_json(const Content& c) {
    json attachments = json::array();
    for (const auto& a : c.attachments) attachments.push_back(to_json(a));
    return {{"text", c.text},
            {"action", c.action ? json(*c.action) : json(nullptr)},
            {"attachments", std::move(attachments)}};
}

Content content_from_json(const json& j) {
    Content c;
    c.text = j.value("text", "");
    if (auto it = j.find("action"); it != j.end() && it->is_string()) {
        c.action = it->get<std::string>();
    }
    if (auto it = j.find("attachments"); it != j.end() && it->is_array()) {
        for (const auto& a : *it) c.attachments.push_back(attachment_from_json(a));
    }
    return c;
}

json to_json(const MemoryRecord& r, bool include_embedding) {
    json j = {{"id", r.id},
              {"agentId", r.agent_id},
              {"userId", r.user_id},
              {"roomId", r.room_id},
              {"kind", std::string(to_string(r.kind))},
              {"content", to_json(r.content)},
              {"createdAt", r.created_at}};
    if (include_embedding) j["embedding"] = r.embedding;
    return j;
}

MemoryRecord memory_record_from_json(const json& j) {
    MemoryRecord r;
    r.id = j.at("id").get<std::string>();
    r.agent_id = j.at("agentId").get<std::string>();
    r.user_id = j.at("userId").get<std::string>();
    r.room_id = j.at("roomId").get<std::string>();
    auto kind = memory_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown memory kind");
    r.kind = *kind;
    r.content = content_from_json(j.at("content"));
    if (auto it = j.find("embedding"); it != j.end()) r.embedding = it->get<Embedding>();
    r.created_at = j.at("createdAt").get<Timestamp>();
    return r;
}

json to_json(const Goal& g) {
    json objectives = json::array();
    for (const auto& o : g.objectives) {
        objectives.push_back({{"description", o.description}, {"completed", o.completed}});
    }
    return {{"id", g.id},
            {"roomId", g.room_id},
            {"name", g.name},
            {"status", std::string(to_string(g.status))},
            {"objectives", std::move(objectives)}};
}

Goal goal_from_json(const json& j) {
    Goal g;
    g.id = j.at("id").get<std::string>();
    g.room_id = j.at("roomId").get<std::string>();
    g.name = j.at("name").get<std::string>();
    g.status = goal_status_from_string(j.at("status").get<std::string>());
    for (const auto& o : j.at("objectives")) {
        g.objectives.push_back({o.at("description").get<std::string>(), o.at("completed").get<bool>()});
    }
    return g;
}

json to_json(const Relationship& r) {
    return {{"userA", r.user_a},
            {"userB", r.user_b},
            {"strength", r.strength},
            {"lastInteraction", r.last_interaction}};
}

Relationship relationship_from_json(const json& j) {
    return {j.at("userA").get<std::string>(), j.at("userB").get<std::string>(),
            j.at("strength").get<double>(), j.at("lastInteraction").get<Timestamp>()};
}

// ---------------------------------------------------------------------------
// InMemoryAdapter

void InMemoryAdapter::validate_record(MemoryRecord& record) const {
    if (record.id.empty()) {
        throw Error(ErrorCode::InvalidArgument, "memory record id must not be empty");
    }
    if (by_id_.contains(record.id)) {
        throw Error(ErrorCode::DuplicateId, record.id);
    }
    if (record.embedding.empty()) {
        record.embedding = embed(record.content.text, dim_);
    }
    if (record.embedding.size() != dim_) {
        throw Error(ErrorCode::InvalidArgument,
                    "embedding has " + std::to_string(record.embedding.size()) + " dimensions, expected " +
                        std::to_string(dim_));
    }
    const double norm = l2_norm(record.embedding);
    if (norm != 0.0 && std::abs(norm - 1.0) > 1e-6) {
        throw Error(ErrorCode::InvalidArgument, "embedding must be unit length or zero");
    }
}

void InMemoryAdapter::store(MemoryRecord record) {
    std::unique_lock lock(mutex_);
    validate_record(record);
    journal(record);
    const std::size_t index = records_.size();
    by_id_.emplace(record.id, index);
    by_room_[record.room_id].push_back(index);
    records_.push_back(std::move(record));
}

void InMemoryAdapter::replay(MemoryRecord record) {
    std::unique_lock lock(mutex_);
    validate_record(record);
    const std::size_t index = records_.size();
    by_id_.emplace(record.id, index);
    by_room_[record.room_id].push_back(index);
    records_.push_back(std::move(record));
}

std::optional<MemoryRecord> InMemoryAdapter::get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return records_[it->second];
}

std::size_t InMemoryAdapter::count() const {
    std::shared_lock lock(mutex_);
    return records_.size();
}

std::vector<std::size_t> InMemoryAdapter::room_indices_sorted(const std::string& room_id,
                                                              std::optional<MemoryKind> kind) const {
    std::vector<std::size_t> out;
    auto it = by_room_.find(room_id);
    if (it == by_room_.end()) return out;
    for (auto i : it->second) {
        if (!kind || records_[i].kind == *kind) out.push_back(i);
    }
    // Indices are already in insertion order, so a stable sort on created_at
    // leaves ties in insertion order.
    std::stable_sort(out.begin(), out.end(), [this](std::size_t a, std::size_t b) {
        return records_[a].created_at < records_[b].created_at;
    });
    return out;
}

std::vector<MemoryRecord> InMemoryAdapter::recent(const std::string& room_id, std::size_t k) const {
    return room_records(room_id, k, MemoryKind::Message);
}

std::vector<MemoryRecord> InMemoryAdapter::room_records(const std::string& room_id, std::size_t k,
                                                        std::optional<MemoryKind> kind) const {
    std::shared_lock lock(mutex_);
    auto indices = room_indices_sorted(room_id, kind);
    const std::size_t start = indices.size() > k ? indices.size() - k : 0;
    std::vector<MemoryRecord> out;
    out.reserve(indices.size() - start);
    for (std::size_t i = start; i < indices.size(); ++i) out.push_back(records_[indices[i]]);
    return out;
}

std::vector<ScoredMemory> InMemoryAdapter::search_similar(std::span<const double> query,
                                                          std::size_t k, double min_similarity,
                                                          const MemoryFilter& filter) const {
    if (k == 0 || l2_norm(query) == 0.0) return {};

    std::shared_lock lock(mutex_);
    struct Hit {
        double score;
        std::size_t index;
    };
    std::vector<Hit> hits;
    hits.reserve(records_.size());
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& r = records_[i];
        if (filter.room_id && r.room_id != *filter.room_id) continue;
        if (filter.kind && r.kind != *filter.kind) continue;
        if (filter.exclude_id && r.id == *filter.exclude_id) continue;
        const double score = dot(query, r.embedding);
        if (score >= min_similarity) hits.push_back({score, i});
    }
    auto better = [this](const Hit& a, const Hit& b) {
        if (a.score != b.score) return a.score > b.score;
        const auto& ra = records_[a.index];
        const auto& rb = records_[b.index];
        if (ra.created_at != rb.created_at) return ra.created_at > rb.created_at;
        return a.index > b.index;
    };
    const std::size_t n = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), better);

    std::vector<ScoredMemory> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back({records_[hits[i].index], hits[i].score});
    return out;
}

Goal InMemoryAdapter::create_goal(Goal goal) {
    std::unique_lock lock(mutex_);
    if (goal.id.empty()) {
        do {
            goal.id = "goal-" + std::to_string(++next_goal_);
        } while (goals_.contains(goal.id));
    } else if (goals_.contains(goal.id)) {
        throw Error(ErrorCode::DuplicateId, goal.id);
    }
    if (goal.status == GoalStatus::Done && !all_completed(goal)) {
        throw Error(ErrorCode::InvalidArgument, "a DONE goal must have every objective completed");
    }
    if (goal.status == GoalStatus::InProgress && !goal.objectives.empty() && all_completed(goal)) {
        goal.status = GoalStatus::Done;
    }
    journal(goal);
    goals_[goal.id] = goal;
    return goal;
}

Goal InMemoryAdapter::update_objective(const std::string& goal_id, std::size_t index,
                                       bool completed) {
    std::unique_lock lock(mutex_);
    auto it = goals_.find(goal_id);
    if (it == goals_.end()) throw Error(ErrorCode::NotFound, "goal " + goal_id);
    Goal updated = it->second;
    if (index >= updated.objectives.size()) {
        throw Error(ErrorCode::ObjectiveIndexError,
                    "objective " + std::to_string(index) + " of goal " + goal_id + " (has " +
                        std::to_string(updated.objectives.size()) + ")");
    }
    updated.objectives[index].completed = completed;
    if (updated.status != GoalStatus::Failed) {
        updated.status = all_completed(updated) ? GoalStatus::Done : GoalStatus::InProgress;
    }
    journal(updated);
    it->second = updated;
    return updated;
}

void InMemoryAdapter::replay(Goal goal) {
    std::unique_lock lock(mutex_);
    goals_[goal.id] = std::move(goal);
}

std::optional<Goal> InMemoryAdapter::get_goal(const std::string& goal_id) const {
    std::shared_lock lock(mutex_);
    auto it = goals_.find(goal_id);
    if (it == goals_.end()) return std::nullopt;
    return it->second;
}

std::vector<Goal> InMemoryAdapter::goals(const std::string& room_id) const {
    std::shared_lock lock(mutex_);
    std::vector<Goal> out;
    for (const auto& [id, g] : goals_) {
        if (g.room_id == room_id) out.push_back(g);
    }
    return out;
}

Relationship InMemoryAdapter::upsert_relationship(const std::string& a, const std::string& b,
                                                  double delta, Timestamp now) {
    std::unique_lock lock(mutex_);
    PairKey key = a <= b ? PairKey{a, b} : PairKey{b, a};
    Relationship rel{key.first, key.second, 0.0, now};
    if (auto it = relationships_.find(key); it != relationships_.end()) rel = it->second;
    rel.strength = std::clamp(rel.strength + delta, 0.0, 1.0);
    rel.last_interaction = now;
    journal(rel);
    relationships_[key] = rel;
    return rel;
}

void InMemoryAdapter::replay(Relationship rel) {
    std::unique_lock lock(mutex_);
    PairKey key{rel.user_a, rel.user_b};
    relationships_[key] = std::move(rel);
}

std::optional<Relationship> InMemoryAdapter::get_relationship(const std::string& a,
                                                              const std::string& b) const {
    std::shared_lock lock(mutex_);
    PairKey key = a <= b ? PairKey{a, b} : PairKey{b, a};
    auto it = relationships_.find(key);
    if (it == relationships_.end()) return std::nullopt;
    return it->second;
}

std::string InMemoryAdapter::digest() const {
    std::shared_lock lock(mutex_);
    std::string canonical;
    for (const auto& r : records_) {
        canonical += to_json(r).dump();
        canonical += '\n';
    }
    canonical += "#goals\n";
    for (const auto& [id, g] : goals_) {
        canonical += to_json(g).dump();
        canonical += '\n';
    }
    canonical += "#relationships\n";
    for (const auto& [key, r] : relationships_) {
        canonical += to_json(r).dump();
        canonical += '\n';
    }
    return sha256_hex(canonical);
}

// ---------------------------------------------------------------------------
// FileAdapter

namespace {

template <typename Fn>
void read_lines(const std::filesystem::path& path, Fn&& fn) {
    if (!std::filesystem::exists(path)) return;
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::AdapterOpenFailure, "cannot read " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            fn(json::parse(line));
        } catch (const std::exception& e) {
            throw Error(ErrorCode::AdapterOpenFailure,
                        path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

std::filesystem::path sibling(const std::filesystem::path& p, const char* suffix) {
    return std::filesystem::path(p.string() + suffix);
}

} // namespace

FileAdapter::FileAdapter(std::filesystem::path path, std::size_t embedding_dim)
    : InMemoryAdapter(embedding_dim), path_(std::move(path)) {
    if (path_.empty()) throw Error(ErrorCode::AdapterOpenFailure, "file adapter needs a path");
    if (path_.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path_.parent_path(), ec);
    }
    read_lines(path_, [this](const json& j) { replay(memory_record_from_json(j)); });
    read_lines(sibling(path_, ".goals"), [this](const json& j) { replay(goal_from_json(j)); });
    read_lines(sibling(path_, ".relationships"),
               [this](const json& j) { replay(relationship_from_json(j)); });

    records_out_.open(path_, std::ios::app);
    goals_out_.open(sibling(path_, ".goals"), std::ios::app);
    relationships_out_.open(sibling(path_, ".relationships"), std::ios::app);
    if (!records_out_ || !goals_out_ || !relationships_out_) {
        throw Error(ErrorCode::AdapterOpenFailure, "cannot open " + path_.string() + " for append");
    }
}

void FileAdapter::append(std::ofstream& out, const json& line) {
    out << line.dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::AdapterWriteFailure, path_.string());
}

void FileAdapter::journal(const MemoryRecord& r) {
    append(records_out_, to_json(r));
}

void FileAdapter::journal(const Goal& g) {
    append(goals_out_, to_json(g));
}

void FileAdapter::journal(const Relationship& r) {
    append(relationships_out_, to_json(r));
}

void FileAdapter::flush() {
    std::unique_lock lock(mutex_);
    records_out_.flush();
    goals_out_.flush();
    relationships_out_.flush();
}

std::unique_ptr<MemoryAdapter> open_adapter(std::string_view adapter_id,
                                            const std::filesystem::path& file_path,
                                            std::size_t embedding_dim) {
    if (adapter_id == "memory") return std::make_unique<InMemoryAdapter>(embedding_dim);
    if (adapter_id == "file") return std::make_unique<FileAdapter>(file_path, embedding_dim);
    throw Error(ErrorCode::AdapterOpenFailure, "unknown database adapter: " + std::string(adapter_id));
}

} // namespace agentos
