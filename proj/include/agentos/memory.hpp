#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentos/clock.hpp"

namespace agentos {

inline constexpr std::size_t kEmbeddingDim = 128;

using Embedding = std::vector<double>;

/// Feature-hashing embedder. Tokens are lowercased alphanumeric runs; each token
/// hashes (FNV-1a 64) to bucket `h % dim` with sign taken from the next bit,
/// `(h / dim) & 1` (set means -1). The sum is L2-normalized; no tokens gives the
/// zero vector.
Embedding embed(std::string_view text, std::size_t dim = kEmbeddingDim);

/// Dot product accumulated in index order. Equals cosine for unit vectors.
double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);
double cosine(std::span<const double> a, std::span<const double> b);

enum class MemoryKind { Message, Fact, Goal, Reflection };

std::string_view to_string(MemoryKind kind);
std::optional<MemoryKind> memory_kind_from_string(std::string_view s);

struct Attachment {
    std::string id;
    std::string url;
    std::string title;
    std::string source;
    std::string description;
    std::string content_type;

    bool operator==(const Attachment&) const = default;
};

struct Content {
    std::string text;
    std::optional<std::string> action;
    std::vector<Attachment> attachments;

    bool operator==(const Content&) const = default;
};

struct MemoryRecord {
    std::string id;
    std::string agent_id;
    std::string user_id;
    std::string room_id;
    MemoryKind kind = MemoryKind::Message;
    Content content;
    Embedding embedding;
    Timestamp created_at = 0;

    bool operator==(const MemoryRecord&) const = default;
};

struct ScoredMemory {
    MemoryRecord record;
    double score = 0.0;
};

enum class GoalStatus { InProgress, Done, Failed };

std::string_view to_string(GoalStatus status);

struct Objective {
    std::string description;
    bool completed = false;

    bool operator==(const Objective&) const = default;
};

struct Goal {
    std::string id;
    std::string room_id;
    std::string name;
    GoalStatus status = GoalStatus::InProgress;
    std::vector<Objective> objectives;

    bool operator==(const Goal&) const = default;
};

struct Relationship {
    std::string user_a;
    std::string user_b;
    double strength = 0.0;
    Timestamp last_interaction = 0;

    bool operator==(const Relationship&) const = default;
};

struct MemoryFilter {
    std::optional<std::string> room_id;
    std::optional<MemoryKind> kind;
    std::optional<std::string> exclude_id;
};

nlohmann::json to_json(const Attachment& a);
Attachment attachment_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Content& c);
Content content_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MemoryRecord& r, bool include_embedding = true);
MemoryRecord memory_record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Goal& g);
Goal goal_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Relationship& r);
Relationship relationship_from_json(const nlohmann::json& j);

/// Storage interface behind the runtime. Reads may run concurrently; writes are
/// serialized per adapter and visible to every reader once the call returns.
class MemoryAdapter {
public:
    virtual ~MemoryAdapter() = default;

    /// Computes the embedding from content.text when `record.embedding` is empty.
    /// Throws DuplicateId, InvalidArgument (bad embedding) or AdapterWriteFailure.
    virtual void store(MemoryRecord record) = 0;
    virtual std::optional<MemoryRecord> get(const std::string& id) const = 0;
    virtual std::size_t count() const = 0;

    /// At most `k` newest MESSAGE records of the room, ascending by created_at
    /// (insertion order breaks ties).
    virtual std::vector<MemoryRecord> recent(const std::string& room_id, std::size_t k) const = 0;

    /// Like recent() but over every kind, optionally restricted to one.
    virtual std::vector<MemoryRecord> room_records(const std::string& room_id, std::size_t k,
                                                   std::optional<MemoryKind> kind = {}) const = 0;

    /// Top-k records with cosine >= min_similarity, descending score; ties go to
    /// the newer record. A zero query returns nothing.
    virtual std::vector<ScoredMemory> search_similar(std::span<const double> query, std::size_t k,
                                                     double min_similarity,
                                                     const MemoryFilter& filter = {}) const = 0;

    virtual Goal create_goal(Goal goal) = 0;
    virtual Goal update_objective(const std::string& goal_id, std::size_t index, bool completed) = 0;
    virtual std::optional<Goal> get_goal(const std::string& goal_id) const = 0;
    virtual std::vector<Goal> goals(const std::string& room_id) const = 0;

    virtual Relationship upsert_relationship(const std::string& a, const std::string& b,
                                             double delta, Timestamp now) = 0;
    virtual std::optional<Relationship> get_relationship(const std::string& a,
                                                         const std::string& b) const = 0;

    /// SHA-256 over a canonical dump of every record, goal and relationship.
    virtual std::string digest() const = 0;
    virtual void flush() {}
};

class InMemoryAdapter : public MemoryAdapter {
public:
    explicit InMemoryAdapter(std::size_t embedding_dim = kEmbeddingDim) : dim_(embedding_dim) {}

    void store(MemoryRecord record) override;
    std::optional<MemoryRecord> get(const std::string& id) const override;
    std::size_t count() const override;
    std::vector<MemoryRecord> recent(const std::string& room_id, std::size_t k) const override;
    std::vector<MemoryRecord> room_records(const std::string& room_id, std::size_t k,
                                           std::optional<MemoryKind> kind = {}) const override;
    std::vector<ScoredMemory> search_similar(std::span<const double> query, std::size_t k,
                                             double min_similarity,
                                             const MemoryFilter& filter = {}) const override;
    Goal create_goal(Goal goal) override;
    Goal update_objective(const std::string& goal_id, std::size_t index, bool completed) override;
    std::optional<Goal> get_goal(const std::string& goal_id) const override;
    std::vector<Goal> goals(const std::string& room_id) const override;
    Relationship upsert_relationship(const std::string& a, const std::string& b, double delta,
                                     Timestamp now) override;
    std::optional<Relationship> get_relationship(const std::string& a,
                                                 const std::string& b) const override;
    std::string digest() const override;

protected:
    // Called under the write lock after validation and before the in-memory
    // state changes. Throwing aborts the mutation.
    virtual void journal(const MemoryRecord&) {}
    virtual void journal(const Goal&) {}
    virtual void journal(const Relationship&) {}

    // Applies a mutation without journaling; used when rebuilding from disk.
    void replay(MemoryRecord record);
    void replay(Goal goal);
    void replay(Relationship rel);

    mutable std::shared_mutex mutex_;

private:
    using PairKey = std::pair<std::string, std::string>;

    void validate_record(MemoryRecord& record) const;
    std::vector<std::size_t> room_indices_sorted(const std::string& room_id,
                                                 std::optional<MemoryKind> kind) const;

    std::size_t dim_;
    std::vector<MemoryRecord> records_; // insertion order
    std::unordered_map<std::string, std::size_t> by_id_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_room_;
    std::map<std::string, Goal> goals_;
    std::map<PairKey, Relationship> relationships_;
    std::uint64_t next_goal_ = 0;
};

/// Append-only newline-delimited JSON. Records go to `path`, one MemoryRecord per
/// line; goal and relationship snapshots go to `path.goals` and
/// `path.relationships` (last line per key wins). The full index is rebuilt
/// from the files on open.
class FileAdapter final : public InMemoryAdapter {
public:
    explicit FileAdapter(std::filesystem::path path, std::size_t embedding_dim = kEmbeddingDim);

    void flush() override;
    const std::filesystem::path& path() const noexcept { return path_; }

protected:
    void journal(const MemoryRecord& r) override;
    void journal(const Goal& g) override;
    void journal(const Relationship& r) override;

private:
    void append(std::ofstream& out, const nlohmann::json& line);

    std::filesystem::path path_;
    std::ofstream records_out_;
    std::ofstream goals_out_;
    std::ofstream relationships_out_;
};

/// "memory" or "file". The file adapter reads its location from `file_path`.
std::unique_ptr<MemoryAdapter> open_adapter(std::string_view adapter_id,
                                            const std::filesystem::path& file_path = {},
                                            std::size_t embedding_dim = kEmbeddingDim);

} // namespace agentos
