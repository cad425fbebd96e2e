// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/history.hpp>
#include <skillrt/json.hpp>
#include <skillrt/usage.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace skillrt
{

enum class SessionStatus
{
    Active,
    AwaitingFollowup,
    Completed,
    Failed,
};

[[nodiscard]] auto sessionStatusName(SessionStatus status) -> std::string_view;
[[nodiscard]] auto parseSessionStatus(std::string_view name) -> std::optional<SessionStatus>;

struct Session
{
    std::string id;
    std::optional<std::string> parentId;
    std::filesystem::path workspaceRoot;
    std::string doneWhen;
    std::string taskText;
    std::string taskType;
    std::vector<std::string> routedSkills;
    SessionStatus status = SessionStatus::Active;
    std::vector<HistoryEvent> history;
    std::map<std::string, Json> skillState;
    UsageTotals usage;

    [[nodiscard]] auto lastSeq() const -> std::uint64_t { return history.empty() ? 0 : history.back().seq; }
    [[nodiscard]] auto isOpen() const -> bool
    {
        return status == SessionStatus::Active || status == SessionStatus::AwaitingFollowup;
    }
    [[nodiscard]] auto hasToolCall(std::string_view callId) const -> bool;
    [[nodiscard]] auto hasCompletion() const -> bool;
    [[nodiscard]] auto stateFor(std::string const& skillId) const -> Json;
};

struct NewSession
{
    std::string taskText;
    std::string taskType;
    std::filesystem::path workspaceRoot;
    std::string doneWhen;
    std::optional<std::string> parentId;
    std::vector<std::string> routedSkills;
};

/// One line of a session log, in file order.
struct LogRecord
{
    std::uint64_t seq = 0;
    std::optional<HistoryEvent> event;
    std::string snapshotSkillId;
    Json snapshotState;
};

struct StoreOptions
{
    /// fsync every append before returning.
    bool durable = true;
};

/// Sessions, their typed histories and skill-local state.
///
/// With a directory the store is backed by `<dir>/sessions/<id>.log`
/// append-only logs plus `<dir>/index.json`; without one it is purely in
/// memory. Mutations of one session are serialised per session; distinct
/// sessions may be mutated concurrently.
class SessionStore
{
  public:
    SessionStore();
    explicit SessionStore(std::filesystem::path dir, StoreOptions options = {});
    ~SessionStore();

    SessionStore(SessionStore const&) = delete;
    auto operator=(SessionStore const&) -> SessionStore& = delete;

    /// Loads every session found under `dir`. A torn final log line is
    /// truncated and reported in warnings(); any other inconsistency throws
    /// Error(CorruptStore).
    [[nodiscard]] static auto open(std::filesystem::path const& dir, StoreOptions options = {})
        -> std::unique_ptr<SessionStore>;

    auto createSession(NewSession const& spec) -> Session;
    auto appendEvent(std::string const& sessionId, EventPayload payload) -> std::uint64_t;

    [[nodiscard]] auto getSkillState(std::string const& sessionId, std::string const& skillId) const -> Json;
    void putSkillState(std::string const& sessionId, std::string const& skillId, Json state);

    void setStatus(std::string const& sessionId, SessionStatus status);
    void addUsage(std::string const& sessionId, UsageRecord const& record);

    [[nodiscard]] auto snapshot(std::string const& sessionId) const -> Session;
    [[nodiscard]] auto contains(std::string const& sessionId) const -> bool;
    [[nodiscard]] auto sessionIds() const -> std::vector<std::string>;
    [[nodiscard]] auto warnings() const -> std::vector<std::string>;
    [[nodiscard]] auto directory() const -> std::optional<std::filesystem::path> const& { return _dir; }

    /// Raw records of a persisted session log (events and snapshots).
    [[nodiscard]] static auto readLog(std::filesystem::path const& dir, std::string const& sessionId)
        -> std::vector<LogRecord>;

  private:
    struct Entry;

    [[nodiscard]] auto entry(std::string const& sessionId) const -> Entry&;
    void writeLine(Entry& e, Json const& line);
    void updateIndex(std::string const& sessionId, Json doc);
    void loadAll();

    std::optional<std::filesystem::path> _dir;
    StoreOptions _options;
    mutable std::shared_mutex _mapMutex;
    std::map<std::string, std::unique_ptr<Entry>> _entries;
    std::vector<std::string> _order;
    std::mutex _indexMutex;
    std::map<std::string, Json> _indexDocs;
    mutable std::mutex _warningsMutex;
    std::vector<std::string> _warnings;
};

} // namespace skillrt
