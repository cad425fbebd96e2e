// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/session_store.hpp>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace skillrt
{

auto sessionStatusName(SessionStatus status) -> std::string_view
{
    switch (status)
    {
        case SessionStatus::Active: return "active";
        case SessionStatus::AwaitingFollowup: return "awaiting_followup";
        case SessionStatus::Completed: return "completed";
        case SessionStatus::Failed: return "failed";
    }
    return "active";
}

auto parseSessionStatus(std::string_view name) -> std::optional<SessionStatus>
{
    for (auto s: { SessionStatus::Active, SessionStatus::AwaitingFollowup, SessionStatus::Completed,
                   SessionStatus::Failed })
        if (sessionStatusName(s) == name)
            return s;
    return std::nullopt;
}

auto Session::hasToolCall(std::string_view callId) const -> bool
{
    for (auto const& e: history)
        if (auto const* c = e.as<ToolCallEvent>(); c && c->callId == callId)
            return true;
    return false;
}

auto Session::hasCompletion() const -> bool
{
    for (auto const& e: history)
        if (e.kind() == EventKind::Completion)
            return true;
    return false;
}

auto Session::stateFor(std::string const& skillId) const -> Json
{
    if (auto it = skillState.find(skillId); it != skillState.end())
        return it->second;
    return Json::object();
}

struct SessionStore::Entry
{
    std::mutex mutex;
    Session session;
    int fd = -1;

    ~Entry()
    {
        if (fd >= 0)
            ::close(fd);
    }
};

namespace
{

auto indexDoc(Session const& s) -> Json
{
    return Json {
        { "id", s.id },
        { "parent", s.parentId ? Json(*s.parentId) : Json(nullptr) },
        { "status", sessionStatusName(s.status) },
        { "workspace_root", s.workspaceRoot.string() },
        { "task_text", s.taskText },
        { "task_type", s.taskType },
        { "done_when", s.doneWhen },
        { "routed_skills", s.routedSkills },
    };
}

auto isWithin(fs::path const& child, fs::path const& root) -> bool
{
    auto const rel = child.lexically_relative(root);
    return !rel.empty() && *rel.begin() != ".." && !rel.is_absolute();
}

void writeAll(int fd, std::string const& data, fs::path const& path)
{
    auto const* p = data.data();
    auto left = data.size();
    while (left > 0)
    {
        auto const n = ::write(fd, p, left);
        if (n < 0)
        {
            if (errno == EINTR)
                continue;
            throw Error(ErrorKind::Io, "write " + path.string() + ": " + std::strerror(errno));
        }
        p += n;
        left -= static_cast<size_t>(n);
    }
}

auto readFile(fs::path const& path) -> std::string
{
    auto in = std::ifstream(path, std::ios::binary);
    auto buffer = std::stringstream {};
    buffer << in.rdbuf();
    return buffer.str();
}

struct ParsedLog
{
    std::vector<LogRecord> records;
    std::optional<size_t> truncateAt;
    bool missingNewline = false;
};

auto parseLogRecord(Json const& doc) -> LogRecord
{
    auto rec = LogRecord {};
    if (doc.is_object() && doc.value("kind", "") == "skill_state_snapshot")
    {
        if (!doc.contains("seq") || !doc.at("seq").is_number_unsigned() || !doc.contains("skill_id")
            || !doc.at("skill_id").is_string() || !doc.contains("state"))
            throw Error(ErrorKind::CorruptStore, "malformed skill_state_snapshot record");
        rec.seq = doc.at("seq").get<std::uint64_t>();
        rec.snapshotSkillId = doc.at("skill_id").get<std::string>();
        rec.snapshotState = doc.at("state");
        return rec;
    }
    rec.event = HistoryEvent::fromJson(doc);
    rec.seq = rec.event->seq;
    return rec;
}

auto parseLog(std::string const& text, std::string const& name) -> ParsedLog
{
    auto out = ParsedLog {};
    size_t pos = 0;
    auto lineNo = 0;
    while (pos < text.size())
    {
        ++lineNo;
        auto const nl = text.find('\n', pos);
        auto const complete = nl != std::string::npos;
        auto const end = complete ? nl : text.size();
        auto const line = std::string_view(text).substr(pos, end - pos);
        auto const isLast = !complete || end + 1 >= text.size();
        try
        {
            out.records.push_back(parseLogRecord(Json::parse(line)));
            if (!complete)
                out.missingNewline = true;
        }
        catch (std::exception const& e)
        {
            if (!isLast)
                throw Error(ErrorKind::CorruptStore,
                            name + ":" + std::to_string(lineNo) + ": unreadable record: " + e.what());
            out.truncateAt = pos;
            break;
        }
        pos = complete ? nl + 1 : text.size();
    }
    return out;
}

} // namespace

SessionStore::SessionStore() = default;

SessionStore::SessionStore(fs::path dir, StoreOptions options): _dir(std::move(dir)), _options(options)
{
    auto ec = std::error_code {};
    fs::create_directories(*_dir / "sessions", ec);
    if (ec)
        throw Error(ErrorKind::Io, "cannot create store " + _dir->string() + ": " + ec.message());
}

SessionStore::~SessionStore() = default;

auto SessionStore::open(fs::path const& dir, StoreOptions options) -> std::unique_ptr<SessionStore>
{
    auto store = std::make_unique<SessionStore>(dir, options);
    store->loadAll();
    return store;
}

void SessionStore::loadAll()
{
    auto const indexPath = *_dir / "index.json";
    if (!fs::exists(indexPath))
        return;
    auto index = Json {};
    try
    {
        index = Json::parse(readFile(indexPath));
    }
    catch (Json::exception const& e)
    {
        throw Error(ErrorKind::CorruptStore, "index.json unreadable: " + std::string(e.what()));
    }
    if (!index.is_object() || !index.contains("sessions") || !index.at("sessions").is_array())
        throw Error(ErrorKind::CorruptStore, "index.json lacks a sessions array");

    for (auto const& meta: index.at("sessions"))
    {
        auto e = std::make_unique<Entry>();
        auto& s = e->session;
        try
        {
            s.id = meta.at("id").get<std::string>();
            if (!meta.at("parent").is_null())
                s.parentId = meta.at("parent").get<std::string>();
            s.workspaceRoot = meta.at("workspace_root").get<std::string>();
            s.taskText = meta.at("task_text").get<std::string>();
            s.taskType = meta.at("task_type").get<std::string>();
            s.doneWhen = meta.at("done_when").get<std::string>();
            s.routedSkills = meta.at("routed_skills").get<std::vector<std::string>>();
            auto status = parseSessionStatus(meta.at("status").get<std::string>());
            if (!status)
                throw Error(ErrorKind::CorruptStore, "unknown status for " + s.id);
            s.status = *status;
        }
        catch (Json::exception const& ex)
        {
            throw Error(ErrorKind::CorruptStore, "index.json entry malformed: " + std::string(ex.what()));
        }

        auto const logPath = *_dir / "sessions" / (s.id + ".log");
        if (fs::exists(logPath))
        {
            auto parsed = parseLog(readFile(logPath), logPath.filename().string());
            if (parsed.truncateAt)
            {
                fs::resize_file(logPath, *parsed.truncateAt);
                _warnings.push_back("session " + s.id + ": torn tail record truncated at byte "
                                    + std::to_string(*parsed.truncateAt));
            }
            else if (parsed.missingNewline)
            {
                auto out = std::ofstream(logPath, std::ios::binary | std::ios::app);
                out << '\n';
            }
            for (auto& rec: parsed.records)
            {
                if (!rec.event)
                {
                    s.skillState[rec.snapshotSkillId] = std::move(rec.snapshotState);
                    continue;
                }
                auto& ev = *rec.event;
                if (ev.seq != s.lastSeq() + 1)
                    throw Error(ErrorKind::CorruptStore, "session " + s.id + ": seq gap before " + std::to_string(ev.seq));
                if (auto const* r = ev.as<ToolResultEvent>(); r && !s.hasToolCall(r->callId))
                    throw Error(ErrorKind::CorruptStore, "session " + s.id + ": orphan tool_result " + r->callId);
                if (ev.kind() == EventKind::Completion && s.hasCompletion())
                    throw Error(ErrorKind::CorruptStore, "session " + s.id + ": duplicate completion");
                if (auto const* a = ev.as<AssistantMessage>(); a && a->usage)
                    s.usage.add(*a->usage);
                s.history.push_back(std::move(ev));
            }
        }
        if (s.hasCompletion())
            s.status = SessionStatus::Completed;
        else if (s.status == SessionStatus::Completed)
            s.status = SessionStatus::Active;

        _indexDocs[s.id] = indexDoc(s);
        _order.push_back(s.id);
        _entries.emplace(s.id, std::move(e));
    }
}

auto SessionStore::entry(std::string const& sessionId) const -> Entry&
{
    auto lock = std::shared_lock(_mapMutex);
    auto it = _entries.find(sessionId);
    if (it == _entries.end())
        throw Error(ErrorKind::NotFound, "unknown session '" + sessionId + "'");
    return *it->second;
}

void SessionStore::writeLine(Entry& e, Json const& line)
{
    if (!_dir)
        return;
    auto const path = *_dir / "sessions" / (e.session.id + ".log");
    if (e.fd < 0)
    {
        e.fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
        if (e.fd < 0)
            throw Error(ErrorKind::Io, "open " + path.string() + ": " + std::strerror(errno));
    }
    writeAll(e.fd, line.dump() + "\n", path);
    if (_options.durable && ::fdatasync(e.fd) != 0)
        throw Error(ErrorKind::Io, "fdatasync " + path.string() + ": " + std::strerror(errno));
}

void SessionStore::updateIndex(std::string const& sessionId, Json doc)
{
    if (!_dir)
        return;
    auto lock = std::lock_guard(_indexMutex);
    _indexDocs[sessionId] = std::move(doc);
    auto sessions = Json::array();
    for (auto const& id: sessionIds())
        if (auto it = _indexDocs.find(id); it != _indexDocs.end())
            sessions.push_back(it->second);
    auto const path = *_dir / "index.json";
    auto const tmp = *_dir / "index.json.tmp";
    auto const fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0)
        throw Error(ErrorKind::Io, "open " + tmp.string() + ": " + std::strerror(errno));
    try
    {
        writeAll(fd, Json { { "sessions", sessions } }.dump(2) + "\n", tmp);
    }
    catch (...)
    {
        ::close(fd);
        throw;
    }
    if (_options.durable)
        ::fsync(fd);
    ::close(fd);
    fs::rename(tmp, path);
}

auto SessionStore::createSession(NewSession const& spec) -> Session
{
    auto ec = std::error_code {};
    if (!fs::is_directory(spec.workspaceRoot, ec))
        throw Error(ErrorKind::InvalidArgument, "workspace root '" + spec.workspaceRoot.string() + "' does not exist");
    auto const root = fs::canonical(spec.workspaceRoot);

    if (spec.parentId)
    {
        if (!contains(*spec.parentId))
            throw Error(ErrorKind::UnknownParent, "unknown parent session '" + *spec.parentId + "'");
        auto const parentRoot = snapshot(*spec.parentId).workspaceRoot;
        if (root != parentRoot && !isWithin(root, parentRoot))
            throw Error(ErrorKind::WorkspaceEscape,
                        "workspace " + root.string() + " is outside parent workspace " + parentRoot.string());
    }

    auto e = std::make_unique<Entry>();
    auto& s = e->session;
    s.parentId = spec.parentId;
    s.workspaceRoot = root;
    s.doneWhen = spec.doneWhen;
    s.taskText = spec.taskText;
    s.taskType = spec.taskType;
    s.routedSkills = spec.routedSkills;
    s.status = SessionStatus::Active;

    auto* raw = e.get();
    {
        auto lock = std::unique_lock(_mapMutex);
        auto n = _order.size() + 1;
        do
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "s%04zu", n++);
            s.id = buf;
        } while (_entries.contains(s.id));
        _order.push_back(s.id);
        _entries.emplace(s.id, std::move(e));
    }
    updateIndex(raw->session.id, indexDoc(raw->session));
    appendEvent(raw->session.id, UserMessage { spec.taskText });
    return snapshot(raw->session.id);
}

auto SessionStore::appendEvent(std::string const& sessionId, EventPayload payload) -> std::uint64_t
{
    auto& e = entry(sessionId);
    auto lock = std::lock_guard(e.mutex);
    auto& s = e.session;
    if (!s.isOpen())
        throw Error(ErrorKind::SessionClosed, "session " + sessionId + " is " + std::string(sessionStatusName(s.status)));
    if (auto const* r = std::get_if<ToolResultEvent>(&payload); r && !s.hasToolCall(r->callId))
        throw Error(ErrorKind::OrphanToolResult, "tool_result for unknown call id '" + r->callId + "'");
    if (std::holds_alternative<CompletionEvent>(payload) && s.hasCompletion())
        throw Error(ErrorKind::InvalidArgument, "session " + sessionId + " already has a completion event");

    auto ev = HistoryEvent { s.lastSeq() + 1, std::move(payload) };
    writeLine(e, ev.toJson());
    s.history.push_back(std::move(ev));
    return s.lastSeq();
}

auto SessionStore::getSkillState(std::string const& sessionId, std::string const& skillId) const -> Json
{
    auto& e = entry(sessionId);
    auto lock = std::lock_guard(e.mutex);
    return e.session.stateFor(skillId);
}

void SessionStore::putSkillState(std::string const& sessionId, std::string const& skillId, Json state)
{
    auto& e = entry(sessionId);
    auto lock = std::lock_guard(e.mutex);
    if (!e.session.isOpen())
        throw Error(ErrorKind::SessionClosed, "session " + sessionId + " is closed");
    writeLine(e, Json {
                     { "seq", e.session.lastSeq() },
                     { "kind", "skill_state_snapshot" },
                     { "skill_id", skillId },
                     { "state", state },
                 });
    e.session.skillState[skillId] = std::move(state);
}

void SessionStore::setStatus(std::string const& sessionId, SessionStatus status)
{
    auto& e = entry(sessionId);
    auto doc = Json {};
    {
        auto lock = std::lock_guard(e.mutex);
        if (e.session.status == status)
            return;
        e.session.status = status;
        doc = indexDoc(e.session);
    }
    updateIndex(sessionId, std::move(doc));
}

void SessionStore::addUsage(std::string const& sessionId, UsageRecord const& record)
{
    auto& e = entry(sessionId);
    auto lock = std::lock_guard(e.mutex);
    e.session.usage.add(record);
}

auto SessionStore::snapshot(std::string const& sessionId) const -> Session
{
    auto& e = entry(sessionId);
    auto lock = std::lock_guard(e.mutex);
    return e.session;
}

auto SessionStore::contains(std::string const& sessionId) const -> bool
{
    auto lock = std::shared_lock(_mapMutex);
    return _entries.contains(sessionId);
}

auto SessionStore::sessionIds() const -> std::vector<std::string>
{
    auto lock = std::shared_lock(_mapMutex);
    return _order;
}

auto SessionStore::warnings() const -> std::vector<std::string>
{
    auto lock = std::lock_guard(_warningsMutex);
    return _warnings;
}

auto SessionStore::readLog(fs::path const& dir, std::string const& sessionId) -> std::vector<LogRecord>
{
    auto const path = dir / "sessions" / (sessionId + ".log");
    if (!fs::exists(path))
        throw Error(ErrorKind::NotFound, "no log for session '" + sessionId + "'");
    return parseLog(readFile(path), path.filename().string()).records;
}

} // namespace skillrt
