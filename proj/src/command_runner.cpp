// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/workspace.hpp>

#include <array>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace skillrt
{

namespace
{

struct Pipe
{
    int fds[2] { -1, -1 };

    Pipe()
    {
        if (::pipe2(fds, O_CLOEXEC) != 0)
            throw Error(ErrorKind::Io, std::string("pipe: ") + std::strerror(errno));
    }
    ~Pipe()
    {
        closeEnd(0);
        closeEnd(1);
    }
    void closeEnd(int i)
    {
        if (fds[i] >= 0)
            ::close(fds[i]);
        fds[i] = -1;
    }
};

void appendCapped(std::string& out, char const* data, size_t n, size_t cap, bool& truncated)
{
    if (out.size() >= cap)
    {
        truncated = truncated || n > 0;
        return;
    }
    auto const room = cap - out.size();
    if (n > room)
    {
        truncated = true;
        n = room;
    }
    out.append(data, n);
}

} // namespace

auto runCommand(std::vector<std::string> const& argv, std::filesystem::path const& cwd,
                std::vector<std::string> const& allowlist, int timeoutS, size_t truncateBytes) -> CommandResult
{
    if (!isCommandAllowed(argv, allowlist))
        throw Error(ErrorKind::CommandNotAllowed,
                    "command '" + (argv.empty() ? std::string {} : argv.front()) + "' is not in the allowlist");

    auto out = Pipe {};
    auto err = Pipe {};
    auto cargs = std::vector<char*> {};
    for (auto const& a: argv)
        cargs.push_back(const_cast<char*>(a.c_str()));
    cargs.push_back(nullptr);

    auto const started = std::chrono::steady_clock::now();
    auto const pid = ::fork();
    if (pid < 0)
        throw Error(ErrorKind::Io, std::string("fork: ") + std::strerror(errno));
    if (pid == 0)
    {
        ::setpgid(0, 0);
        ::dup2(out.fds[1], STDOUT_FILENO);
        ::dup2(err.fds[1], STDERR_FILENO);
        auto const devnull = ::open("/dev/null", O_RDONLY);
        if (devnull >= 0)
            ::dup2(devnull, STDIN_FILENO);
        if (::chdir(cwd.c_str()) != 0)
            ::_exit(126);
        ::execvp(cargs[0], cargs.data());
        auto const msg = std::string("exec ") + cargs[0] + ": " + std::strerror(errno) + "\n";
        [[maybe_unused]] auto n = ::write(STDERR_FILENO, msg.data(), msg.size());
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    out.closeEnd(1);
    err.closeEnd(1);

    auto result = CommandResult {};
    auto const deadline = started + std::chrono::seconds(timeoutS);
    auto buffer = std::array<char, 8192> {};
    auto timedOut = false;
    while (out.fds[0] >= 0 || err.fds[0] >= 0)
    {
        auto const now = std::chrono::steady_clock::now();
        if (now >= deadline)
        {
            timedOut = true;
            break;
        }
        auto const waitMs = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        auto pfds = std::array<pollfd, 2> { pollfd { out.fds[0], POLLIN, 0 }, pollfd { err.fds[0], POLLIN, 0 } };
        auto const rc = ::poll(pfds.data(), pfds.size(), static_cast<int>(std::min<long long>(waitMs, 1000)));
        if (rc < 0)
        {
            if (errno == EINTR)
                continue;
            break;
        }
        for (auto i = 0; i < 2; ++i)
        {
            if (pfds[i].fd < 0 || !(pfds[i].revents & (POLLIN | POLLHUP | POLLERR)))
                continue;
            auto const n = ::read(pfds[i].fd, buffer.data(), buffer.size());
            auto& pipe = i == 0 ? out : err;
            if (n <= 0)
            {
                pipe.closeEnd(0);
                continue;
            }
            appendCapped(i == 0 ? result.stdoutText : result.stderrText, buffer.data(), static_cast<size_t>(n),
                         truncateBytes, result.truncated);
        }
    }

    auto status = 0;
    while (!timedOut)
    {
        auto const r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid || (r < 0 && errno != EINTR))
            break;
        if (std::chrono::steady_clock::now() >= deadline)
            timedOut = true;
        else
            ::usleep(2000);
    }
    if (timedOut)
    {
        ::kill(-pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        throw Error(ErrorKind::CommandTimeout,
                    "command '" + argv.front() + "' exceeded " + std::to_string(timeoutS) + "s");
    }
    if (WIFEXITED(status))
        result.exitCode = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        result.exitCode = 128 + WTERMSIG(status);
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

} // namespace skillrt
