#include "dacopt/external_objective.hpp"

#include <cerrno>
#include <fcntl.h>
#include <chrono>
#include <csignal>
#include <cstring>
#include <mutex>
#include <poll.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

namespace dacopt {

namespace {

std::vector<std::string_view> split_words(std::string_view line) {
    std::vector<std::string_view> words;
    Index pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && line[pos] == ' ') ++pos;
        const Index start = pos;
        while (pos < line.size() && line[pos] != ' ') ++pos;
        if (pos > start) words.push_back(line.substr(start, pos - start));
    }
    return words;
}

void ignore_sigpipe_once() {
    static std::once_flag flag;
    std::call_once(flag, [] { std::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

std::string format_eval_request(std::uint64_t id, std::span<const double> x) {
    std::string line = "EVAL " + std::to_string(id);
    for (double v : x) {
        line += ' ';
        line += format_double(v);
    }
    return line;
}

double parse_result_line(std::string_view line, std::uint64_t expected_id) {
    const auto words = split_words(line);
    if (words.size() != 3 || words[0] != "RESULT")
        throw ProtocolError("malformed worker response: '" + std::string(line) + "'");
    if (words[1] != std::to_string(expected_id))
        throw ProtocolError("response id " + std::string(words[1]) + " does not match request " +
                            std::to_string(expected_id));
    try {
        return parse_double(words[2]);
    } catch (const InvalidArgument&) {
        throw ProtocolError("non-numeric result value: '" + std::string(words[2]) + "'");
    }
}

ExternalObjective::ExternalObjective(ExternalObjectiveConfig config) : config_(std::move(config)) {
    if (config_.dimension == 0) throw InvalidArgument("external objective needs a positive dimension");
    ignore_sigpipe_once();

    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw Error(std::string("pipe: ") + std::strerror(errno));
    }
    pid_ = ::fork();
    if (pid_ < 0) throw Error(std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
        // Own process group so that a kill also reaches children of the shell.
        ::setpgid(0, 0);
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        ::execl("/bin/sh", "sh", "-c", config_.command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::setpgid(pid_, pid_);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    to_worker_ = in_pipe[1];
    from_worker_ = out_pipe[0];

    try {
        send_line(std::string(kProtocolHello));
        const std::string reply = read_line(config_.handshake_timeout_seconds);
        const auto words = split_words(reply);
        if (words.size() != 2 || words[0] != "READY")
            throw ProtocolError("bad handshake reply: '" + reply + "'");
        if (words[1] != std::to_string(config_.dimension))
            throw ProtocolError("worker reports dimension " + std::string(words[1]) + ", expected " +
                                std::to_string(config_.dimension));
    } catch (...) {
        shutdown();
        throw;
    }
}

ExternalObjective::~ExternalObjective() {
    shutdown();
}

void ExternalObjective::send_line(const std::string& line) {
    std::string data = line + '\n';
    const char* p = data.data();
    Index left = data.size();
    while (left > 0) {
        const ssize_t n = ::write(to_worker_, p, left);
        if (n < 0) {
            if (errno == EINTR) continue;
            fail_crashed("writing request");
        }
        p += n;
        left -= static_cast<Index>(n);
    }
}

std::string ExternalObjective::read_line(double timeout_seconds) {
    using clock = std::chrono::steady_clock;
    const bool bounded = timeout_seconds > 0.0;
    const auto deadline = clock::now() + std::chrono::duration_cast<clock::duration>(
                                             std::chrono::duration<double>(bounded ? timeout_seconds : 0.0));
    for (;;) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        int wait_ms = -1;
        if (bounded) {
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
            if (left <= 0) throw WorkerTimeout("worker did not answer within " + format_double(timeout_seconds) + " s");
            wait_ms = static_cast<int>(left);
        }
        pollfd pfd{from_worker_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, wait_ms);
        if (ready < 0) {
            if (errno == EINTR) continue;
            throw Error(std::string("poll: ") + std::strerror(errno));
        }
        if (ready == 0) continue;  // deadline re-checked above
        char chunk[4096];
        const ssize_t n = ::read(from_worker_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR) continue;
            fail_crashed("reading response");
        }
        if (n == 0) fail_crashed("reading response");
        buffer_.append(chunk, static_cast<Index>(n));
    }
}

void ExternalObjective::fail_crashed(const std::string& context) {
    std::string detail;
    if (pid_ > 0) {
        int status = 0;
        // Give the process a moment to be reapable after closing its pipe.
        for (int attempt = 0; attempt < 100; ++attempt) {
            const pid_t r = ::waitpid(pid_, &status, WNOHANG);
            if (r == pid_) {
                if (WIFEXITED(status)) {
                    exit_status_ = WEXITSTATUS(status);
                    detail = " (exit status " + std::to_string(exit_status_) + ")";
                } else if (WIFSIGNALED(status)) {
                    detail = " (killed by signal " + std::to_string(WTERMSIG(status)) + ")";
                }
                pid_ = -1;
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
    }
    throw WorkerCrashed("worker exited while " + context + detail);
}

double ExternalObjective::evaluate(std::span<const double> x) {
    if (pid_ <= 0) throw WorkerCrashed("worker is not running");
    if (x.size() != config_.dimension)
        throw ProtocolError("request has " + std::to_string(x.size()) + " values, worker expects " +
                            std::to_string(config_.dimension));
    const std::uint64_t id = next_id_++;
    send_line(format_eval_request(id, x));
    return parse_result_line(read_line(config_.eval_timeout_seconds), id);
}

int ExternalObjective::shutdown() {
    if (to_worker_ >= 0) {
        if (pid_ > 0) {
            const std::string bye = "BYE\n";
            [[maybe_unused]] ssize_t n = ::write(to_worker_, bye.data(), bye.size());
        }
        ::close(to_worker_);
        to_worker_ = -1;
    }
    if (pid_ > 0) {
        int status = 0;
        bool reaped = false;
        for (int attempt = 0; attempt < 200; ++attempt) {
            if (::waitpid(pid_, &status, WNOHANG) == pid_) {
                reaped = true;
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
        if (!reaped) {
            if (::kill(-pid_, SIGKILL) != 0) ::kill(pid_, SIGKILL);
            ::waitpid(pid_, &status, 0);
            exit_status_ = -1;
        } else if (WIFEXITED(status)) {
            exit_status_ = WEXITSTATUS(status);
        } else {
            exit_status_ = -1;
        }
        pid_ = -1;
    }
    if (from_worker_ >= 0) {
        ::close(from_worker_);
        from_worker_ = -1;
    }
    return exit_status_;
}

double external_eval(ExternalObjective& worker, std::span<const double> x) {
    return worker.evaluate(x);
}

Objective as_objective(std::shared_ptr<ExternalObjective> worker) {
    return [worker = std::move(worker)](std::span<const double> x) { return worker->evaluate(x); };
}

}  // namespace dacopt
