#pragma once

// Line protocol adapter that exposes an external worker process as a
// black-box objective.
//
//   harness -> worker   HELLO dacopt 1
//   worker  -> harness  READY <dimension>
//   harness -> worker   EVAL <id> <v1> ... <vD>
//   worker  -> harness  RESULT <id> <value>
//   harness -> worker   BYE            (worker exits 0)
//
// Lines are UTF-8 and LF terminated; numbers use shortest round-trip form.

#include "dacopt/core.hpp"

#include <memory>
#include <string>
#include <sys/types.h>

namespace dacopt {

class ProtocolError : public Error { using Error::Error; };
class WorkerTimeout : public Error { using Error::Error; };
class WorkerCrashed : public Error { using Error::Error; };

struct ExternalObjectiveConfig {
    /// Run through /bin/sh -c.
    std::string command;
    Index dimension = 0;
    Direction direction = Direction::Minimize;
    double handshake_timeout_seconds = 10.0;
    /// Per-request limit; zero waits indefinitely.
    double eval_timeout_seconds = 0.0;
};

inline constexpr std::string_view kProtocolHello = "HELLO dacopt 1";

class ExternalObjective {
public:
    /// Spawns the worker and completes the handshake.
    explicit ExternalObjective(ExternalObjectiveConfig config);
    ~ExternalObjective();

    ExternalObjective(const ExternalObjective&) = delete;
    ExternalObjective& operator=(const ExternalObjective&) = delete;

    const ExternalObjectiveConfig& config() const { return config_; }

    /// One EVAL round trip. Callers account for the FE.
    double evaluate(std::span<const double> x);

    /// Sends BYE and waits for the worker. Returns its exit status, or -1 if
    /// it had to be killed. Idempotent.
    int shutdown();

private:
    void send_line(const std::string& line);
    std::string read_line(double timeout_seconds);
    [[noreturn]] void fail_crashed(const std::string& context);

    ExternalObjectiveConfig config_;
    pid_t pid_ = -1;
    int to_worker_ = -1;
    int from_worker_ = -1;
    std::string buffer_;
    std::uint64_t next_id_ = 1;
    int exit_status_ = -1;
};

double external_eval(ExternalObjective& worker, std::span<const double> x);

/// Wraps a shared worker as an Objective.
Objective as_objective(std::shared_ptr<ExternalObjective> worker);

/// "EVAL <id> <v1> ... <vD>"
std::string format_eval_request(std::uint64_t id, std::span<const double> x);

/// Parses "RESULT <id> <value>", checking the id. Throws ProtocolError.
double parse_result_line(std::string_view line, std::uint64_t expected_id);

}  // namespace dacopt
