#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace poolscope {

// Process exit codes used by the CLI; every library error maps onto one.
enum class ExitCode : int {
    ok = 0,
    config = 2,
    ingest = 3,
    data_integrity = 4,
};

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what, ExitCode code)
        : std::runtime_error(what), kind_(std::move(kind)), code_(code) {}

    const std::string& kind() const noexcept { return kind_; }
    ExitCode exit_code() const noexcept { return code_; }

private:
    std::string kind_;
    ExitCode code_;
};

#define POOLSCOPE_ERROR(Name, Code)                                        \
    class Name : public Error {                                            \
    public:                                                                \
        explicit Name(const std::string& what) : Error(#Name, what, Code) {} \
    }

POOLSCOPE_ERROR(InactivePool, ExitCode::data_integrity);
POOLSCOPE_ERROR(ArithmeticOverflow, ExitCode::data_integrity);
POOLSCOPE_ERROR(IngestError, ExitCode::ingest);
POOLSCOPE_ERROR(ConfigError, ExitCode::config);
POOLSCOPE_ERROR(NotEnoughSwaps, ExitCode::data_integrity);
POOLSCOPE_ERROR(NonPositivePrice, ExitCode::data_integrity);
POOLSCOPE_ERROR(EmptySeries, ExitCode::data_integrity);
POOLSCOPE_ERROR(ShapeError, ExitCode::data_integrity);

#undef POOLSCOPE_ERROR

// Raised when a raw log cannot be decoded; carries the offending log as JSON text.
class DecodeError : public Error {
public:
    DecodeError(const std::string& what, std::string raw_log)
        : Error("DecodeError", what, ExitCode::ingest), raw_log_(std::move(raw_log)) {}
    const std::string& raw_log() const noexcept { return raw_log_; }

private:
    std::string raw_log_;
};

class SeriesIntegrityError : public Error {
public:
    SeriesIntegrityError(const std::string& what, std::size_t event_index)
        : Error("SeriesIntegrityError",
                what + " (event " + std::to_string(event_index) + ")",
                ExitCode::data_integrity),
          event_index_(event_index) {}
    std::size_t event_index() const noexcept { return event_index_; }

private:
    std::size_t event_index_;
};

class FixtureError : public Error {
public:
    FixtureError(const std::string& path, std::size_t line, const std::string& what)
        : Error("FixtureError", path + ":" + std::to_string(line) + ": " + what,
                ExitCode::data_integrity),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace poolscope
