#pragma once

#include <stdexcept>
#include <string>

namespace hep {

// Base of every error this library throws. Callers that only need to report
// failures catch this; callers that recover (the match loop) catch the
// narrower types below.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AssetMissing : public Error {
public:
    explicit AssetMissing(const std::string& name)
        : Error("AssetMissing(" + name + ")"), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class AssetParse : public Error {
public:
    explicit AssetParse(const std::string& detail) : Error("AssetParse: " + detail) {}
};

class EmptyObservation : public Error {
public:
    EmptyObservation() : Error("EmptyObservation") {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& detail) : Error("ConfigError: " + detail) {}
};

class GameOver : public Error {
public:
    GameOver() : Error("GameOver: cannot step a finished game") {}
};

// Backend failures. agent_runtime substitutes the default action for these.
class BackendError : public Error {
public:
    using Error::Error;
};

class BackendUnavailable : public BackendError {
public:
    explicit BackendUnavailable(const std::string& detail)
        : BackendError("BackendUnavailable: " + detail) {}
};

class Timeout : public BackendError {
public:
    explicit Timeout(const std::string& detail) : BackendError("Timeout: " + detail) {}
};

class TranscriptExhausted : public BackendError {
public:
    TranscriptExhausted() : BackendError("TranscriptExhausted") {}
};

class TranscriptMissing : public Error {
public:
    explicit TranscriptMissing(const std::string& path) : Error("TranscriptMissing: " + path) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& detail) : Error("IoError: " + detail) {}
};

class Incomparable : public Error {
public:
    explicit Incomparable(const std::string& detail) : Error("Incomparable: " + detail) {}
};

class EmptyGrid : public Error {
public:
    EmptyGrid() : Error("EmptyGrid") {}
};

}  // namespace hep
