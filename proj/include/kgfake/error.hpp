#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace kgfake {

// Base of every error the library raises. `category()` is the short tag the
// CLI prints in its "error[<category>]" line.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error("parse", "line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class EncodingError : public Error {
public:
    EncodingError(std::size_t line, const std::string& message)
        : Error("encoding", "line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class EmptyGraphError : public Error {
public:
    EmptyGraphError() : Error("empty-graph", "knowledge graph contains no triples") {}
};

class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& message) : Error("precondition", message) {}
};

class NotAFactError : public Error {
public:
    explicit NotAFactError(const std::string& triple)
        : Error("not-a-fact", "seed triple is not in the knowledge graph: " + triple) {}
};

class InvalidCandidateError : public Error {
public:
    explicit InvalidCandidateError(const std::string& message) : Error("invalid-candidate", message) {}
};

class UndefinedSimilarityError : public Error {
public:
    UndefinedSimilarityError() : Error("undefined-similarity", "jaccard similarity of two empty sets") {}
};

class TemplateError : public Error {
public:
    explicit TemplateError(std::string field)
        : Error("template", "required template field is empty or missing: " + field),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Retries exhausted on a transient failure. `status` is 0 for connection-level failures.
class TransportError : public Error {
public:
    TransportError(int status, const std::string& message)
        : Error("transport", message), status_(status) {}

    int status() const noexcept { return status_; }

private:
    int status_;
};

// Non-retryable 4xx.
class RequestError : public Error {
public:
    RequestError(int status, const std::string& message)
        : Error("request", message), status_(status) {}

    int status() const noexcept { return status_; }

private:
    int status_;
};

class ProtocolError : public Error {
public:
    explicit ProtocolError(const std::string& message) : Error("protocol", message) {}
};

class ConsistencyError : public Error {
public:
    explicit ConsistencyError(const std::string& message) : Error("consistency", message) {}
};

class PathError : public Error {
public:
    explicit PathError(const std::string& path) : Error("path", "cannot open file: " + path) {}
};

}  // namespace kgfake
