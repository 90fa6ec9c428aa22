#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace gapquest {

/// Root of every error raised by the engine.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct SourcePosition
{
    std::size_t line = 0;
    std::size_t column = 0;
    std::size_t offset = 0;
};

/// Document is not well-formed XML.
class ParseError : public Error
{
public:
    ParseError(SourcePosition pos, const std::string &reason);

    const SourcePosition &position() const noexcept { return pos_; }
    const std::string &reason() const noexcept { return reason_; }

private:
    SourcePosition pos_;
    std::string reason_;
};

/// Well-formed document that does not follow the expected report layout.
class SchemaError : public Error
{
public:
    SchemaError(std::string element, std::string attribute, const std::string &detail = {});

    const std::string &element() const noexcept { return element_; }
    const std::string &attribute() const noexcept { return attribute_; }

private:
    std::string element_;
    std::string attribute_;
};

class DuplicateMutantError : public Error
{
public:
    explicit DuplicateMutantError(std::string key);
    const std::string &key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Assembled model violates an aggregate or identity invariant.
class ModelError : public Error
{
public:
    explicit ModelError(std::vector<std::string> offenders);
    const std::vector<std::string> &offenders() const noexcept { return offenders_; }

private:
    std::vector<std::string> offenders_;
};

class NoEligibleClass : public Error
{
public:
    NoEligibleClass() : Error("no class holds an eligible target") {}
};

class NoAttainableQuest : public Error
{
public:
    NoAttainableQuest() : Error("no quest kind has an attainable goal") {}
};

class AccountingError : public Error
{
public:
    using Error::Error;
};

class NotRegistered : public Error
{
public:
    using Error::Error;
};

/// A run could not be ingested; the cause is kept as text plus, for
/// XML syntax errors, the position.
class IngestError : public Error
{
public:
    IngestError(std::string kind, const std::string &detail, SourcePosition pos = {});

    const std::string &cause_kind() const noexcept { return kind_; }
    const SourcePosition &position() const noexcept { return pos_; }

private:
    std::string kind_;
    SourcePosition pos_;
};

class ValidationError : public Error
{
public:
    using Error::Error;
};

class ConflictError : public Error
{
public:
    using Error::Error;
};

class LoadError : public Error
{
public:
    LoadError(std::filesystem::path file, const std::string &detail);
    const std::filesystem::path &file() const noexcept { return file_; }

private:
    std::filesystem::path file_;
};

class EmptyProject : public Error
{
public:
    EmptyProject() : Error("project has no users") {}
};

} // namespace gapquest
