#include "gapquest/errors.hpp"

namespace gapquest {

namespace {

std::string join(const std::vector<std::string> &items)
{
    std::string out;
    for (const auto &item : items) {
        if (!out.empty()) {
            out += "; ";
        }
        out += item;
    }
    return out;
}

} // namespace

ParseError::ParseError(SourcePosition pos, const std::string &reason)
    : Error("malformed XML at line " + std::to_string(pos.line) + ", column " +
            std::to_string(pos.column) + ": " + reason),
      pos_(pos), reason_(reason)
{
}

SchemaError::SchemaError(std::string element, std::string attribute, const std::string &detail)
    : Error("<" + element + "> '" + attribute + "': " +
            (detail.empty() ? std::string("invalid") : detail)),
      element_(std::move(element)), attribute_(std::move(attribute))
{
}

DuplicateMutantError::DuplicateMutantError(std::string key)
    : Error("duplicate mutant " + key), key_(std::move(key))
{
}

ModelError::ModelError(std::vector<std::string> offenders)
    : Error("model invariant violated: " + join(offenders)), offenders_(std::move(offenders))
{
}

IngestError::IngestError(std::string kind, const std::string &detail, SourcePosition pos)
    : Error(kind + ": " + detail), kind_(std::move(kind)), pos_(pos)
{
}

LoadError::LoadError(std::filesystem::path file, const std::string &detail)
    : Error("cannot load " + file.string() + ": " + detail), file_(std::move(file))
{
}

} // namespace gapquest
