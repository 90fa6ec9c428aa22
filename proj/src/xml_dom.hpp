#pragma once

#include "gapquest/errors.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gapquest::xml {

struct Element
{
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Element> children;
    std::string text;
    std::size_t line = 0;

    const std::string *attribute(std::string_view key) const;
    /// Throws SchemaError(name, key) when absent.
    const std::string &required(std::string_view key) const;
    const Element *child(std::string_view child_name) const;
    /// Text of a required child element; SchemaError(name, child_name) when absent.
    const std::string &child_text(std::string_view child_name) const;
};

/// Parses a whole document; ParseError carries expat's line/column.
Element parse(std::string_view document);

std::uint64_t to_uint(std::string_view text, const Element &owner, std::string_view field);

} // namespace gapquest::xml
