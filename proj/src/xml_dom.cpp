#include "xml_dom.hpp"

#include <expat.h>

#include <charconv>
#include <climits>

namespace gapquest::xml {

namespace {

struct BuildState
{
    std::vector<Element *> stack;
    Element root;
    bool have_root = false;
    XML_Parser parser = nullptr;
};

void XMLCALL on_start(void *user, const XML_Char *name, const XML_Char **attrs)
{
    auto *st = static_cast<BuildState *>(user);
    Element el;
    el.name = name;
    el.line = XML_GetCurrentLineNumber(st->parser);
    for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
        el.attributes.emplace_back(attrs[i], attrs[i + 1]);
    }
    if (st->stack.empty()) {
        st->root = std::move(el);
        st->have_root = true;
        st->stack.push_back(&st->root);
    } else {
        auto &kids = st->stack.back()->children;
        kids.push_back(std::move(el));
        st->stack.push_back(&kids.back());
    }
}

void XMLCALL on_end(void *user, const XML_Char *)
{
    static_cast<BuildState *>(user)->stack.pop_back();
}

void XMLCALL on_text(void *user, const XML_Char *s, int len)
{
    auto *st = static_cast<BuildState *>(user);
    if (!st->stack.empty()) {
        st->stack.back()->text.append(s, static_cast<std::size_t>(len));
    }
}

struct ParserDeleter
{
    void operator()(XML_ParserStruct *p) const { XML_ParserFree(p); }
};

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\n' || s.front() == '\t' ||
                          s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\n' || s.back() == '\t' ||
                          s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

} // namespace

const std::string *Element::attribute(std::string_view key) const
{
    for (const auto &[k, v] : attributes) {
        if (k == key) {
            return &v;
        }
    }
    return nullptr;
}

const std::string &Element::required(std::string_view key) const
{
    if (const auto *v = attribute(key)) {
        return *v;
    }
    throw SchemaError(name, std::string(key), "missing required attribute");
}

const Element *Element::child(std::string_view child_name) const
{
    for (const auto &c : children) {
        if (c.name == child_name) {
            return &c;
        }
    }
    return nullptr;
}

const std::string &Element::child_text(std::string_view child_name) const
{
    if (const auto *c = child(child_name)) {
        return c->text;
    }
    throw SchemaError(name, std::string(child_name), "missing required child element");
}

Element parse(std::string_view document)
{
    std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreate("UTF-8"));
    if (!parser) {
        throw std::bad_alloc();
    }
    BuildState st;
    st.parser = parser.get();
    XML_SetUserData(parser.get(), &st);
    XML_SetElementHandler(parser.get(), on_start, on_end);
    XML_SetCharacterDataHandler(parser.get(), on_text);

    if (document.size() > static_cast<std::size_t>(INT_MAX)) {
        throw ParseError({}, "document too large");
    }
    if (XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), XML_TRUE) ==
        XML_STATUS_ERROR) {
        SourcePosition pos{XML_GetCurrentLineNumber(parser.get()),
                           XML_GetCurrentColumnNumber(parser.get()) + 1,
                           static_cast<std::size_t>(XML_GetCurrentByteIndex(parser.get()))};
        throw ParseError(pos, XML_ErrorString(XML_GetErrorCode(parser.get())));
    }
    if (!st.have_root) {
        throw ParseError({}, "no root element");
    }
    return std::move(st.root);
}

std::uint64_t to_uint(std::string_view text, const Element &owner, std::string_view field)
{
    text = trim(text);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw SchemaError(owner.name, std::string(field),
                          "expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return value;
}

} // namespace gapquest::xml
