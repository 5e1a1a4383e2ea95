#include "feedql/xml.hpp"

#include "feedql/error.hpp"

#include <expat.h>

#include <map>
#include <memory>

namespace feedql::xml {

const std::string* Node::attribute(std::string_view local) const
{
    for (const auto& a : attributes)
        if (a.ns.empty() && a.name == local)
            return &a.value;
    return nullptr;
}

const Node* Node::first_child(std::string_view ns_uri, std::string_view local) const
{
    for (const auto& c : children)
        if (c.is_element(ns_uri, local))
            return &c;
    return nullptr;
}

bool Node::has_element_children() const
{
    for (const auto& c : children)
        if (c.kind == Kind::element)
            return true;
    return false;
}

std::string Node::text_content() const
{
    if (kind == Kind::text)
        return text;
    std::string out;
    for (const auto& c : children)
        out += c.text_content();
    return out;
}

namespace {

constexpr char kNsSeparator = '\x1f';

void split_name(const XML_Char* raw, std::string& ns, std::string& local)
{
    std::string_view full(raw);
    auto sep = full.find(kNsSeparator);
    if (sep == std::string_view::npos) {
        ns.clear();
        local.assign(full);
    } else {
        ns.assign(full.substr(0, sep));
        local.assign(full.substr(sep + 1));
    }
}

struct Builder {
    Node root;
    std::vector<Node*> stack;
    bool have_root = false;
};

void on_start(void* user, const XML_Char* name, const XML_Char** attrs)
{
    auto* b = static_cast<Builder*>(user);
    Node node;
    split_name(name, node.ns, node.name);
    for (int i = 0; attrs[i]; i += 2) {
        Attribute a;
        split_name(attrs[i], a.ns, a.name);
        a.value = attrs[i + 1];
        node.attributes.push_back(std::move(a));
    }
    if (b->stack.empty()) {
        b->root = std::move(node);
        b->have_root = true;
        b->stack.push_back(&b->root);
    } else {
        auto& parent = *b->stack.back();
        parent.children.push_back(std::move(node));
        b->stack.push_back(&parent.children.back());
    }
}

void on_end(void* user, const XML_Char*)
{
    static_cast<Builder*>(user)->stack.pop_back();
}

void on_text(void* user, const XML_Char* s, int len)
{
    auto* b = static_cast<Builder*>(user);
    if (b->stack.empty())
        return;
    auto& parent = *b->stack.back();
    if (!parent.children.empty() && parent.children.back().kind == Node::Kind::text) {
        parent.children.back().text.append(s, static_cast<std::size_t>(len));
        return;
    }
    Node t;
    t.kind = Node::Kind::text;
    t.text.assign(s, static_cast<std::size_t>(len));
    parent.children.push_back(std::move(t));
}

struct ParserDeleter {
    void operator()(XML_ParserStruct* p) const { XML_ParserFree(p); }
};

} // namespace

Node parse(std::string_view document)
{
    std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreateNS("UTF-8", kNsSeparator));
    if (!parser)
        throw Error(ErrorCode::MalformedXml, "could not allocate parser");
    Builder builder;
    XML_SetUserData(parser.get(), &builder);
    XML_SetElementHandler(parser.get(), on_start, on_end);
    XML_SetCharacterDataHandler(parser.get(), on_text);
    if (XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), XML_TRUE) == XML_STATUS_ERROR) {
        auto line = XML_GetCurrentLineNumber(parser.get());
        auto column = XML_GetCurrentColumnNumber(parser.get());
        throw Error(ErrorCode::MalformedXml,
            std::string(XML_ErrorString(XML_GetErrorCode(parser.get()))) + " at line " + std::to_string(line)
                + ", column " + std::to_string(column));
    }
    if (!builder.have_root)
        throw Error(ErrorCode::MalformedXml, "document has no root element");
    return std::move(builder.root);
}

std::string escape_text(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '\r': out += "&#13;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string escape_attribute(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\n': out += "&#10;"; break;
        case '\r': out += "&#13;"; break;
        case '\t': out += "&#9;"; break;
        default: out += c;
        }
    }
    return out;
}

void Writer::close_start_tag()
{
    if (start_pending_) {
        out_ += '>';
        start_pending_ = false;
    }
}

Writer& Writer::start(std::string_view qname)
{
    close_start_tag();
    if (indent_pending_ && !open_.empty()) {
        out_ += '\n';
        out_.append(open_.size() * 2, ' ');
    }
    out_ += '<';
    out_ += qname;
    open_.emplace_back(qname);
    start_pending_ = true;
    indent_pending_ = true;
    return *this;
}

Writer& Writer::attribute(std::string_view qname, std::string_view value)
{
    out_ += ' ';
    out_ += qname;
    out_ += "=\"";
    out_ += escape_attribute(value);
    out_ += '"';
    return *this;
}

Writer& Writer::text(std::string_view value)
{
    close_start_tag();
    out_ += escape_text(value);
    indent_pending_ = false;
    return *this;
}

Writer& Writer::raw(std::string_view markup)
{
    close_start_tag();
    out_ += markup;
    indent_pending_ = false;
    return *this;
}

Writer& Writer::end()
{
    std::string name = std::move(open_.back());
    open_.pop_back();
    if (start_pending_) {
        out_ += "/>";
        start_pending_ = false;
    } else {
        if (indent_pending_) {
            out_ += '\n';
            out_.append(open_.size() * 2, ' ');
        }
        out_ += "</";
        out_ += name;
        out_ += '>';
    }
    indent_pending_ = true;
    return *this;
}

Writer& Writer::element(std::string_view qname, std::string_view value)
{
    start(qname);
    if (!value.empty())
        text(value);
    indent_pending_ = false;
    end();
    return *this;
}

std::string Writer::finish()
{
    while (!open_.empty())
        end();
    out_ += '\n';
    return std::move(out_);
}

namespace {

void emit_markup(const Node& node, const std::string* default_ns, std::map<std::string, std::string>& prefixes,
    std::string& out)
{
    if (node.kind == Node::Kind::text) {
        out += escape_text(node.text);
        return;
    }
    std::string decls;
    if (!default_ns || *default_ns != node.ns)
        decls += " xmlns=\"" + escape_attribute(node.ns) + "\"";
    auto saved = prefixes;
    std::string attrs;
    for (const auto& a : node.attributes) {
        std::string qname = a.name;
        if (a.ns == "http://www.w3.org/XML/1998/namespace") {
            qname = "xml:" + a.name;
        } else if (!a.ns.empty()) {
            auto it = prefixes.find(a.ns);
            if (it == prefixes.end()) {
                std::string prefix = "n" + std::to_string(prefixes.size());
                it = prefixes.emplace(a.ns, prefix).first;
                decls += " xmlns:" + prefix + "=\"" + escape_attribute(a.ns) + "\"";
            }
            qname = it->second + ":" + a.name;
        }
        attrs += " " + qname + "=\"" + escape_attribute(a.value) + "\"";
    }
    out += "<" + node.name + decls + attrs;
    if (node.children.empty()) {
        out += "/>";
    } else {
        out += ">";
        for (const auto& c : node.children)
            emit_markup(c, &node.ns, prefixes, out);
        out += "</" + node.name + ">";
    }
    prefixes = std::move(saved);
}

} // namespace

std::string to_markup(const Node& node)
{
    std::map<std::string, std::string> prefixes;
    std::string out;
    emit_markup(node, nullptr, prefixes, out);
    return out;
}

} // namespace feedql::xml
