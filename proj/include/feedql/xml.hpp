#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace feedql::xml {

struct Attribute {
    std::string ns;
    std::string name;
    std::string value;
};

/// Namespace-resolved DOM node. Elements keep mixed content in document order.
struct Node {
    enum class Kind { element, text };

    Kind kind = Kind::element;
    std::string ns;
    std::string name;
    std::vector<Attribute> attributes;
    std::vector<Node> children;
    std::string text;

    bool is_element(std::string_view ns_uri, std::string_view local) const
    {
        return kind == Kind::element && ns == ns_uri && name == local;
    }

    /// Unqualified attribute lookup; returns nullptr when absent.
    const std::string* attribute(std::string_view local) const;
    const Node* first_child(std::string_view ns_uri, std::string_view local) const;
    bool has_element_children() const;

    /// Concatenated descendant text.
    std::string text_content() const;
};

/// Parses a complete document and returns its root element. Throws
/// Error(MalformedXml) with line/column on failure.
Node parse(std::string_view document);

std::string escape_text(std::string_view text);
std::string escape_attribute(std::string_view text);

/// Minimal streaming writer; the caller is responsible for prefixes and
/// namespace declarations.
class Writer {
public:
    Writer& start(std::string_view qname);
    Writer& attribute(std::string_view qname, std::string_view value);
    Writer& text(std::string_view value);
    Writer& raw(std::string_view markup);
    Writer& end();

    /// start + text + end in one call.
    Writer& element(std::string_view qname, std::string_view value);

    std::string finish();

private:
    void close_start_tag();

    std::string out_;
    std::vector<std::string> open_;
    bool start_pending_ = false;
    bool indent_pending_ = true;
};

/// Serializes a node (element or text) back into markup. Element namespaces
/// are declared as defaults; attribute namespaces get generated prefixes.
std::string to_markup(const Node& node);

} // namespace feedql::xml
