// SPDX-License-Identifier: Apache-2.0
#include "gep/html_condenser.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <string>

#include <json.hpp>

#include "gep/types.hpp"

namespace gep {

std::size_t estimate_tokens(std::string_view text) {
    return (text.size() + 3) / 4;
}

namespace {

// Tags whose boundaries split visible text into separate fragments.
const std::set<std::string>& block_tags() {
    static const std::set<std::string> tags = {
        "address", "article", "aside",  "blockquote", "br",     "dd",
        "div",     "dl",      "dt",     "fieldset",   "figcaption",
        "figure",  "footer",  "form",   "h1",         "h2",     "h3",
        "h4",      "h5",      "h6",     "header",     "hr",     "li",
        "main",    "nav",     "ol",     "p",          "pre",    "section",
        "table",   "td",      "th",     "tr",         "ul",
    };
    return tags;
}

bool ieq(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower((unsigned char)x) == std::tolower((unsigned char)y);
           });
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

// Decodes the common named/numeric entities. "&lt;" is left encoded so that
// extracted fragments can never re-form a tag.
std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] == '<') {
            // literal '<' (e.g. inside attribute values) is escaped so a
            // following character can never complete a tag in the output
            out.append("&lt;");
            ++i;
            continue;
        }
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        auto semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back(s[i++]);
            continue;
        }
        auto ent = s.substr(i + 1, semi - i - 1);
        if (ent == "amp") out.push_back('&');
        else if (ent == "quot") out.push_back('"');
        else if (ent == "apos" || ent == "#39") out.push_back('\'');
        else if (ent == "gt") out.push_back('>');
        else if (ent == "nbsp") out.push_back(' ');
        else if (ent == "lt" || ent == "#60") { out.append("&lt;"); }
        else if (!ent.empty() && ent[0] == '#') {
            long code = 0;
            bool ok = true;
            for (char c : ent.substr(1)) {
                if (!std::isdigit((unsigned char)c)) { ok = false; break; }
                code = code * 10 + (c - '0');
            }
            if (ok && code >= 32 && code < 127 && code != '<')
                out.push_back(static_cast<char>(code));
            else
                out.push_back(' ');
        } else {
            // unknown entity, keep literally
            out.append(s.substr(i, semi - i + 1));
        }
        i = semi + 1;
    }
    return out;
}

struct Attr {
    std::string name;
    std::string value;
};

struct Tag {
    std::string name;      // lowercase
    bool closing = false;
    std::vector<Attr> attrs;
    std::size_t end = 0;   // index just past '>'
};

std::string attr_value(const Tag& t, std::string_view name) {
    for (const auto& a : t.attrs)
        if (a.name == name) return a.value;
    return {};
}

// Parses the tag starting at pos (s[pos] == '<'); lenient about everything.
Tag parse_tag(std::string_view s, std::size_t pos) {
    Tag tag;
    std::size_t i = pos + 1;
    if (i < s.size() && s[i] == '/') {
        tag.closing = true;
        ++i;
    }
    while (i < s.size() && (std::isalnum((unsigned char)s[i]) || s[i] == '-' || s[i] == ':'))
        tag.name.push_back(std::tolower((unsigned char)s[i++]));
    while (i < s.size() && s[i] != '>') {
        if (std::isspace((unsigned char)s[i]) || s[i] == '/') {
            ++i;
            continue;
        }
        Attr a;
        while (i < s.size() && s[i] != '=' && s[i] != '>' && s[i] != '/' &&
               !std::isspace((unsigned char)s[i]))
            a.name.push_back(std::tolower((unsigned char)s[i++]));
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
        if (i < s.size() && s[i] == '=') {
            ++i;
            while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
            if (i < s.size() && (s[i] == '"' || s[i] == '\'')) {
                char q = s[i++];
                auto close = s.find(q, i);
                if (close == std::string_view::npos) close = s.size();
                a.value = std::string(s.substr(i, close - i));
                i = std::min(close + 1, s.size());
            } else {
                while (i < s.size() && s[i] != '>' && !std::isspace((unsigned char)s[i]))
                    a.value.push_back(s[i++]);
            }
        }
        if (!a.name.empty()) tag.attrs.push_back(std::move(a));
    }
    tag.end = i < s.size() ? i + 1 : s.size();
    return tag;
}

// Raw text until the matching close tag (case-insensitive), e.g. </script>.
std::pair<std::string, std::size_t> raw_until_close(std::string_view s, std::size_t pos,
                                                    std::string_view tag_name) {
    std::string close = "</" + std::string(tag_name);
    std::size_t i = pos;
    while (i < s.size()) {
        auto lt = s.find('<', i);
        if (lt == std::string_view::npos) break;
        if (lt + close.size() <= s.size() && ieq(s.substr(lt, close.size()), close)) {
            auto gt = s.find('>', lt);
            return {std::string(s.substr(pos, lt - pos)),
                    gt == std::string_view::npos ? s.size() : gt + 1};
        }
        i = lt + 1;
    }
    return {std::string(s.substr(pos)), s.size()};
}

std::string clean_fragment(std::string_view raw) {
    return collapse_spaces(decode_entities(raw));
}

std::string input_render(const CondensedPage::InputField& f) {
    std::string s;
    for (const auto* part : {&f.name, &f.placeholder, &f.type}) {
        if (part->empty()) continue;
        if (!s.empty()) s.push_back(' ');
        s += *part;
    }
    return s;
}

} // namespace

CondensedPage condense(std::string_view html, std::size_t budget) {
    CondensedPage page;
    std::string text_acc;
    auto flush = [&] {
        auto frag = collapse_spaces(text_acc);
        if (!frag.empty()) page.visible_text.push_back(std::move(frag));
        text_acc.clear();
    };

    std::size_t i = 0;
    while (i < html.size()) {
        char c = html[i];
        if (c != '<') {
            auto lt = html.find('<', i);
            if (lt == std::string_view::npos) lt = html.size();
            text_acc += decode_entities(html.substr(i, lt - i));
            i = lt;
            continue;
        }
        // '<' not opening markup stays as text, escaped so adjacent decoded
        // entities (e.g. "<&#65;") can never re-form a tag
        if (i + 1 >= html.size() ||
            (!std::isalpha((unsigned char)html[i + 1]) && html[i + 1] != '/' && html[i + 1] != '!')) {
            text_acc.append("&lt;");
            ++i;
            continue;
        }
        if (html.compare(i, 4, "<!--") == 0) {
            auto end = html.find("-->", i + 4);
            i = end == std::string_view::npos ? html.size() : end + 3;
            continue;
        }
        if (html[i + 1] == '!') { // doctype etc.
            auto gt = html.find('>', i);
            i = gt == std::string_view::npos ? html.size() : gt + 1;
            continue;
        }
        Tag tag = parse_tag(html, i);
        i = tag.end;
        if (tag.name.empty()) continue;

        if (!tag.closing && (tag.name == "script" || tag.name == "style" ||
                             tag.name == "template" || tag.name == "svg")) {
            auto [_, next] = raw_until_close(html, i, tag.name);
            i = next;
            text_acc.push_back(' ');
            continue;
        }
        if (!tag.closing && tag.name == "title") {
            auto [raw, next] = raw_until_close(html, i, "title");
            i = next;
            auto t = clean_fragment(raw);
            if (!t.empty() && !page.title) page.title = t;
            continue;
        }
        if (!tag.closing && tag.name == "input") {
            auto type = to_lower(attr_value(tag, "type"));
            auto value = attr_value(tag, "value");
            if ((type == "submit" || type == "button") && !value.empty()) {
                auto label = clean_fragment(value);
                if (!label.empty()) page.buttons.push_back(std::move(label));
            } else if (type != "hidden") {
                CondensedPage::InputField f{
                    clean_fragment(attr_value(tag, "name")),
                    clean_fragment(attr_value(tag, "placeholder")),
                    type,
                };
                if (!f.name.empty() || !f.placeholder.empty() || !f.type.empty())
                    page.inputs.push_back(std::move(f));
            }
            flush();
            continue;
        }
        if (!tag.closing && tag.name == "textarea") {
            auto [_, next] = raw_until_close(html, i, "textarea");
            i = next;
            CondensedPage::InputField f{
                clean_fragment(attr_value(tag, "name")),
                clean_fragment(attr_value(tag, "placeholder")),
                "textarea",
            };
            if (!f.name.empty() || !f.placeholder.empty()) page.inputs.push_back(std::move(f));
            flush();
            continue;
        }
        if (!tag.closing && tag.name == "button") {
            // inner text may contain inline markup; strip it
            std::string label;
            while (i < html.size()) {
                auto lt = html.find('<', i);
                if (lt == std::string_view::npos) {
                    label += html.substr(i);
                    i = html.size();
                    break;
                }
                label += html.substr(i, lt - i);
                if (ieq(html.substr(lt, 8), "</button")) {
                    auto gt = html.find('>', lt);
                    i = gt == std::string_view::npos ? html.size() : gt + 1;
                    break;
                }
                Tag inner = parse_tag(html, lt);
                label.push_back(' ');
                i = inner.end;
            }
            auto cleaned = clean_fragment(label);
            if (!cleaned.empty()) page.buttons.push_back(std::move(cleaned));
            flush();
            continue;
        }
        if (block_tags().count(tag.name)) {
            flush();
        } else {
            text_acc.push_back(' '); // inline boundary keeps words apart
        }
    }
    flush();

    // Enforce the budget: drop visible text from the tail, then inputs,
    // then buttons; the title survives (clamped only as a last resort).
    auto total = [&] {
        std::size_t t = page.title ? estimate_tokens(*page.title) : 0;
        for (const auto& f : page.inputs) t += estimate_tokens(input_render(f));
        for (const auto& b : page.buttons) t += estimate_tokens(b);
        for (const auto& v : page.visible_text) t += estimate_tokens(v);
        return t;
    };
    std::size_t est = total();
    auto shrink = [&](auto& vec, auto cost) {
        while (est > budget && !vec.empty()) {
            est -= cost(vec.back());
            vec.pop_back();
        }
    };
    shrink(page.visible_text, [](const std::string& s) { return estimate_tokens(s); });
    shrink(page.inputs,
           [](const CondensedPage::InputField& f) { return estimate_tokens(input_render(f)); });
    shrink(page.buttons, [](const std::string& s) { return estimate_tokens(s); });
    if (est > budget && page.title) {
        page.title->resize(std::min(page.title->size(), budget * 4));
        est = total();
    }
    page.token_estimate = est;
    return page;
}

std::string CondensedPage::render() const {
    nlohmann::json j;
    j["title"] = title ? nlohmann::json(*title) : nlohmann::json(nullptr);
    auto& ins = j["inputs"] = nlohmann::json::array();
    for (const auto& f : inputs)
        ins.push_back({{"name", f.name}, {"placeholder", f.placeholder}, {"type", f.type}});
    j["buttons"] = buttons;
    j["text"] = visible_text;
    return j.dump();
}

} // namespace gep
